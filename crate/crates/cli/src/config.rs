//! `key = value` run configuration with `#` comments.

use std::fs;
use std::path::{Path, PathBuf};

use heatpen_core::{BoundaryMode, Procedure, SpaceFn, TimeFn};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Square,
    Disk,
    Oned,
}

impl Experiment {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "square" => Some(Self::Square),
            "disk" => Some(Self::Disk),
            "oned" | "1d" => Some(Self::Oned),
            _ => None,
        }
    }
}

/// Mode names accepted in configs and by `--mode`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    Direct,
    Penalty,
    /// Procedure taken from the `procedure` key.
    Corrector,
    Procedure(Procedure),
}

impl ModeChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "direct" => Some(Self::Direct),
            "penalty" => Some(Self::Penalty),
            "corrector" => Some(Self::Corrector),
            "corrector0" => Some(Self::Procedure(Procedure::P0)),
            "corrector1" => Some(Self::Procedure(Procedure::P1)),
            "corrector2" => Some(Self::Procedure(Procedure::P2)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub nu: f64,
    pub epsilon: f64,
    pub mode: Option<ModeChoice>,
    pub procedure: Procedure,
    pub nx: Option<usize>,
    pub ntheta: Option<usize>,
    pub steps: Option<usize>,
    pub stride: Option<usize>,
    pub horizon: f64,
    pub initial: Option<SpaceFn>,
    pub boundary: Option<TimeFn>,
    pub epsilons: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub rates: bool,
    pub point: (f64, f64),
    pub experiment: Experiment,
    pub trace_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            nu: heatpen_core::presets::NU,
            epsilon: heatpen_core::presets::EPSILON,
            mode: None,
            procedure: Procedure::P1,
            nx: None,
            ntheta: None,
            steps: None,
            stride: None,
            horizon: 1.0,
            initial: None,
            boundary: None,
            epsilons: None,
            out: None,
            rates: true,
            point: (0.0, 0.0),
            experiment: Experiment::Square,
            trace_steps: 1000,
        }
    }
}

pub const KEYS: [&str; 17] = [
    "nu",
    "epsilon",
    "mode",
    "procedure",
    "nx",
    "ntheta",
    "steps",
    "stride",
    "horizon",
    "initial",
    "boundary",
    "epsilons",
    "out",
    "rates",
    "point",
    "experiment",
    "trace_steps",
];

fn positive_f64(v: &str) -> std::result::Result<f64, String> {
    match v.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be positive, got {x}")),
        Err(_) => Err(format!("not a number: {v:?}")),
    }
}

fn positive_usize(v: &str) -> std::result::Result<usize, String> {
    match v.parse::<usize>() {
        Ok(0) => Err("must be positive, got 0".into()),
        Ok(x) => Ok(x),
        Err(_) => Err(format!("not a positive integer: {v:?}")),
    }
}

fn list_f64(v: &str) -> std::result::Result<Vec<f64>, String> {
    let items: Vec<f64> = v.split(',').map(|s| positive_f64(s.trim())).collect::<std::result::Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CliError::ConfigLine { path: origin.to_path_buf(), line: idx + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
            cfg.set(key.trim(), value.trim()).map_err(err)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let ctx = |e: String| format!("{key}: {e}");
        match key {
            "nu" => self.nu = positive_f64(value).map_err(ctx)?,
            "epsilon" => self.epsilon = positive_f64(value).map_err(ctx)?,
            "mode" => {
                self.mode = Some(ModeChoice::parse(value).ok_or_else(|| {
                    ctx(format!("unknown mode {value:?} (direct, penalty, corrector, corrector0, corrector1, corrector2)"))
                })?)
            }
            "procedure" => {
                self.procedure = value
                    .parse::<u32>()
                    .ok()
                    .and_then(Procedure::from_index)
                    .ok_or_else(|| ctx(format!("must be 0, 1 or 2, got {value:?}")))?
            }
            "nx" => self.nx = Some(positive_usize(value).map_err(ctx)?),
            "ntheta" => self.ntheta = Some(positive_usize(value).map_err(ctx)?),
            "steps" => self.steps = Some(positive_usize(value).map_err(ctx)?),
            "stride" => self.stride = Some(positive_usize(value).map_err(ctx)?),
            "horizon" => self.horizon = positive_f64(value).map_err(ctx)?,
            "initial" => {
                self.initial = Some(SpaceFn::from_name(value).ok_or_else(|| {
                    ctx(format!("unknown function {value:?} (known: {})", SpaceFn::NAMES.join(", ")))
                })?)
            }
            "boundary" => {
                self.boundary = Some(TimeFn::from_name(value).ok_or_else(|| {
                    ctx(format!("unknown function {value:?} (known: {})", TimeFn::NAMES.join(", ")))
                })?)
            }
            "epsilons" => self.epsilons = Some(list_f64(value).map_err(ctx)?),
            "out" => {
                if value.is_empty() {
                    return Err(ctx("empty path".into()));
                }
                self.out = Some(PathBuf::from(value));
            }
            "rates" => {
                self.rates = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return Err(ctx(format!("expected true or false, got {value:?}"))),
                }
            }
            "point" => {
                let coords: Vec<&str> = value.split(',').map(str::trim).collect();
                let parsed: Vec<f64> = coords.iter().filter_map(|c| c.parse().ok()).collect();
                match parsed[..] {
                    [x, y] if coords.len() == 2 => self.point = (x, y),
                    _ => return Err(ctx(format!("expected `x, y`, got {value:?}"))),
                }
            }
            "experiment" => {
                self.experiment = Experiment::parse(value)
                    .ok_or_else(|| ctx(format!("unknown experiment {value:?} (square, disk, oned)")))?
            }
            "trace_steps" => self.trace_steps = positive_usize(value).map_err(ctx)?,
            _ => return Err(format!("unknown key {key:?} (known: {})", KEYS.join(", "))),
        }
        Ok(())
    }

    pub fn mode_for(&self, choice: ModeChoice) -> BoundaryMode {
        match choice {
            ModeChoice::Direct => BoundaryMode::Direct,
            ModeChoice::Penalty => BoundaryMode::Penalty { epsilon: self.epsilon },
            ModeChoice::Corrector => BoundaryMode::Corrector(self.procedure),
            ModeChoice::Procedure(p) => BoundaryMode::Corrector(p),
        }
    }

    /// Output directory: `--out`, then `SOLVER_OUT_DIR`, then the config,
    /// then `./out`.
    pub fn out_dir(&self, flag: Option<&Path>, env: Option<&str>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
            .or_else(|| self.out.clone())
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}
