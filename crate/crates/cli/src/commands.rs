//! One function per subcommand. Each returns the files it wrote.

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use heatpen_core::presets::{self, MeshPair};
use heatpen_core::{
    asymptotic_approx, comparative_error, convergence_study, epsilon_sweep, penalty_exact, remainder_norms,
    solve, BoundaryData, BoundaryMode, Domain, ErrorCurve, PenaltyParams, PolarGrid, Point, ProblemSpec,
    Procedure, RateFit, SpaceFn, SquareGrid, TimeFn, TimeGrid, Trajectory,
};

use crate::config::{Experiment, ModeChoice, RunConfig};
use crate::csv::{num, CsvTable};
use crate::error::{CliError, Result};

const FIELD_TIMES: [f64; 3] = [0.0, 0.5, 1.0];
const SECTION_TIMES: [f64; 6] = [0.005, 0.01, 0.02, 0.05, 0.1, 0.2];
const SQUARE_SECTION_Y: f64 = 0.6;

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Self {
        Self { dir, written: Vec::new() }
    }

    fn write(&mut self, table: &CsvTable, name: &str) -> Result<()> {
        self.written.push(table.write(self.dir, name)?);
        Ok(())
    }
}

/// Applies the configured physics (ν, u0, g, horizon, stride) to a preset.
fn customize(cfg: &RunConfig, mut spec: ProblemSpec) -> Result<ProblemSpec> {
    spec.nu = cfg.nu;
    spec.time = TimeGrid::new(spec.time.n_steps(), cfg.horizon)?;
    if let Some(u0) = &cfg.initial {
        spec.initial = u0.clone();
    }
    if let Some(g) = &cfg.boundary {
        spec.boundary = match spec.domain {
            Domain::Interval(_) => BoundaryData::Endpoints { left: g.clone(), right: g.clone() },
            _ => BoundaryData::Uniform(g.clone()),
        };
    }
    if let Some(stride) = cfg.stride {
        spec = spec.with_stride(stride);
    }
    Ok(spec)
}

fn customize_pair(cfg: &RunConfig, pair: MeshPair) -> Result<MeshPair> {
    Ok(MeshPair::new(customize(cfg, pair.coarse)?, customize(cfg, pair.fine)?))
}

fn modes(cfg: &RunConfig, defaults: &[ModeChoice], allow_corrector: bool) -> Result<Vec<BoundaryMode>> {
    let chosen: Vec<ModeChoice> = cfg.mode.map_or_else(|| defaults.to_vec(), |m| vec![m]);
    let modes: Vec<BoundaryMode> = chosen.into_iter().map(|m| cfg.mode_for(m)).collect();
    if !allow_corrector && modes.iter().any(|m| matches!(m, BoundaryMode::Corrector(_))) {
        return Err(CliError::Config("corrector modes are only available for the oned experiment".into()));
    }
    Ok(modes)
}

struct PairRun {
    mode: BoundaryMode,
    coarse: Trajectory,
    curve: ErrorCurve,
}

fn run_pair(pair: &MeshPair, mode: BoundaryMode) -> Result<PairRun> {
    let p = pair.with_mode(mode);
    let coarse = solve(&p.coarse)?;
    let fine = solve(&p.fine)?;
    let curve = comparative_error(&coarse, &fine)?;
    Ok(PairRun { mode, coarse, curve })
}

fn curve_table(curve: &ErrorCurve) -> CsvTable {
    let mut t = CsvTable::new(&["t", "max_error"]);
    for (&time, &e) in curve.times.iter().zip(&curve.errors) {
        t.push_numbers(&[time, e]);
    }
    t
}

fn rate_table(fit: &RateFit) -> CsvTable {
    let mut t = CsvTable::new(&["h", "error", "slope"]);
    for (&h, &e) in fit.h.iter().zip(&fit.errors) {
        t.push_numbers(&[h, e, fit.slope]);
    }
    t
}

fn sweep_table(rows: &[heatpen_core::SweepRow]) -> CsvTable {
    let mut t = CsvTable::new(&["epsilon", "initial_error", "final_error", "warning"]);
    for r in rows {
        t.push(vec![num(r.epsilon), num(r.initial_error), num(r.final_error), u8::from(r.warning).to_string()]);
    }
    t
}

fn field_table(traj: &Trajectory, t: f64) -> CsvTable {
    let snap = traj.nearest(t);
    let values = snap.field.values();
    match snap.field.domain() {
        Domain::Interval(g) => {
            let mut table = CsvTable::new(&["x", "u"]);
            for (i, &u) in values.iter().enumerate() {
                table.push_numbers(&[g.x(i), u]);
            }
            table
        }
        Domain::Square(g) => {
            let mut table = CsvTable::new(&["x", "y", "u"]);
            for j in 0..=g.ny() {
                for i in 0..=g.nx() {
                    let p = g.point(i, j);
                    table.push_numbers(&[p.x, p.y, values[g.index(i, j)]]);
                }
            }
            table
        }
        Domain::Disk(g) => {
            let mut table = CsvTable::new(&["r", "theta", "u"]);
            table.push_numbers(&[0.0, 0.0, values[PolarGrid::ORIGIN]]);
            for i in 1..=g.nr() {
                for k in 0..g.ntheta() {
                    table.push_numbers(&[g.radius(i), g.theta(k), values[g.index(i, k)]]);
                }
            }
            table
        }
    }
}

fn time_label(t: f64) -> String {
    format!("t{t}")
}

fn section_steps(traj: &Trajectory) -> Vec<usize> {
    let mut steps: Vec<usize> = std::iter::once(0)
        .chain(traj.snapshots.get(1).map(|s| s.step))
        .chain(SECTION_TIMES.iter().filter(|&&t| t <= traj.spec.time.horizon()).map(|&t| traj.nearest(t).step))
        .collect();
    steps.dedup();
    steps
}

/// Profile along `y = y0`, interpolated linearly between grid rows.
fn square_section(traj: &Trajectory, grid: SquareGrid, y0: f64) -> CsvTable {
    let pos = y0 * grid.ny() as f64;
    let j0 = (pos.floor() as usize).min(grid.ny() - 1);
    let w = pos - j0 as f64;
    let mut table = CsvTable::new(&["t", "x", "u"]);
    for step in section_steps(traj) {
        let snap = traj.snapshot_at_step(step).expect("section steps come from the trajectory");
        let v = snap.field.values();
        for i in 0..=grid.nx() {
            let u = (1.0 - w) * v[grid.index(i, j0)] + w * v[grid.index(i, j0 + 1)];
            table.push_numbers(&[snap.time, grid.point(i, 0).x, u]);
        }
    }
    table
}

/// Profile along the ray `θ = θ0`, interpolated linearly in angle.
fn disk_section(traj: &Trajectory, grid: PolarGrid, theta0: f64) -> CsvTable {
    let pos = theta0 / grid.dtheta();
    let k0 = pos.floor() as usize;
    let w = pos - k0 as f64;
    let mut table = CsvTable::new(&["t", "r", "u"]);
    for step in section_steps(traj) {
        let snap = traj.snapshot_at_step(step).expect("section steps come from the trajectory");
        let v = snap.field.values();
        table.push_numbers(&[snap.time, 0.0, v[PolarGrid::ORIGIN]]);
        for i in 1..=grid.nr() {
            let u = (1.0 - w) * v[grid.index(i, k0)] + w * v[grid.index(i, k0 + 1)];
            table.push_numbers(&[snap.time, grid.radius(i), u]);
        }
    }
    table
}

fn write_rates(cfg: &RunConfig, out: &mut Writer, prefix: &str, chain: &[MeshPair], modes: &[BoundaryMode]) -> Result<()> {
    if !cfg.rates {
        return Ok(());
    }
    for &mode in modes {
        let pairs: Vec<(ProblemSpec, ProblemSpec)> = chain
            .iter()
            .map(|p| customize_pair(cfg, p.clone()).map(|p| p.with_mode(mode)).map(|p| (p.coarse, p.fine)))
            .collect::<Result<_>>()?;
        let study = convergence_study(&pairs)?;
        log::info!("{prefix} {}: initial slope {:.3}, final slope {:.3}", mode.label(), study.initial.slope, study.last.slope);
        out.write(&rate_table(&study.initial), &format!("{prefix}_rate_{}_initial.csv", mode.label()))?;
        out.write(&rate_table(&study.last), &format!("{prefix}_rate_{}_final.csv", mode.label()))?;
    }
    Ok(())
}

fn write_runs(out: &mut Writer, prefix: &str, runs: &[PairRun]) -> Result<()> {
    for run in runs {
        let label = run.mode.label();
        out.write(&curve_table(&run.curve), &format!("{prefix}_error_{label}.csv"))?;
        for t in FIELD_TIMES.iter().filter(|&&t| t <= run.coarse.spec.time.horizon()) {
            out.write(&field_table(&run.coarse, *t), &format!("{prefix}_field_{label}_{}.csv", time_label(*t)))?;
        }
    }
    Ok(())
}

pub fn square(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let n = cfg.nx.unwrap_or(24);
    let steps = cfg.steps.unwrap_or(1000);
    let pair = customize_pair(cfg, presets::square_pair(n, steps)?)?;
    let modes = modes(cfg, &[ModeChoice::Direct, ModeChoice::Penalty], false)?;
    let runs: Vec<PairRun> = modes.iter().map(|&m| run_pair(&pair, m)).collect::<Result<_>>()?;

    let mut out = Writer::new(dir);
    write_runs(&mut out, "square", &runs)?;
    for run in &runs {
        if let Domain::Square(grid) = run.coarse.spec.domain {
            out.write(&square_section(&run.coarse, grid, SQUARE_SECTION_Y), &format!("square_section_{}.csv", run.mode.label()))?;
        }
    }
    let chain: Vec<MeshPair> =
        (0..3).map(|i| presets::square_pair(n << i, steps * 4usize.pow(i))).collect::<heatpen_core::Result<_>>()?;
    write_rates(cfg, &mut out, "square", &chain, &modes)?;
    Ok(out.written)
}

pub fn disk(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let nr = cfg.nx.unwrap_or(10);
    let ntheta = cfg.ntheta.unwrap_or_else(|| PolarGrid::ntheta_for_spacing(0.1));
    let steps = cfg.steps.unwrap_or(5000);
    let base = presets::disk_pair(nr, ntheta, steps)?;
    let cfg_stride = RunConfig { stride: cfg.stride.or(Some(5)), ..cfg.clone() };
    let pair = customize_pair(&cfg_stride, base)?;
    let modes = modes(cfg, &[ModeChoice::Direct, ModeChoice::Penalty], false)?;
    let runs: Vec<PairRun> = modes.iter().map(|&m| run_pair(&pair, m)).collect::<Result<_>>()?;

    let mut out = Writer::new(dir);
    write_runs(&mut out, "disk", &runs)?;
    for run in &runs {
        if let Domain::Disk(grid) = run.coarse.spec.domain {
            out.write(&disk_section(&run.coarse, grid, FRAC_PI_4), &format!("disk_section_{}.csv", run.mode.label()))?;
        }
    }
    let epsilons = cfg.epsilons.clone().unwrap_or_else(|| presets::SWEEP_EPSILONS.to_vec());
    out.write(&sweep_table(&epsilon_sweep(&pair.coarse, &pair.fine, &epsilons)?), "disk_sweep.csv")?;
    write_rates(cfg, &mut out, "disk", &presets::disk_chain()?, &modes)?;
    Ok(out.written)
}

pub fn oned(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let n = cfg.nx.unwrap_or(24);
    let steps = cfg.steps.unwrap_or(1000);
    let pair = customize_pair(cfg, presets::interval_pair(n, steps)?)?;
    let defaults = [
        ModeChoice::Direct,
        ModeChoice::Penalty,
        ModeChoice::Procedure(Procedure::P1),
        ModeChoice::Procedure(Procedure::P2),
    ];
    let modes = modes(cfg, &defaults, true)?;
    let runs: Vec<PairRun> = modes.iter().map(|&m| run_pair(&pair, m)).collect::<Result<_>>()?;

    let mut out = Writer::new(dir);
    write_runs(&mut out, "oned", &runs)?;
    let mut peaks = CsvTable::new(&["mode", "peak_t", "peak_error", "corner_peak_t", "corner_peak_error"]);
    for run in &runs {
        let (t, e) = run.curve.peak();
        let (ct, ce) = run.curve.peak_until(cfg.epsilon);
        peaks.push(vec![run.mode.label(), num(t), num(e), num(ct), num(ce)]);
    }
    out.write(&peaks, "oned_peaks.csv")?;
    let epsilons = cfg.epsilons.clone().unwrap_or_else(|| presets::SWEEP_EPSILONS.to_vec());
    out.write(&sweep_table(&epsilon_sweep(&pair.coarse, &pair.fine, &epsilons)?), "oned_sweep.csv")?;
    Ok(out.written)
}

pub fn sweep_epsilon(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let (name, pair) = match cfg.experiment {
        Experiment::Square => ("square", presets::square_pair(cfg.nx.unwrap_or(24), cfg.steps.unwrap_or(1000))?),
        Experiment::Disk => {
            let ntheta = cfg.ntheta.unwrap_or_else(|| PolarGrid::ntheta_for_spacing(0.1));
            let pair = presets::disk_pair(cfg.nx.unwrap_or(10), ntheta, cfg.steps.unwrap_or(5000))?;
            ("disk", pair.with_stride(cfg.stride.unwrap_or(5)))
        }
        Experiment::Oned => ("oned", presets::interval_pair(cfg.nx.unwrap_or(24), cfg.steps.unwrap_or(1000))?),
    };
    let pair = customize_pair(cfg, pair)?;
    let epsilons = cfg.epsilons.clone().unwrap_or_else(|| presets::SWEEP_EPSILONS.to_vec());
    let rows = epsilon_sweep(&pair.coarse, &pair.fine, &epsilons)?;
    let mut out = Writer::new(dir);
    out.write(&sweep_table(&rows), &format!("sweep_{name}.csv"))?;
    Ok(out.written)
}

pub fn boundary_layer(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let g = cfg.boundary.clone().unwrap_or(TimeFn::SinT);
    let u0 = cfg.initial.clone().unwrap_or(SpaceFn::SinePatch);
    let k0 = u0.eval(Point::new(cfg.point.0, cfg.point.1));
    let epsilons = cfg.epsilons.clone().unwrap_or_else(|| vec![0.1, 0.01]);
    let time = TimeGrid::new(cfg.trace_steps, cfg.horizon)?;

    let mut out = Writer::new(dir);
    let mut remainder = CsvTable::new(&["epsilon", "order", "l2_norm", "sup_norm"]);
    for &eps in &epsilons {
        let params = PenaltyParams::new(eps, k0, g.clone())?;
        let mut trace = CsvTable::new(&["t", "g", "k_eps", "approx_n0", "approx_n1"]);
        for m in 0..=time.n_steps() {
            let t = time.time(m);
            trace.push_numbers(&[
                t,
                g.eval(t),
                penalty_exact(&params, t)?,
                asymptotic_approx(0, &params, t)?,
                asymptotic_approx(1, &params, t)?,
            ]);
        }
        out.write(&trace, &format!("boundary_layer_trace_eps{eps}.csv"))?;
        for n in 0..=1 {
            let r = remainder_norms(n, &params, &time)?;
            remainder.push(vec![num(r.epsilon), n.to_string(), num(r.l2), num(r.sup)]);
        }
    }
    out.write(&remainder, "boundary_layer_remainder.csv")?;
    Ok(out.written)
}
