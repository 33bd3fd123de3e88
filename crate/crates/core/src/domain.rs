//! Grids, time discretization and problem descriptions shared by the solvers.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::functions::{Forcing, Point, SpaceFn, TimeFn};
use crate::solver::ScalarField;

/// Uniform mesh of `[0, 1]` with `n_cells + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval1D {
    n_cells: usize,
}

impl Interval1D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::InvalidSpec(format!("interval needs at least 2 cells, got {n_cells}")));
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_cells {
            1.0
        } else {
            i as f64 * self.dx()
        }
    }

    pub fn node_count(&self) -> usize {
        self.n_cells + 1
    }
}

/// Tensor mesh of the unit square, stored row-major: `index = j·(nx+1) + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquareGrid {
    nx: usize,
    ny: usize,
}

impl SquareGrid {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidSpec(format!("square grid needs nx, ny >= 2, got {nx}x{ny}")));
        }
        Ok(Self { nx, ny })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        1.0 / self.ny as f64
    }

    pub fn stride(&self) -> usize {
        self.nx + 1
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.stride() + i
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        let coord = |k: usize, n: usize| if k == n { 1.0 } else { k as f64 / n as f64 };
        Point::new(coord(i, self.nx), coord(j, self.ny))
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }
}

/// Polar mesh of the unit disk.
///
/// Node 0 is the origin, shared by every angle. Ring `i ≥ 1` at radius `i·Δr`
/// holds `ntheta` nodes at angles `k·Δθ`, stored at `1 + (i-1)·ntheta + k`.
/// Angular indices wrap modulo `ntheta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarGrid {
    nr: usize,
    ntheta: usize,
}

impl PolarGrid {
    pub const ORIGIN: usize = 0;

    pub fn new(nr: usize, ntheta: usize) -> Result<Self> {
        if nr < 2 || ntheta < 4 {
            return Err(Error::InvalidSpec(format!(
                "polar grid needs nr >= 2 and ntheta >= 4, got nr={nr}, ntheta={ntheta}"
            )));
        }
        Ok(Self { nr, ntheta })
    }

    /// Angular node count closest to a requested spacing, e.g. `0.1 → 63`.
    pub fn ntheta_for_spacing(dtheta: f64) -> usize {
        (TAU / dtheta).round() as usize
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn dr(&self) -> f64 {
        1.0 / self.nr as f64
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.ntheta as f64
    }

    /// Storage index of ring `i ≥ 1`, angle `k` (taken modulo `ntheta`).
    pub fn index(&self, i: usize, k: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.nr);
        1 + (i - 1) * self.ntheta + k % self.ntheta
    }

    pub fn node_count(&self) -> usize {
        1 + self.nr * self.ntheta
    }

    pub fn radius(&self, i: usize) -> f64 {
        if i == self.nr {
            1.0
        } else {
            i as f64 * self.dr()
        }
    }

    pub fn theta(&self, k: usize) -> f64 {
        (k % self.ntheta) as f64 * self.dtheta()
    }

    /// `(ring, angle)` of a storage index; the origin reports `(0, 0)`.
    pub fn ring_angle(&self, index: usize) -> (usize, usize) {
        if index == Self::ORIGIN {
            (0, 0)
        } else {
            let rest = index - 1;
            (rest / self.ntheta + 1, rest % self.ntheta)
        }
    }

    pub fn point(&self, index: usize) -> Point {
        let (i, k) = self.ring_angle(index);
        let r = self.radius(i);
        let theta = self.theta(k);
        Point::new(r * theta.cos(), r * theta.sin())
    }
}

/// One of the three supported spatial domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Interval(Interval1D),
    Square(SquareGrid),
    Disk(PolarGrid),
}

/// A node on `∂Ω` together with its coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub index: usize,
    pub point: Point,
}

impl Domain {
    pub fn node_count(&self) -> usize {
        match self {
            Self::Interval(g) => g.node_count(),
            Self::Square(g) => g.node_count(),
            Self::Disk(g) => g.node_count(),
        }
    }

    pub fn point(&self, index: usize) -> Point {
        match self {
            Self::Interval(g) => Point::new(g.x(index), 0.0),
            Self::Square(g) => g.point(index % g.stride(), index / g.stride()),
            Self::Disk(g) => g.point(index),
        }
    }

    pub fn is_boundary(&self, index: usize) -> bool {
        match self {
            Self::Interval(g) => index == 0 || index == g.n_cells(),
            Self::Square(g) => g.is_boundary(index % g.stride(), index / g.stride()),
            Self::Disk(g) => g.ring_angle(index).0 == g.nr(),
        }
    }

    /// Boundary nodes in a fixed order: `[left, right]` in 1D, row-major on
    /// the square, increasing angle on the disk.
    pub fn boundary_nodes(&self) -> Vec<BoundaryNode> {
        let node = |index| BoundaryNode { index, point: self.point(index) };
        match self {
            Self::Interval(g) => vec![node(0), node(g.n_cells())],
            Self::Square(g) => (0..=g.ny())
                .flat_map(|j| (0..=g.nx()).map(move |i| (i, j)))
                .filter(|&(i, j)| g.is_boundary(i, j))
                .map(|(i, j)| node(g.index(i, j)))
                .collect(),
            Self::Disk(g) => (0..g.ntheta()).map(|k| node(g.index(g.nr(), k))).collect(),
        }
    }

    /// Characteristic spatial step (`Δx` or `Δr`).
    pub fn mesh_size(&self) -> f64 {
        match self {
            Self::Interval(g) => g.dx(),
            Self::Square(g) => g.dx().max(g.dy()),
            Self::Disk(g) => g.dr(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Interval(_) => "interval",
            Self::Square(_) => "square",
            Self::Disk(_) => "disk",
        }
    }
}

/// Uniform time stepping of `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    n_steps: usize,
    horizon: f64,
}

impl TimeGrid {
    pub fn new(n_steps: usize, horizon: f64) -> Result<Self> {
        if n_steps == 0 || !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "time grid needs n_steps > 0 and a positive horizon, got {n_steps} steps to {horizon}"
            )));
        }
        Ok(Self { n_steps, horizon })
    }

    /// `n_steps` over the unit horizon.
    pub fn unit(n_steps: usize) -> Result<Self> {
        Self::new(n_steps, 1.0)
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn time(&self, step: usize) -> f64 {
        if step == self.n_steps {
            self.horizon
        } else {
            step as f64 * self.dt()
        }
    }
}

/// Corrector order for the 1D comparison method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Procedure {
    /// No correction, `S ≡ 0`.
    P0,
    /// Absorbs the zeroth-order incompatibility.
    P1,
    /// Absorbs zeroth- and first-order incompatibilities.
    P2,
}

impl Procedure {
    pub fn from_index(index: u32) -> Option<Self> {
        match index {
            0 => Some(Self::P0),
            1 => Some(Self::P1),
            2 => Some(Self::P2),
            _ => None,
        }
    }

    pub fn index(&self) -> u32 {
        match self {
            Self::P0 => 0,
            Self::P1 => 1,
            Self::P2 => 2,
        }
    }
}

/// How the boundary condition is imposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryMode {
    /// `u|∂Ω = g(nΔt)` for `n ≥ 1`.
    Direct,
    /// `u|∂Ω = k^ε` relaxed from `u0|∂Ω` toward `g`.
    Penalty { epsilon: f64 },
    /// `u = v + S` with an analytic singular corrector (1D only).
    Corrector(Procedure),
}

impl BoundaryMode {
    pub fn label(&self) -> String {
        match self {
            Self::Direct => "direct".into(),
            Self::Penalty { .. } => "penalty".into(),
            Self::Corrector(p) => format!("corrector{}", p.index()),
        }
    }
}

/// Boundary data. Only the interval supports distinct per-endpoint data.
#[derive(Debug, Clone)]
pub enum BoundaryData {
    Uniform(TimeFn),
    Endpoints { left: TimeFn, right: TimeFn },
}

impl BoundaryData {
    pub fn for_node(&self, node: &BoundaryNode) -> &TimeFn {
        match self {
            Self::Uniform(g) => g,
            Self::Endpoints { left, right } => {
                if node.point.x < 0.5 {
                    left
                } else {
                    right
                }
            }
        }
    }

    pub fn left(&self) -> &TimeFn {
        match self {
            Self::Uniform(g) => g,
            Self::Endpoints { left, .. } => left,
        }
    }

    pub fn right(&self) -> &TimeFn {
        match self {
            Self::Uniform(g) => g,
            Self::Endpoints { right, .. } => right,
        }
    }
}

/// Everything needed to run one solve.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub domain: Domain,
    pub nu: f64,
    pub forcing: Forcing,
    pub boundary: BoundaryData,
    pub initial: SpaceFn,
    pub time: TimeGrid,
    pub mode: BoundaryMode,
    /// Snapshot every this many steps; `None` picks [`default_stride`].
    pub snapshot_stride: Option<usize>,
}

impl ProblemSpec {
    /// Unit diffusivity, zero data, direct boundary treatment.
    pub fn new(domain: Domain, time: TimeGrid) -> Self {
        Self {
            domain,
            nu: 1.0,
            forcing: Forcing::Zero,
            boundary: BoundaryData::Uniform(TimeFn::Zero),
            initial: SpaceFn::Zero,
            time,
            mode: BoundaryMode::Direct,
            snapshot_stride: None,
        }
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn with_initial(mut self, u0: SpaceFn) -> Self {
        self.initial = u0;
        self
    }

    pub fn with_boundary(mut self, g: TimeFn) -> Self {
        self.boundary = BoundaryData::Uniform(g);
        self
    }

    pub fn with_endpoints(mut self, left: TimeFn, right: TimeFn) -> Self {
        self.boundary = BoundaryData::Endpoints { left, right };
        self
    }

    pub fn with_forcing(mut self, f: Forcing) -> Self {
        self.forcing = f;
        self
    }

    pub fn with_mode(mut self, mode: BoundaryMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = Some(stride);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidSpec(format!("diffusivity must be positive, got {}", self.nu)));
        }
        match self.mode {
            BoundaryMode::Penalty { epsilon } if !(epsilon > 0.0 && epsilon.is_finite()) => {
                return Err(Error::InvalidSpec(format!("penalty parameter must be positive, got {epsilon}")));
            }
            BoundaryMode::Corrector(_) if !matches!(self.domain, Domain::Interval(_)) => {
                return Err(Error::InvalidSpec(format!(
                    "corrector mode is only defined on the interval, not the {}",
                    self.domain.kind()
                )));
            }
            _ => {}
        }
        if matches!(self.boundary, BoundaryData::Endpoints { .. }) && !matches!(self.domain, Domain::Interval(_)) {
            return Err(Error::InvalidSpec("per-endpoint boundary data requires the interval".into()));
        }
        if self.snapshot_stride == Some(0) {
            return Err(Error::InvalidSpec("snapshot stride must be positive".into()));
        }
        Ok(())
    }

    pub fn stride(&self) -> usize {
        self.snapshot_stride.unwrap_or_else(|| default_stride(self.time.n_steps()))
    }
}

/// Every step up to 2000 steps, otherwise `⌈n_steps / 2000⌉`.
pub fn default_stride(n_steps: usize) -> usize {
    n_steps.div_ceil(2000).max(1)
}

/// Samples `u0` at every node, boundary included.
pub fn evaluate_initial(spec: &ProblemSpec) -> ScalarField {
    let domain = spec.domain;
    let values = (0..domain.node_count()).map(|idx| spec.initial.eval(domain.point(idx))).collect();
    ScalarField::from_values(domain, values)
}
