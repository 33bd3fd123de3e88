//! Explicit forward-time centred-space (FTCS) marching on the interval,
//! the square and the disk.
//!
//! Boundary values are supplied per step by the boundary mode: the data
//! `g(nΔt)` directly, the relaxed penalty values `k^{ε,n}`, or (in 1D)
//! the corrector-shifted data `g - S`. Level `n` is never modified while
//! level `n+1` is being written.

use std::fmt;

use crate::corrector;
use crate::domain::{evaluate_initial, BoundaryMode, BoundaryNode, Domain, Interval1D, PolarGrid, ProblemSpec, SquareGrid};
use crate::error::{Error, Result};
use crate::functions::Forcing;
use crate::penalty::{penalty_step, StabilityWarning};

/// Solution values at one time level, one per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: Domain,
    values: Vec<f64>,
}

impl ScalarField {
    /// Panics if `values` does not hold exactly one entry per node.
    pub fn from_values(domain: Domain, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), domain.node_count(), "field length must match node count");
        Self { domain, values }
    }

    pub fn zeros(domain: Domain) -> Self {
        Self { domain, values: vec![0.0; domain.node_count()] }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Index of the first NaN/Inf, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }
}

/// Stability number of the explicit scheme for a given spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflReport {
    pub lambda: f64,
    pub stable: bool,
    pub formula: &'static str,
}

impl CflReport {
    pub const LIMIT: f64 = 0.5;
}

impl fmt::Display for CflReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda = {} ({}) must be <= {}", self.lambda, self.formula, Self::LIMIT)
    }
}

pub fn cfl_check(spec: &ProblemSpec) -> CflReport {
    let dt = spec.time.dt();
    let nu = spec.nu;
    let (lambda, formula) = match spec.domain {
        Domain::Interval(g) => (nu * dt / (g.dx() * g.dx()), "nu*dt/dx^2"),
        Domain::Square(g) => (nu * dt * (1.0 / (g.dx() * g.dx()) + 1.0 / (g.dy() * g.dy())), "nu*dt*(1/dx^2 + 1/dy^2)"),
        Domain::Disk(g) => {
            let dr = g.dr();
            let r_min = dr;
            let dth = g.dtheta();
            (
                nu * dt * (1.0 / (dr * dr) + 1.0 / (r_min * dr) + 1.0 / (r_min * r_min * dth * dth)),
                "nu*dt*(1/dr^2 + 1/(r_min*dr) + 1/(r_min^2*dtheta^2)), r_min = dr",
            )
        }
    };
    CflReport { lambda, stable: lambda <= CflReport::LIMIT, formula }
}

/// Snapshot of the solution at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub field: ScalarField,
    /// Values imposed on the boundary nodes at this step, in
    /// [`Domain::boundary_nodes`] order (`k^{ε,n}` in penalty mode).
    pub boundary: Vec<f64>,
}

/// Result of a solve: snapshots at a fixed stride, step 0 and the final
/// step always included.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: ProblemSpec,
    pub snapshots: Vec<Snapshot>,
    pub penalty_warning: Option<StabilityWarning>,
}

impl Trajectory {
    pub fn snapshot_at_step(&self, step: usize) -> Option<&Snapshot> {
        self.snapshots.binary_search_by_key(&step, |s| s.step).ok().map(|i| &self.snapshots[i])
    }

    pub fn initial(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("step 0 is always recorded")
    }

    /// Snapshot whose time is closest to `t`.
    pub fn nearest(&self, t: f64) -> &Snapshot {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.time - t).abs().total_cmp(&(b.time - t).abs()))
            .expect("step 0 is always recorded")
    }
}

fn check_finite(field: &ScalarField, step: usize) -> Result<()> {
    match field.first_non_finite() {
        Some(node) => Err(Error::NonFinite { step, node }),
        None => Ok(()),
    }
}

fn interior_1d(grid: Interval1D, lambda: f64, src: &[f64], dst: &mut [f64]) {
    let n = grid.n_cells();
    for i in 1..n {
        dst[i] = src[i] + lambda * (src[i + 1] + src[i - 1] - 2.0 * src[i]);
    }
}

fn interior_square(grid: SquareGrid, lx: f64, ly: f64, src: &[f64], dst: &mut [f64]) {
    let s = grid.stride();
    for j in 1..grid.ny() {
        let row = j * s;
        for i in 1..grid.nx() {
            let c = row + i;
            let u = src[c];
            dst[c] = u + lx * (src[c + 1] + src[c - 1] - 2.0 * u) + ly * (src[c + s] + src[c - s] - 2.0 * u);
        }
    }
}

fn interior_polar(grid: PolarGrid, nu_dt: f64, src: &[f64], dst: &mut [f64]) {
    let nt = grid.ntheta();
    let dr = grid.dr();
    let dth = grid.dtheta();

    let ring_mean = src[1..=nt].iter().sum::<f64>() / nt as f64;
    let origin = src[PolarGrid::ORIGIN];
    dst[PolarGrid::ORIGIN] = origin + nu_dt * 4.0 / (dr * dr) * (ring_mean - origin);

    for i in 1..grid.nr() {
        let r = i as f64 * dr;
        let outer = nu_dt * (1.0 / (dr * dr) + 1.0 / (2.0 * r * dr));
        let inner = nu_dt * (1.0 / (dr * dr) - 1.0 / (2.0 * r * dr));
        let angular = nu_dt / (r * r * dth * dth);
        for k in 0..nt {
            let c = grid.index(i, k);
            let u = src[c];
            let up = src[grid.index(i + 1, k)];
            let down = if i == 1 { origin } else { src[grid.index(i - 1, k)] };
            let next = src[grid.index(i, k + 1)];
            let prev = src[grid.index(i, k + nt - 1)];
            dst[c] = u + outer * (up - u) + inner * (down - u) + angular * (next + prev - 2.0 * u);
        }
    }
}

fn add_forcing(domain: Domain, forcing: &Forcing, t: f64, dt: f64, dst: &mut [f64]) {
    if forcing.is_zero() {
        return;
    }
    for (idx, v) in dst.iter_mut().enumerate() {
        if !domain.is_boundary(idx) {
            *v += dt * forcing.eval(domain.point(idx), t);
        }
    }
}

/// Interior update from level `step` into `dst`; boundary entries of `dst`
/// are left for the caller.
fn advance_interior(spec: &ProblemSpec, src: &[f64], dst: &mut [f64], step: usize) {
    let dt = spec.time.dt();
    let nu_dt = spec.nu * dt;
    match spec.domain {
        Domain::Interval(g) => interior_1d(g, nu_dt / (g.dx() * g.dx()), src, dst),
        Domain::Square(g) => interior_square(g, nu_dt / (g.dx() * g.dx()), nu_dt / (g.dy() * g.dy()), src, dst),
        Domain::Disk(g) => interior_polar(g, nu_dt, src, dst),
    }
    add_forcing(spec.domain, &spec.forcing, spec.time.time(step), dt, dst);
}

fn apply_boundary(nodes: &[BoundaryNode], values: &[f64], dst: &mut [f64]) {
    debug_assert_eq!(nodes.len(), values.len());
    for (node, &v) in nodes.iter().zip(values) {
        dst[node.index] = v;
    }
}

fn single_step(u_n: &ScalarField, boundary: &[f64], spec: &ProblemSpec, step: usize) -> Result<ScalarField> {
    if u_n.domain() != spec.domain {
        return Err(Error::InvalidSpec("field and spec are on different grids".into()));
    }
    let nodes = spec.domain.boundary_nodes();
    if boundary.len() != nodes.len() {
        return Err(Error::InvalidSpec(format!(
            "expected {} boundary values, got {}",
            nodes.len(),
            boundary.len()
        )));
    }
    let mut next = u_n.clone();
    advance_interior(spec, u_n.values(), next.values_mut(), step);
    apply_boundary(&nodes, boundary, next.values_mut());
    check_finite(&next, step + 1)?;
    Ok(next)
}

/// One FTCS step on the unit square. `boundary` is in
/// [`Domain::boundary_nodes`] order; `f` is sampled at `step·Δt`.
pub fn step_square(u_n: &ScalarField, boundary: &[f64], spec: &ProblemSpec, step: usize) -> Result<ScalarField> {
    if !matches!(spec.domain, Domain::Square(_)) {
        return Err(Error::InvalidSpec("step_square needs a square grid".into()));
    }
    single_step(u_n, boundary, spec, step)
}

/// One FTCS step on the disk; `ring` holds the `r = 1` values by angle.
pub fn step_polar(u_n: &ScalarField, ring: &[f64], spec: &ProblemSpec, step: usize) -> Result<ScalarField> {
    if !matches!(spec.domain, Domain::Disk(_)) {
        return Err(Error::InvalidSpec("step_polar needs a polar grid".into()));
    }
    single_step(u_n, ring, spec, step)
}

pub fn step_1d(u_n: &ScalarField, left: f64, right: f64, spec: &ProblemSpec, step: usize) -> Result<ScalarField> {
    if !matches!(spec.domain, Domain::Interval(_)) {
        return Err(Error::InvalidSpec("step_1d needs an interval".into()));
    }
    single_step(u_n, &[left, right], spec, step)
}

/// Marches `spec` to its horizon.
///
/// `boundary(step, nodes, out)` fills the boundary values imposed at
/// `step ≥ 1`. `output(step, field)` maps the marched field to the
/// recorded snapshot (identity except for the corrector's `v + S`).
pub(crate) fn march<B, O>(spec: &ProblemSpec, mut boundary: B, output: O) -> Result<Vec<Snapshot>>
where
    B: FnMut(usize, &[BoundaryNode], &mut [f64]) -> Result<()>,
    O: Fn(usize, &mut ScalarField),
{
    let domain = spec.domain;
    let nodes = domain.boundary_nodes();
    let n_steps = spec.time.n_steps();
    let stride = spec.stride();

    let mut current = evaluate_initial(spec);
    let mut next = current.clone();
    let mut imposed: Vec<f64> = nodes.iter().map(|n| current.values()[n.index]).collect();

    let record = |step: usize, field: &ScalarField, imposed: &[f64]| {
        let mut field = field.clone();
        output(step, &mut field);
        Snapshot { step, time: spec.time.time(step), field, boundary: imposed.to_vec() }
    };

    let mut snapshots = Vec::with_capacity(n_steps / stride + 2);
    snapshots.push(record(0, &current, &imposed));
    for step in 0..n_steps {
        advance_interior(spec, current.values(), next.values_mut(), step);
        boundary(step + 1, &nodes, &mut imposed)?;
        apply_boundary(&nodes, &imposed, next.values_mut());
        check_finite(&next, step + 1)?;
        std::mem::swap(&mut current, &mut next);
        let reached = step + 1;
        if reached % stride == 0 || reached == n_steps {
            snapshots.push(record(reached, &current, &imposed));
        }
    }
    Ok(snapshots)
}

/// Runs the spec in its boundary mode. Refuses specs that fail
/// [`cfl_check`].
pub fn solve(spec: &ProblemSpec) -> Result<Trajectory> {
    spec.validate()?;
    let cfl = cfl_check(spec);
    if !cfl.stable {
        return Err(Error::Unstable(cfl));
    }
    let dt = spec.time.dt();
    match spec.mode {
        BoundaryMode::Direct => {
            let snapshots = march(
                spec,
                |step, nodes, out| {
                    let t = spec.time.time(step);
                    for (v, node) in out.iter_mut().zip(nodes) {
                        *v = spec.boundary.for_node(node).eval(t);
                    }
                    Ok(())
                },
                |_, _| {},
            )?;
            Ok(Trajectory { spec: spec.clone(), snapshots, penalty_warning: None })
        }
        BoundaryMode::Penalty { epsilon } => {
            let mut warning = None;
            let snapshots = march(
                spec,
                |step, nodes, k| {
                    // k holds level step-1; relax it with g sampled at that level
                    let t_prev = spec.time.time(step - 1);
                    for (kv, node) in k.iter_mut().zip(nodes) {
                        let relaxed = penalty_step(*kv, spec.boundary.for_node(node).eval(t_prev), epsilon, dt);
                        *kv = relaxed.value;
                        warning = warning.or(relaxed.warning);
                    }
                    Ok(())
                },
                |_, _| {},
            )?;
            if let Some(w) = warning {
                log::warn!("{w}");
            }
            Ok(Trajectory { spec: spec.clone(), snapshots, penalty_warning: warning })
        }
        BoundaryMode::Corrector(procedure) => corrector::solve_corrected(spec, procedure),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::TimeGrid;
    use crate::functions::{SpaceFn, TimeFn};
    use std::f64::consts::PI;

    fn square(n: usize, steps: usize, nu: f64) -> ProblemSpec {
        ProblemSpec::new(Domain::Square(SquareGrid::new(n, n).unwrap()), TimeGrid::unit(steps).unwrap()).with_nu(nu)
    }

    #[test]
    fn cfl_numbers() {
        let r = cfl_check(&square(24, 1000, 0.2));
        assert!((r.lambda - 0.2304).abs() < 1e-12 && r.stable);
        let r = cfl_check(&square(48, 4000, 0.2));
        assert!((r.lambda - 0.2304).abs() < 1e-12 && r.stable);
        let s = ProblemSpec::new(Domain::Interval(Interval1D::new(10).unwrap()), TimeGrid::unit(10).unwrap()).with_nu(0.2);
        let r = cfl_check(&s);
        assert!((r.lambda - 2.0).abs() < 1e-12 && !r.stable);
        assert!(matches!(solve(&s), Err(Error::Unstable(_))));
    }

    #[test]
    fn constant_state_is_steady() {
        let c = 0.75;
        for domain in [
            Domain::Square(SquareGrid::new(6, 6).unwrap()),
            Domain::Disk(PolarGrid::new(5, 12).unwrap()),
            Domain::Interval(Interval1D::new(6).unwrap()),
        ] {
            let spec = ProblemSpec::new(domain, TimeGrid::unit(1000).unwrap()).with_nu(0.2);
            let u = ScalarField::from_values(domain, vec![c; domain.node_count()]);
            let b = vec![c; domain.boundary_nodes().len()];
            let next = single_step(&u, &b, &spec, 0).unwrap();
            assert!(next.values().iter().all(|&v| (v - c).abs() < 1e-15));
        }
    }

    #[test]
    fn square_delta_center() {
        let spec = square(4, 1000, 0.2);
        let g = SquareGrid::new(4, 4).unwrap();
        let mut u = ScalarField::zeros(spec.domain);
        u.values_mut()[g.index(2, 2)] = 1.0;
        let next = step_square(&u, &[0.0; 16], &spec, 0).unwrap();
        let lam = 0.2 * 0.001 * 16.0;
        assert!((next.values()[g.index(2, 2)] - (1.0 - 4.0 * lam)).abs() < 1e-15);
        assert!((next.values()[g.index(1, 2)] - lam).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_arithmetic() {
        let domain = Domain::Interval(Interval1D::new(2).unwrap());
        // lambda = nu*dt/dx^2 = 0.2*0.25*4 = 0.2
        let spec = ProblemSpec::new(domain, TimeGrid::unit(4).unwrap()).with_nu(0.2);
        let u = ScalarField::from_values(domain, vec![0.0, 1.0, 0.0]);
        let next = step_1d(&u, 0.0, 0.0, &spec, 0).unwrap();
        assert!((next.values()[1] - 0.6).abs() < 1e-15);
        let z = step_1d(&ScalarField::zeros(domain), 0.0, 0.0, &spec, 0).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_mode_is_a_discrete_eigenvector() {
        let n = 16;
        let steps = 400;
        let domain = Domain::Interval(Interval1D::new(n).unwrap());
        let spec = ProblemSpec::new(domain, TimeGrid::unit(steps).unwrap())
            .with_nu(0.2)
            .with_initial(SpaceFn::SinPiX);
        let traj = solve(&spec).unwrap();
        let dx = 1.0 / n as f64;
        let lam = 0.2 / steps as f64 / (dx * dx);
        let factor = 1.0 - 4.0 * lam * (PI * dx / 2.0).sin().powi(2);
        let last = traj.last();
        for (i, v) in last.field.values().iter().enumerate() {
            let expected = factor.powi(steps as i32) * (PI * i as f64 * dx).sin();
            assert!((v - expected).abs() < 1e-13, "node {i}: {v} vs {expected}");
        }
    }

    #[test]
    fn polar_origin_symmetry_and_radial_stencil() {
        let grid = PolarGrid::new(10, 64).unwrap();
        let domain = Domain::Disk(grid);
        let spec = ProblemSpec::new(domain, TimeGrid::unit(20_000).unwrap()).with_nu(0.2).with_initial(SpaceFn::Xy);
        let u0 = evaluate_initial(&spec);
        let ring = vec![0.0; 64];
        let next = step_polar(&u0, &ring, &spec, 0).unwrap();
        assert!(next.values()[PolarGrid::ORIGIN].abs() < 1e-16);

        // u = 1 - r^2 has Δu = -4; the stencil is exact for quadratics
        let radial = SpaceFn::custom(|p| 1.0 - (p.x * p.x + p.y * p.y));
        let spec = spec.with_initial(radial);
        let u0 = evaluate_initial(&spec);
        let next = step_polar(&u0, &ring, &spec, 0).unwrap();
        let nu_dt = 0.2 / 20_000.0;
        let c = grid.index(5, 3);
        assert!((next.values()[c] - (0.75 - 4.0 * nu_dt)).abs() < 1e-13);
        assert!((next.values()[PolarGrid::ORIGIN] - (1.0 - 4.0 * nu_dt)).abs() < 1e-13);
    }

    #[test]
    fn penalty_boundary_follows_standalone_recursion() {
        let eps = 0.1;
        let spec = square(8, 200, 0.2)
            .with_initial(SpaceFn::SinePatch)
            .with_boundary(TimeFn::SinT)
            .with_mode(BoundaryMode::Penalty { epsilon: eps })
            .with_stride(1);
        let traj = solve(&spec).unwrap();
        let nodes = spec.domain.boundary_nodes();
        let dt = spec.time.dt();
        for (b, node) in nodes.iter().enumerate() {
            let mut k = SpaceFn::SinePatch.eval(node.point);
            for snap in &traj.snapshots {
                assert_eq!(snap.boundary[b].to_bits(), k.to_bits(), "node {b} step {}", snap.step);
                assert_eq!(snap.field.values()[node.index].to_bits(), k.to_bits());
                k = penalty_step(k, spec.time.time(snap.step).sin(), eps, dt).value;
            }
        }
    }

    #[test]
    fn penalty_initial_boundary_is_u0() {
        let spec = square(6, 100, 0.2).with_initial(SpaceFn::SinePatch).with_mode(BoundaryMode::Penalty { epsilon: 0.1 });
        let traj = solve(&spec).unwrap();
        assert_eq!(traj.initial().field, evaluate_initial(&spec));
    }

    #[test]
    fn direct_mode_imposes_g_after_step_zero() {
        let spec = square(6, 100, 0.2).with_initial(SpaceFn::SinePatch).with_boundary(TimeFn::SinT);
        let traj = solve(&spec).unwrap();
        let snap = traj.snapshot_at_step(7).unwrap();
        for node in spec.domain.boundary_nodes() {
            assert_eq!(snap.field.values()[node.index], (7.0 * 0.01f64).sin());
        }
    }

    #[test]
    fn snapshot_stride_keeps_ends() {
        let spec = square(4, 4001, 0.01);
        let traj = solve(&spec).unwrap();
        assert_eq!(traj.initial().step, 0);
        assert_eq!(traj.last().step, 4001);
        assert!(traj.snapshots.windows(2).all(|w| w[0].step < w[1].step));
        assert_eq!(traj.snapshots[1].step, 3);
    }

    #[test]
    fn non_finite_is_reported() {
        let spec = square(4, 10, 0.01).with_boundary(TimeFn::Constant(f64::NAN));
        assert!(matches!(solve(&spec), Err(Error::NonFinite { step: 1, .. })));
    }

    #[test]
    fn forcing_is_applied_to_interior_only() {
        let spec = square(4, 100, 0.01).with_forcing(Forcing::custom(|_, _| 1.0));
        let u = ScalarField::zeros(spec.domain);
        let next = step_square(&u, &[0.0; 16], &spec, 0).unwrap();
        let g = SquareGrid::new(4, 4).unwrap();
        assert!((next.values()[g.index(2, 2)] - 0.01).abs() < 1e-15);
        assert_eq!(next.values()[g.index(0, 2)], 0.0);
    }
}
