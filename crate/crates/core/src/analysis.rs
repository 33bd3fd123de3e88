//! Mesh-to-mesh comparative errors, log–log rate fits and ε sweeps.

use rayon::prelude::*;

use crate::domain::{BoundaryMode, Domain, ProblemSpec, TimeGrid};
use crate::error::{Error, Result};
use crate::solver::{solve, Trajectory};

/// Max-norm difference between a coarse solve and a nested fine solve,
/// restricted to the coarse nodes, at every coincident snapshot time.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub times: Vec<f64>,
    pub errors: Vec<f64>,
    pub coarse_mesh: f64,
    pub fine_mesh: f64,
    pub mode: String,
}

impl ErrorCurve {
    /// First value after `t = 0` (both solves sample `u0` exactly at 0).
    pub fn initial_error(&self) -> Option<f64> {
        self.times.iter().position(|&t| t > 0.0).map(|i| self.errors[i])
    }

    pub fn final_error(&self) -> Option<f64> {
        self.errors.last().copied()
    }

    /// `(time, error)` of the largest value on the curve.
    pub fn peak(&self) -> (f64, f64) {
        self.peak_until(f64::INFINITY)
    }

    /// Largest value with `0 < t ≤ t_end`.
    pub fn peak_until(&self, t_end: f64) -> (f64, f64) {
        self.times
            .iter()
            .zip(&self.errors)
            .filter(|(&t, _)| t > 0.0 && t <= t_end)
            .fold((0.0, 0.0), |best, (&t, &e)| if e > best.1 { (t, e) } else { best })
    }
}

/// Node-index injection from `coarse` into `fine`.
fn restriction(coarse: &Domain, fine: &Domain) -> Result<Vec<usize>> {
    let ratio = |c: usize, f: usize, what: &str| -> Result<usize> {
        if f.is_multiple_of(c) {
            Ok(f / c)
        } else {
            Err(Error::NonNesting(format!("{what}: fine {f} is not a multiple of coarse {c}")))
        }
    };
    match (coarse, fine) {
        (Domain::Interval(c), Domain::Interval(f)) => {
            let r = ratio(c.n_cells(), f.n_cells(), "cells")?;
            Ok((0..c.node_count()).map(|i| i * r).collect())
        }
        (Domain::Square(c), Domain::Square(f)) => {
            let rx = ratio(c.nx(), f.nx(), "nx")?;
            let ry = ratio(c.ny(), f.ny(), "ny")?;
            Ok((0..=c.ny()).flat_map(|j| (0..=c.nx()).map(move |i| f.index(i * rx, j * ry))).collect())
        }
        (Domain::Disk(c), Domain::Disk(f)) => {
            let rr = ratio(c.nr(), f.nr(), "nr")?;
            let rt = ratio(c.ntheta(), f.ntheta(), "ntheta")?;
            let mut map = Vec::with_capacity(c.node_count());
            map.push(0);
            for i in 1..=c.nr() {
                for k in 0..c.ntheta() {
                    map.push(f.index(i * rr, k * rt));
                }
            }
            Ok(map)
        }
        _ => Err(Error::NonNesting(format!("cannot compare a {} with a {}", coarse.kind(), fine.kind()))),
    }
}

pub fn comparative_error(coarse: &Trajectory, fine: &Trajectory) -> Result<ErrorCurve> {
    let map = restriction(&coarse.spec.domain, &fine.spec.domain)?;
    let (ct, ft) = (coarse.spec.time, fine.spec.time);
    if (ct.horizon() - ft.horizon()).abs() > 1e-12 * ct.horizon() {
        return Err(Error::NonNesting(format!("horizons differ: {} vs {}", ct.horizon(), ft.horizon())));
    }
    if ft.n_steps() % ct.n_steps() != 0 {
        return Err(Error::NonNesting(format!(
            "time steps: fine {} is not a multiple of coarse {}",
            ft.n_steps(),
            ct.n_steps()
        )));
    }
    let step_ratio = ft.n_steps() / ct.n_steps();

    let mut times = Vec::new();
    let mut errors = Vec::new();
    for snap in &coarse.snapshots {
        let Some(fine_snap) = fine.snapshot_at_step(snap.step * step_ratio) else {
            continue;
        };
        let fv = fine_snap.field.values();
        let err = snap
            .field
            .values()
            .iter()
            .zip(&map)
            .fold(0.0f64, |m, (c, &fi)| m.max((c - fv[fi]).abs()));
        times.push(snap.time);
        errors.push(err);
    }
    Ok(ErrorCurve {
        times,
        errors,
        coarse_mesh: coarse.spec.domain.mesh_size(),
        fine_mesh: fine.spec.domain.mesh_size(),
        mode: coarse.spec.mode.label(),
    })
}

/// Least-squares fit of `ln(error) = slope·ln(h) + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(h, e)) = points.iter().find(|&&(h, e)| !(h > 0.0 && e > 0.0)) {
        return Err(Error::Fit(format!("mesh sizes and errors must be positive, got h={h}, error={e}")));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all mesh sizes are equal".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = (logs.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum::<f64>() / n).sqrt();
    Ok(RateFit {
        h: points.iter().map(|p| p.0).collect(),
        errors: points.iter().map(|p| p.1).collect(),
        slope,
        intercept,
        residual,
    })
}

/// Solves a coarse/fine pair concurrently and compares them.
pub fn compare_pair(coarse: &ProblemSpec, fine: &ProblemSpec) -> Result<ErrorCurve> {
    let (c, f) = rayon::join(|| solve(coarse), || solve(fine));
    comparative_error(&c?, &f?)
}

/// Rate fits of initial- and final-step errors across refinement pairs.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub initial: RateFit,
    pub last: RateFit,
}

/// The pair cut down to its first coarse step, so the initial-step error is
/// measured at exactly `Δt_coarse` without storing the whole march.
fn first_step(coarse: &ProblemSpec, fine: &ProblemSpec) -> Result<(ProblemSpec, ProblemSpec)> {
    let ratio = step_ratio(coarse, fine)?;
    let dt = coarse.time.dt();
    let mut c = coarse.clone().with_stride(1);
    let mut f = fine.clone().with_stride(ratio);
    c.time = TimeGrid::new(1, dt)?;
    f.time = TimeGrid::new(ratio, dt)?;
    Ok((c, f))
}

fn step_ratio(coarse: &ProblemSpec, fine: &ProblemSpec) -> Result<usize> {
    let (nc, nf) = (coarse.time.n_steps(), fine.time.n_steps());
    if nf % nc != 0 {
        return Err(Error::NonNesting(format!("time steps: fine {nf} is not a multiple of coarse {nc}")));
    }
    Ok(nf / nc)
}

/// Each pair contributes one point at its coarse mesh size. Final-step
/// errors come from full marches that keep only the first and last levels.
pub fn convergence_study(pairs: &[(ProblemSpec, ProblemSpec)]) -> Result<ConvergenceStudy> {
    let points: Vec<((f64, f64), (f64, f64))> = pairs
        .par_iter()
        .map(|(coarse, fine)| {
            let (c1, f1) = first_step(coarse, fine)?;
            let start = compare_pair(&c1, &f1)?;
            let c = coarse.clone().with_stride(coarse.time.n_steps());
            let f = fine.clone().with_stride(fine.time.n_steps());
            let end = compare_pair(&c, &f)?;
            let h = start.coarse_mesh;
            let pick = |e: Option<f64>| e.ok_or_else(|| Error::Fit("empty error curve".into()));
            Ok(((h, pick(start.initial_error())?), (h, pick(end.final_error())?)))
        })
        .collect::<Result<_>>()?;
    let (initial, last): (Vec<_>, Vec<_>) = points.into_iter().unzip();
    Ok(ConvergenceStudy { initial: fit_rate(&initial)?, last: fit_rate(&last)? })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub initial_error: f64,
    pub final_error: f64,
    pub warning: bool,
}

/// Runs the coarse/fine pair in penalty mode for each ε. Rows come back
/// sorted by ε regardless of execution order.
pub fn epsilon_sweep(coarse: &ProblemSpec, fine: &ProblemSpec, epsilons: &[f64]) -> Result<Vec<SweepRow>> {
    let mut eps: Vec<f64> = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    eps.par_iter()
        .map(|&epsilon| {
            let mode = BoundaryMode::Penalty { epsilon };
            let c = coarse.clone().with_mode(mode);
            let f = fine.clone().with_mode(mode);
            let (tc, tf) = rayon::join(|| solve(&c), || solve(&f));
            let (tc, tf) = (tc?, tf?);
            let curve = comparative_error(&tc, &tf)?;
            Ok(SweepRow {
                epsilon,
                initial_error: curve.initial_error().unwrap_or(0.0),
                final_error: curve.final_error().unwrap_or(0.0),
                warning: tc.penalty_warning.is_some() || tf.penalty_warning.is_some(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Interval1D, PolarGrid, SquareGrid};
    use crate::functions::SpaceFn;
    use crate::solver::ScalarField;

    fn square(n: usize, steps: usize) -> ProblemSpec {
        ProblemSpec::new(Domain::Square(SquareGrid::new(n, n).unwrap()), TimeGrid::unit(steps).unwrap())
            .with_nu(0.2)
            .with_initial(SpaceFn::SinePatch)
    }

    #[test]
    fn identical_trajectories_give_zero() {
        let t = solve(&square(6, 100)).unwrap();
        let curve = comparative_error(&t, &t).unwrap();
        assert_eq!(curve.times.len(), t.snapshots.len());
        assert!(curve.errors.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn constant_offset_on_coarse_nodes() {
        let mut coarse = solve(&square(4, 20)).unwrap();
        let mut fine = solve(&square(8, 80)).unwrap();
        for s in &mut coarse.snapshots {
            s.field = ScalarField::zeros(s.field.domain());
        }
        for s in &mut fine.snapshots {
            let d = s.field.domain();
            s.field = ScalarField::from_values(d, vec![-0.3; d.node_count()]);
        }
        let curve = comparative_error(&coarse, &fine).unwrap();
        assert_eq!(curve.times.len(), 21);
        assert!(curve.errors.iter().all(|&e| (e - 0.3).abs() < 1e-15));
    }

    #[test]
    fn coincident_times_follow_the_step_ratio() {
        let coarse = solve(&square(24, 1000)).unwrap();
        let fine = solve(&square(48, 4000)).unwrap();
        let curve = comparative_error(&coarse, &fine).unwrap();
        assert_eq!(curve.times.len(), 1001);
        assert!((curve.times[1] - 0.001).abs() < 1e-15);
    }

    #[test]
    fn non_nesting_is_rejected() {
        let a = solve(&square(4, 20)).unwrap();
        let b = solve(&square(6, 45)).unwrap();
        assert!(matches!(comparative_error(&a, &b), Err(Error::NonNesting(_))));
        let c = solve(&square(8, 90)).unwrap();
        assert!(matches!(comparative_error(&a, &c), Err(Error::NonNesting(_))));
        let d = ProblemSpec::new(Domain::Interval(Interval1D::new(4).unwrap()), TimeGrid::unit(40).unwrap());
        let d = solve(&d).unwrap();
        assert!(comparative_error(&a, &d).is_err());
    }

    #[test]
    fn disk_restriction_hits_matching_points() {
        let c = Domain::Disk(PolarGrid::new(3, 8).unwrap());
        let f = Domain::Disk(PolarGrid::new(6, 16).unwrap());
        let map = restriction(&c, &f).unwrap();
        for (ci, &fi) in map.iter().enumerate() {
            let (a, b) = (c.point(ci), f.point(fi));
            assert!((a.x - b.x).abs() < 1e-14 && (a.y - b.y).abs() < 1e-14);
        }
    }

    #[test]
    fn rate_fit_values() {
        let fit = fit_rate(&[(0.1, 1e-2), (0.05, 2.5e-3), (0.025, 6.25e-4)]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let flat = fit_rate(&[(0.1, 0.3), (0.05, 0.3), (0.025, 0.3)]).unwrap();
        assert!(flat.slope.abs() < 1e-12);
        assert!(fit_rate(&[(0.1, 1.0), (0.05, 0.0), (0.025, 1.0)]).is_err());
        assert!(fit_rate(&[(0.1, 1.0), (0.05, 0.5)]).is_err());
    }

    #[test]
    fn peak_until_skips_time_zero() {
        let curve = ErrorCurve {
            times: vec![0.0, 0.1, 0.2, 0.3],
            errors: vec![9.0, 1.0, 3.0, 2.0],
            coarse_mesh: 0.1,
            fine_mesh: 0.05,
            mode: "direct".into(),
        };
        assert_eq!(curve.peak(), (0.2, 3.0));
        assert_eq!(curve.peak_until(0.15), (0.1, 1.0));
        assert_eq!(curve.initial_error(), Some(1.0));
        assert_eq!(curve.final_error(), Some(2.0));
    }

    #[test]
    fn sweep_rows_sorted_and_flagged() {
        let rows = epsilon_sweep(&square(6, 100), &square(12, 400), &[0.1, 0.01, 0.05]).unwrap();
        let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
        assert_eq!(eps, vec![0.01, 0.05, 0.1]);
        // coarse dt = 0.01 = eps
        assert!(rows[0].warning);
        assert!(!rows[2].warning);
    }
}
