//! Classical 1D singular correctors for incompatible data.
//!
//! The solution is split as `u = v + S`, where `S` is built from the
//! half-line heat kernels
//!
//! ```text
//! S0(x, t) = erfc(x / (2 sqrt(νt)))      S1(x, t) = ∫₀ᵗ S0(x, τ) dτ
//! ```
//!
//! and absorbs the zeroth (and, with Procedure 2, first) order mismatch
//! between `u0` and the boundary data, so `v` is computed with compatible
//! data.

use crate::domain::{BoundaryNode, Domain, Procedure, ProblemSpec};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::solver::{cfl_check, march, ScalarField, Trajectory};

const QUADRATURE_TOL: f64 = 1e-10;
const COMPATIBLE_TOL: f64 = 1e-12;

/// `erfc(x / (2 sqrt(νt)))`; at `t = 0` the pointwise limit (1 at the
/// corner, 0 inside).
pub fn s0(x: f64, t: f64, nu: f64) -> f64 {
    if t <= 0.0 {
        return if x == 0.0 { 1.0 } else { 0.0 };
    }
    libm::erfc(x / (2.0 * (nu * t).sqrt()))
}

/// `∫₀ᵗ S0(x, τ) dτ` by adaptive quadrature.
pub fn s1(x: f64, t: f64, nu: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    if x == 0.0 {
        return Ok(t);
    }
    quadrature::integrate(|tau| s0(x, tau, nu), 0.0, t, QUADRATURE_TOL)
}

/// Closed form of [`s1`]:
/// `(t + x²/(2ν)) erfc(η) - x sqrt(t/(πν)) e^{-η²}`, `η = x/(2 sqrt(νt))`.
pub fn s1_closed_form(x: f64, t: f64, nu: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let eta = x / (2.0 * (nu * t).sqrt());
    (t + x * x / (2.0 * nu)) * libm::erfc(eta) - x * (t / (std::f64::consts::PI * nu)).sqrt() * (-eta * eta).exp()
}

/// Incompatibility coefficients at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointCoefficients {
    /// `g(0) - u0`
    pub alpha0: f64,
    /// `g'(0) - ν u0''`
    pub alpha1: f64,
}

impl EndpointCoefficients {
    fn is_compatible(&self) -> bool {
        self.alpha0.abs() <= COMPATIBLE_TOL && self.alpha1.abs() <= COMPATIBLE_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorSpec {
    pub procedure: Procedure,
    pub nu: f64,
    /// Correction anchored at `x = 0`.
    pub left: Option<EndpointCoefficients>,
    /// Mirrored correction anchored at `x = 1`.
    pub right: Option<EndpointCoefficients>,
}

impl CorrectorSpec {
    /// Reads the incompatibility coefficients off a 1D problem. An endpoint
    /// whose data are compatible (to 1e-12) gets no correction.
    pub fn from_problem(spec: &ProblemSpec, procedure: Procedure) -> Result<Self> {
        if !matches!(spec.domain, Domain::Interval(_)) {
            return Err(Error::InvalidSpec("correctors exist only on the interval".into()));
        }
        let endpoint = |g: &crate::functions::TimeFn, x: f64| -> Result<Option<EndpointCoefficients>> {
            let u0 = spec.initial.eval(crate::functions::Point::new(x, 0.0));
            let alpha0 = g.eval(0.0) - u0;
            let alpha1 = if procedure == Procedure::P2 {
                let dg = g.derivative(1, 0.0).ok_or(Error::MissingDerivative { order: 1, what: "boundary data g" })?;
                let d2u = spec.initial.d2x(x).ok_or(Error::MissingDerivative { order: 2, what: "initial data u0" })?;
                dg - spec.nu * d2u
            } else {
                0.0
            };
            let c = EndpointCoefficients { alpha0, alpha1 };
            Ok((!c.is_compatible()).then_some(c))
        };
        Ok(Self {
            procedure,
            nu: spec.nu,
            left: endpoint(spec.boundary.left(), 0.0)?,
            right: endpoint(spec.boundary.right(), 1.0)?,
        })
    }
}

/// The assembled space-time corrector `S(x, t)`.
#[derive(Debug, Clone)]
pub struct Corrector {
    spec: CorrectorSpec,
}

impl Corrector {
    fn kernel(&self, c: &EndpointCoefficients, distance: f64, t: f64) -> f64 {
        let nu = self.spec.nu;
        match self.spec.procedure {
            Procedure::P0 => 0.0,
            Procedure::P1 => c.alpha0 * s0(distance, t, nu),
            Procedure::P2 => c.alpha0 * s0(distance, t, nu) + c.alpha1 * s1_closed_form(distance, t, nu),
        }
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let left = self.spec.left.as_ref().map_or(0.0, |c| self.kernel(c, x, t));
        let right = self.spec.right.as_ref().map_or(0.0, |c| self.kernel(c, 1.0 - x, t));
        left + right
    }

    pub fn spec(&self) -> &CorrectorSpec {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.spec.procedure == Procedure::P0 || (self.spec.left.is_none() && self.spec.right.is_none())
    }
}

pub fn build_corrector(spec: &CorrectorSpec) -> Corrector {
    Corrector { spec: spec.clone() }
}

/// Solves for `v` with boundary data `g - S` by FTCS and records `u = v + S`.
pub fn solve_corrected(spec: &ProblemSpec, procedure: Procedure) -> Result<Trajectory> {
    spec.validate()?;
    let cfl = cfl_check(spec);
    if !cfl.stable {
        return Err(Error::Unstable(cfl));
    }
    let corrector = build_corrector(&CorrectorSpec::from_problem(spec, procedure)?);
    let domain = spec.domain;

    let boundary = |step: usize, nodes: &[BoundaryNode], out: &mut [f64]| -> Result<()> {
        let t = spec.time.time(step);
        for (v, node) in out.iter_mut().zip(nodes) {
            *v = spec.boundary.for_node(node).eval(t) - corrector.eval(node.point.x, t);
        }
        Ok(())
    };
    let add_corrector = |step: usize, field: &mut ScalarField| {
        if corrector.is_zero() {
            return;
        }
        let t = spec.time.time(step);
        for (idx, v) in field.values_mut().iter_mut().enumerate() {
            *v += corrector.eval(domain.point(idx).x, t);
        }
    };
    let snapshots = march(spec, boundary, add_corrector)?;
    Ok(Trajectory { spec: spec.clone(), snapshots, penalty_warning: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{evaluate_initial, BoundaryMode, Interval1D, TimeGrid};
    use crate::functions::{SpaceFn, TimeFn};
    use crate::solver::solve;

    /// erfc by its Maclaurin series `1 - 2/sqrt(π) Σ (-1)^n z^{2n+1} / (n! (2n+1))`.
    fn erfc_series(z: f64) -> f64 {
        let mut term = z;
        let mut sum = z;
        for n in 1..80 {
            term *= -z * z / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    }

    fn sine_1d(steps: usize, n: usize) -> ProblemSpec {
        ProblemSpec::new(Domain::Interval(Interval1D::new(n).unwrap()), TimeGrid::unit(steps).unwrap())
            .with_nu(0.2)
            .with_initial(SpaceFn::SineProfile)
            .with_boundary(TimeFn::Zero)
    }

    #[test]
    fn s0_values() {
        assert_eq!(s0(0.0, 0.3, 0.2), 1.0);
        // x/(2 sqrt(νt)) = 1
        let (nu, t) = (0.2f64, 0.5f64);
        let x = 2.0 * (nu * t).sqrt();
        assert!((s0(x, t, nu) - 0.157_299_207_050_285_13).abs() < 1e-15);
        assert!((s0(x, t, nu) - erfc_series(1.0)).abs() < 1e-14);
        assert!(s0(10.0, 0.01, 0.2) < 1e-100);
        assert_eq!(s0(0.0, 0.0, 0.2), 1.0);
        assert_eq!(s0(0.1, 0.0, 0.2), 0.0);
    }

    #[test]
    fn erfc_matches_series_and_integral_definition() {
        let nu = 0.2;
        for &(x, t) in &[(0.05f64, 0.1f64), (0.2, 0.5), (0.4, 0.9), (0.01, 0.001)] {
            let z = x / (2.0 * (nu * t).sqrt());
            if z < 3.0 {
                assert!((s0(x, t, nu) - erfc_series(z)).abs() < 1e-13);
            }
            // (1/sqrt(πνt)) ∫_x^∞ e^{-s²/4νt} ds
            let scale = 1.0 / (std::f64::consts::PI * nu * t).sqrt();
            let upper = x + 40.0 * (nu * t).sqrt();
            let integral = quadrature::integrate(|s| (-s * s / (4.0 * nu * t)).exp(), x, upper, 1e-12).unwrap();
            assert!((s0(x, t, nu) - scale * integral).abs() < 1e-11);
        }
    }

    #[test]
    fn s1_values() {
        assert_eq!(s1(0.0, 0.7, 0.2).unwrap(), 0.7);
        assert_eq!(s1(0.3, 0.0, 0.2).unwrap(), 0.0);
        let q = s1(0.2, 0.5, 0.2).unwrap();
        let c = s1_closed_form(0.2, 0.5, 0.2);
        assert!((q - c).abs() < 1e-8, "{q} vs {c}");
        assert!((s1_closed_form(0.0, 0.7, 0.2) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn corrector_coefficients() {
        let spec = sine_1d(1000, 24);
        let c = CorrectorSpec::from_problem(&spec, Procedure::P2).unwrap();
        let left = c.left.unwrap();
        assert!((left.alpha0 + 0.5f64.sqrt()).abs() < 1e-15);
        let expected_alpha1 = 0.2 * (1.25 * std::f64::consts::PI).powi(2) * 0.5f64.sqrt();
        assert!((left.alpha1 - expected_alpha1).abs() < 1e-12);
        assert!(c.right.is_none());
    }

    #[test]
    fn procedure_zero_is_identically_zero() {
        let spec = sine_1d(1000, 24);
        let corr = build_corrector(&CorrectorSpec::from_problem(&spec, Procedure::P0).unwrap());
        for x in [0.0, 0.3, 1.0] {
            for t in [0.0, 0.01, 1.0] {
                assert_eq!(corr.eval(x, t), 0.0);
            }
        }
    }

    #[test]
    fn procedure_zero_reduces_to_direct() {
        let spec = sine_1d(1000, 24);
        let direct = solve(&spec).unwrap();
        let corrected = solve(&spec.clone().with_mode(BoundaryMode::Corrector(Procedure::P0))).unwrap();
        assert_eq!(direct.snapshots.len(), corrected.snapshots.len());
        for (a, b) in direct.snapshots.iter().zip(&corrected.snapshots) {
            assert_eq!(a.field, b.field);
        }
    }

    #[test]
    fn procedure_one_shifts_left_boundary() {
        let spec = sine_1d(1000, 24).with_mode(BoundaryMode::Corrector(Procedure::P1)).with_stride(1);
        let traj = solve(&spec).unwrap();
        for snap in traj.snapshots.iter().skip(1).take(50) {
            assert!((snap.boundary[0] - 0.5f64.sqrt()).abs() < 1e-15);
        }
        // u(x, 0) = u0(x) away from the corner
        let u0 = evaluate_initial(&spec);
        for i in 1..=24 {
            assert_eq!(traj.initial().field.values()[i], u0.values()[i]);
        }
        // v's boundary is continuous at t = 0 on the left
        assert!((traj.snapshots[1].boundary[0] - u0.values()[0]).abs() < 1e-15);
    }

    #[test]
    fn s0_solves_the_heat_equation() {
        // finite-difference residual of ∂t S - ν ∂xx S shrinks at second order
        let nu = 0.2;
        let residual = |h: f64| {
            let mut worst = 0.0f64;
            for &x in &[0.1, 0.2, 0.4] {
                for &t in &[0.05, 0.2, 0.6] {
                    let dt = h * h;
                    let st = (s0(x, t + dt, nu) - s0(x, t - dt, nu)) / (2.0 * dt);
                    let sxx = (s0(x + h, t, nu) - 2.0 * s0(x, t, nu) + s0(x - h, t, nu)) / (h * h);
                    worst = worst.max((st - nu * sxx).abs());
                }
            }
            worst
        };
        let coarse = residual(0.02);
        let fine = residual(0.01);
        assert!(fine < coarse / 3.0, "{coarse} -> {fine}");
    }

    #[test]
    fn mirrored_term_for_incompatible_right_end() {
        let spec = sine_1d(1000, 24).with_endpoints(TimeFn::Zero, TimeFn::Constant(1.0));
        let c = CorrectorSpec::from_problem(&spec, Procedure::P1).unwrap();
        let right = c.right.unwrap();
        assert!((right.alpha0 - 1.0).abs() < 1e-12);
        let corr = build_corrector(&c);
        let t = 0.01;
        let expected = c.left.unwrap().alpha0 * s0(0.9, t, 0.2) + right.alpha0 * s0(0.1, t, 0.2);
        assert!((corr.eval(0.9, t) - expected).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_interval() {
        let spec = ProblemSpec::new(
            Domain::Square(crate::domain::SquareGrid::new(4, 4).unwrap()),
            TimeGrid::unit(100).unwrap(),
        );
        assert!(CorrectorSpec::from_problem(&spec, Procedure::P1).is_err());
    }
}
