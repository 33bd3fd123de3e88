//! Heat-equation solvers for incompatible initial and boundary data.
//!
//! The boundary condition `u|∂Ω = g` is replaced by `u|∂Ω = k^ε`, where
//! `k^ε` relaxes from `u0|∂Ω` to `g` through `k' + (k - g)/ε = 0`. This
//! removes the corner singularity at `t = 0` in any dimension. The crate
//! provides explicit solvers on the interval, square and disk, the
//! boundary-layer expansion of `k^ε`, the classical 1D correctors used as
//! a baseline, and the mesh-refinement analysis used to compare them.

pub mod analysis;
pub mod corrector;
pub mod domain;
pub mod error;
pub mod functions;
pub mod penalty;
pub mod presets;
mod quadrature;
pub mod solver;

pub use analysis::{
    comparative_error, compare_pair, convergence_study, epsilon_sweep, fit_rate, ConvergenceStudy, ErrorCurve,
    RateFit, SweepRow,
};
pub use corrector::{build_corrector, s0, s1, s1_closed_form, solve_corrected, Corrector, CorrectorSpec};
pub use domain::{
    evaluate_initial, BoundaryData, BoundaryMode, BoundaryNode, Domain, Interval1D, PolarGrid, ProblemSpec,
    Procedure, SquareGrid, TimeGrid,
};
pub use error::{Error, Result};
pub use functions::{Forcing, Point, SpaceFn, TimeFn};
pub use penalty::{
    asymptotic_approx, inner_term, outer_term, penalty_exact, penalty_step, remainder_norms, PenaltyParams,
    RemainderReport,
};
pub use solver::{cfl_check, solve, step_1d, step_polar, step_square, CflReport, ScalarField, Snapshot, Trajectory};

/// Adaptive Gauss–Kronrod quadrature used for `k^ε` with non-built-in data
/// and for the corrector kernel `S1`.
pub use quadrature::integrate;
