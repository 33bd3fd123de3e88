//! The boundary relaxation ODE `k' + (k - g)/ε = 0`, `k(0) = u0|∂Ω`.
//!
//! Provides its exact solution, the explicit Euler update used by the
//! solvers, and the outer/inner boundary-layer expansion
//! `k ~ Σ ε^j (k^j + θ^j)` with the remainder norms that measure it.

use crate::domain::TimeGrid;
use crate::error::{Error, Result};
use crate::functions::TimeFn;
use crate::quadrature;

const QUADRATURE_TOL: f64 = 1e-10;

/// Relaxation data for a single boundary node.
#[derive(Debug, Clone)]
pub struct PenaltyParams {
    epsilon: f64,
    k0: f64,
    g: TimeFn,
}

impl PenaltyParams {
    pub fn new(epsilon: f64, k0: f64, g: TimeFn) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidSpec(format!("penalty parameter must be positive, got {epsilon}")));
        }
        Ok(Self { epsilon, k0, g })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn g(&self) -> &TimeFn {
        &self.g
    }
}

/// `k^ε(t) = e^{-t/ε} k0 + (1/ε) ∫₀ᵗ g(s) e^{(s-t)/ε} ds`.
///
/// Closed form for the built-in `g`; adaptive quadrature otherwise.
pub fn penalty_exact(params: &PenaltyParams, t: f64) -> Result<f64> {
    let eps = params.epsilon;
    let k0 = params.k0;
    if t == 0.0 {
        return Ok(k0);
    }
    let decay = (-t / eps).exp();
    let value = match &params.g {
        TimeFn::Zero => k0 * decay,
        TimeFn::Constant(c) => c + (k0 - c) * decay,
        TimeFn::SinT => {
            let scale = 1.0 / (1.0 + eps * eps);
            (t.sin() - eps * t.cos()) * scale + (k0 + eps * scale) * decay
        }
        TimeFn::Custom(g) => {
            let integral = quadrature::integrate(|s| g(s) * ((s - t) / eps).exp(), 0.0, t, QUADRATURE_TOL)?;
            k0 * decay + integral / eps
        }
    };
    Ok(value)
}

/// `Δt/ε` reached the point where explicit Euler stops relaxing smoothly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityWarning {
    pub ratio: f64,
}

impl std::fmt::Display for StabilityWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ratio > 2.0 {
            write!(f, "dt/eps = {} > 2: penalty iteration diverges", self.ratio)
        } else if self.ratio > 1.0 {
            write!(f, "dt/eps = {} > 1: penalty iteration overshoots g", self.ratio)
        } else {
            write!(f, "dt/eps = {}: penalty relaxes to g in a single step", self.ratio)
        }
    }
}

/// Warns once `Δt/ε ≥ 1`. At exactly 1 the update jumps straight to `g`,
/// which removes the relaxation the penalty is there to provide.
pub fn stability_warning(epsilon: f64, dt: f64) -> Option<StabilityWarning> {
    let ratio = dt / epsilon;
    (ratio >= 1.0).then_some(StabilityWarning { ratio })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyStep {
    pub value: f64,
    pub warning: Option<StabilityWarning>,
}

/// One explicit Euler step: `k_{n+1} = k_n - (Δt/ε)(k_n - g_n)`.
pub fn penalty_step(k_n: f64, g_n: f64, epsilon: f64, dt: f64) -> PenaltyStep {
    PenaltyStep { value: k_n - dt / epsilon * (k_n - g_n), warning: stability_warning(epsilon, dt) }
}

/// Outer expansion term `k^j = (-1)^j g^{(j)}`.
#[derive(Debug, Clone)]
pub struct OuterTerm {
    order: usize,
    g: TimeFn,
}

impl OuterTerm {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eval(&self, t: f64) -> f64 {
        let d = self.g.derivative(self.order, t).expect("checked at construction");
        if self.order.is_multiple_of(2) {
            d
        } else {
            -d
        }
    }
}

pub fn outer_term(order: usize, g: &TimeFn) -> Result<OuterTerm> {
    if g.derivative(order, 0.0).is_none() {
        return Err(Error::MissingDerivative { order, what: "boundary data g" });
    }
    Ok(OuterTerm { order, g: g.clone() })
}

/// `θ^j(0)`: `k0 - g(0)` for `j = 0`, `(-1)^{j+1} g^{(j)}(0)` above.
pub fn inner_initial(order: usize, params: &PenaltyParams) -> Result<f64> {
    let d = params
        .g
        .derivative(order, 0.0)
        .ok_or(Error::MissingDerivative { order, what: "boundary data g" })?;
    Ok(match order {
        0 => params.k0 - d,
        j if j % 2 == 1 => d,
        _ => -d,
    })
}

/// Inner term `θ^j(t/ε) = e^{-t/ε} θ^j(0)`.
pub fn inner_term(order: usize, params: &PenaltyParams, t: f64) -> Result<f64> {
    Ok((-t / params.epsilon).exp() * inner_initial(order, params)?)
}

/// One order of the expansion evaluated at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerm {
    pub order: usize,
    pub outer: f64,
    pub inner: f64,
    pub inner_initial: f64,
}

pub fn expansion_term(order: usize, params: &PenaltyParams, t: f64) -> Result<ExpansionTerm> {
    let outer = outer_term(order, &params.g)?.eval(t);
    let inner_initial = inner_initial(order, params)?;
    Ok(ExpansionTerm { order, outer, inner: (-t / params.epsilon).exp() * inner_initial, inner_initial })
}

/// `Σ_{j=0..n} ε^j (k^j(t) + θ^j(t/ε))`.
pub fn asymptotic_approx(n: usize, params: &PenaltyParams, t: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut scale = 1.0;
    for j in 0..=n {
        let term = expansion_term(j, params, t)?;
        sum += scale * (term.outer + term.inner);
        scale *= params.epsilon;
    }
    Ok(sum)
}

/// Time norms of `w = k^ε - (order-n expansion)` over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderReport {
    pub order: usize,
    pub epsilon: f64,
    pub l2: f64,
    pub sup: f64,
}

/// Samples `w` at every grid time `t_m` (including both ends);
/// `l2 = sqrt(Δt Σ w²)`, `sup = max |w|`.
pub fn remainder_norms(n: usize, params: &PenaltyParams, time: &TimeGrid) -> Result<RemainderReport> {
    let mut sum_sq = 0.0;
    let mut sup = 0.0f64;
    for m in 0..=time.n_steps() {
        let t = time.time(m);
        let w = penalty_exact(params, t)? - asymptotic_approx(n, params, t)?;
        sum_sq += w * w;
        sup = sup.max(w.abs());
    }
    Ok(RemainderReport { order: n, epsilon: params.epsilon, l2: (time.dt() * sum_sq).sqrt(), sup })
}

/// Worst-case remainder norms over a set of boundary nodes sharing `g`.
pub fn remainder_norms_over_nodes(
    n: usize,
    epsilon: f64,
    g: &TimeFn,
    initial_values: &[f64],
    time: &TimeGrid,
) -> Result<RemainderReport> {
    let mut worst = RemainderReport { order: n, epsilon, l2: 0.0, sup: 0.0 };
    for &k0 in initial_values {
        let report = remainder_norms(n, &PenaltyParams::new(epsilon, k0, g.clone())?, time)?;
        worst.l2 = worst.l2.max(report.l2);
        worst.sup = worst.sup.max(report.sup);
    }
    Ok(worst)
}
