//! The reference experiments: square, disk and interval runs with
//! incompatible initial and boundary data.

use crate::domain::{BoundaryMode, Domain, Interval1D, PolarGrid, ProblemSpec, SquareGrid, TimeGrid};
use crate::error::Result;
use crate::functions::{SpaceFn, TimeFn};

pub const NU: f64 = 0.2;
pub const EPSILON: f64 = 0.1;
pub const SWEEP_EPSILONS: [f64; 6] = [0.01, 0.05, 0.1, 0.2, 0.5, 1.0];

/// `n × n` square with `u0 = sin(5π/4·x+3π/4) sin(5π/4·y+3π/4)`, `g = 0`.
pub fn square(n: usize, steps: usize) -> Result<ProblemSpec> {
    Ok(ProblemSpec::new(Domain::Square(SquareGrid::new(n, n)?), TimeGrid::unit(steps)?)
        .with_nu(NU)
        .with_initial(SpaceFn::SinePatch)
        .with_boundary(TimeFn::Zero))
}

/// Unit disk with `u0 = xy`, `g = 0`.
pub fn disk(nr: usize, ntheta: usize, steps: usize) -> Result<ProblemSpec> {
    Ok(ProblemSpec::new(Domain::Disk(PolarGrid::new(nr, ntheta)?), TimeGrid::unit(steps)?)
        .with_nu(NU)
        .with_initial(SpaceFn::Xy)
        .with_boundary(TimeFn::Zero))
}

/// `[0, 1]` with `u0 = sin(5π/4·x+3π/4)`, `g1 = g2 = 0`.
pub fn interval(n: usize, steps: usize) -> Result<ProblemSpec> {
    Ok(ProblemSpec::new(Domain::Interval(Interval1D::new(n)?), TimeGrid::unit(steps)?)
        .with_nu(NU)
        .with_initial(SpaceFn::SineProfile)
        .with_endpoints(TimeFn::Zero, TimeFn::Zero))
}

/// A coarse spec and its nested refinement. The fine snapshot stride is
/// the step ratio so every coarse snapshot has a partner.
#[derive(Debug, Clone)]
pub struct MeshPair {
    pub coarse: ProblemSpec,
    pub fine: ProblemSpec,
}

impl MeshPair {
    pub fn new(coarse: ProblemSpec, fine: ProblemSpec) -> Self {
        let ratio = (fine.time.n_steps() / coarse.time.n_steps()).max(1);
        let stride = coarse.stride();
        Self { fine: fine.with_stride(stride * ratio), coarse: coarse.with_stride(stride) }
    }

    pub fn with_mode(&self, mode: BoundaryMode) -> Self {
        Self { coarse: self.coarse.clone().with_mode(mode), fine: self.fine.clone().with_mode(mode) }
    }

    pub fn with_stride(&self, stride: usize) -> Self {
        let ratio = self.fine.time.n_steps() / self.coarse.time.n_steps();
        Self {
            coarse: self.coarse.clone().with_stride(stride),
            fine: self.fine.clone().with_stride(stride * ratio),
        }
    }
}

/// `(1/n, Δt)` against `(1/2n, Δt/4)`.
pub fn square_pair(n: usize, steps: usize) -> Result<MeshPair> {
    Ok(MeshPair::new(square(n, steps)?, square(2 * n, 4 * steps)?))
}

/// `(nr, ntheta)` against `(2nr, 2ntheta)`; the time step shrinks 16-fold
/// because the innermost ring limits stability as `1/(Δr²Δθ²)`.
pub fn disk_pair(nr: usize, ntheta: usize, steps: usize) -> Result<MeshPair> {
    Ok(MeshPair::new(disk(nr, ntheta, steps)?, disk(2 * nr, 2 * ntheta, 16 * steps)?))
}

pub fn interval_pair(n: usize, steps: usize) -> Result<MeshPair> {
    Ok(MeshPair::new(interval(n, steps)?, interval(2 * n, 4 * steps)?))
}

/// Default square pair: `(1/24, 1/1000)` against `(1/48, 1/4000)`.
pub fn default_square_pair() -> Result<MeshPair> {
    square_pair(24, 1000)
}

/// Default disk pair: `Δr = 1/10`, 63 angles, against `Δr = 1/20`, 126
/// angles, with time steps small enough for the polar stability bound.
pub fn default_disk_pair() -> Result<MeshPair> {
    Ok(disk_pair(10, PolarGrid::ntheta_for_spacing(0.1), 5000)?.with_stride(5))
}

pub fn default_interval_pair() -> Result<MeshPair> {
    interval_pair(24, 1000)
}

/// Three nested refinement pairs for rate fits on the square.
pub fn square_chain() -> Result<Vec<MeshPair>> {
    [(24, 1000), (48, 4000), (96, 16000)].into_iter().map(|(n, s)| square_pair(n, s)).collect()
}

/// Three nested refinement pairs for rate fits on the disk.
pub fn disk_chain() -> Result<Vec<MeshPair>> {
    [(4, 16, 100), (8, 32, 1600), (16, 64, 25600)]
        .into_iter()
        .map(|(nr, nt, s)| disk_pair(nr, nt, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::cfl_check;

    #[test]
    fn defaults_are_stable_and_nested() {
        let mut pairs = vec![default_square_pair().unwrap(), default_disk_pair().unwrap(), default_interval_pair().unwrap()];
        pairs.extend(square_chain().unwrap());
        pairs.extend(disk_chain().unwrap());
        for p in &pairs {
            assert!(cfl_check(&p.coarse).stable, "{:?}", cfl_check(&p.coarse));
            assert!(cfl_check(&p.fine).stable, "{:?}", cfl_check(&p.fine));
            let ratio = p.fine.time.n_steps() / p.coarse.time.n_steps();
            assert_eq!(p.fine.stride(), p.coarse.stride() * ratio);
        }
    }
}
