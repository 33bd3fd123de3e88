//! Shared fixtures for the criterion benchmarks.

use heatpen_core::presets;
use heatpen_core::{BoundaryMode, ProblemSpec};

/// The square experiment at a given resolution, `Δt ∝ Δx²`.
pub fn default_square(n: usize, mode: BoundaryMode) -> ProblemSpec {
    let steps = 1000 * (n / 24).pow(2).max(1);
    presets::square(n, steps).unwrap().with_mode(mode)
}

pub fn default_disk(nr: usize, ntheta: usize, steps: usize) -> ProblemSpec {
    presets::disk(nr, ntheta, steps).unwrap()
}
