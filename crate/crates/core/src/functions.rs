//! Built-in data functions for initial values, boundary data and forcing.
//!
//! Experiments select these by name (see [`TimeFn::from_name`] and
//! [`SpaceFn::from_name`]) rather than parsing expressions at runtime.
//! `Custom` variants exist for programmatic use; they carry no analytic
//! derivatives, so anything that needs `g'` or `u0''` rejects them.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

/// Cartesian position of a grid node. 1D nodes use `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

type TimeClosure = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SpaceClosure = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
type ForcingClosure = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;

/// A scalar function of time, used for boundary data `g`.
#[derive(Clone)]
pub enum TimeFn {
    Zero,
    Constant(f64),
    /// `g(t) = sin t`
    SinT,
    Custom(TimeClosure),
}

impl TimeFn {
    pub const NAMES: [&'static str; 2] = ["zero", "sin_t"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "zero" => Some(Self::Zero),
            "sin_t" => Some(Self::SinT),
            _ => None,
        }
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
            Self::SinT => t.sin(),
            Self::Custom(f) => f(t),
        }
    }

    /// The `order`-th time derivative, when it is known analytically.
    pub fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        match (self, order) {
            (_, 0) => Some(self.eval(t)),
            (Self::Zero | Self::Constant(_), _) => Some(0.0),
            (Self::SinT, j) => Some((t + j as f64 * FRAC_PI_2).sin()),
            (Self::Custom(_), _) => None,
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, Self::Custom(_))
    }
}

impl fmt::Debug for TimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::Constant(c) => write!(f, "constant({c})"),
            Self::SinT => f.write_str("sin_t"),
            Self::Custom(_) => f.write_str("custom"),
        }
    }
}

/// A scalar function of position, used for initial data `u0`.
#[derive(Clone)]
pub enum SpaceFn {
    Zero,
    Constant(f64),
    /// `sin(5π/4·x + 3π/4)·sin(5π/4·y + 3π/4)`
    SinePatch,
    /// `sin(5π/4·x + 3π/4)`
    SineProfile,
    /// `x·y`
    Xy,
    /// `sin(πx)`, compatible with zero boundary data on the unit interval.
    SinPiX,
    Custom(SpaceClosure),
}

const SINE_WAVENUMBER: f64 = 5.0 * PI / 4.0;
const SINE_PHASE: f64 = 3.0 * PI / 4.0;

fn shifted_sine(s: f64) -> f64 {
    (SINE_WAVENUMBER * s + SINE_PHASE).sin()
}

impl SpaceFn {
    pub const NAMES: [&'static str; 4] = ["zero", "sine_patch", "sine_profile", "xy"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "zero" => Some(Self::Zero),
            "sine_patch" => Some(Self::SinePatch),
            "sine_profile" => Some(Self::SineProfile),
            "xy" => Some(Self::Xy),
            _ => None,
        }
    }

    pub fn custom(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, p: Point) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
            Self::SinePatch => shifted_sine(p.x) * shifted_sine(p.y),
            Self::SineProfile => shifted_sine(p.x),
            Self::Xy => p.x * p.y,
            Self::SinPiX => (PI * p.x).sin(),
            Self::Custom(f) => f(p),
        }
    }

    /// `∂²/∂x²` along the line `y = 0`, for 1D corrector coefficients.
    pub fn d2x(&self, x: f64) -> Option<f64> {
        match self {
            Self::Zero | Self::Constant(_) | Self::Xy => Some(0.0),
            Self::SineProfile => Some(-SINE_WAVENUMBER * SINE_WAVENUMBER * shifted_sine(x)),
            Self::SinPiX => Some(-PI * PI * (PI * x).sin()),
            Self::SinePatch => {
                Some(-SINE_WAVENUMBER * SINE_WAVENUMBER * shifted_sine(x) * shifted_sine(0.0))
            }
            Self::Custom(_) => None,
        }
    }
}

impl fmt::Debug for SpaceFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Zero => "zero",
            Self::Constant(_) => "constant",
            Self::SinePatch => "sine_patch",
            Self::SineProfile => "sine_profile",
            Self::Xy => "xy",
            Self::SinPiX => "sin_pi_x",
            Self::Custom(_) => "custom",
        };
        f.write_str(name)
    }
}

/// Source term `f(x, t)`.
#[derive(Clone, Default)]
pub enum Forcing {
    #[default]
    Zero,
    Custom(ForcingClosure),
}

impl Forcing {
    pub fn from_name(name: &str) -> Option<Self> {
        (name == "zero").then_some(Self::Zero)
    }

    pub fn custom(f: impl Fn(Point, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, p: Point, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Custom(f) => f(p, t),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::Custom(_) => f.write_str("custom"),
        }
    }
}
