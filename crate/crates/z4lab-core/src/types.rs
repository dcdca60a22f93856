//! Shared plain-data types: parameter sets, states, configurations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex scalar used for system coefficients and eigenvalues.
pub type ComplexValue = Complex64;

/// Validation failures for parameter and configuration types.
#[derive(Debug, Error, PartialEq)]
pub enum ValidationError {
    #[error("degenerate coefficient set: {0}")]
    DegenerateCoefficients(&'static str),
    #[error("parameter out of range: {0}")]
    OutOfRange(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

/// Coefficients of the general complex system
/// `u' = (-gamma + i beta) u + a0 z u* + a1 u^2 u* + a2 z^2 u + a3 (u*)^3`,
/// `z' = mu z + b0 u^2 + b0* (u*)^2 + b1 z^3 + b2 z |u|^2`
/// with `u = x + i y` and real axis coefficients `b1`, `b2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemCoefficients {
    pub a0: ComplexValue,
    pub a1: ComplexValue,
    pub a2: ComplexValue,
    pub a3: ComplexValue,
    pub b0: ComplexValue,
    pub b1: f64,
    pub b2: f64,
}

impl SystemCoefficients {
    /// The concrete coefficient set used throughout the test-suite and CLI
    /// defaults: `a0 = -(1-i)/2`, `a1 = (1-i)/8`, `a2 = (3+i)/8`,
    /// `a3 = -(1-i)/8`, `b0 = 1/2`, `b1 = -1/4`, `b2 = -1/2`.
    pub fn concrete() -> Self {
        Self {
            a0: ComplexValue::new(-0.5, 0.5),
            a1: ComplexValue::new(0.125, -0.125),
            a2: ComplexValue::new(0.375, 0.125),
            a3: ComplexValue::new(-0.125, 0.125),
            b0: ComplexValue::new(0.5, 0.0),
            b1: -0.25,
            b2: -0.5,
        }
    }

    /// Checks the nondegeneracy needed by the rescaling and reductions:
    /// `a0 != 0`, `b0 != 0`, `b1 < 0`, and all entries finite.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let finite = [self.a0, self.a1, self.a2, self.a3, self.b0]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
            && self.b1.is_finite()
            && self.b2.is_finite();
        if !finite {
            return Err(ValidationError::NonFinite("system coefficients"));
        }
        if self.a0.norm() == 0.0 {
            return Err(ValidationError::DegenerateCoefficients("a0 must be nonzero"));
        }
        if self.b0.norm() == 0.0 {
            return Err(ValidationError::DegenerateCoefficients("b0 must be nonzero"));
        }
        if self.b1 >= 0.0 {
            return Err(ValidationError::DegenerateCoefficients(
                "b1 must be negative for bounded axis dynamics",
            ));
        }
        Ok(())
    }
}

/// Physical bifurcation parameters of the general/concrete systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Linear damping of the planar pair.
    pub gamma: f64,
    /// Rotation frequency of the planar pair.
    pub beta: f64,
    /// Axis instability parameter.
    pub mu: f64,
}

impl PhysParams {
    pub fn new(gamma: f64, beta: f64, mu: f64) -> Self {
        Self { gamma, beta, mu }
    }
}

/// Parameters of the rescaled system (axis equilibria pinned at `z = ±1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledParams {
    /// Rescaled damping, `gamma / (z0 |a0|)`.
    pub rho: f64,
    /// Rescaled frequency, `beta / (z0 |a0|)`.
    pub omega: f64,
    /// Axis instability parameter (unchanged by the rescaling).
    pub mu: f64,
}

impl RescaledParams {
    pub fn new(rho: f64, omega: f64, mu: f64) -> Result<Self, ValidationError> {
        if !(rho.is_finite() && omega.is_finite() && mu.is_finite()) {
            return Err(ValidationError::NonFinite("rescaled parameters"));
        }
        if mu <= 0.0 {
            return Err(ValidationError::OutOfRange("mu must be positive"));
        }
        Ok(Self { rho, omega, mu })
    }
}

/// Parameters of the Shimizu–Morioka system
/// `x' = y`, `y' = x(1 - z) - lambda y`, `z' = -alpha z + x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SMParams {
    pub alpha: f64,
    pub lambda: f64,
}

impl SMParams {
    /// Standard constructor for the classical parameter range.
    pub fn new(alpha: f64, lambda: f64) -> Result<Self, ValidationError> {
        if !(alpha.is_finite() && lambda.is_finite()) {
            return Err(ValidationError::NonFinite("SM parameters"));
        }
        if alpha <= 0.0 {
            return Err(ValidationError::OutOfRange("alpha must be positive"));
        }
        if lambda <= 0.0 {
            return Err(ValidationError::OutOfRange("lambda must be positive"));
        }
        Ok(Self { alpha, lambda })
    }

    /// Constructor without the `lambda > 0` restriction. The reduction of the
    /// rescaled system legitimately produces `lambda <= 0` away from the
    /// classical chaotic range; the vector field itself is defined for any
    /// finite `lambda`.
    pub fn new_unchecked(alpha: f64, lambda: f64) -> Result<Self, ValidationError> {
        if !(alpha.is_finite() && lambda.is_finite()) {
            return Err(ValidationError::NonFinite("SM parameters"));
        }
        if alpha <= 0.0 {
            return Err(ValidationError::OutOfRange("alpha must be positive"));
        }
        Ok(Self { alpha, lambda })
    }
}

/// Constants derived from a coefficient set (and `mu` where noted) that
/// parameterize the rescaled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Axis-to-plane coupling `A + iB = a0 b0 sqrt(|b1|) / |a0|^2`.
    pub ab: ComplexValue,
    /// Quadratic-in-z coupling `C + iD = a2 / (|a0| sqrt(|b1|))`.
    pub cd: ComplexValue,
    /// Axis equilibrium scale `z0 = sqrt(mu / |b1|)`.
    pub z0: f64,
    /// Time/length conversion factor `z0 |a0|` between physical and rescaled
    /// variables.
    pub time_scale: f64,
    /// Axis stiffness `a = sqrt(|b1|) / |a0|` of the rescaled system.
    pub axis_rate: f64,
}

impl DerivedConstants {
    pub fn a(&self) -> f64 {
        self.ab.re
    }
    pub fn b(&self) -> f64 {
        self.ab.im
    }
    pub fn c(&self) -> f64 {
        self.cd.re
    }
    pub fn d(&self) -> f64 {
        self.cd.im
    }
}

/// A point in the three-dimensional phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl State3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Euclidean norm.
    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Radius in the `(x, y)`-plane.
    pub fn radius_xy(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn sub(self, o: State3) -> State3 {
        State3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn add(self, o: State3) -> State3 {
        State3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn scale(self, s: f64) -> State3 {
        State3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for State3 {
    fn from(a: [f64; 3]) -> Self {
        Self::from_array(a)
    }
}

impl From<State3> for [f64; 3] {
    fn from(s: State3) -> Self {
        s.to_array()
    }
}

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    /// Relative tolerance of the embedded error estimate.
    pub rel_tol: f64,
    /// Absolute tolerance of the embedded error estimate.
    pub abs_tol: f64,
    /// Upper bound on the step magnitude.
    pub max_step: f64,
    /// Upper bound on the number of accepted+rejected steps per call.
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 10.0,
            max_steps: 100_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0) {
            return Err(ValidationError::OutOfRange(
                "integrator tolerances and max_step must be positive",
            ));
        }
        if self.max_steps == 0 {
            return Err(ValidationError::OutOfRange("max_steps must be nonzero"));
        }
        Ok(())
    }

    /// Convenience constructor with the given tolerances and default limits.
    pub fn with_tols(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }
}

/// Settings for Benettin Lyapunov-spectrum estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LyapunovConfig {
    /// Time discarded before accumulation starts.
    pub t_transient: f64,
    /// Total integration time (accumulation runs over `t_total - t_transient`).
    pub t_total: f64,
    /// Interval between QR renormalizations.
    pub renorm_dt: f64,
    /// Number of exponents (tangent-frame columns), 1..=3.
    pub n_exponents: usize,
    /// Seed recorded with results; seeded sampling ops consume it.
    pub seed: u64,
    /// Norm bound beyond which the orbit is declared divergent.
    pub escape_radius: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            t_transient: 2e3,
            t_total: 2e4,
            renorm_dt: 1.0,
            n_exponents: 3,
            seed: 1,
            escape_radius: 1e3,
        }
    }
}

impl LyapunovConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if !(self.t_total > 0.0 && self.renorm_dt > 0.0 && self.escape_radius > 0.0) {
            return Err(ValidationError::OutOfRange(
                "t_total, renorm_dt, escape_radius must be positive",
            ));
        }
        if self.t_transient < 0.0 || self.t_transient >= self.t_total {
            return Err(ValidationError::OutOfRange(
                "t_transient must lie in [0, t_total)",
            ));
        }
        if !(1..=3).contains(&self.n_exponents) {
            return Err(ValidationError::OutOfRange("n_exponents must be 1..=3"));
        }
        Ok(())
    }
}

/// A time-ordered sequence of states produced by the integrator.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `(t, state)` samples with strictly monotone `t` (increasing or
    /// decreasing with the integration direction).
    pub samples: Vec<(f64, State3)>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, s: State3) {
        debug_assert!(
            self.samples
                .last()
                .map_or(true, |&(tp, _)| (t - tp).abs() > 0.0),
            "trajectory samples must have distinct times"
        );
        self.samples.push((t, s));
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<(f64, State3)> {
        self.samples.last().copied()
    }
}
