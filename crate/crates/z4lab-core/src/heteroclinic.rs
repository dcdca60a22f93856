//! Heteroclinic-surface machinery: the closed-form planar separatrix of the
//! limit system, the signed separatrix-split function measured by shooting,
//! the bisection search for the connection locus `rho*(omega, mu)`, arrival
//! angles of the connection at the origin saddle, and a variation-of-constants
//! check of the fundamental solutions along the separatrix.
//!
//! The split function launches the one-dimensional unstable separatrix of an
//! axis saddle `(0, 0, ±1)`, integrates it around its wing, and measures its
//! signed offset from the stable surface of the origin where the orbit
//! re-enters a sampling cylinder `x^2 + y^2 = r_cyl^2`. The offset is measured
//! against the exact quadratic jet of the stable surface and extrapolated over
//! the radii `r_cyl, r_cyl/2, r_cyl/4`, which removes the geometric bias of
//! sampling at finite radius; what remains changes sign exactly at the
//! connection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::{
    integrate_to_event, EventDirection, EventSpec, IntegrateError,
};
use crate::linalg::{solve3, Mat3};
use crate::normal_form::{coupling_ab, NormalFormError};
use crate::systems::{plane_unstable_direction, EquilibriumId, RescaledField, SystemError};
use crate::types::{
    IntegratorConfig, RescaledParams, State3, SystemCoefficients, ValidationError,
};

/// Factor above `r_cyl` at which outward motion arms the inward cascade.
pub const ARM_FACTOR: f64 = 1.2;
/// Radius at which an arrival angle is read off.
pub const ARRIVAL_RADIUS: f64 = 1e-5;
/// Arming radius for the arrival-angle integration.
pub const ARRIVAL_ARM_RADIUS: f64 = 0.3;
/// Fixed time at which the asymptotic limits of the second fundamental
/// solution are sampled.
const T_FAR: f64 = 20.0;

/// Errors from the shooting and search operations.
#[derive(Debug, Error)]
pub enum HetError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error("shooting orbit found no crossing: {0}")]
    NoCrossing(String),
    #[error(
        "split has the same sign at both bracket ends: delta({0}) = {1:.3e}, delta({2}) = {3:.3e}"
    )]
    NoSignChange(f64, f64, f64, f64),
    #[error("stable-surface jet system is singular")]
    SingularJet,
    #[error("the origin is not a valid shooting source")]
    InvalidSource,
}

/// The explicit heteroclinic separatrix of the planar limit system at
/// `rho = 1/2`, `omega = mu = 0`:
/// `x0(t) = 1/(2 sqrt(2|A|) cosh(t/2))`, `z0(t) = 1/(1 + e^t)`,
/// running from `(0, 1)` (the upper axis saddle) to `(0, 0)` (the origin).
#[derive(Debug, Clone, Copy)]
pub struct PlanarSeparatrix {
    coupling_a: f64,
    amp: f64,
}

impl PlanarSeparatrix {
    /// Requires the connection geometry `coupling_a < 0`.
    pub fn new(coupling_a: f64) -> Result<Self, HetError> {
        if !(coupling_a < 0.0) {
            return Err(ValidationError::OutOfRange("coupling A must be negative").into());
        }
        Ok(Self {
            coupling_a,
            amp: 1.0 / (-2.0 * coupling_a).sqrt(),
        })
    }

    pub fn x(&self, t: f64) -> f64 {
        self.amp / (2.0 * (t / 2.0).cosh())
    }

    /// `1/(1 + e^t)`, evaluated without overflow for large `|t|`.
    pub fn z(&self, t: f64) -> f64 {
        if t >= 0.0 {
            let e = (-t).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + t.exp())
        }
    }

    pub fn x_dot(&self, t: f64) -> f64 {
        self.x(t) * (self.z(t) - 0.5)
    }

    pub fn z_dot(&self, t: f64) -> f64 {
        let x = self.x(t);
        2.0 * self.coupling_a * x * x
    }

    pub fn x_ddot(&self, t: f64) -> f64 {
        self.x_dot(t) * (self.z(t) - 0.5) + self.x(t) * self.z_dot(t)
    }

    pub fn z_ddot(&self, t: f64) -> f64 {
        4.0 * self.coupling_a * self.x(t) * self.x_dot(t)
    }

    pub fn state(&self, t: f64) -> State3 {
        State3::new(self.x(t), 0.0, self.z(t))
    }

    pub fn velocity(&self, t: f64) -> State3 {
        State3::new(self.x_dot(t), 0.0, self.z_dot(t))
    }
}

/// First integral of the planar limit system in the invariant plane `y = 0`:
/// `E = (z - rho)^2 - 2A x^2`. Conserved for every `rho` when `omega = mu = 0`.
pub fn energy_e(rho: f64, coupling_a: f64, x: f64, z: f64) -> f64 {
    (z - rho).powi(2) - 2.0 * coupling_a * x * x
}

/// The `mu = 0` limit of the rescaled field: the cubic plane terms and the
/// axis self-coupling vanish, leaving
/// `x' = -rho x - omega y + z x`, `y' = omega x - rho y - z y`,
/// `z' = 2A (x^2 - y^2) - 4B x y`.
#[derive(Debug, Clone, Copy)]
pub struct LimitField {
    pub rho: f64,
    pub omega: f64,
    pub coupling_a: f64,
    pub coupling_b: f64,
}

impl LimitField {
    pub fn eval(&self, s: State3) -> State3 {
        let State3 { x, y, z } = s;
        State3::new(
            -self.rho * x - self.omega * y + z * x,
            self.omega * x - self.rho * y - z * y,
            2.0 * self.coupling_a * (x * x - y * y) - 4.0 * self.coupling_b * x * y,
        )
    }

    pub fn jacobian(&self, s: State3) -> Mat3 {
        let State3 { x, y, z } = s;
        let (a, b) = (self.coupling_a, self.coupling_b);
        [
            [-self.rho + z, -self.omega, x],
            [self.omega, -self.rho - z, -y],
            [4.0 * a * x - 4.0 * b * y, -4.0 * a * y - 4.0 * b * x, 0.0],
        ]
    }
}

/// Field used by the shooting operations: the exact `mu = 0` limit or the full
/// rescaled field.
#[derive(Debug, Clone)]
enum ShootField {
    Limit(LimitField),
    Full(RescaledField),
}

impl ShootField {
    fn new(
        c: &SystemCoefficients,
        rho: f64,
        omega: f64,
        mu: f64,
    ) -> Result<Self, HetError> {
        if !(mu >= 0.0) || !rho.is_finite() || !omega.is_finite() {
            return Err(ValidationError::OutOfRange(
                "shooting requires finite rho, omega and mu >= 0",
            )
            .into());
        }
        if mu == 0.0 {
            let ab = coupling_ab(c)?;
            Ok(ShootField::Limit(LimitField {
                rho,
                omega,
                coupling_a: ab.re,
                coupling_b: ab.im,
            }))
        } else {
            Ok(ShootField::Full(RescaledField::new(
                c,
                RescaledParams::new(rho, omega, mu)?,
            )?))
        }
    }

    fn eval(&self, s: State3) -> State3 {
        match self {
            ShootField::Limit(f) => f.eval(s),
            ShootField::Full(f) => f.eval(s),
        }
    }

    fn coupling_a(&self) -> f64 {
        match self {
            ShootField::Limit(f) => f.coupling_a,
            ShootField::Full(f) => f.coupling_a(),
        }
    }

    fn coupling_b(&self) -> f64 {
        match self {
            ShootField::Limit(f) => f.coupling_b,
            ShootField::Full(f) => f.coupling_b(),
        }
    }

    fn rho(&self) -> f64 {
        match self {
            ShootField::Limit(f) => f.rho,
            ShootField::Full(f) => f.params.rho,
        }
    }

    fn omega(&self) -> f64 {
        match self {
            ShootField::Limit(f) => f.omega,
            ShootField::Full(f) => f.params.omega,
        }
    }

    /// Axis eigenvalue of the origin (`a sqrt(mu)` for the full field, zero in
    /// the limit).
    fn origin_axis_rate(&self) -> f64 {
        match self {
            ShootField::Limit(_) => 0.0,
            ShootField::Full(f) => f.axis_eigenvalue_at(EquilibriumId::O),
        }
    }

    fn unstable_direction(&self, eq: EquilibriumId) -> Result<(State3, f64), HetError> {
        let b = match self {
            ShootField::Limit(f) => {
                let j = f.jacobian(eq.state());
                [[j[0][0], j[0][1]], [j[1][0], j[1][1]]]
            }
            ShootField::Full(f) => f.plane_block_at(eq),
        };
        Ok(plane_unstable_direction(b)?)
    }
}

/// Quadratic jet `z = p x^2 + q x y + r y^2` of the stable surface of the
/// origin, from invariance at quadratic order:
/// the coefficients solve a 3x3 linear system driven by the quadratic axis
/// forcing `2A(x^2 - y^2) - 4Bxy` against the plane rotation `(rho, omega)`
/// and the axis rate `nu_z` of the origin.
pub fn stable_surface_jet(
    rho: f64,
    omega: f64,
    axis_rate_at_origin: f64,
    coupling_a: f64,
    coupling_b: f64,
) -> Result<[f64; 3], HetError> {
    let d = axis_rate_at_origin + 2.0 * rho;
    let m: Mat3 = [
        [d, -omega, 0.0],
        [2.0 * omega, d, -2.0 * omega],
        [0.0, omega, d],
    ];
    let rhs = [-2.0 * coupling_a, 4.0 * coupling_b, 2.0 * coupling_a];
    solve3(&m, &rhs).ok_or(HetError::SingularJet)
}

/// Options for [`separatrix_split`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitOptions {
    /// Outer sampling-cylinder radius.
    pub r_cyl: f64,
    /// Offset along the unstable eigendirection at launch.
    pub launch_offset: f64,
    /// Which axis saddle's separatrix is launched.
    pub source: EquilibriumId,
    /// Time budget for each leg of the shooting orbit.
    pub t_max: f64,
    pub integrator: IntegratorConfig,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self {
            r_cyl: 0.2,
            launch_offset: 1e-6,
            source: EquilibriumId::OPlus,
            t_max: 500.0,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl SplitOptions {
    pub fn validate(&self) -> Result<(), HetError> {
        if self.source == EquilibriumId::O {
            return Err(HetError::InvalidSource);
        }
        if !(self.r_cyl > 0.0) {
            return Err(ValidationError::OutOfRange("r_cyl must be positive").into());
        }
        if !(self.launch_offset > 0.0 && self.launch_offset < self.r_cyl) {
            return Err(
                ValidationError::OutOfRange("launch_offset must be in (0, r_cyl)").into(),
            );
        }
        if !(self.t_max > 0.0) {
            return Err(ValidationError::OutOfRange("t_max must be positive").into());
        }
        self.integrator.validate()?;
        Ok(())
    }
}

/// Result of one split measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitResult {
    /// Signed, bias-extrapolated split. Positive below the connection in
    /// `rho` (orbit passes above the stable surface of the origin for the
    /// upper saddle), zero exactly on the heteroclinic surface.
    pub delta: f64,
    /// Cylinder crossings actually used (time, state), outermost first.
    pub crossings: Vec<(f64, State3)>,
    /// How many radii of the cascade were reached (1 to 3).
    pub radii_used: usize,
    /// Jet coefficients `(p, q, r)` of the stable surface used for the
    /// measurement.
    pub stable_jet: [f64; 3],
}

/// Measures the signed distance between the unstable separatrix of an axis
/// saddle and the stable surface of the origin. `mu = 0` selects the exact
/// limit field. The sign convention makes `delta` decreasing in `rho` near
/// the connection, identical for both saddles.
pub fn separatrix_split(
    c: &SystemCoefficients,
    rho: f64,
    omega: f64,
    mu: f64,
    opts: &SplitOptions,
) -> Result<SplitResult, HetError> {
    opts.validate()?;
    let field = ShootField::new(c, rho, omega, mu)?;
    let f = |s: &State3| field.eval(*s);

    let jet = stable_surface_jet(
        field.rho(),
        field.omega(),
        field.origin_axis_rate(),
        field.coupling_a(),
        field.coupling_b(),
    )?;
    let q_jet = |x: f64, y: f64| jet[0] * x * x + jet[1] * x * y + jet[2] * y * y;

    let (v_u, _) = field.unstable_direction(opts.source)?;
    let launch = opts.source.state().add(v_u.scale(opts.launch_offset));

    // Leg 0: leave the saddle neighborhood outward.
    let arm_r2 = (ARM_FACTOR * opts.r_cyl).powi(2);
    let out = integrate_to_event(
        &f,
        launch,
        (0.0, opts.t_max),
        &opts.integrator,
        &EventSpec {
            g: |s: &State3| {
                let r = s.radius_xy();
                r * r - arm_r2
            },
            direction: EventDirection::Rising,
            terminal: true,
        },
    )?;
    let Some((mut t_cur, mut s_cur)) = out.first() else {
        return Err(HetError::NoCrossing(format!(
            "separatrix never moved {} from the saddle within t_max = {}",
            ARM_FACTOR * opts.r_cyl,
            opts.t_max
        )));
    };

    // Inward cascade through r_cyl, r_cyl/2, r_cyl/4.
    let mut deltas: Vec<f64> = Vec::new();
    let mut crossings: Vec<(f64, State3)> = Vec::new();
    for k in 0..3 {
        let rr = opts.r_cyl / (1u32 << k) as f64;
        let rr2 = rr * rr;
        let out = integrate_to_event(
            &f,
            s_cur,
            (0.0, opts.t_max),
            &opts.integrator,
            &EventSpec {
                g: |s: &State3| {
                    let r = s.radius_xy();
                    r * r - rr2
                },
                direction: EventDirection::Falling,
                terminal: true,
            },
        )?;
        match out.first() {
            Some((t_leg, s_leg)) => {
                t_cur += t_leg;
                s_cur = s_leg;
                deltas.push(s_leg.z - q_jet(s_leg.x, s_leg.y));
                crossings.push((t_cur, s_leg));
            }
            None => break,
        }
    }
    if deltas.is_empty() {
        return Err(HetError::NoCrossing(format!(
            "orbit never fell back through the sampling cylinder r = {} within t_max = {}",
            opts.r_cyl, opts.t_max
        )));
    }

    // Extrapolate the remaining O(r^3) and O(r^4) bias over the halved radii.
    let comb = match deltas.len() {
        1 => deltas[0],
        2 => (8.0 * deltas[1] - deltas[0]) / 7.0,
        _ => {
            let r1a = (8.0 * deltas[1] - deltas[0]) / 7.0;
            let r1b = (8.0 * deltas[2] - deltas[1]) / 7.0;
            (16.0 * r1b - r1a) / 15.0
        }
    };
    let sign_src = match opts.source {
        EquilibriumId::OPlus => -1.0,
        EquilibriumId::OMinus => 1.0,
        EquilibriumId::O => unreachable!("validated above"),
    };
    let scale = (2.0 * field.coupling_a().abs()).sqrt();
    Ok(SplitResult {
        delta: sign_src * comb / scale,
        radii_used: deltas.len(),
        crossings,
        stable_jet: jet,
    })
}

/// Options for [`find_het_rho`] and [`arrival_angle`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HetSearchOptions {
    /// Initial `rho` bracket; the split must change sign across it.
    pub bracket: (f64, f64),
    /// Bisection terminates when the bracket width falls below this.
    pub rho_tol: f64,
    pub max_iter: usize,
    pub split: SplitOptions,
}

impl Default for HetSearchOptions {
    fn default() -> Self {
        Self {
            bracket: (0.3, 0.7),
            rho_tol: 1e-10,
            max_iter: 200,
            split: SplitOptions::default(),
        }
    }
}

/// One located point of the heteroclinic surface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HetSurfaceSample {
    pub omega: f64,
    pub mu: f64,
    /// Located `rho*`.
    pub rho: f64,
    /// Final bracket width.
    pub bracket_width: f64,
    /// Split at the last evaluated midpoint.
    pub delta: f64,
}

/// Bisects the separatrix split in `rho` to locate the heteroclinic surface
/// at fixed `(omega, mu)`.
pub fn find_het_rho(
    c: &SystemCoefficients,
    omega: f64,
    mu: f64,
    opts: &HetSearchOptions,
) -> Result<HetSurfaceSample, HetError> {
    let (mut lo, mut hi) = opts.bracket;
    if !(hi > lo) {
        return Err(ValidationError::OutOfRange("bracket must be increasing").into());
    }
    let mut f_lo = separatrix_split(c, lo, omega, mu, &opts.split)?.delta;
    let f_hi = separatrix_split(c, hi, omega, mu, &opts.split)?.delta;
    if f_lo == 0.0 {
        return Ok(HetSurfaceSample {
            omega,
            mu,
            rho: lo,
            bracket_width: 0.0,
            delta: 0.0,
        });
    }
    if f_hi == 0.0 {
        return Ok(HetSurfaceSample {
            omega,
            mu,
            rho: hi,
            bracket_width: 0.0,
            delta: 0.0,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(HetError::NoSignChange(lo, f_lo, hi, f_hi));
    }
    let mut delta_mid = f_lo;
    let mut iter = 0usize;
    while hi - lo > opts.rho_tol && iter < opts.max_iter {
        let mid = 0.5 * (lo + hi);
        delta_mid = separatrix_split(c, mid, omega, mu, &opts.split)?.delta;
        if delta_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if delta_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = delta_mid;
        } else {
            hi = mid;
        }
        iter += 1;
    }
    Ok(HetSurfaceSample {
        omega,
        mu,
        rho: 0.5 * (lo + hi),
        bracket_width: hi - lo,
        delta: delta_mid,
    })
}

/// Arrival direction of a connection at the origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrivalReport {
    /// Arrival angle, folded into `(-pi/2, pi/2]` modulo `pi`.
    pub angle: f64,
    /// The `rho*` at which the connection was located (at `omega = 0`).
    pub rho: f64,
    /// State at the sampling radius.
    pub crossing: State3,
    pub t_cross: f64,
}

/// Folds an angle into `(-pi/2, pi/2]` modulo `pi`.
pub fn fold_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let mut th = theta;
    while th > PI / 2.0 {
        th -= PI;
    }
    while th <= -PI / 2.0 {
        th += PI;
    }
    th
}

/// Measures the plane angle at which the heteroclinic orbit from the given
/// axis saddle arrives at the origin, at `omega = 0` and the given `mu`: the
/// connection is located by bisection, relaunched, and followed down to the
/// radius [`ARRIVAL_RADIUS`], where `atan2(y, x)` is read off and folded.
pub fn arrival_angle(
    c: &SystemCoefficients,
    mu: f64,
    source: EquilibriumId,
    opts: &HetSearchOptions,
) -> Result<ArrivalReport, HetError> {
    if source == EquilibriumId::O {
        return Err(HetError::InvalidSource);
    }
    // Locate the surface with the canonical (upper) source; by symmetry the
    // locus is the same for both saddles.
    let mut find_opts = opts.clone();
    find_opts.split.source = EquilibriumId::OPlus;
    let sample = find_het_rho(c, 0.0, mu, &find_opts)?;

    let field = ShootField::new(c, sample.rho, 0.0, mu)?;
    let f = |s: &State3| field.eval(*s);
    let (v_u, _) = field.unstable_direction(source)?;
    let launch = source.state().add(v_u.scale(opts.split.launch_offset));

    let arm2 = ARRIVAL_ARM_RADIUS * ARRIVAL_ARM_RADIUS;
    let out = integrate_to_event(
        &f,
        launch,
        (0.0, opts.split.t_max),
        &opts.split.integrator,
        &EventSpec {
            g: |s: &State3| {
                let r = s.radius_xy();
                r * r - arm2
            },
            direction: EventDirection::Rising,
            terminal: true,
        },
    )?;
    let Some((t_arm, s_arm)) = out.first() else {
        return Err(HetError::NoCrossing(
            "connection orbit never left the saddle neighborhood".into(),
        ));
    };

    let in2 = ARRIVAL_RADIUS * ARRIVAL_RADIUS;
    let out = integrate_to_event(
        &f,
        s_arm,
        (0.0, opts.split.t_max),
        &opts.split.integrator,
        &EventSpec {
            g: |s: &State3| {
                let r = s.radius_xy();
                r * r - in2
            },
            direction: EventDirection::Falling,
            terminal: true,
        },
    )?;
    let Some((t_in, s_in)) = out.first() else {
        return Err(HetError::NoCrossing(format!(
            "connection orbit never reached the arrival radius {ARRIVAL_RADIUS}"
        )));
    };
    Ok(ArrivalReport {
        angle: fold_angle(s_in.y.atan2(s_in.x)),
        rho: sample.rho,
        crossing: s_in,
        t_cross: t_arm + t_in,
    })
}

/// Residuals of the two fundamental solutions of the linearization along the
/// planar separatrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FundamentalReport {
    /// Residual of the tangent solution `(x0', 0, z0')`, evaluated with
    /// closed-form derivatives.
    pub sol1_max_residual: f64,
    /// Residual of the variation-of-constants solution
    /// `(x0' I + 1/(2 x0), 0, z0' I)` with `I(t)` the quadrature
    /// `int_0^t ds / x0^2`, evaluated with finite differences.
    pub sol2_max_residual: f64,
    /// `Z2(T_FAR)` and `Z2(-T_FAR)`; the asymptotic values are `-2|A|` and
    /// `+2|A|`.
    pub z2_limit_plus: f64,
    pub z2_limit_minus: f64,
}

/// Adaptive Simpson quadrature with an absolute tolerance.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m1 = 0.5 * (a + m);
        let m2 = 0.5 * (m + b);
        let f1 = f(m1);
        let f2 = f(m2);
        let left = simpson(fa, f1, fm, m - a);
        let right = simpson(fm, f2, fb, b - m);
        let err = left + right - whole;
        if depth >= 48 || err.abs() <= 15.0 * tol {
            left + right + err / 15.0
        } else {
            recurse(f, a, fa, m, fm, m1, f1, left, tol / 2.0, depth + 1)
                + recurse(f, m, fm, b, fb, m2, f2, right, tol / 2.0, depth + 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 0)
}

/// `I(t) = int_0^t ds / x0(s)^2` by adaptive quadrature.
fn vc_integral(sep: &PlanarSeparatrix, t: f64) -> f64 {
    let inv_x0_sq = |s: f64| {
        let x = sep.x(s);
        1.0 / (x * x)
    };
    // Tolerance proportional to the value scale (the integrand grows like
    // e^{|t|}).
    let scale = inv_x0_sq(t.abs()).max(1.0);
    adaptive_simpson(&inv_x0_sq, 0.0, t, 1e-13 * scale)
}

/// Verifies the two fundamental solutions of the linearization along the
/// planar separatrix on a grid `|t| <= t_lim`: the tangent solution against
/// closed-form derivatives, and the variation-of-constants solution (built
/// from the quadrature `I(t)`) against finite differences. Also samples the
/// asymptotic limits of its axis component at `t = ±20`.
pub fn fundamental_solution_residual(
    coupling_a: f64,
    coupling_b: f64,
    t_lim: f64,
    n_grid: usize,
) -> Result<FundamentalReport, HetError> {
    if !(t_lim > 0.0) || n_grid < 2 {
        return Err(ValidationError::OutOfRange(
            "t_lim must be positive and n_grid at least 2",
        )
        .into());
    }
    let sep = PlanarSeparatrix::new(coupling_a)?;
    let a = coupling_a;
    let b = coupling_b;

    let x2_of = |t: f64| sep.x_dot(t) * vc_integral(&sep, t) + 1.0 / (2.0 * sep.x(t));
    let z2_of = |t: f64| sep.z_dot(t) * vc_integral(&sep, t);

    let mut sol1_max: f64 = 0.0;
    let mut sol2_max: f64 = 0.0;
    let h = 1e-5;
    for i in 0..n_grid {
        let t = -t_lim + 2.0 * t_lim * i as f64 / (n_grid - 1) as f64;
        let (x0, z0) = (sep.x(t), sep.z(t));

        // Tangent solution (x0', 0, z0'): closed-form second derivatives
        // against the linearized system.
        let r_x1 = sep.x_ddot(t) - (z0 - 0.5) * sep.x_dot(t) - x0 * sep.z_dot(t);
        let r_z1 = sep.z_ddot(t) - 4.0 * a * x0 * sep.x_dot(t);
        sol1_max = sol1_max.max(r_x1.abs()).max(r_z1.abs());

        // Variation-of-constants solution (X2, 0, Z2): finite differences.
        let (x2, z2) = (x2_of(t), z2_of(t));
        let y2 = 0.0;
        let dx2 = (x2_of(t + h) - x2_of(t - h)) / (2.0 * h);
        let dz2 = (z2_of(t + h) - z2_of(t - h)) / (2.0 * h);
        let r_x2 = dx2 - (z0 - 0.5) * x2 - x0 * z2;
        let r_z2 = dz2 - 4.0 * a * x0 * x2 + 4.0 * b * x0 * y2;
        sol2_max = sol2_max.max(r_x2.abs()).max(r_z2.abs());
    }

    Ok(FundamentalReport {
        sol1_max_residual: sol1_max,
        sol2_max_residual: sol2_max,
        z2_limit_plus: z2_of(T_FAR),
        z2_limit_minus: z2_of(-T_FAR),
    })
}
