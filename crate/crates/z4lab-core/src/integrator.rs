//! Adaptive Dormand–Prince 5(4) integration with cubic-Hermite dense output,
//! root-located events, and tangent-frame propagation.
//!
//! The stepper is generic over the state dimension (fixed-size arrays, no
//! allocation in the hot loop) and fully deterministic: identical inputs give
//! bit-identical outputs. Integration runs forward or backward depending on
//! the order of the time span.
//!
//! Error control uses the max-norm of the embedded 4th/5th-order difference
//! scaled by `abs_tol + rel_tol * max(|y0|, |y1|)` per component; a step is
//! accepted when that norm is at most one, and the next step magnitude is
//! `h * clamp(0.9 * err^(-1/5), 0.2, 10)`.

use thiserror::Error;

use crate::linalg::{mat_vec, Mat3};
use crate::types::{IntegratorConfig, State3, Trajectory, ValidationError};

/// Tolerance on `|g|` at a reported event point.
pub const EVENT_G_TOL: f64 = 1e-10;

/// Band around zero within which the event function is considered "on the
/// surface"; a crossing is only accepted after `|g|` has escaped this band
/// (prevents re-detecting the crossing an integration was started on).
pub const EVENT_ARM_EPS: f64 = 1e-9;

/// Integration failures.
#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("step count limit exceeded at t = {t}")]
    MaxSteps { t: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

/// One accepted step, exposed to observers. Endpoint derivatives allow
/// 4th-order cubic-Hermite interpolation anywhere inside the step.
pub struct StepRecord<'a, const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: &'a [f64; N],
    pub y1: &'a [f64; N],
    pub f0: &'a [f64; N],
    pub f1: &'a [f64; N],
}

impl<const N: usize> StepRecord<'_, N> {
    /// Cubic-Hermite interpolation at `t` within `[t0, t1]`.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        hermite(self.t0, self.y0, self.f0, self.t1, self.y1, self.f1, t)
    }
}

/// Observer verdict after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
}

/// Cubic-Hermite interpolation between `(t0, y0, f0)` and `(t1, y1, f1)`.
pub fn hermite<const N: usize>(
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    t1: f64,
    y1: &[f64; N],
    f1: &[f64; N],
    t: f64,
) -> [f64; N] {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Error weights: 5th-order weights minus the embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 10.0;

/// Core adaptive driver. Calls `observer` after every accepted step; the
/// observer may stop the run early. Returns the final `(t, y)` (the endpoint
/// of the last accepted step, or `(t0, y0)` for an empty span).
pub fn integrate_adaptive<const N: usize, F, O>(
    f: &F,
    y0: [f64; N],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    mut observer: O,
) -> Result<(f64, [f64; N]), IntegrateError>
where
    F: Fn(&[f64; N]) -> [f64; N],
    O: FnMut(&StepRecord<'_, N>) -> StepControl,
{
    cfg.validate()?;
    let (t0, t1) = t_span;
    if t0 == t1 {
        return Ok((t0, y0));
    }
    let dir = if t1 > t0 { 1.0 } else { -1.0 };

    let mut t = t0;
    let mut y = y0;
    let mut f_cur = f(&y);
    if !all_finite(&f_cur) || !all_finite(&y) {
        return Err(IntegrateError::NonFinite { t });
    }

    let mut h = initial_step(f, &y, &f_cur, dir, t1 - t0, cfg);
    let mut steps: u64 = 0;

    while (t1 - t) * dir > 0.0 {
        if steps >= cfg.max_steps {
            return Err(IntegrateError::MaxSteps { t });
        }
        steps += 1;

        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(IntegrateError::StepUnderflow { t });
        }
        // Do not overshoot the endpoint.
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }

        // Stage evaluations (k1 = f_cur via FSAL).
        let k1 = f_cur;
        let y2 = axpy(&y, h, &[(A21, &k1)]);
        let k2 = f(&y2);
        let y3 = axpy(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = f(&y3);
        let y4 = axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = f(&y4);
        let y5 = axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = f(&y5);
        let y6 = axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = f(&y6);
        let y_new = axpy(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(&y_new);

        if !all_finite(&y_new) || !all_finite(&k7) {
            return Err(IntegrateError::NonFinite { t });
        }

        // Scaled max-norm of the embedded error estimate.
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i]
                    + E3 * k3[i]
                    + E4 * k4[i]
                    + E5 * k5[i]
                    + E6 * k6[i]
                    + E7 * k7[i]);
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }

        if err <= 1.0 {
            let t_new = t + h;
            let record = StepRecord {
                t0: t,
                t1: t_new,
                y0: &y,
                y1: &y_new,
                f0: &k1,
                f1: &k7,
            };
            let control = observer(&record);
            t = t_new;
            y = y_new;
            f_cur = k7;
            if control == StepControl::Stop {
                return Ok((t, y));
            }
        }

        // Step-size update (same formula on accept and reject).
        let scale = if err == 0.0 {
            MAX_SCALE
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
        };
        let grow_cap = if err > 1.0 { 1.0 } else { MAX_SCALE };
        h *= scale.min(grow_cap);
        if h.abs() > cfg.max_step {
            h = cfg.max_step * dir;
        }
    }
    Ok((t, y))
}

/// Starting step size, following the standard two-stage estimate: a first
/// guess from the ratio of state and derivative scales, refined by probing
/// the second derivative with one explicit Euler step.
fn initial_step<const N: usize, F>(
    f: &F,
    y0: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    span: f64,
    cfg: &IntegratorConfig,
) -> f64
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..N {
        let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
        d0 = d0.max((y0[i] / sc).abs());
        d1 = d1.max((f0[i] / sc).abs());
    }
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span.abs());

    let y1 = axpy(y0, h0 * dir, &[(1.0, f0)]);
    let f1 = f(&y1);
    let mut d2: f64 = 0.0;
    for i in 0..N {
        let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
        d2 = d2.max(((f1[i] - f0[i]) / sc).abs());
    }
    let d2 = d2 / h0;

    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(cfg.max_step).min(span.abs()) * dir
}

fn axpy<const N: usize>(base: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *base;
    for &(c, k) in terms {
        let ch = c * h;
        for i in 0..N {
            out[i] += ch * k[i];
        }
    }
    out
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Integrates a 3D field over a time span, returning the accepted steps as a
/// trajectory (first sample is the initial state).
pub fn integrate<F>(
    f: &F,
    s0: State3,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrateError>
where
    F: Fn(&State3) -> State3,
{
    let mut traj = Trajectory::new();
    traj.push(t_span.0, s0);
    let rhs = |y: &[f64; 3]| f(&State3::from_array(*y)).to_array();
    integrate_adaptive(&rhs, s0.to_array(), t_span, cfg, |rec| {
        traj.push(rec.t1, State3::from_array(*rec.y1));
        StepControl::Continue
    })?;
    Ok(traj)
}

/// Integrates a 3D field and resamples the dense output at a fixed interval
/// (plus the final endpoint).
pub fn integrate_sampled<F>(
    f: &F,
    s0: State3,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    sample_dt: f64,
) -> Result<Trajectory, IntegrateError>
where
    F: Fn(&State3) -> State3,
{
    if sample_dt <= 0.0 {
        return Err(ValidationError::OutOfRange("sample_dt must be positive").into());
    }
    let (t0, t1) = t_span;
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut traj = Trajectory::new();
    traj.push(t0, s0);
    // Sample times come from the index, not accumulation, so the grid cannot
    // drift past the endpoint; a tiny guard keeps the final uniform point
    // from duplicating the endpoint sample.
    let mut k: u64 = 1;
    let guard = 1e-9 * sample_dt;
    let rhs = |y: &[f64; 3]| f(&State3::from_array(*y)).to_array();
    let (t_end, y_end) = integrate_adaptive(&rhs, s0.to_array(), t_span, cfg, |rec| {
        loop {
            let next = t0 + k as f64 * sample_dt * dir;
            if (rec.t1 - next) * dir < 0.0 || (t1 - next) * dir <= guard {
                break;
            }
            let y = rec.interpolate(next);
            traj.push(next, State3::from_array(y));
            k += 1;
        }
        StepControl::Continue
    })?;
    if traj.last().map(|(t, _)| t) != Some(t_end) {
        traj.push(t_end, State3::from_array(y_end));
    }
    Ok(traj)
}

/// Which sign changes of the event function count as crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    /// `g` goes from negative to positive.
    Rising,
    /// `g` goes from positive to negative.
    Falling,
    /// Either direction.
    Any,
}

/// A scalar event function with a crossing-direction filter.
pub struct EventSpec<G> {
    pub g: G,
    pub direction: EventDirection,
    /// Whether integration stops at the first crossing. When `false`, every
    /// crossing in the span is recorded and integration runs to the end.
    pub terminal: bool,
}

/// Result of an event integration: all located crossings (in time order) and
/// the final integration point. An empty `crossings` is the distinguishable
/// "no event in the span" outcome.
#[derive(Debug, Clone)]
pub struct EventOutcome {
    pub crossings: Vec<(f64, State3)>,
    pub end: (f64, State3),
}

impl EventOutcome {
    pub fn first(&self) -> Option<(f64, State3)> {
        self.crossings.first().copied()
    }
}

/// Integrates until the event function crosses zero in the requested
/// direction (or to the end of the span).
///
/// Crossings are bracketed on each accepted step, located by bisection on the
/// cubic-Hermite dense output, and refined by one secant step; reported
/// points satisfy `|g| < EVENT_G_TOL` (up to the interpolant). If the run
/// starts with `|g| <= EVENT_ARM_EPS`, detection is armed only after `|g|`
/// leaves that band, so an integration started on the event surface does not
/// immediately re-report it.
pub fn integrate_to_event<F, G>(
    f: &F,
    s0: State3,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    event: &EventSpec<G>,
) -> Result<EventOutcome, IntegrateError>
where
    F: Fn(&State3) -> State3,
    G: Fn(&State3) -> f64,
{
    let rhs = |y: &[f64; 3]| f(&State3::from_array(*y)).to_array();
    let g = |y: &[f64; 3]| (event.g)(&State3::from_array(*y));

    let mut crossings: Vec<(f64, State3)> = Vec::new();
    let mut g_prev = g(&s0.to_array());
    let mut armed = g_prev.abs() > EVENT_ARM_EPS;

    let (t_end, y_end) = integrate_adaptive(&rhs, s0.to_array(), t_span, cfg, |rec| {
        let g_new = g(rec.y1);
        let mut control = StepControl::Continue;
        if armed {
            let crossed = match event.direction {
                EventDirection::Rising => g_prev < 0.0 && g_new >= 0.0,
                EventDirection::Falling => g_prev > 0.0 && g_new <= 0.0,
                EventDirection::Any => (g_prev < 0.0) != (g_new < 0.0),
            };
            if crossed {
                let located = locate_crossing(rec, &g, g_prev, g_new);
                crossings.push(located);
                if event.terminal {
                    control = StepControl::Stop;
                }
                armed = false;
            }
        } else if g_new.abs() > EVENT_ARM_EPS {
            armed = true;
        }
        g_prev = g_new;
        control
    })?;

    let end = if event.terminal {
        crossings
            .last()
            .copied()
            .unwrap_or((t_end, State3::from_array(y_end)))
    } else {
        (t_end, State3::from_array(y_end))
    };
    Ok(EventOutcome { crossings, end })
}

/// Bisection on the dense output followed by one secant refinement.
fn locate_crossing<G>(
    rec: &StepRecord<'_, 3>,
    g: &G,
    g_left: f64,
    g_right: f64,
) -> (f64, State3)
where
    G: Fn(&[f64; 3]) -> f64,
{
    let (mut ta, mut tb) = (rec.t0, rec.t1);
    let (mut ga, mut gb) = (g_left, g_right);
    for _ in 0..80 {
        if ga.abs() < EVENT_G_TOL || gb.abs() < EVENT_G_TOL {
            break;
        }
        if (tb - ta).abs() < 1e-15 * tb.abs().max(1.0) {
            break;
        }
        let tm = 0.5 * (ta + tb);
        let gm = g(&rec.interpolate(tm));
        if (gm < 0.0) == (ga < 0.0) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
            gb = gm;
        }
    }
    // One secant step on the final bracket.
    let mut t_star = if (gb - ga).abs() > 0.0 {
        ta - ga * (tb - ta) / (gb - ga)
    } else {
        0.5 * (ta + tb)
    };
    // Keep the secant point inside the step.
    let (lo, hi) = if rec.t0 < rec.t1 {
        (rec.t0, rec.t1)
    } else {
        (rec.t1, rec.t0)
    };
    t_star = t_star.clamp(lo, hi);
    let y_star = rec.interpolate(t_star);
    (t_star, State3::from_array(y_star))
}

/// Maximum number of tangent-frame columns.
pub const MAX_FRAME: usize = 3;

/// Integrates the state together with `k <= 3` tangent-frame columns under
/// the variational equation `w' = J(s) w`. Returns the final state and frame.
pub fn integrate_with_tangent<F, J>(
    f: &F,
    jac: &J,
    s0: State3,
    frame: &mut [[f64; 3]; MAX_FRAME],
    k: usize,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<State3, IntegrateError>
where
    F: Fn(&State3) -> State3,
    J: Fn(&State3) -> Mat3,
{
    assert!(k <= MAX_FRAME, "at most {MAX_FRAME} tangent columns");
    // Pack state and frame columns into one 12-vector; unused lanes stay 0.
    let mut y = [0.0f64; 12];
    y[..3].copy_from_slice(&s0.to_array());
    for (i, col) in frame.iter().enumerate().take(k) {
        y[3 + 3 * i..6 + 3 * i].copy_from_slice(col);
    }
    let rhs = |y: &[f64; 12]| {
        let s = State3::new(y[0], y[1], y[2]);
        let ds = f(&s).to_array();
        let j = jac(&s);
        let mut out = [0.0f64; 12];
        out[..3].copy_from_slice(&ds);
        for i in 0..k {
            let col = [y[3 + 3 * i], y[4 + 3 * i], y[5 + 3 * i]];
            let jcol = mat_vec(&j, &col);
            out[3 + 3 * i..6 + 3 * i].copy_from_slice(&jcol);
        }
        out
    };
    let (_, y_end) = integrate_adaptive(&rhs, y, t_span, cfg, |_| StepControl::Continue)?;
    for (i, col) in frame.iter_mut().enumerate().take(k) {
        col.copy_from_slice(&y_end[3 + 3 * i..6 + 3 * i]);
    }
    Ok(State3::new(y_end[0], y_end[1], y_end[2]))
}
