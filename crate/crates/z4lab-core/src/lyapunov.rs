//! Lyapunov spectra by tangent-frame integration with periodic QR
//! renormalization: the state and an orthonormal frame are advanced together
//! under the variational equation; after every renormalization interval the
//! frame is re-orthonormalized and the logs of the diagonal stretches are
//! accumulated. A transient phase runs first with the accumulator discarded.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::{integrate_with_tangent, IntegrateError, MAX_FRAME};
use crate::linalg::{qr_frame, Mat3};
use crate::types::{IntegratorConfig, LyapunovConfig, State3, ValidationError};

#[derive(Debug, Error)]
pub enum LyapunovError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

/// Result of a spectrum run: either the exponents (sorted descending) or the
/// observation that the orbit escaped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LyapunovOutcome {
    Spectrum(Vec<f64>),
    /// The orbit left the escape radius (or blew up) at the given time.
    Divergent { t: f64, state: State3 },
}

impl LyapunovOutcome {
    pub fn spectrum(&self) -> Option<&[f64]> {
        match self {
            LyapunovOutcome::Spectrum(v) => Some(v),
            LyapunovOutcome::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, LyapunovOutcome::Divergent { .. })
    }

    /// Largest exponent, if the orbit stayed bounded.
    pub fn top(&self) -> Option<f64> {
        self.spectrum().and_then(|v| v.first().copied())
    }
}

/// Computes the leading `cfg.n_exponents` Lyapunov exponents of a flow.
///
/// The frame starts as the identity; the transient phase `[0, t_transient]`
/// renormalizes without accumulating, the accumulation phase
/// `[t_transient, t_total]` adds `ln` of each diagonal stretch every
/// `renorm_dt`. Exponents are the accumulated logs divided by the
/// accumulation time, sorted descending. The orbit is declared divergent as
/// soon as its norm exceeds `cfg.escape_radius` at a renormalization point,
/// or earlier if the integration blows up inside an interval (non-finite
/// values or step-size underflow while the solution escapes).
pub fn lyapunov_spectrum<F, J>(
    f: &F,
    jac: &J,
    s0: State3,
    cfg: &LyapunovConfig,
    int_cfg: &IntegratorConfig,
) -> Result<LyapunovOutcome, LyapunovError>
where
    F: Fn(&State3) -> State3,
    J: Fn(&State3) -> Mat3,
{
    cfg.validate()?;
    int_cfg.validate()?;
    let k = cfg.n_exponents;

    let mut frame = [[0.0f64; 3]; MAX_FRAME];
    for (i, col) in frame.iter_mut().enumerate().take(k) {
        col[i] = 1.0;
    }
    let mut state = s0;
    let mut t = 0.0f64;
    let mut sums = [0.0f64; MAX_FRAME];
    let mut accumulated_time = 0.0f64;

    while t < cfg.t_total {
        let dt = cfg.renorm_dt.min(cfg.t_total - t);
        let in_transient = t < cfg.t_transient;
        state = match integrate_with_tangent(f, jac, state, &mut frame, k, (0.0, dt), int_cfg)
        {
            Ok(s) => s,
            // A blow-up inside the interval is a divergence observation, not
            // a hard failure. Finite-time escape of a cubic field can
            // out-run the per-interval norm check below, surfacing either as
            // non-finite values or as step-size underflow while the solution
            // explodes; both are reported with the last finite state.
            Err(IntegrateError::NonFinite { t: t_fail })
            | Err(IntegrateError::StepUnderflow { t: t_fail }) => {
                return Ok(LyapunovOutcome::Divergent {
                    t: t + t_fail,
                    state,
                });
            }
            Err(e) => return Err(e.into()),
        };
        t += dt;
        if !state.is_finite() || state.norm() > cfg.escape_radius {
            return Ok(LyapunovOutcome::Divergent { t, state });
        }
        let diag = qr_frame(&mut frame[..k], k);
        if !in_transient {
            accumulated_time += dt;
            for i in 0..k {
                sums[i] += diag[i].ln();
            }
        }
    }

    if accumulated_time <= 0.0 {
        return Err(ValidationError::OutOfRange(
            "t_total must exceed t_transient to accumulate exponents",
        )
        .into());
    }
    let mut exps: Vec<f64> = sums[..k].iter().map(|s| s / accumulated_time).collect();
    exps.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(LyapunovOutcome::Spectrum(exps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{eval_numeric_field, numeric_jacobian};
    use crate::types::PhysParams;

    #[test]
    fn linear_system_recovers_eigenvalue_real_parts() {
        // Pure linear field: exponents are exactly the eigenvalue real parts.
        let f = |s: &State3| State3::new(-0.3 * s.x - 0.8 * s.y, 0.8 * s.x - 0.3 * s.y, 0.1 * s.z);
        let jac = |_: &State3| [[-0.3, -0.8, 0.0], [0.8, -0.3, 0.0], [0.0, 0.0, 0.1]];
        let cfg = LyapunovConfig {
            t_transient: 10.0,
            t_total: 200.0,
            // The orbit itself grows along the expanding axis direction.
            escape_radius: f64::INFINITY,
            ..LyapunovConfig::default()
        };
        let out = lyapunov_spectrum(&f, &jac, State3::new(1.0, 0.5, 1e-3), &cfg, &IntegratorConfig::default())
            .unwrap();
        let exps = out.spectrum().expect("bounded");
        assert_eq!(exps.len(), 3);
        assert!((exps[0] - 0.1).abs() < 1e-6, "top {}", exps[0]);
        assert!((exps[1] + 0.3).abs() < 1e-6);
        assert!((exps[2] + 0.3).abs() < 1e-6);
    }

    #[test]
    fn stable_focus_matches_jacobian_spectrum() {
        // Below threshold the origin attracts; the exponents converge to the
        // real parts of its Jacobian eigenvalues (-gamma, -gamma, mu).
        let p = PhysParams::new(0.1, 0.3, -0.05);
        let f = |s: &State3| eval_numeric_field(&p, *s);
        let jac = |s: &State3| numeric_jacobian(&p, *s);
        let cfg = LyapunovConfig {
            t_transient: 100.0,
            t_total: 900.0,
            ..LyapunovConfig::default()
        };
        let out = lyapunov_spectrum(
            &f,
            &jac,
            State3::new(0.05, -0.03, 0.04),
            &cfg,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let exps = out.spectrum().expect("bounded");
        assert!((exps[0] + 0.05).abs() < 2e-3, "top {}", exps[0]);
        assert!((exps[1] + 0.1).abs() < 2e-3, "mid {}", exps[1]);
        assert!((exps[2] + 0.1).abs() < 2e-3, "bottom {}", exps[2]);
    }

    #[test]
    fn escaping_orbit_reports_divergence() {
        let f = |s: &State3| State3::new(s.x, 0.0, 0.0);
        let jac = |_: &State3| [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let cfg = LyapunovConfig {
            t_transient: 1.0,
            t_total: 100.0,
            escape_radius: 10.0,
            ..LyapunovConfig::default()
        };
        let out = lyapunov_spectrum(&f, &jac, State3::new(1.0, 0.0, 0.0), &cfg, &IntegratorConfig::default())
            .unwrap();
        match out {
            LyapunovOutcome::Divergent { t, state } => {
                assert!(t <= 4.0, "escaped at t = {t}");
                assert!(state.norm() > 10.0 || !state.is_finite());
            }
            LyapunovOutcome::Spectrum(_) => panic!("orbit must escape"),
        }
    }

    #[test]
    fn single_exponent_mode_returns_top_only() {
        let f = |s: &State3| State3::new(2.0 * s.x, -s.y, -3.0 * s.z);
        let jac = |_: &State3| [[2.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -3.0]];
        let cfg = LyapunovConfig {
            t_transient: 1.0,
            t_total: 50.0,
            n_exponents: 1,
            escape_radius: f64::INFINITY,
            ..LyapunovConfig::default()
        };
        let out = lyapunov_spectrum(&f, &jac, State3::new(1e-8, 1.0, 1.0), &cfg, &IntegratorConfig::default())
            .unwrap();
        let exps = out.spectrum().unwrap();
        assert_eq!(exps.len(), 1);
        assert!((exps[0] - 2.0).abs() < 1e-6, "top {}", exps[0]);
    }
}
