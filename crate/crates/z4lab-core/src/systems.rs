//! Vector-field evaluators, analytic Jacobians, axis equilibria, and
//! eigen-structure reports for the model family.
//!
//! Four related systems are provided:
//!
//! * **general** — the complex normal form with arbitrary coefficients,
//!   evaluated through complex arithmetic; its Jacobian is obtained by
//!   central differences;
//! * **numeric** — the concrete polynomial system (the general system at the
//!   concrete coefficient set), hand-expanded in real coordinates with an
//!   analytic Jacobian;
//! * **rescaled** — the exact change of variables that pins the axis
//!   equilibria at `(0, 0, ±1)`; the small parameter enters only through
//!   `sqrt(mu)` and the equilibria are fixed points of the evaluator in exact
//!   floating point;
//! * **sm** — the Shimizu–Morioka system, the singular limit of the rescaled
//!   system under the reduction of [`crate::normal_form`].
//!
//! All four commute with the order-four symmetry `S: (x, y, z) -> (-y, x, -z)`
//! (for the rescaled/general/numeric forms) up to floating-point roundoff;
//! the invariant axis `x = y = 0` is preserved exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Mat3;
use crate::types::{
    ComplexValue, PhysParams, RescaledParams, SMParams, State3, SystemCoefficients,
    ValidationError,
};

/// Errors from system construction and spectrum analysis.
#[derive(Debug, Error)]
pub enum SystemError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("eigen-structure degenerate: {0}")]
    DegenerateSpectrum(&'static str),
}

/// The order-four symmetry as a matrix: `(x, y, z) -> (-y, x, -z)`.
pub const SYMMETRY: Mat3 = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]];

/// Applies the symmetry `S (x, y, z) = (-y, x, -z)` (a quarter turn in the
/// plane combined with axis reflection; `S^4 = id`).
pub fn apply_symmetry(s: State3) -> State3 {
    State3::new(-s.y, s.x, -s.z)
}

/// Central-difference step for general-field Jacobians.
const FD_JACOBIAN_STEP: f64 = 1e-6;

/// Evaluates the general complex system at a state.
///
/// With `u = x + iy`:
/// `u' = (-gamma + i beta) u + a0 z u* + a1 u^2 u* + a2 z^2 u + a3 (u*)^3`,
/// `z' = mu z + b0 u^2 + conj(b0) (u*)^2 + b1 z^3 + b2 z |u|^2`.
pub fn eval_general_field(c: &SystemCoefficients, p: &PhysParams, s: State3) -> State3 {
    let u = Complex64::new(s.x, s.y);
    let uc = u.conj();
    let lin = Complex64::new(-p.gamma, p.beta);
    let du = lin * u + c.a0 * s.z * uc + c.a1 * u * u * uc + c.a2 * s.z * s.z * u + c.a3 * uc * uc * uc;
    let dz = p.mu * s.z
        + 2.0 * (c.b0 * u * u).re
        + c.b1 * s.z * s.z * s.z
        + c.b2 * s.z * (u.norm_sqr());
    State3::new(du.re, du.im, dz)
}

/// Jacobian of the general system by central differences (step `1e-6`).
pub fn general_jacobian(c: &SystemCoefficients, p: &PhysParams, s: State3) -> Mat3 {
    let h = FD_JACOBIAN_STEP;
    let mut j = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut sp = s.to_array();
        let mut sm = s.to_array();
        sp[col] += h;
        sm[col] -= h;
        let fp = eval_general_field(c, p, State3::from_array(sp)).to_array();
        let fm = eval_general_field(c, p, State3::from_array(sm)).to_array();
        for row in 0..3 {
            j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    j
}

/// Evaluates the concrete polynomial system (the general system at the
/// concrete coefficient set), hand-expanded in real coordinates:
///
/// `x' = -gamma x - beta y - z(x - y)/2 + xy(x + y)/2 + z^2 (3x - y)/8`
/// `y' =  beta x - gamma y + z(x + y)/2 + xy(x - y)/2 + z^2 (x + 3y)/8`
/// `z' =  mu z + x^2 - y^2 - z^3/4 - z (x^2 + y^2)/2`
pub fn eval_numeric_field(p: &PhysParams, s: State3) -> State3 {
    let (x, y, z) = (s.x, s.y, s.z);
    let xy = x * y;
    let z2 = z * z;
    let dx = -p.gamma * x - p.beta * y - z * (x - y) / 2.0 + xy * (x + y) / 2.0
        + z2 * (3.0 * x - y) / 8.0;
    let dy = p.beta * x - p.gamma * y + z * (x + y) / 2.0 + xy * (x - y) / 2.0
        + z2 * (x + 3.0 * y) / 8.0;
    let dz = p.mu * z + x * x - y * y - z * z2 / 4.0 - z * (x * x + y * y) / 2.0;
    State3::new(dx, dy, dz)
}

/// Analytic Jacobian of the concrete polynomial system.
pub fn numeric_jacobian(p: &PhysParams, s: State3) -> Mat3 {
    let (x, y, z) = (s.x, s.y, s.z);
    let z2 = z * z;
    [
        [
            -p.gamma - z / 2.0 + x * y + y * y / 2.0 + 3.0 * z2 / 8.0,
            -p.beta + z / 2.0 + x * x / 2.0 + x * y - z2 / 8.0,
            -(x - y) / 2.0 + z * (3.0 * x - y) / 4.0,
        ],
        [
            p.beta + z / 2.0 + x * y - y * y / 2.0 + z2 / 8.0,
            -p.gamma + z / 2.0 + x * x / 2.0 - x * y + 3.0 * z2 / 8.0,
            (x + y) / 2.0 + z * (x + 3.0 * y) / 4.0,
        ],
        [
            2.0 * x - z * x,
            -2.0 * y - z * y,
            p.mu - 3.0 * z2 / 4.0 - (x * x + y * y) / 2.0,
        ],
    ]
}

/// Evaluates the Shimizu–Morioka system
/// `x' = y`, `y' = x(1 - z) - lambda y`, `z' = -alpha z + x^2`.
pub fn eval_sm_field(p: &SMParams, s: State3) -> State3 {
    State3::new(
        s.y,
        s.x * (1.0 - s.z) - p.lambda * s.y,
        -p.alpha * s.z + s.x * s.x,
    )
}

/// Analytic Jacobian of the Shimizu–Morioka system.
pub fn sm_jacobian(p: &SMParams, s: State3) -> Mat3 {
    [
        [0.0, 1.0, 0.0],
        [1.0 - s.z, -p.lambda, -s.x],
        [2.0 * s.x, 0.0, -p.alpha],
    ]
}

/// The rescaled system with precomputed real coefficients.
///
/// In complex form (`u = x + iy`):
///
/// `u' = (-rho + i omega) u + z u*
///       + sqrt(mu) [ P1 u^2 u* + (C + iD) z^2 u + P3 (u*)^3 ]`
/// `z' = a sqrt(mu) (z - z^3) + 2A(x^2 - y^2) - 4B x y
///       + sqrt(mu) b2n z (x^2 + y^2)`
///
/// where `P1 = a1/|a0|`, `C + iD = a2/(|a0| sqrt(|b1|))`,
/// `P3 = a3 |a0| / a0^2`, `A + iB = a0 b0 sqrt(|b1|)/|a0|^2`,
/// `a = sqrt(|b1|)/|a0|`, `b2n = b2/|a0|`. The axis cubic appears as the
/// factored form `z - z^3`, so `(0, 0, 0)` and `(0, 0, ±1)` are fixed points
/// of the evaluator in exact floating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledField {
    pub params: RescaledParams,
    sqrt_mu: f64,
    p1: ComplexValue,
    cd: ComplexValue,
    p3: ComplexValue,
    ab: ComplexValue,
    axis_rate: f64,
    b2n: f64,
}

impl RescaledField {
    pub fn new(c: &SystemCoefficients, r: RescaledParams) -> Result<Self, SystemError> {
        c.validate()?;
        let r = RescaledParams::new(r.rho, r.omega, r.mu)?;
        let abs_a0 = c.a0.norm();
        let sqrt_b1 = (-c.b1).sqrt();
        Ok(Self {
            params: r,
            sqrt_mu: r.mu.sqrt(),
            p1: c.a1 / abs_a0,
            cd: c.a2 / (abs_a0 * sqrt_b1),
            p3: c.a3 * abs_a0 / (c.a0 * c.a0),
            ab: c.a0 * c.b0 * sqrt_b1 / (abs_a0 * abs_a0),
            axis_rate: sqrt_b1 / abs_a0,
            b2n: c.b2 / abs_a0,
        })
    }

    /// Coupling constant `A` (real part of `A + iB`).
    pub fn coupling_a(&self) -> f64 {
        self.ab.re
    }

    /// Coupling constant `B` (imaginary part of `A + iB`).
    pub fn coupling_b(&self) -> f64 {
        self.ab.im
    }

    /// `C + iD` coefficient of the `z^2 u` term (divided by `sqrt(mu)`).
    pub fn cd(&self) -> ComplexValue {
        self.cd
    }

    /// Axis stiffness `a = sqrt(|b1|)/|a0|`.
    pub fn axis_rate(&self) -> f64 {
        self.axis_rate
    }

    pub fn eval(&self, s: State3) -> State3 {
        let (x, y, z) = (s.x, s.y, s.z);
        let (rho, omega) = (self.params.rho, self.params.omega);
        let sm = self.sqrt_mu;
        let r2 = x * x + y * y;
        let z2 = z * z;
        let (p1r, p1i) = (self.p1.re, self.p1.im);
        let (cc, dd) = (self.cd.re, self.cd.im);
        let (p3r, p3i) = (self.p3.re, self.p3.im);
        let (aa, bb) = (self.ab.re, self.ab.im);

        // Real and imaginary parts of (u*)^3.
        let uc3_re = x * x * x - 3.0 * x * y * y;
        let uc3_im = y * y * y - 3.0 * x * x * y;

        let bracket_re =
            (p1r * x - p1i * y) * r2 + (cc * x - dd * y) * z2 + p3r * uc3_re - p3i * uc3_im;
        let bracket_im =
            (p1i * x + p1r * y) * r2 + (dd * x + cc * y) * z2 + p3i * uc3_re + p3r * uc3_im;

        let dx = -rho * x - omega * y + z * x + sm * bracket_re;
        let dy = omega * x - rho * y - z * y + sm * bracket_im;
        let dz = self.axis_rate * sm * (z - z * z2) + 2.0 * aa * (x * x - y * y) - 4.0 * bb * x * y
            + sm * self.b2n * z * r2;
        State3::new(dx, dy, dz)
    }

    /// Analytic Jacobian of the rescaled system.
    pub fn jacobian(&self, s: State3) -> Mat3 {
        let (x, y, z) = (s.x, s.y, s.z);
        let (rho, omega) = (self.params.rho, self.params.omega);
        let sm = self.sqrt_mu;
        let r2 = x * x + y * y;
        let z2 = z * z;
        let (p1r, p1i) = (self.p1.re, self.p1.im);
        let (cc, dd) = (self.cd.re, self.cd.im);
        let (p3r, p3i) = (self.p3.re, self.p3.im);
        let (aa, bb) = (self.ab.re, self.ab.im);

        // d/d{x,y} of (u*)^3 components.
        let d_uc3re_dx = 3.0 * (x * x - y * y);
        let d_uc3re_dy = -6.0 * x * y;
        let d_uc3im_dx = -6.0 * x * y;
        let d_uc3im_dy = 3.0 * (y * y - x * x);

        let db_re_dx = p1r * r2 + (p1r * x - p1i * y) * 2.0 * x + cc * z2 + p3r * d_uc3re_dx
            - p3i * d_uc3im_dx;
        let db_re_dy = -p1i * r2 + (p1r * x - p1i * y) * 2.0 * y - dd * z2 + p3r * d_uc3re_dy
            - p3i * d_uc3im_dy;
        let db_re_dz = 2.0 * z * (cc * x - dd * y);
        let db_im_dx = p1i * r2 + (p1i * x + p1r * y) * 2.0 * x + dd * z2 + p3i * d_uc3re_dx
            + p3r * d_uc3im_dx;
        let db_im_dy = p1r * r2 + (p1i * x + p1r * y) * 2.0 * y + cc * z2 + p3i * d_uc3re_dy
            + p3r * d_uc3im_dy;
        let db_im_dz = 2.0 * z * (dd * x + cc * y);

        [
            [
                -rho + z + sm * db_re_dx,
                -omega + sm * db_re_dy,
                x + sm * db_re_dz,
            ],
            [
                omega + sm * db_im_dx,
                -rho - z + sm * db_im_dy,
                -y + sm * db_im_dz,
            ],
            [
                4.0 * aa * x - 4.0 * bb * y + sm * self.b2n * z * 2.0 * x,
                -4.0 * aa * y - 4.0 * bb * x + sm * self.b2n * z * 2.0 * y,
                self.axis_rate * sm * (1.0 - 3.0 * z2) + sm * self.b2n * r2,
            ],
        ]
    }

    /// The exact 2x2 planar block of the Jacobian at an axis equilibrium
    /// (the Jacobian is block-diagonal there: plane couplings to `z` vanish
    /// on the axis).
    pub fn plane_block_at(&self, eq: EquilibriumId) -> [[f64; 2]; 2] {
        let j = self.jacobian(eq.state());
        [[j[0][0], j[0][1]], [j[1][0], j[1][1]]]
    }

    /// Axis eigenvalue (the `(z, z)` Jacobian entry) at an axis equilibrium.
    pub fn axis_eigenvalue_at(&self, eq: EquilibriumId) -> f64 {
        self.jacobian(eq.state())[2][2]
    }

    /// Unstable plane eigendirection and eigenvalue at a saddle equilibrium
    /// `(0, 0, ±1)`: the larger real eigenvalue `lam1` of the plane block and
    /// its unit eigenvector, sign-fixed so the first nonzero component is
    /// positive. Errors if the plane eigenvalues are complex or `lam1 <= 0`.
    pub fn unstable_direction(&self, eq: EquilibriumId) -> Result<(State3, f64), SystemError> {
        plane_unstable_direction(self.plane_block_at(eq))
    }
}

/// Expanding eigendirection of a 2x2 plane block, embedded in the plane
/// `z = 0`: the larger real eigenvalue `lam1` and its unit eigenvector,
/// sign-fixed so the first nonzero component is positive. Errors if the
/// eigenvalues are complex or `lam1 <= 0`.
pub fn plane_unstable_direction(b: [[f64; 2]; 2]) -> Result<(State3, f64), SystemError> {
    let tr = b[0][0] + b[1][1];
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc <= 0.0 {
        return Err(SystemError::DegenerateSpectrum(
            "plane eigenvalues are not real at the saddle",
        ));
    }
    let lam1 = tr / 2.0 + disc.sqrt();
    if lam1 <= 0.0 {
        return Err(SystemError::DegenerateSpectrum(
            "no expanding plane eigenvalue at the saddle",
        ));
    }
    // Eigenvector from whichever row form is better conditioned.
    let v1 = [b[0][1], lam1 - b[0][0]];
    let v2 = [lam1 - b[1][1], b[1][0]];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    let (mut vx, mut vy) = if n1 >= n2 {
        (v1[0] / n1, v1[1] / n1)
    } else {
        (v2[0] / n2, v2[1] / n2)
    };
    if n1.max(n2) == 0.0 {
        // Block is a multiple of the identity: any direction works.
        vx = 1.0;
        vy = 0.0;
    }
    let flip = if vx != 0.0 { vx < 0.0 } else { vy < 0.0 };
    if flip {
        vx = -vx;
        vy = -vy;
    }
    Ok((State3::new(vx, vy, 0.0), lam1))
}

/// Convenience wrapper: evaluates the rescaled field without keeping the
/// precomputed struct.
pub fn eval_rescaled_field(
    c: &SystemCoefficients,
    r: RescaledParams,
    s: State3,
) -> Result<State3, SystemError> {
    Ok(RescaledField::new(c, r)?.eval(s))
}

/// Any of the four systems behind one evaluation interface.
#[derive(Debug, Clone)]
pub enum Field {
    General {
        coeffs: SystemCoefficients,
        params: PhysParams,
    },
    Numeric {
        params: PhysParams,
    },
    Rescaled(RescaledField),
    Sm(SMParams),
}

impl Field {
    pub fn eval(&self, s: State3) -> State3 {
        match self {
            Field::General { coeffs, params } => eval_general_field(coeffs, params, s),
            Field::Numeric { params } => eval_numeric_field(params, s),
            Field::Rescaled(f) => f.eval(s),
            Field::Sm(p) => eval_sm_field(p, s),
        }
    }

    /// Jacobian (analytic except for the general form, which uses central
    /// differences).
    pub fn jacobian(&self, s: State3) -> Mat3 {
        match self {
            Field::General { coeffs, params } => general_jacobian(coeffs, params, s),
            Field::Numeric { params } => numeric_jacobian(params, s),
            Field::Rescaled(f) => f.jacobian(s),
            Field::Sm(p) => sm_jacobian(p, s),
        }
    }
}

/// Stability of an equilibrium of the one-dimensional axis dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisStability {
    Attracting,
    Repelling,
    Neutral,
}

/// An equilibrium of the axis dynamics `z' = mu z + b1 z^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisEquilibrium {
    pub z: f64,
    pub stability: AxisStability,
}

/// Equilibria of the invariant-axis dynamics `z' = mu z + b1 z^3` of the
/// general system, sorted by increasing `z`. For `mu > 0` (and `b1 < 0`)
/// these are `0` and `±sqrt(mu/|b1|)`; for `mu <= 0` only the origin.
pub fn find_axis_equilibria(
    c: &SystemCoefficients,
    p: &PhysParams,
) -> Result<Vec<AxisEquilibrium>, SystemError> {
    c.validate()?;
    let stability_of = |z: f64| {
        let slope = p.mu + 3.0 * c.b1 * z * z;
        if slope < 0.0 {
            AxisStability::Attracting
        } else if slope > 0.0 {
            AxisStability::Repelling
        } else {
            AxisStability::Neutral
        }
    };
    let mut out = Vec::new();
    if p.mu > 0.0 {
        let z0 = (p.mu / -c.b1).sqrt();
        out.push(AxisEquilibrium {
            z: -z0,
            stability: stability_of(-z0),
        });
        out.push(AxisEquilibrium {
            z: 0.0,
            stability: stability_of(0.0),
        });
        out.push(AxisEquilibrium {
            z: z0,
            stability: stability_of(z0),
        });
    } else {
        out.push(AxisEquilibrium {
            z: 0.0,
            stability: stability_of(0.0),
        });
    }
    Ok(out)
}

/// The three distinguished equilibria of the rescaled system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumId {
    /// The origin `(0, 0, 0)`.
    O,
    /// The upper axis saddle `(0, 0, 1)`.
    OPlus,
    /// The lower axis saddle `(0, 0, -1)`.
    OMinus,
}

impl EquilibriumId {
    pub fn state(self) -> State3 {
        match self {
            EquilibriumId::O => State3::new(0.0, 0.0, 0.0),
            EquilibriumId::OPlus => State3::new(0.0, 0.0, 1.0),
            EquilibriumId::OMinus => State3::new(0.0, 0.0, -1.0),
        }
    }
}

/// Eigen-structure report at one of the axis equilibria of the rescaled
/// system, together with the two saddle indices of the parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub which: EquilibriumId,
    /// Eigenvalues at `which`, sorted by descending real part.
    pub eigenvalues: [ComplexValue; 3],
    /// Saddle index at the symmetric saddles: `nu = -lambda_axis / lambda_1`
    /// evaluated at `(0, 0, ±1)` (equal at both by symmetry).
    pub nu: f64,
    /// Saddle index at the origin: `nu_hat = lambda_axis / |Re lambda_plane|`
    /// evaluated at `(0, 0, 0)`.
    pub nu_hat: f64,
    /// Saddle condition at `(0, 0, ±1)`: three real eigenvalues ordered
    /// `lambda_1 > 0 > lambda_2 > lambda_3` with the axis direction carrying
    /// `lambda_2` and `lambda_1 + lambda_2 > 0`. `None` when `which` is the
    /// origin (the condition concerns the saddles).
    pub saddle_expansion_ok: Option<bool>,
    /// Index window `0 < nu_hat < nu < (1 + nu_hat)/2 < 1`.
    pub index_window_ok: bool,
    /// Whether the contracting plane pair at the origin is complex
    /// (saddle-focus; `omega != 0`).
    pub stable_pair_complex: bool,
    /// Whether the plane block at the origin is a dicritical node
    /// (`omega = 0`: equal real rates with a full plane of eigendirections).
    pub dicritical: bool,
}

/// Builds the eigen-structure report for one equilibrium of the rescaled
/// system. Eigenvalues come from the exact block structure at the axis
/// (plane 2x2 block plus the decoupled axis rate).
pub fn spectrum_report(
    c: &SystemCoefficients,
    r: RescaledParams,
    which: EquilibriumId,
) -> Result<SpectrumReport, SystemError> {
    let field = RescaledField::new(c, r)?;

    let block_eigs = |eq: EquilibriumId| -> (ComplexValue, ComplexValue) {
        let b = field.plane_block_at(eq);
        let tr = b[0][0] + b[1][1];
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        let disc = tr * tr / 4.0 - det;
        if disc >= 0.0 {
            let root = disc.sqrt();
            (
                ComplexValue::new(tr / 2.0 + root, 0.0),
                ComplexValue::new(tr / 2.0 - root, 0.0),
            )
        } else {
            let im = (-disc).sqrt();
            (
                ComplexValue::new(tr / 2.0, im),
                ComplexValue::new(tr / 2.0, -im),
            )
        }
    };

    // Indices from the two equilibrium classes, independent of `which`.
    let axis_at_plus = field.axis_eigenvalue_at(EquilibriumId::OPlus);
    let (lp1, _) = block_eigs(EquilibriumId::OPlus);
    let nu = if lp1.im == 0.0 && lp1.re != 0.0 {
        -axis_at_plus / lp1.re
    } else {
        f64::NAN
    };
    let axis_at_origin = field.axis_eigenvalue_at(EquilibriumId::O);
    let (lo1, _) = block_eigs(EquilibriumId::O);
    let nu_hat = if lo1.re != 0.0 {
        axis_at_origin / lo1.re.abs()
    } else {
        f64::NAN
    };

    let axis_here = field.axis_eigenvalue_at(which);
    let (l1, l2) = block_eigs(which);
    let mut eigenvalues = [l1, l2, ComplexValue::new(axis_here, 0.0)];
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

    let saddle_expansion_ok = match which {
        EquilibriumId::O => None,
        _ => {
            let real_plane = l1.im == 0.0;
            Some(
                real_plane
                    && l1.re > 0.0
                    && axis_here < 0.0
                    && axis_here > l2.re
                    && l1.re + axis_here > 0.0,
            )
        }
    };

    let index_window_ok = nu_hat.is_finite()
        && nu.is_finite()
        && 0.0 < nu_hat
        && nu_hat < nu
        && nu < (1.0 + nu_hat) / 2.0
        && (1.0 + nu_hat) / 2.0 < 1.0;

    let origin_block = field.plane_block_at(EquilibriumId::O);
    let off_diag = origin_block[0][1].abs() + origin_block[1][0].abs();
    let stable_pair_complex = {
        let tr = origin_block[0][0] + origin_block[1][1];
        let det = origin_block[0][0] * origin_block[1][1] - origin_block[0][1] * origin_block[1][0];
        tr * tr / 4.0 - det < 0.0
    };
    let dicritical = off_diag == 0.0 && (origin_block[0][0] - origin_block[1][1]).abs() == 0.0;

    Ok(SpectrumReport {
        which,
        eigenvalues,
        nu,
        nu_hat,
        saddle_expansion_ok,
        index_window_ok,
        stable_pair_complex,
        dicritical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat_vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng, scale: f64) -> State3 {
        State3::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        )
    }

    #[test]
    fn symmetry_has_order_four() {
        let s = State3::new(0.3, -0.7, 1.1);
        let mut t = s;
        for _ in 0..4 {
            t = apply_symmetry(t);
        }
        assert_eq!(s, t);
        assert_ne!(apply_symmetry(apply_symmetry(s)), s);
    }

    #[test]
    fn numeric_matches_general_at_concrete_coefficients() {
        let c = SystemCoefficients::concrete();
        let p = PhysParams::new(0.07, 0.16, 0.02);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = random_state(&mut rng, 1.5);
            let g = eval_general_field(&c, &p, s);
            let n = eval_numeric_field(&p, s);
            assert!(
                g.sub(n).norm() < 1e-14,
                "general/numeric mismatch at {s:?}: {g:?} vs {n:?}"
            );
        }
    }

    #[test]
    fn general_field_is_equivariant() {
        let c = SystemCoefficients::concrete();
        let p = PhysParams::new(0.11, 0.23, 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = random_state(&mut rng, 2.0);
            let lhs = apply_symmetry(eval_general_field(&c, &p, s));
            let rhs = eval_general_field(&c, &p, apply_symmetry(s));
            assert!(lhs.sub(rhs).norm() < 1e-12, "equivariance broke at {s:?}");
        }
    }

    #[test]
    fn axis_is_invariant_for_all_fields() {
        let c = SystemCoefficients::concrete();
        let p = PhysParams::new(0.07, 0.16, 0.02);
        let r = RescaledParams::new(0.35, 0.8, 0.02).unwrap();
        let fields = [
            Field::General {
                coeffs: c,
                params: p,
            },
            Field::Numeric { params: p },
            Field::Rescaled(RescaledField::new(&c, r).unwrap()),
            Field::Sm(SMParams::new(0.5, 1.0).unwrap()),
        ];
        for f in &fields {
            for z in [-2.0, -1.0, -0.3, 0.0, 0.4, 1.0, 3.0] {
                let v = f.eval(State3::new(0.0, 0.0, z));
                assert_eq!(v.x, 0.0, "axis x-invariance broke at z={z}");
                assert_eq!(v.y, 0.0, "axis y-invariance broke at z={z}");
            }
        }
    }

    #[test]
    fn numeric_jacobian_matches_finite_differences() {
        let p = PhysParams::new(0.07, 0.16, 0.02);
        let c = SystemCoefficients::concrete();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = random_state(&mut rng, 1.2);
            let ja = numeric_jacobian(&p, s);
            let jf = general_jacobian(&c, &p, s);
            for i in 0..3 {
                for j in 0..3 {
                    let scale = 1.0 + ja[i][j].abs();
                    assert!(
                        (ja[i][j] - jf[i][j]).abs() / scale < 1e-8,
                        "entry ({i},{j}) analytic {} vs fd {}",
                        ja[i][j],
                        jf[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn jacobian_at_origin_is_linear_part() {
        let p = PhysParams::new(0.07, 0.16, 0.02);
        let j = numeric_jacobian(&p, State3::new(0.0, 0.0, 0.0));
        let expect = [[-0.07, -0.16, 0.0], [0.16, -0.07, 0.0], [0.0, 0.0, 0.02]];
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(j[i][k], expect[i][k]);
            }
        }
    }

    #[test]
    fn rescaled_equilibria_are_exact_fixed_points() {
        let c = SystemCoefficients::concrete();
        let r = RescaledParams::new(0.35, 0.8, 0.02).unwrap();
        let f = RescaledField::new(&c, r).unwrap();
        for z in [-1.0, 0.0, 1.0] {
            let v = f.eval(State3::new(0.0, 0.0, z));
            assert_eq!(v.x, 0.0);
            assert_eq!(v.y, 0.0);
            assert_eq!(v.z, 0.0, "axis equilibrium at z={z} moved");
        }
    }

    #[test]
    fn rescaled_field_is_equivariant() {
        let c = SystemCoefficients::concrete();
        let r = RescaledParams::new(0.35, 0.8, 0.02).unwrap();
        let f = RescaledField::new(&c, r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let s = random_state(&mut rng, 1.5);
            let lhs = apply_symmetry(f.eval(s));
            let rhs = f.eval(apply_symmetry(s));
            assert!(lhs.sub(rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn rescaled_jacobian_matches_finite_differences() {
        let c = SystemCoefficients::concrete();
        let r = RescaledParams::new(0.35, 0.8, 0.02).unwrap();
        let f = RescaledField::new(&c, r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        for _ in 0..20 {
            let s = random_state(&mut rng, 1.3);
            let ja = f.jacobian(s);
            for col in 0..3 {
                let mut sp = s.to_array();
                let mut sm = s.to_array();
                sp[col] += h;
                sm[col] -= h;
                let fp = f.eval(State3::from_array(sp)).to_array();
                let fm = f.eval(State3::from_array(sm)).to_array();
                for row in 0..3 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    let scale = 1.0 + ja[row][col].abs();
                    assert!(
                        (ja[row][col] - fd).abs() / scale < 1e-8,
                        "entry ({row},{col}): analytic {} vs fd {}",
                        ja[row][col],
                        fd
                    );
                }
            }
        }
    }

    #[test]
    fn rescaled_equals_pushforward_of_general() {
        // J_scale * G_general(scale^-1 s) / (z0 |a0|) must equal the rescaled
        // field: checks the closed-form change of variables against the
        // definition, chain rule included.
        let c = SystemCoefficients::concrete();
        let mu = 0.02;
        let r = RescaledParams::new(0.35, 0.8, mu).unwrap();
        let f = RescaledField::new(&c, r).unwrap();
        let abs_a0 = c.a0.norm();
        let z0 = (mu / -c.b1).sqrt();
        let time = z0 * abs_a0;
        let gamma = r.rho * time;
        let beta = r.omega * time;
        let p = PhysParams::new(gamma, beta, mu);
        // u_phys = z0 |b1|^{1/4} e^{i arg(a0)/2} u_new, z_phys = z0 z_new.
        let phase = ComplexValue::from_polar(1.0, c.a0.arg() / 2.0);
        let su = z0 * (-c.b1).powf(0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let s = random_state(&mut rng, 1.4);
            let u_new = ComplexValue::new(s.x, s.y);
            let u_phys = su * phase * u_new;
            let s_phys = State3::new(u_phys.re, u_phys.im, z0 * s.z);
            let g = eval_general_field(&c, &p, s_phys);
            // Pull the physical derivative back: du_new = du_phys/(su*phase),
            // dz_new = dz_phys/z0, then divide by the time factor.
            let du_phys = ComplexValue::new(g.x, g.y);
            let du_new = du_phys / (su * phase) / time;
            let dz_new = g.z / z0 / time;
            let expect = State3::new(du_new.re, du_new.im, dz_new);
            let got = f.eval(s);
            assert!(
                got.sub(expect).norm() < 1e-12,
                "pushforward mismatch at {s:?}: {got:?} vs {expect:?}"
            );
        }
    }

    #[test]
    fn sm_jacobian_matches_finite_differences() {
        let p = SMParams::new(0.45, 0.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = 1e-6;
        for _ in 0..20 {
            let s = random_state(&mut rng, 2.0);
            let ja = sm_jacobian(&p, s);
            for col in 0..3 {
                let mut sp = s.to_array();
                let mut sm = s.to_array();
                sp[col] += h;
                sm[col] -= h;
                let fp = eval_sm_field(&p, State3::from_array(sp)).to_array();
                let fm = eval_sm_field(&p, State3::from_array(sm)).to_array();
                for row in 0..3 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    assert!((ja[row][col] - fd).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn sm_equilibria() {
        let p = SMParams::new(0.45, 0.9).unwrap();
        let eq = State3::new(p.alpha.sqrt(), 0.0, 1.0);
        let v = eval_sm_field(&p, eq);
        assert!(v.norm() < 1e-15, "SM equilibrium moved: {v:?}");
        let origin = eval_sm_field(&p, State3::new(0.0, 0.0, 0.0));
        assert_eq!(origin.norm(), 0.0);
    }

    #[test]
    fn axis_equilibria_concrete() {
        let c = SystemCoefficients::concrete();
        let p = PhysParams::new(0.07, 0.16, 0.02);
        let eqs = find_axis_equilibria(&c, &p).unwrap();
        assert_eq!(eqs.len(), 3);
        let z0 = (0.02f64 / 0.25).sqrt();
        assert!((eqs[0].z + z0).abs() < 1e-15);
        assert_eq!(eqs[0].stability, AxisStability::Attracting);
        assert_eq!(eqs[1].z, 0.0);
        assert_eq!(eqs[1].stability, AxisStability::Repelling);
        assert!((eqs[2].z - z0).abs() < 1e-15);
        assert_eq!(eqs[2].stability, AxisStability::Attracting);

        let stable = PhysParams::new(0.07, 0.16, -0.01);
        let eqs = find_axis_equilibria(&c, &stable).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].stability, AxisStability::Attracting);
    }

    #[test]
    fn unstable_direction_is_an_eigenvector() {
        let c = SystemCoefficients::concrete();
        let r = RescaledParams::new(0.35, 0.8, 0.02).unwrap();
        let f = RescaledField::new(&c, r).unwrap();
        for eq in [EquilibriumId::OPlus, EquilibriumId::OMinus] {
            let (v, lam) = f.unstable_direction(eq).unwrap();
            let j = f.jacobian(eq.state());
            let jv = mat_vec(&j, &v.to_array());
            let resid = State3::from_array(jv).sub(v.scale(lam)).norm();
            assert!(resid < 1e-12, "eigen residual {resid} at {eq:?}");
            assert!(lam > 0.0);
        }
    }

    #[test]
    fn spectrum_report_flags_at_reference_point() {
        let c = SystemCoefficients::concrete();
        let r = RescaledParams::new(0.35, 0.8, 0.02).unwrap();
        for which in [EquilibriumId::OPlus, EquilibriumId::OMinus] {
            let rep = spectrum_report(&c, r, which).unwrap();
            assert_eq!(rep.saddle_expansion_ok, Some(true), "{which:?}");
            // Axis eigenvalue -2 a sqrt(mu) = -0.2 exactly at this point.
            assert!((rep.eigenvalues[1].re + 0.2).abs() < 1e-12);
            assert!(rep.eigenvalues.iter().all(|e| e.im == 0.0));
            assert!(rep.eigenvalues[0].re > 0.0);
            assert!(rep.eigenvalues[0].re + rep.eigenvalues[1].re > 0.0);
        }
        let rep_o = spectrum_report(&c, r, EquilibriumId::O).unwrap();
        assert!(rep_o.stable_pair_complex);
        assert!(!rep_o.dicritical);
        assert_eq!(rep_o.saddle_expansion_ok, None);

        let r0 = RescaledParams::new(0.5, 0.0, 1e-4).unwrap();
        let rep0 = spectrum_report(&c, r0, EquilibriumId::O).unwrap();
        assert!(rep0.dicritical);
        assert!(!rep0.stable_pair_complex);
    }

    #[test]
    fn spectrum_matches_general_cubic_solver() {
        let c = SystemCoefficients::concrete();
        let r = RescaledParams::new(0.35, 0.8, 0.02).unwrap();
        let f = RescaledField::new(&c, r).unwrap();
        for which in [EquilibriumId::O, EquilibriumId::OPlus, EquilibriumId::OMinus] {
            let rep = spectrum_report(&c, r, which).unwrap();
            let full = crate::linalg::eigenvalues(&f.jacobian(which.state()));
            for (a, b) in rep.eigenvalues.iter().zip(full.iter()) {
                assert!(
                    (a - b).norm() < 1e-10,
                    "block vs cubic mismatch at {which:?}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn index_ratio_in_window_near_onset() {
        let c = SystemCoefficients::concrete();
        for (mu, lo, hi) in [(1e-4, 1.9, 2.1), (1e-5, 1.96, 2.04)] {
            let r = RescaledParams::new(0.5, 0.0, mu).unwrap();
            let rep = spectrum_report(&c, r, EquilibriumId::OPlus).unwrap();
            let ratio = rep.nu / rep.nu_hat;
            assert!(
                ratio > lo && ratio < hi,
                "nu/nu_hat = {ratio} outside [{lo}, {hi}] at mu={mu}"
            );
            assert!(rep.index_window_ok, "index window should hold at mu={mu}");
        }
    }
}
