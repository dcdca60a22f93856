//! The two-dimensional model return map near the symmetric heteroclinic
//! structure, with its derivative, cone-field certificates of singular
//! hyperbolicity, the orientation sign and attractor-region predicates, and
//! the cubic Hénon-like map that organizes the degenerate case.
//!
//! The map acts on a square strip with a discontinuity line `Y = 0`:
//! `X1 = (1 + c_hat |Y|^nu + |delta|^s eta1) sign(Y)`,
//! `Y1 = sigma (-1 + c |Y|^nu + |delta|^s eta2) sign(Y)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::eigenvalues;
use crate::types::{ComplexValue, ValidationError};

#[derive(Debug, Error)]
pub enum MapError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("the map is undefined on the discontinuity line Y = 0")]
    OnDiscontinuity,
    #[error("derivative is not finite at (X, Y) = ({0}, {1})")]
    SingularDerivative(f64, f64),
    #[error("sigma sign is undefined at Omega = pi k")]
    OnSigmaBoundary,
}

/// Smooth perturbation pair `(eta1, eta2)` of the displayed shape
/// `eta_i = amplitude_i * |Y|^{nu_tilde} * sin(X) * sign(Y) * exp(-Y^2)`:
/// odd under `(X, Y) -> (-X, -Y)` jointly with the leading part, and
/// vanishing at the discontinuity faster than the leading `|Y|^nu` term
/// whenever `nu_tilde > nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationFamily {
    pub amplitude1: f64,
    pub amplitude2: f64,
    /// Decay exponent `nu_tilde`; must lie in `(nu, 2 nu]` when an amplitude
    /// is nonzero (the upper end stands in for the strong-stable rate bound,
    /// which is the caller's data).
    pub nu_tilde: f64,
}

impl PerturbationFamily {
    pub fn zero() -> Self {
        Self {
            amplitude1: 0.0,
            amplitude2: 0.0,
            nu_tilde: 1.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude1 == 0.0 && self.amplitude2 == 0.0
    }

    fn shape(&self, x: f64, y: f64) -> f64 {
        y.abs().powf(self.nu_tilde) * x.sin() * y.signum() * (-y * y).exp()
    }

    pub fn eta1(&self, x: f64, y: f64) -> f64 {
        self.amplitude1 * self.shape(x, y)
    }

    pub fn eta2(&self, x: f64, y: f64) -> f64 {
        self.amplitude2 * self.shape(x, y)
    }

    /// `(d/dX, d/dY)` of the shape factor, scaled by an amplitude.
    fn shape_grad(&self, x: f64, y: f64) -> (f64, f64) {
        let ay = y.abs();
        let gauss = (-y * y).exp();
        let dx = ay.powf(self.nu_tilde) * x.cos() * y.signum() * gauss;
        // d/dY of |Y|^{nt} sign(Y) e^{-Y^2} = (nt |Y|^{nt-1} - 2 |Y|^{nt+1}) e^{-Y^2}
        let dy = (self.nu_tilde * ay.powf(self.nu_tilde - 1.0)
            - 2.0 * ay.powf(self.nu_tilde + 1.0))
            * gauss
            * x.sin();
        (dx, dy)
    }
}

/// Parameters of the model map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelMapParams {
    /// Saddle index, in `(0, 1)`.
    pub nu: f64,
    /// Leading coefficient of the `Y` component, positive.
    pub c: f64,
    /// Leading coefficient of the `X` component.
    pub c_hat: f64,
    /// Orientation sign, `+1` or `-1`.
    pub sigma: i8,
    /// Splitting parameter scaling the perturbation.
    pub delta: f64,
    /// Perturbation exponent `s >= 0` in `|delta|^s`.
    pub s_exp: f64,
    pub perturbation: PerturbationFamily,
}

impl ModelMapParams {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(ValidationError::OutOfRange("nu must lie in (0, 1)"));
        }
        if !(self.c > 0.0) {
            return Err(ValidationError::OutOfRange("c must be positive"));
        }
        if self.sigma != 1 && self.sigma != -1 {
            return Err(ValidationError::OutOfRange("sigma must be +1 or -1"));
        }
        if !(self.s_exp >= 0.0) {
            return Err(ValidationError::OutOfRange("s_exp must be nonnegative"));
        }
        if !(self.delta.is_finite() && self.c_hat.is_finite()) {
            return Err(ValidationError::NonFinite("map parameters"));
        }
        if !self.perturbation.is_zero() {
            let nt = self.perturbation.nu_tilde;
            if !(nt > self.nu && nt <= 2.0 * self.nu) {
                return Err(ValidationError::OutOfRange(
                    "nu_tilde must lie in (nu, 2 nu] for a nonzero perturbation",
                ));
            }
        }
        Ok(())
    }

    /// `|delta|^s` perturbation scale.
    fn pert_scale(&self) -> f64 {
        self.delta.abs().powf(self.s_exp)
    }

    /// Perturbation-free map with the given leading data.
    pub fn unperturbed(nu: f64, c: f64, c_hat: f64, sigma: i8) -> Self {
        Self {
            nu,
            c,
            c_hat,
            sigma,
            delta: 0.0,
            s_exp: 1.0,
            perturbation: PerturbationFamily::zero(),
        }
    }
}

/// Applies the map. Errors on the discontinuity line `Y = 0`.
pub fn map_t(p: &ModelMapParams, x: f64, y: f64) -> Result<(f64, f64), MapError> {
    p.validate()?;
    if y == 0.0 {
        return Err(MapError::OnDiscontinuity);
    }
    let sgn = y.signum();
    let pow = y.abs().powf(p.nu);
    let scale = p.pert_scale();
    let x1 = (1.0 + p.c_hat * pow + scale * p.perturbation.eta1(x, y)) * sgn;
    let y1 = p.sigma as f64 * (-1.0 + p.c * pow + scale * p.perturbation.eta2(x, y)) * sgn;
    Ok((x1, y1))
}

/// Analytic Jacobian of the map at `(X, Y)`, `Y != 0`.
pub fn map_derivative(p: &ModelMapParams, x: f64, y: f64) -> Result<[[f64; 2]; 2], MapError> {
    p.validate()?;
    if y == 0.0 {
        return Err(MapError::OnDiscontinuity);
    }
    let sgn = y.signum();
    let sigma = p.sigma as f64;
    let d_pow = p.nu * y.abs().powf(p.nu - 1.0); // d|Y|^nu/dY times sign(Y)
    let scale = p.pert_scale();
    let (g1x, g1y) = p.perturbation.shape_grad(x, y);
    let (e1x, e1y) = (p.perturbation.amplitude1 * g1x, p.perturbation.amplitude1 * g1y);
    let (e2x, e2y) = (p.perturbation.amplitude2 * g1x, p.perturbation.amplitude2 * g1y);
    let j = [
        [
            scale * e1x * sgn,
            p.c_hat * d_pow + scale * e1y * sgn,
        ],
        [
            sigma * scale * e2x * sgn,
            sigma * p.c * d_pow + sigma * scale * e2y * sgn,
        ],
    ];
    if j.iter().flatten().any(|v| !v.is_finite()) {
        return Err(MapError::SingularDerivative(x, y));
    }
    Ok(j)
}

/// Grid on which cone conditions are sampled: `|Y|` from `y_min` to 1 (both
/// signs), `X` over a symmetric window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConeGrid {
    pub y_min: f64,
    pub n_y: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
}

impl Default for ConeGrid {
    fn default() -> Self {
        Self {
            y_min: 1e-3,
            n_y: 50,
            x_min: -2.0,
            x_max: 2.0,
            n_x: 21,
        }
    }
}

impl ConeGrid {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if !(self.y_min > 0.0 && self.y_min < 1.0) {
            return Err(ValidationError::OutOfRange("y_min must lie in (0, 1)"));
        }
        if self.n_y < 2 || self.n_x < 1 {
            return Err(ValidationError::OutOfRange(
                "cone grid needs n_y >= 2 and n_x >= 1",
            ));
        }
        if !(self.x_min <= self.x_max) {
            return Err(ValidationError::OutOfRange("x_min must not exceed x_max"));
        }
        Ok(())
    }
}

/// Cone half-slopes: the unstable cone `C^u = {|v_X| <= slope_u |v_Y|}`
/// around the `Y` direction, the strong-stable cone
/// `C^ss = {|v_Y| <= slope_ss |v_X|}` around the `X` direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSlopes {
    pub slope_u: f64,
    pub slope_ss: f64,
}

impl ConeSlopes {
    /// Default slopes scale with the perturbation size `|delta|^s`.
    pub fn for_params(p: &ModelMapParams) -> Self {
        let s = 10.0 * p.pert_scale();
        Self {
            slope_u: s,
            slope_ss: s,
        }
    }
}

/// Grid certificate for the cone-field conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeCertificate {
    pub slopes: ConeSlopes,
    pub grid: ConeGrid,
    /// Min over the grid of the `Y`-expansion `|(DT v)_Y|` over boundary
    /// vectors of `C^u` normalized to `v_Y = 1`.
    pub min_expansion: f64,
    /// Max over the grid of the `X`-contraction `|(DT v)_X|` over boundary
    /// vectors of `C^ss` normalized to `v_X = 1`.
    pub max_contraction: f64,
    /// `DT C^u` stays inside `C^u` everywhere on the grid.
    pub u_invariant: bool,
    /// `DT` maps the complement of `C^ss` into itself everywhere on the grid
    /// (i.e. `C^ss` is backward-invariant, stated without inverting `DT`).
    pub ss_invariant: bool,
    pub points_checked: usize,
}

impl ConeCertificate {
    pub fn valid(&self) -> bool {
        self.u_invariant
            && self.ss_invariant
            && self.min_expansion > 1.0
            && self.max_contraction < 1.0
    }
}

/// Samples the cone conditions over the grid (both signs of `Y`).
pub fn verify_cones(
    p: &ModelMapParams,
    grid: &ConeGrid,
    slopes: ConeSlopes,
) -> Result<ConeCertificate, MapError> {
    p.validate()?;
    grid.validate()?;
    let (su, sss) = (slopes.slope_u, slopes.slope_ss);
    if !(su >= 0.0 && sss >= 0.0) {
        return Err(ValidationError::OutOfRange("cone slopes must be nonnegative").into());
    }

    let mut min_expansion = f64::INFINITY;
    let mut max_contraction: f64 = 0.0;
    let mut u_invariant = true;
    let mut ss_invariant = true;
    let mut points = 0usize;

    let apply = |j: &[[f64; 2]; 2], v: (f64, f64)| {
        (
            j[0][0] * v.0 + j[0][1] * v.1,
            j[1][0] * v.0 + j[1][1] * v.1,
        )
    };

    for iy in 0..grid.n_y {
        let ay = grid.y_min + (1.0 - grid.y_min) * iy as f64 / (grid.n_y - 1) as f64;
        for y in [ay, -ay] {
            for ix in 0..grid.n_x {
                let x = if grid.n_x == 1 {
                    grid.x_min
                } else {
                    grid.x_min + (grid.x_max - grid.x_min) * ix as f64 / (grid.n_x - 1) as f64
                };
                let j = map_derivative(p, x, y)?;
                points += 1;

                // Unstable cone: boundary and axis vectors with v_Y = 1.
                for vx in [su, -su, 0.0] {
                    let w = apply(&j, (vx, 1.0));
                    min_expansion = min_expansion.min(w.1.abs());
                    if w.0.abs() > su * w.1.abs() {
                        u_invariant = false;
                    }
                }
                // Complement of the strong-stable cone: boundary and axis
                // vectors with v_X = 1; images must stay in the complement.
                for vy in [sss, -sss, 0.0] {
                    let w = apply(&j, (1.0, vy));
                    max_contraction = max_contraction.max(w.0.abs());
                    if w.1.abs() < sss * w.0.abs() {
                        ss_invariant = false;
                    }
                }
            }
        }
    }

    Ok(ConeCertificate {
        slopes,
        grid: *grid,
        min_expansion,
        max_contraction,
        u_invariant,
        ss_invariant,
        points_checked: points,
    })
}

/// Orientation sign `sigma = (-1)^k sign(a22) sign(Omega - pi k) sign(delta)`.
pub fn sigma_sign(
    k: i64,
    sign_a22: f64,
    omega: f64,
    sign_delta: f64,
) -> Result<i8, MapError> {
    let d = omega - std::f64::consts::PI * k as f64;
    if d == 0.0 {
        return Err(MapError::OnSigmaBoundary);
    }
    if sign_a22 == 0.0 || sign_delta == 0.0 || !d.is_finite() {
        return Err(ValidationError::OutOfRange(
            "sign arguments must be nonzero and finite",
        )
        .into());
    }
    let par = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let s = par * sign_a22.signum() * d.signum() * sign_delta.signum();
    Ok(if s > 0.0 { 1 } else { -1 })
}

/// One attractor-existence region of the countable family indexed by `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub k: i64,
    /// Arrival angle `Omega` of the relevant connection.
    pub omega: f64,
    /// Saddle index used in the exponential band bounds.
    pub nu: f64,
    /// Companion index (reported alongside; see `nu`/`nu_hat` degeneracy).
    pub nu_hat: f64,
    pub k1: f64,
    pub k2: f64,
}

impl RegionSpec {
    pub fn new(
        k: i64,
        omega: f64,
        nu: f64,
        nu_hat: f64,
        k1: f64,
        k2: f64,
    ) -> Result<Self, ValidationError> {
        if !(nu > 0.0 && nu_hat > 0.0) {
            return Err(ValidationError::OutOfRange("nu and nu_hat must be positive"));
        }
        if !(k1 > 0.0 && k2 > k1) {
            return Err(ValidationError::OutOfRange("need 0 < K1 < K2"));
        }
        if k == 0 && omega == 0.0 {
            return Err(ValidationError::OutOfRange(
                "the k = 0 region is excluded when Omega = 0",
            ));
        }
        if !omega.is_finite() {
            return Err(ValidationError::NonFinite("Omega"));
        }
        Ok(Self {
            k,
            omega,
            nu,
            nu_hat,
            k1,
            k2,
        })
    }

    /// `exp(-nu |Omega - pi k| / |theta|)`.
    pub fn band_factor(&self, theta: f64) -> f64 {
        let d = self.omega - std::f64::consts::PI * self.k as f64;
        (-self.nu * d.abs() / theta.abs()).exp()
    }

    pub fn lower_bound(&self, theta: f64) -> f64 {
        self.k1 * self.band_factor(theta)
    }

    pub fn upper_bound(&self, theta: f64) -> f64 {
        self.k2 * self.band_factor(theta)
    }
}

/// Outcome of a region test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCheck {
    pub inside: bool,
    /// Why the point is outside, when it is.
    pub reason: Option<String>,
}

/// Tests whether `(theta, delta)` lies in the region: the quadrant constraint
/// `theta (Omega - pi k) < 0` and the exponential band
/// `K1 e^{-nu |Omega - pi k|/|theta|} < |delta| < K2 e^{...}`. The band is
/// evaluated on `|delta|`; the sign of `delta` selects the region family.
pub fn region_predicate(
    rs: &RegionSpec,
    theta: f64,
    delta: f64,
) -> Result<RegionCheck, MapError> {
    if theta == 0.0 || !theta.is_finite() {
        return Err(ValidationError::OutOfRange("theta must be finite and nonzero").into());
    }
    let d = rs.omega - std::f64::consts::PI * rs.k as f64;
    if theta * d >= 0.0 {
        return Ok(RegionCheck {
            inside: false,
            reason: Some(format!(
                "quadrant constraint violated: theta*(Omega - pi k) = {:.3e} >= 0",
                theta * d
            )),
        });
    }
    if delta == 0.0 {
        return Ok(RegionCheck {
            inside: false,
            reason: Some("delta = 0 lies on no region".to_string()),
        });
    }
    let lo = rs.lower_bound(theta);
    let hi = rs.upper_bound(theta);
    let mag = delta.abs();
    if lo < mag && mag < hi {
        Ok(RegionCheck {
            inside: true,
            reason: None,
        })
    } else {
        Ok(RegionCheck {
            inside: false,
            reason: Some(format!(
                "|delta| = {mag:.6e} outside the band ({lo:.6e}, {hi:.6e})"
            )),
        })
    }
}

/// Sign sequence of an orbit of the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Itinerary {
    /// `sign(Y_i)` for the visited points, `+1`/`-1`.
    pub signs: Vec<i8>,
    /// The orbit hit `Y = 0` (or left the map's domain of definition) and the
    /// sequence stops early.
    pub truncated: bool,
}

/// Iterates the map `n - 1` times from `(x0, y0)` and records the sign of
/// each visited `Y` (including the start), truncating on an exact hit of the
/// discontinuity.
pub fn itinerary(p: &ModelMapParams, x0: f64, y0: f64, n: usize) -> Result<Itinerary, MapError> {
    p.validate()?;
    let mut signs = Vec::with_capacity(n);
    let (mut x, mut y) = (x0, y0);
    for step in 0..n {
        if y == 0.0 || !y.is_finite() {
            return Ok(Itinerary {
                signs,
                truncated: true,
            });
        }
        signs.push(if y > 0.0 { 1 } else { -1 });
        if step + 1 < n {
            (x, y) = map_t(p, x, y)?;
        }
    }
    Ok(Itinerary {
        signs,
        truncated: false,
    })
}

/// A fixed point of the cubic Hénon-like map with its multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenonFixedPoint {
    /// The diagonal coordinate: the fixed point is `(p, p, p)`.
    pub p: f64,
    /// Eigenvalues of the linearization, sorted by descending real part.
    pub multipliers: [ComplexValue; 3],
    /// Product of the multipliers (the constant Jacobian determinant `B`).
    pub product: ComplexValue,
}

/// Fixed points and multipliers of the map
/// `(x, y, z) -> (y, z, M1 + B x + M2 z - y^2)`: fixed points sit on the
/// diagonal at roots of `p^2 + (1 - B - M2) p - M1 = 0`; the linearization
/// there is the companion matrix `[[0,1,0],[0,0,1],[B, M2, -2p]]`.
pub fn henon_analysis(m1: f64, m2: f64, b: f64) -> Vec<HenonFixedPoint> {
    let half_b1 = (1.0 - b - m2) / 2.0;
    let disc = half_b1 * half_b1 + m1;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let mut roots = vec![-half_b1 - sq, -half_b1 + sq];
    roots.dedup();
    roots
        .into_iter()
        .map(|p| {
            let j = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [b, m2, -2.0 * p]];
            let multipliers = eigenvalues(&j);
            let product = multipliers[0] * multipliers[1] * multipliers[2];
            HenonFixedPoint {
                p,
                multipliers,
                product,
            }
        })
        .collect()
}
