//! Attractor classification for the rescaled system at a physical parameter
//! point: largest Lyapunov exponent, saddle-visit itineraries of the
//! unstable separatrices of the axis saddles, and an occupancy-grid symmetry
//! distance, combined into a coarse attractor label.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::{integrate_sampled, IntegrateError};
use crate::lyapunov::{lyapunov_spectrum, LyapunovError, LyapunovOutcome};
use crate::normal_form::{phys_to_rescaled, NormalFormError};
use crate::systems::{apply_symmetry, EquilibriumId, RescaledField, SystemError};
use crate::types::{
    IntegratorConfig, LyapunovConfig, PhysParams, State3, SystemCoefficients, ValidationError,
};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

/// Coarse attractor label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassLabel {
    /// Largest exponent at or below the chaos threshold.
    Stable,
    /// Pair of asymmetric Lorenz-like attractors, one around each axis
    /// saddle: each separatrix revisits only its own saddle.
    LorenzPair,
    /// One symmetric attractor visiting both saddles.
    SimoFourWing,
    /// Pair of asymmetric attractors, each visiting both saddles.
    SimoTwoWingPair,
    /// The orbit escaped to infinity.
    Divergent,
    /// The evidence fits none of the patterns; the reason says why.
    Unclassified(String),
}

impl ClassLabel {
    /// Canonical short name (no reason text), for table output.
    pub fn short(&self) -> &'static str {
        match self {
            ClassLabel::Stable => "STABLE",
            ClassLabel::LorenzPair => "LORENZ_PAIR",
            ClassLabel::SimoFourWing => "SIMO_FOUR_WING",
            ClassLabel::SimoTwoWingPair => "SIMO_TWO_WING_PAIR",
            ClassLabel::Divergent => "DIVERGENT",
            ClassLabel::Unclassified(_) => "UNCLASSIFIED",
        }
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassLabel::Unclassified(reason) => write!(f, "UNCLASSIFIED ({reason})"),
            other => f.write_str(other.short()),
        }
    }
}

/// Tunable thresholds and run lengths for classification (rescaled time).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    pub lyapunov: LyapunovConfig,
    pub integrator: IntegratorConfig,
    /// Largest exponent above this counts as chaotic.
    pub chaos_threshold: f64,
    /// Distance to a saddle below which a closest approach counts as a visit.
    pub visit_radius: f64,
    /// Occupancy-grid symmetry distance below this counts as symmetric.
    pub symmetry_threshold: f64,
    /// A Lorenz-like pair requires each separatrix orbit to keep at least
    /// this distance from the opposite saddle (half the saddle separation by
    /// default); attractors that span both saddle regions pass much closer.
    pub opposite_saddle_far: f64,
    /// Offset along the unstable separatrix for launches.
    pub launch_offset: f64,
    /// Length of the visit-scan orbit.
    pub visit_t_total: f64,
    pub visit_sample_dt: f64,
    /// Leading fraction of the visit orbit discarded as transient.
    pub transient_fraction: f64,
    /// Occupancy grid cells per axis (even, for exact symmetry of cells).
    pub grid_n: usize,
    /// Occupancy grid half-width around the origin.
    pub grid_half_width: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            lyapunov: LyapunovConfig {
                t_transient: 200.0,
                t_total: 2000.0,
                n_exponents: 1,
                escape_radius: 100.0,
                ..LyapunovConfig::default()
            },
            integrator: IntegratorConfig::with_tols(1e-8, 1e-10),
            chaos_threshold: 5e-3,
            visit_radius: 0.15,
            symmetry_threshold: 0.2,
            opposite_saddle_far: 1.0,
            launch_offset: 1e-3,
            visit_t_total: 3000.0,
            visit_sample_dt: 0.05,
            transient_fraction: 0.2,
            grid_n: 16,
            grid_half_width: 1.6,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.lyapunov.validate()?;
        self.integrator.validate()?;
        if !(self.visit_radius > 0.0 && self.visit_radius < 1.0) {
            return Err(ValidationError::OutOfRange("visit_radius must lie in (0, 1)"));
        }
        if !(self.symmetry_threshold > 0.0 && self.symmetry_threshold < 1.0) {
            return Err(ValidationError::OutOfRange(
                "symmetry_threshold must lie in (0, 1)",
            ));
        }
        if !(self.opposite_saddle_far > self.visit_radius) {
            return Err(ValidationError::OutOfRange(
                "opposite_saddle_far must exceed visit_radius",
            ));
        }
        if !(self.launch_offset > 0.0 && self.launch_offset < 0.1) {
            return Err(ValidationError::OutOfRange(
                "launch_offset must lie in (0, 0.1)",
            ));
        }
        if !(self.visit_t_total > 0.0 && self.visit_sample_dt > 0.0) {
            return Err(ValidationError::OutOfRange(
                "visit run length and sample step must be positive",
            ));
        }
        if !(self.transient_fraction >= 0.0 && self.transient_fraction < 1.0) {
            return Err(ValidationError::OutOfRange(
                "transient_fraction must lie in [0, 1)",
            ));
        }
        if self.grid_n < 2 || self.grid_n % 2 != 0 {
            return Err(ValidationError::OutOfRange("grid_n must be even and >= 2"));
        }
        if !(self.grid_half_width > 0.0) {
            return Err(ValidationError::OutOfRange("grid_half_width must be positive"));
        }
        Ok(())
    }
}

/// What the classifier measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Largest Lyapunov exponent (absent when the orbit diverged).
    pub top_exponent: Option<f64>,
    /// Saddle-visit signs along the orbit launched from the lower saddle.
    pub visits_from_minus: Vec<i8>,
    /// Saddle-visit signs along the orbit launched from the upper saddle.
    pub visits_from_plus: Vec<i8>,
    /// Occupancy distance between the lower-launch orbit and its symmetry
    /// image (0 = symmetric, 1 = disjoint); absent outside the chaotic branch.
    pub symmetry_distance: Option<f64>,
    /// Occupied grid cells of the lower-launch orbit.
    pub occupied_cells: usize,
    /// Closest approach of the lower-launch orbit to the upper saddle.
    pub closest_to_plus: Option<f64>,
    /// Closest approach of the lower-launch orbit to the lower saddle.
    pub closest_to_minus: Option<f64>,
    pub visit_radius: f64,
    pub symmetry_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: ClassLabel,
    pub evidence: Evidence,
}

/// Occupancy-grid distance `|A ^ B| / |A u B|` between a point sample and its
/// image under the quarter-turn symmetry, on an `n^3` grid over the cube of
/// the given half-width. `None` for an empty sample.
pub fn symmetry_distance(points: &[State3], n: usize, half_width: f64) -> Option<f64> {
    if points.is_empty() || n == 0 {
        return None;
    }
    let a = occupancy(points.iter().copied(), n, half_width);
    let b = occupancy(points.iter().map(|&p| apply_symmetry(p)), n, half_width);
    let inter = a.intersection(&b).count();
    let union = a.len() + b.len() - inter;
    let sym_diff = union - inter;
    Some(sym_diff as f64 / union as f64)
}

fn occupancy(
    points: impl Iterator<Item = State3>,
    n: usize,
    half_width: f64,
) -> HashSet<(u32, u32, u32)> {
    let cell = |u: f64| -> u32 {
        let idx = ((u + half_width) / (2.0 * half_width) * n as f64).floor();
        idx.clamp(0.0, (n - 1) as f64) as u32
    };
    points
        .map(|p| (cell(p.x), cell(p.y), cell(p.z)))
        .collect()
}

struct VisitScan {
    symbols: Vec<i8>,
    points: Vec<State3>,
    min_d_up: f64,
    min_d_dn: f64,
    diverged: bool,
}

impl VisitScan {
    fn diverged() -> Self {
        Self {
            symbols: Vec::new(),
            points: Vec::new(),
            min_d_up: f64::INFINITY,
            min_d_dn: f64::INFINITY,
            diverged: true,
        }
    }
}

/// Launch point just off an axis saddle along its unstable separatrix, with a
/// plain in-plane offset as fallback when the plane has no expanding
/// direction.
fn launch_point(
    field: &RescaledField,
    eq: EquilibriumId,
    offset: f64,
) -> State3 {
    let dir = field
        .unstable_direction(eq)
        .map(|(v, _)| v)
        .unwrap_or(State3::new(1.0, 0.0, 0.0));
    eq.state().add(dir.scale(offset))
}

fn visit_scan(
    field: &RescaledField,
    eq: EquilibriumId,
    cfg: &ClassifyConfig,
) -> Result<VisitScan, ClassifyError> {
    let s0 = launch_point(field, eq, cfg.launch_offset);
    let f = |s: &State3| field.eval(*s);
    let traj = match integrate_sampled(
        &f,
        s0,
        (0.0, cfg.visit_t_total),
        &cfg.integrator,
        cfg.visit_sample_dt,
    ) {
        Ok(t) => t,
        Err(IntegrateError::NonFinite { .. }) => return Ok(VisitScan::diverged()),
        Err(e) => return Err(e.into()),
    };

    let skip = (traj.len() as f64 * cfg.transient_fraction) as usize;
    let tail = &traj.samples[skip.min(traj.len())..];
    if tail
        .iter()
        .any(|(_, s)| s.norm() > cfg.lyapunov.escape_radius)
    {
        return Ok(VisitScan::diverged());
    }

    let up = EquilibriumId::OPlus.state();
    let dn = EquilibriumId::OMinus.state();
    let d_up: Vec<f64> = tail.iter().map(|(_, s)| s.sub(up).norm()).collect();
    let d_dn: Vec<f64> = tail.iter().map(|(_, s)| s.sub(dn).norm()).collect();

    let mut events: Vec<(usize, i8)> = Vec::new();
    for (dist, sign) in [(&d_up, 1i8), (&d_dn, -1i8)] {
        for i in 1..dist.len().saturating_sub(1) {
            if dist[i] < cfg.visit_radius && dist[i] < dist[i - 1] && dist[i] <= dist[i + 1] {
                events.push((i, sign));
            }
        }
    }
    events.sort_unstable_by_key(|&(i, _)| i);

    Ok(VisitScan {
        symbols: events.into_iter().map(|(_, s)| s).collect(),
        points: tail.iter().map(|&(_, s)| s).collect(),
        min_d_up: d_up.iter().copied().fold(f64::INFINITY, f64::min),
        min_d_dn: d_dn.iter().copied().fold(f64::INFINITY, f64::min),
        diverged: false,
    })
}

fn is_pure(symbols: &[i8], sign: i8) -> bool {
    !symbols.is_empty() && symbols.iter().all(|&s| s == sign)
}

fn is_mixed(symbols: &[i8]) -> bool {
    symbols.contains(&1) && symbols.contains(&-1)
}

/// Classifies the attractor at a physical parameter point.
///
/// Largest Lyapunov exponent first (launched off the lower saddle); the
/// chaotic branch then scans the unstable separatrices of both saddles for
/// saddle visits and measures the symmetry distance of the resulting orbit.
pub fn classify(
    c: &SystemCoefficients,
    p: &PhysParams,
    cfg: &ClassifyConfig,
) -> Result<Classification, ClassifyError> {
    cfg.validate()?;
    let rp = phys_to_rescaled(c, p)?;
    let field = RescaledField::new(c, rp)?;
    let f = |s: &State3| field.eval(*s);
    let jac = |s: &State3| field.jacobian(*s);

    let mut evidence = Evidence {
        top_exponent: None,
        visits_from_minus: Vec::new(),
        visits_from_plus: Vec::new(),
        symmetry_distance: None,
        occupied_cells: 0,
        closest_to_plus: None,
        closest_to_minus: None,
        visit_radius: cfg.visit_radius,
        symmetry_threshold: cfg.symmetry_threshold,
    };

    let s0 = launch_point(&field, EquilibriumId::OMinus, cfg.launch_offset);
    let outcome = lyapunov_spectrum(&f, &jac, s0, &cfg.lyapunov, &cfg.integrator)?;
    evidence.top_exponent = outcome.top();

    let top = match outcome {
        LyapunovOutcome::Divergent { .. } => {
            return Ok(Classification {
                label: ClassLabel::Divergent,
                evidence,
            })
        }
        LyapunovOutcome::Spectrum(ref v) => v[0],
    };

    if top <= cfg.chaos_threshold {
        return Ok(Classification {
            label: ClassLabel::Stable,
            evidence,
        });
    }

    let scan_minus = visit_scan(&field, EquilibriumId::OMinus, cfg)?;
    let scan_plus = visit_scan(&field, EquilibriumId::OPlus, cfg)?;
    if scan_minus.diverged || scan_plus.diverged {
        return Ok(Classification {
            label: ClassLabel::Divergent,
            evidence,
        });
    }

    let sym = symmetry_distance(&scan_minus.points, cfg.grid_n, cfg.grid_half_width);
    evidence.visits_from_minus = scan_minus.symbols.clone();
    evidence.visits_from_plus = scan_plus.symbols.clone();
    evidence.symmetry_distance = sym;
    evidence.closest_to_plus = Some(scan_minus.min_d_up);
    evidence.closest_to_minus = Some(scan_minus.min_d_dn);
    evidence.occupied_cells = occupancy(
        scan_minus.points.iter().copied(),
        cfg.grid_n,
        cfg.grid_half_width,
    )
    .len();

    // A pure one-sided pair only counts as Lorenz-like when each orbit also
    // stays far from the opposite saddle; a spanning attractor pair can show
    // pure visit signs while still sweeping through both saddle regions.
    let pure_pair = is_pure(&scan_minus.symbols, -1) && is_pure(&scan_plus.symbols, 1);
    let far = scan_minus.min_d_up > cfg.opposite_saddle_far
        && scan_plus.min_d_dn > cfg.opposite_saddle_far;
    let label = if pure_pair && far {
        ClassLabel::LorenzPair
    } else if pure_pair || (is_mixed(&scan_minus.symbols) && is_mixed(&scan_plus.symbols)) {
        match sym {
            Some(d) if d < cfg.symmetry_threshold => ClassLabel::SimoFourWing,
            Some(_) => ClassLabel::SimoTwoWingPair,
            None => ClassLabel::Unclassified("empty orbit sample".to_string()),
        }
    } else {
        ClassLabel::Unclassified(format!(
            "visit patterns fit no class: {} visits from the lower saddle and {} from the upper",
            scan_minus.symbols.len(),
            scan_plus.symbols.len()
        ))
    };

    Ok(Classification { label, evidence })
}
