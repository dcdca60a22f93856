//! The TOML run configuration.
//!
//! Every table is an overlay: fields left out keep their defaults, unknown
//! keys are rejected with the offending key named in the error. After a
//! command resolves its effective settings (defaults, then the configuration
//! file, then command-line flags), the fully resolved configuration is echoed
//! to a sidecar file next to the primary output, in the same format, so the
//! sidecar itself reproduces the run via `--config`.

use serde::{Deserialize, Serialize};
use z4lab_core::heteroclinic::{HetSearchOptions, SplitOptions};
use z4lab_core::model_map::{ConeGrid, ConeSlopes, ModelMapParams, PerturbationFamily};
use z4lab_core::sweep::ParamRange;
use z4lab_core::{
    ComplexValue, IntegratorConfig, LyapunovConfig, PhysParams, RescaledParams, SystemCoefficients,
};

use crate::error::{usage, CliError};

fn pair(c: ComplexValue) -> [f64; 2] {
    [c.re, c.im]
}

/// Top-level run configuration: global settings plus one table per command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// When set, must match the invoked subcommand (guards against running a
    /// config written for a different command).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Seed override recorded into the Lyapunov settings and used by seeded
    /// sampling (the reduction residual).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Primary output path; standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "SystemTable::is_unset")]
    pub system: SystemTable,
    #[serde(skip_serializing_if = "ParamsTable::is_unset")]
    pub params: ParamsTable,
    #[serde(skip_serializing_if = "IntegratorTable::is_unset")]
    pub integrator: IntegratorTable,
    #[serde(skip_serializing_if = "LyapunovTable::is_unset")]
    pub lyapunov: LyapunovTable,
    #[serde(skip_serializing_if = "SimulateTable::is_unset")]
    pub simulate: SimulateTable,
    #[serde(skip_serializing_if = "SweepTable::is_unset")]
    pub sweep: SweepTable,
    #[serde(skip_serializing_if = "HetTable::is_unset")]
    pub heteroclinic: HetTable,
    #[serde(skip_serializing_if = "ClassifyTable::is_unset")]
    pub classify: ClassifyTable,
    #[serde(skip_serializing_if = "ReduceTable::is_unset")]
    pub reduce: ReduceTable,
    #[serde(skip_serializing_if = "MapTable::is_unset")]
    pub map: MapTable,
    #[serde(skip_serializing_if = "HenonTable::is_unset")]
    pub henon: HenonTable,
}

/// Parses a configuration. Unknown keys fail with the key named and located;
/// missing keys fall back to defaults at resolution time.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| usage(format!("configuration error: {e}")))
}

macro_rules! is_unset {
    () => {
        pub fn is_unset(&self) -> bool {
            *self == Self::default()
        }
    };
}

/// Coefficient overrides on top of the built-in concrete set. Complex values
/// are written as `[re, im]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a3: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b2: Option<f64>,
}

impl SystemTable {
    is_unset!();

    pub fn resolve(&self) -> Result<SystemCoefficients, CliError> {
        let base = SystemCoefficients::concrete();
        let cx = |o: Option<[f64; 2]>, b: ComplexValue| {
            o.map_or(b, |[re, im]| ComplexValue::new(re, im))
        };
        let c = SystemCoefficients {
            a0: cx(self.a0, base.a0),
            a1: cx(self.a1, base.a1),
            a2: cx(self.a2, base.a2),
            a3: cx(self.a3, base.a3),
            b0: cx(self.b0, base.b0),
            b1: self.b1.unwrap_or(base.b1),
            b2: self.b2.unwrap_or(base.b2),
        };
        c.validate().map_err(|e| usage(format!("[system]: {e}")))?;
        Ok(c)
    }

    pub fn filled(c: &SystemCoefficients) -> Self {
        Self {
            a0: Some(pair(c.a0)),
            a1: Some(pair(c.a1)),
            a2: Some(pair(c.a2)),
            a3: Some(pair(c.a3)),
            b0: Some(pair(c.b0)),
            b1: Some(c.b1),
            b2: Some(c.b2),
        }
    }
}

/// Parameter point, in physical (`gamma`, `beta`, `mu`) or rescaled
/// (`rho`, `omega`, `mu`) form; commands state which form they read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

/// Default physical point: the reference parameters of the chaotic regime.
pub const DEFAULT_PHYS: PhysParams = PhysParams {
    gamma: 0.07,
    beta: 0.16,
    mu: 0.02,
};

impl ParamsTable {
    is_unset!();

    pub fn resolve_phys(&self) -> PhysParams {
        PhysParams {
            gamma: self.gamma.unwrap_or(DEFAULT_PHYS.gamma),
            beta: self.beta.unwrap_or(DEFAULT_PHYS.beta),
            mu: self.mu.unwrap_or(DEFAULT_PHYS.mu),
        }
    }

    /// Rescaled point: direct when `rho`/`omega` are given, otherwise the
    /// conversion of the physical point.
    pub fn resolve_rescaled(
        &self,
        c: &SystemCoefficients,
    ) -> Result<RescaledParams, CliError> {
        if self.rho.is_some() || self.omega.is_some() {
            RescaledParams::new(
                self.rho.unwrap_or(0.0),
                self.omega.unwrap_or(0.0),
                self.mu.unwrap_or(DEFAULT_PHYS.mu),
            )
            .map_err(|e| usage(format!("[params]: {e}")))
        } else {
            let p = self.resolve_phys();
            z4lab_core::normal_form::phys_to_rescaled(c, &p)
                .map_err(|e| usage(format!("[params]: {e}")))
        }
    }

    pub fn filled_phys(p: &PhysParams) -> Self {
        Self {
            gamma: Some(p.gamma),
            beta: Some(p.beta),
            mu: Some(p.mu),
            rho: None,
            omega: None,
        }
    }

    pub fn filled_rescaled(r: &RescaledParams) -> Self {
        Self {
            gamma: None,
            beta: None,
            mu: Some(r.mu),
            rho: Some(r.rho),
            omega: Some(r.omega),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
}

impl IntegratorTable {
    is_unset!();

    /// Overlays onto the given base (commands have different defaults).
    pub fn apply(&self, base: IntegratorConfig) -> Result<IntegratorConfig, CliError> {
        let cfg = IntegratorConfig {
            rel_tol: self.rel_tol.unwrap_or(base.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(base.abs_tol),
            max_step: self.max_step.unwrap_or(base.max_step),
            max_steps: self.max_steps.unwrap_or(base.max_steps),
        };
        cfg.validate()
            .map_err(|e| usage(format!("[integrator]: {e}")))?;
        Ok(cfg)
    }

    pub fn filled(cfg: &IntegratorConfig) -> Self {
        Self {
            rel_tol: Some(cfg.rel_tol),
            abs_tol: Some(cfg.abs_tol),
            max_step: Some(cfg.max_step),
            max_steps: Some(cfg.max_steps),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_transient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub renorm_dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_exponents: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_radius: Option<f64>,
}

impl LyapunovTable {
    is_unset!();

    /// Overlays onto the given base; an explicit top-level seed wins over
    /// both the base and this table.
    pub fn apply(
        &self,
        base: LyapunovConfig,
        seed_override: Option<u64>,
    ) -> Result<LyapunovConfig, CliError> {
        let cfg = LyapunovConfig {
            t_transient: self.t_transient.unwrap_or(base.t_transient),
            t_total: self.t_total.unwrap_or(base.t_total),
            renorm_dt: self.renorm_dt.unwrap_or(base.renorm_dt),
            n_exponents: self.n_exponents.unwrap_or(base.n_exponents),
            seed: seed_override.or(self.seed).unwrap_or(base.seed),
            escape_radius: self.escape_radius.unwrap_or(base.escape_radius),
        };
        cfg.validate()
            .map_err(|e| usage(format!("[lyapunov]: {e}")))?;
        Ok(cfg)
    }

    pub fn filled(cfg: &LyapunovConfig) -> Self {
        Self {
            t_transient: Some(cfg.t_transient),
            t_total: Some(cfg.t_total),
            renorm_dt: Some(cfg.renorm_dt),
            n_exponents: Some(cfg.n_exponents),
            seed: Some(cfg.seed),
            escape_radius: Some(cfg.escape_radius),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateTable {
    /// `phys` (default) integrates the general field at the physical
    /// parameters; `rescaled` integrates the rescaled field at the rescaled
    /// parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<[f64; 3]>,
}

pub const SIMULATE_T_TOTAL: f64 = 200.0;
pub const SIMULATE_SAMPLE_DT: f64 = 0.05;
pub const SIMULATE_X0: [f64; 3] = [0.1, 0.1, 0.1];

impl SimulateTable {
    is_unset!();
}

/// One linearly spaced sweep axis; all fields are required when the table is
/// present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeTable {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl From<&ParamRange> for RangeTable {
    fn from(r: &ParamRange) -> Self {
        Self {
            name: r.name.clone(),
            min: r.min,
            max: r.max,
            count: r.count,
        }
    }
}

impl From<&RangeTable> for ParamRange {
    fn from(r: &RangeTable) -> Self {
        Self {
            name: r.name.clone(),
            min: r.min,
            max: r.max,
            count: r.count,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<RangeTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<RangeTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chaos_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub launch_offset: Option<f64>,
    /// JSON-lines checkpoint path (appended cell by cell).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
    /// Optional PGM heatmap of the top exponent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heatmap: Option<String>,
}

impl SweepTable {
    is_unset!();

    pub fn default_x() -> RangeTable {
        RangeTable {
            name: "beta".into(),
            min: 0.0,
            max: 0.2,
            count: 40,
        }
    }

    pub fn default_y() -> RangeTable {
        RangeTable {
            name: "gamma".into(),
            min: 0.0,
            max: 0.12,
            count: 40,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HetTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_cyl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub launch_offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// When present, the command scans the `omegas x mus` product and writes
    /// an `omega,mu,rho_star` CSV instead of the single-point report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanTable {
    pub omegas: Vec<f64>,
    pub mus: Vec<f64>,
}

pub const HET_OMEGA: f64 = 0.0;
pub const HET_MU: f64 = 1e-4;

impl HetTable {
    is_unset!();

    /// Search options with this table overlaid on the library defaults.
    pub fn search_options(
        &self,
        integrator: IntegratorConfig,
    ) -> Result<HetSearchOptions, CliError> {
        let base = HetSearchOptions::default();
        let split_base = SplitOptions::default();
        let split = SplitOptions {
            r_cyl: self.r_cyl.unwrap_or(split_base.r_cyl),
            launch_offset: self.launch_offset.unwrap_or(split_base.launch_offset),
            source: split_base.source,
            t_max: self.t_max.unwrap_or(split_base.t_max),
            integrator,
        };
        split
            .validate()
            .map_err(|e| usage(format!("[heteroclinic]: {e}")))?;
        Ok(HetSearchOptions {
            bracket: self
                .bracket
                .map_or(base.bracket, |[lo, hi]| (lo, hi)),
            rho_tol: self.rho_tol.unwrap_or(base.rho_tol),
            max_iter: self.max_iter.unwrap_or(base.max_iter),
            split,
        })
    }

    pub fn filled(omega: f64, mu: f64, opts: &HetSearchOptions, scan: Option<ScanTable>) -> Self {
        Self {
            omega: Some(omega),
            mu: Some(mu),
            bracket: Some([opts.bracket.0, opts.bracket.1]),
            rho_tol: Some(opts.rho_tol),
            max_iter: Some(opts.max_iter),
            r_cyl: Some(opts.split.r_cyl),
            launch_offset: Some(opts.split.launch_offset),
            t_max: Some(opts.split.t_max),
            scan,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chaos_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visit_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opposite_saddle_far: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub launch_offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visit_t_total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visit_sample_dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transient_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_half_width: Option<f64>,
    /// CSV of `gamma,beta,mu` rows; the output rewrites each row with its
    /// label and top exponent appended.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch: Option<String>,
}

impl ClassifyTable {
    is_unset!();
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReduceTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Sampling ball radius for the residual report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Sample count for the residual report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

pub const REDUCE_ALPHA: f64 = 1.0;
pub const REDUCE_LAMBDA: f64 = 1.0;
pub const REDUCE_MU: f64 = 1e-3;
pub const REDUCE_RADIUS: f64 = 0.5;
pub const REDUCE_SAMPLES: usize = 200;
pub const REDUCE_SEED: u64 = 42;

impl ReduceTable {
    is_unset!();
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_exp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterate: Option<IterateTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cones: Option<ConesTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regions: Option<RegionsTable>,
}

impl MapTable {
    is_unset!();

    pub fn resolve(&self) -> Result<ModelMapParams, CliError> {
        let p = ModelMapParams {
            nu: self.nu.unwrap_or(0.8),
            c: self.c.unwrap_or(1.5),
            c_hat: self.c_hat.unwrap_or(0.0),
            sigma: self.sigma.unwrap_or(1),
            delta: self.delta.unwrap_or(0.0),
            s_exp: self.s_exp.unwrap_or(1.0),
            perturbation: PerturbationFamily {
                amplitude1: self.amplitude1.unwrap_or(0.0),
                amplitude2: self.amplitude2.unwrap_or(0.0),
                nu_tilde: self.nu_tilde.unwrap_or(0.0),
            },
        };
        p.validate().map_err(|e| usage(format!("[map]: {e}")))?;
        Ok(p)
    }

    pub fn filled(p: &ModelMapParams) -> Self {
        Self {
            nu: Some(p.nu),
            c: Some(p.c),
            c_hat: Some(p.c_hat),
            sigma: Some(p.sigma),
            delta: Some(p.delta),
            s_exp: Some(p.s_exp),
            amplitude1: Some(p.perturbation.amplitude1),
            amplitude2: Some(p.perturbation.amplitude2),
            nu_tilde: Some(p.perturbation.nu_tilde),
            iterate: None,
            cones: None,
            regions: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterateTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

pub const ITERATE_X0: f64 = 0.0;
pub const ITERATE_Y0: f64 = 0.5;
pub const ITERATE_N: usize = 20;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConesTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_y: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_x: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_ss: Option<f64>,
}

impl ConesTable {
    pub fn grid(&self) -> Result<ConeGrid, CliError> {
        let base = ConeGrid::default();
        let g = ConeGrid {
            y_min: self.y_min.unwrap_or(base.y_min),
            n_y: self.n_y.unwrap_or(base.n_y),
            x_min: self.x_min.unwrap_or(base.x_min),
            x_max: self.x_max.unwrap_or(base.x_max),
            n_x: self.n_x.unwrap_or(base.n_x),
        };
        g.validate()
            .map_err(|e| usage(format!("[map.cones]: {e}")))?;
        Ok(g)
    }

    pub fn slopes(&self, p: &ModelMapParams) -> ConeSlopes {
        let base = ConeSlopes::for_params(p);
        ConeSlopes {
            slope_u: self.slope_u.unwrap_or(base.slope_u),
            slope_ss: self.slope_ss.unwrap_or(base.slope_ss),
        }
    }

    pub fn filled(grid: &ConeGrid, slopes: &ConeSlopes) -> Self {
        Self {
            y_min: Some(grid.y_min),
            n_y: Some(grid.n_y),
            x_min: Some(grid.x_min),
            x_max: Some(grid.x_max),
            n_x: Some(grid.n_x),
            slope_u: Some(slopes.slope_u),
            slope_ss: Some(slopes.slope_ss),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionsTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    /// Arrival angle of the relevant connection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_a22: Option<f64>,
}

pub const REGION_K: i64 = 1;
pub const REGION_OMEGA: f64 = 0.65;
pub const REGION_NU_HAT: f64 = 0.45;
pub const REGION_K1: f64 = 1.0;
pub const REGION_K2: f64 = 2.0;
pub const REGION_THETA: f64 = 0.2;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HenonTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

pub const HENON_M1: f64 = 1.75;
pub const HENON_M2: f64 = -1.0;
pub const HENON_B: f64 = -1.0;

impl HenonTable {
    is_unset!();
}
