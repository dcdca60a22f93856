//! Command implementations.
//!
//! Every command follows the same shape: resolve effective settings
//! (defaults, then the configuration file, then command-line flags), echo the
//! fully resolved configuration to the sidecar file, run the computation, and
//! write the primary output to `--out` or standard output. Validation
//! problems exit with code 2, runtime failures with code 1.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use z4lab_core::classify::{classify as classify_point, ClassifyConfig};
use z4lab_core::heteroclinic::{find_het_rho, HetError};
use z4lab_core::integrator::integrate_sampled;
use z4lab_core::io::{fmt_g17, write_pgm, write_trajectory_csv};
use z4lab_core::model_map::{
    henon_analysis, map_t, region_predicate, sigma_sign, verify_cones, MapError, RegionSpec,
};
use z4lab_core::normal_form::{het_curve_coeffs, sm_point_to_phys, sm_reduction, sm_residual};
use z4lab_core::sweep::{
    run_sweep, top_exponent_grid, write_sweep_csv, SweepConfig, SweepError, SweepGrid,
};
use z4lab_core::systems::{eval_general_field, RescaledField};
use z4lab_core::{IntegratorConfig, PhysParams, SMParams, State3};

use crate::config::{
    ClassifyTable, ConesTable, HenonTable, HetTable, IntegratorTable, IterateTable, LyapunovTable,
    MapTable, ParamsTable, ReduceTable, RegionsTable, RunConfig, SimulateTable, SweepTable,
    SystemTable, HENON_B, HENON_M1, HENON_M2, HET_MU, HET_OMEGA, ITERATE_N, ITERATE_X0,
    ITERATE_Y0, REDUCE_ALPHA, REDUCE_LAMBDA, REDUCE_MU, REDUCE_RADIUS, REDUCE_SAMPLES,
    REDUCE_SEED, REGION_K, REGION_K1, REGION_K2, REGION_NU_HAT, REGION_OMEGA, REGION_THETA,
    SIMULATE_SAMPLE_DT, SIMULATE_T_TOTAL, SIMULATE_X0,
};
use crate::error::{domain, usage, CliError};

/// Global settings shared by all commands, resolved in `main`.
pub struct Ctx {
    pub cfg: RunConfig,
    pub threads: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Sidecar path: `<out>.resolved.toml` next to the primary output, or
/// `z4lab.resolved.toml` when writing to standard output.
pub fn sidecar_path(out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => PathBuf::from(format!("{}.resolved.toml", p.display())),
        None => PathBuf::from("z4lab.resolved.toml"),
    }
}

impl Ctx {
    fn base_echo(&self, command: &str) -> RunConfig {
        RunConfig {
            command: Some(command.to_string()),
            seed: self.seed,
            out: self.out.as_ref().map(|p| p.display().to_string()),
            ..RunConfig::default()
        }
    }

    /// Writes the resolved-configuration echo before the computation starts,
    /// so the run is reproducible even if it is interrupted.
    fn write_sidecar(&self, echo: &RunConfig) -> Result<(), CliError> {
        let text = toml::to_string_pretty(echo).map_err(domain)?;
        fs::write(sidecar_path(self.out.as_deref()), text)?;
        Ok(())
    }

    fn write_primary(&self, body: &[u8]) -> Result<(), CliError> {
        match &self.out {
            Some(p) => fs::write(p, body)?,
            None => io::stdout().write_all(body)?,
        }
        Ok(())
    }
}

/// `key = value` report accumulating in memory; floats use 17 significant
/// digits so reports are byte-stable across runs.
struct Kv(Vec<u8>);

impl Kv {
    fn new() -> Self {
        Kv(Vec::new())
    }

    fn put(&mut self, key: &str, value: impl Display) {
        let _ = writeln!(self.0, "{key} = {value}");
    }

    fn put_f(&mut self, key: &str, v: f64) {
        self.put(key, fmt_g17(v));
    }

    fn put_opt(&mut self, key: &str, v: Option<f64>) {
        match v {
            Some(x) => self.put_f(key, x),
            None => self.put(key, "n/a"),
        }
    }
}

fn signs_string(signs: &[i8]) -> String {
    if signs.is_empty() {
        return "none".into();
    }
    signs.iter().map(|s| if *s > 0 { '+' } else { '-' }).collect()
}

fn map_map_err(e: MapError) -> CliError {
    match e {
        MapError::Validation(v) => usage(v),
        other => domain(other),
    }
}

fn map_het_err(e: HetError) -> CliError {
    match e {
        HetError::Validation(_) | HetError::InvalidSource => usage(e),
        other => domain(other),
    }
}

// ---------------------------------------------------------------------------
// simulate

pub struct SimulateArgs {
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub mu: Option<f64>,
    pub t_total: Option<f64>,
    pub sample_dt: Option<f64>,
}

pub fn cmd_simulate(ctx: &Ctx, args: &SimulateArgs) -> Result<(), CliError> {
    let c = ctx.cfg.system.resolve()?;
    let mut params = ctx.cfg.params.clone();
    if let Some(v) = args.gamma {
        params.gamma = Some(v);
    }
    if let Some(v) = args.beta {
        params.beta = Some(v);
    }
    if let Some(v) = args.mu {
        params.mu = Some(v);
    }
    let int_cfg = ctx.cfg.integrator.apply(IntegratorConfig::default())?;
    let sim = &ctx.cfg.simulate;
    let space = sim.space.as_deref().unwrap_or("phys");
    let t_total = args.t_total.or(sim.t_total).unwrap_or(SIMULATE_T_TOTAL);
    let sample_dt = args.sample_dt.or(sim.sample_dt).unwrap_or(SIMULATE_SAMPLE_DT);
    if !(t_total > 0.0 && sample_dt > 0.0) {
        return Err(usage("[simulate]: t_total and sample_dt must be positive"));
    }
    let [x0, y0, z0] = sim.x0.unwrap_or(SIMULATE_X0);
    let s0 = State3::new(x0, y0, z0);

    let mut echo = ctx.base_echo("simulate");
    echo.system = SystemTable::filled(&c);
    echo.integrator = IntegratorTable::filled(&int_cfg);
    echo.simulate = SimulateTable {
        space: Some(space.to_string()),
        t_total: Some(t_total),
        sample_dt: Some(sample_dt),
        x0: Some([x0, y0, z0]),
    };

    let traj = match space {
        "phys" => {
            let p = params.resolve_phys();
            echo.params = ParamsTable::filled_phys(&p);
            ctx.write_sidecar(&echo)?;
            let f = move |s: &State3| eval_general_field(&c, &p, *s);
            integrate_sampled(&f, s0, (0.0, t_total), &int_cfg, sample_dt).map_err(domain)?
        }
        "rescaled" => {
            let r = params.resolve_rescaled(&c)?;
            echo.params = ParamsTable::filled_rescaled(&r);
            ctx.write_sidecar(&echo)?;
            let field = RescaledField::new(&c, r).map_err(usage)?;
            let f = move |s: &State3| field.eval(*s);
            integrate_sampled(&f, s0, (0.0, t_total), &int_cfg, sample_dt).map_err(domain)?
        }
        other => {
            return Err(usage(format!(
                "[simulate]: space must be \"phys\" or \"rescaled\", got \"{other}\""
            )))
        }
    };

    let mut body = Vec::new();
    write_trajectory_csv(&traj, &mut body)?;
    ctx.write_primary(&body)
}

// ---------------------------------------------------------------------------
// sweep

pub struct SweepArgs {
    pub resume: bool,
    pub checkpoint: Option<PathBuf>,
    pub heatmap: Option<PathBuf>,
}

pub fn cmd_sweep(ctx: &Ctx, args: &SweepArgs) -> Result<(), CliError> {
    let c = ctx.cfg.system.resolve()?;
    let base = ctx.cfg.params.resolve_phys();
    let x = ctx.cfg.sweep.x.clone().unwrap_or_else(SweepTable::default_x);
    let y = ctx.cfg.sweep.y.clone().unwrap_or_else(SweepTable::default_y);
    let grid = SweepGrid {
        x: (&x).into(),
        y: (&y).into(),
        base,
    };
    grid.validate().map_err(|e| usage(format!("[sweep]: {e}")))?;

    let defaults = SweepConfig::default();
    let sweep_cfg = SweepConfig {
        lyapunov: ctx.cfg.lyapunov.apply(defaults.lyapunov, ctx.seed)?,
        integrator: ctx.cfg.integrator.apply(defaults.integrator)?,
        chaos_threshold: ctx
            .cfg
            .sweep
            .chaos_threshold
            .unwrap_or(defaults.chaos_threshold),
        launch_offset: ctx.cfg.sweep.launch_offset.unwrap_or(defaults.launch_offset),
    };
    sweep_cfg
        .validate()
        .map_err(|e| usage(format!("[sweep]: {e}")))?;

    let checkpoint: Option<PathBuf> = args
        .checkpoint
        .clone()
        .or_else(|| ctx.cfg.sweep.checkpoint.clone().map(PathBuf::from));
    if args.resume && checkpoint.is_none() {
        return Err(usage(
            "--resume needs a checkpoint path (--checkpoint or [sweep] checkpoint)",
        ));
    }
    if let Some(cp) = &checkpoint {
        let nonempty = fs::metadata(cp).map(|m| m.len() > 0).unwrap_or(false);
        if nonempty && !args.resume {
            return Err(usage(format!(
                "checkpoint {} already holds cells; pass --resume to continue it or remove the file",
                cp.display()
            )));
        }
    }
    let heatmap: Option<PathBuf> = args
        .heatmap
        .clone()
        .or_else(|| ctx.cfg.sweep.heatmap.clone().map(PathBuf::from));

    let mut echo = ctx.base_echo("sweep");
    echo.threads = Some(ctx.threads);
    echo.system = SystemTable::filled(&c);
    echo.params = ParamsTable::filled_phys(&base);
    echo.integrator = IntegratorTable::filled(&sweep_cfg.integrator);
    echo.lyapunov = LyapunovTable::filled(&sweep_cfg.lyapunov);
    echo.sweep = SweepTable {
        x: Some(x),
        y: Some(y),
        chaos_threshold: Some(sweep_cfg.chaos_threshold),
        launch_offset: Some(sweep_cfg.launch_offset),
        checkpoint: checkpoint.as_ref().map(|p| p.display().to_string()),
        heatmap: heatmap.as_ref().map(|p| p.display().to_string()),
    };
    ctx.write_sidecar(&echo)?;

    let cells = run_sweep(&c, &grid, &sweep_cfg, checkpoint.as_deref(), ctx.threads).map_err(
        |e| match e {
            SweepError::Validation(v) => usage(v),
            other => domain(other),
        },
    )?;

    let mut body = Vec::new();
    write_sweep_csv(&grid, &cells, &mut body)?;
    if let Some(hm) = &heatmap {
        let rows = top_exponent_grid(&grid, &cells);
        let mut pgm = Vec::new();
        write_pgm(&rows, &mut pgm)?;
        fs::write(hm, pgm)?;
    }
    ctx.write_primary(&body)
}

// ---------------------------------------------------------------------------
// heteroclinic

pub struct HetArgs {
    pub omega: Option<f64>,
    pub mu: Option<f64>,
}

pub fn cmd_heteroclinic(ctx: &Ctx, args: &HetArgs) -> Result<(), CliError> {
    let c = ctx.cfg.system.resolve()?;
    let tab = &ctx.cfg.heteroclinic;
    let omega = args.omega.or(tab.omega).unwrap_or(HET_OMEGA);
    let mu = args.mu.or(tab.mu).unwrap_or(HET_MU);
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(usage("[heteroclinic]: mu must be positive"));
    }
    if let Some(scan) = &tab.scan {
        if scan.omegas.is_empty() || scan.mus.is_empty() {
            return Err(usage("[heteroclinic.scan]: omegas and mus must be nonempty"));
        }
        if !scan.mus.iter().all(|m| *m > 0.0 && m.is_finite()) {
            return Err(usage("[heteroclinic.scan]: mus must be positive"));
        }
    }
    let integrator = ctx.cfg.integrator.apply(IntegratorConfig::default())?;
    let opts = tab.search_options(integrator)?;

    let mut echo = ctx.base_echo("heteroclinic");
    echo.system = SystemTable::filled(&c);
    echo.integrator = IntegratorTable::filled(&opts.split.integrator);
    echo.heteroclinic = HetTable::filled(omega, mu, &opts, tab.scan.clone());
    ctx.write_sidecar(&echo)?;

    let mut body = Vec::new();
    if let Some(scan) = &tab.scan {
        let _ = writeln!(body, "omega,mu,rho_star");
        for &om in &scan.omegas {
            for &m in &scan.mus {
                let s = find_het_rho(&c, om, m, &opts).map_err(|e| {
                    domain(format!("scan point (omega = {om}, mu = {m}): {e}"))
                })?;
                let _ = writeln!(body, "{},{},{}", fmt_g17(om), fmt_g17(m), fmt_g17(s.rho));
            }
        }
    } else {
        let s = find_het_rho(&c, omega, mu, &opts).map_err(map_het_err)?;
        let hc = het_curve_coeffs(&c).map_err(domain)?;
        let mut kv = Kv::new();
        kv.put_f("omega", s.omega);
        kv.put_f("mu", s.mu);
        kv.put_f("rho_star", s.rho);
        kv.put_f("bracket_width", s.bracket_width);
        kv.put_f("delta", s.delta);
        kv.put_f("predicted_rho", hc.predict(omega, mu));
        kv.put_f("rho0", hc.rho0);
        kv.put_f("k1", hc.k1);
        kv.put_f("k2", hc.k2);
        body = kv.0;
    }
    ctx.write_primary(&body)
}

// ---------------------------------------------------------------------------
// classify

pub struct ClassifyArgs {
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub mu: Option<f64>,
    pub batch: Option<PathBuf>,
}

pub fn cmd_classify(ctx: &Ctx, args: &ClassifyArgs) -> Result<(), CliError> {
    let c = ctx.cfg.system.resolve()?;
    let tab = &ctx.cfg.classify;
    let defaults = ClassifyConfig::default();
    let ccfg = ClassifyConfig {
        lyapunov: ctx.cfg.lyapunov.apply(defaults.lyapunov, ctx.seed)?,
        integrator: ctx.cfg.integrator.apply(defaults.integrator)?,
        chaos_threshold: tab.chaos_threshold.unwrap_or(defaults.chaos_threshold),
        visit_radius: tab.visit_radius.unwrap_or(defaults.visit_radius),
        symmetry_threshold: tab.symmetry_threshold.unwrap_or(defaults.symmetry_threshold),
        opposite_saddle_far: tab
            .opposite_saddle_far
            .unwrap_or(defaults.opposite_saddle_far),
        launch_offset: tab.launch_offset.unwrap_or(defaults.launch_offset),
        visit_t_total: tab.visit_t_total.unwrap_or(defaults.visit_t_total),
        visit_sample_dt: tab.visit_sample_dt.unwrap_or(defaults.visit_sample_dt),
        transient_fraction: tab.transient_fraction.unwrap_or(defaults.transient_fraction),
        grid_n: tab.grid_n.unwrap_or(defaults.grid_n),
        grid_half_width: tab.grid_half_width.unwrap_or(defaults.grid_half_width),
    };
    ccfg.validate()
        .map_err(|e| usage(format!("[classify]: {e}")))?;
    let batch: Option<PathBuf> = args
        .batch
        .clone()
        .or_else(|| tab.batch.clone().map(PathBuf::from));

    let mut echo = ctx.base_echo("classify");
    echo.system = SystemTable::filled(&c);
    echo.integrator = IntegratorTable::filled(&ccfg.integrator);
    echo.lyapunov = LyapunovTable::filled(&ccfg.lyapunov);
    echo.classify = ClassifyTable {
        chaos_threshold: Some(ccfg.chaos_threshold),
        visit_radius: Some(ccfg.visit_radius),
        symmetry_threshold: Some(ccfg.symmetry_threshold),
        opposite_saddle_far: Some(ccfg.opposite_saddle_far),
        launch_offset: Some(ccfg.launch_offset),
        visit_t_total: Some(ccfg.visit_t_total),
        visit_sample_dt: Some(ccfg.visit_sample_dt),
        transient_fraction: Some(ccfg.transient_fraction),
        grid_n: Some(ccfg.grid_n),
        grid_half_width: Some(ccfg.grid_half_width),
        batch: batch.as_ref().map(|p| p.display().to_string()),
    };

    if let Some(path) = &batch {
        ctx.write_sidecar(&echo)?;
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("batch file {}: {e}", path.display())))?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "gamma,beta,mu" => {}
            _ => {
                return Err(usage(format!(
                    "batch file {} must start with the header line gamma,beta,mu",
                    path.display()
                )))
            }
        }
        let mut body = Vec::new();
        let _ = writeln!(body, "gamma,beta,mu,label,top_exponent");
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(usage(format!(
                    "batch line {}: expected gamma,beta,mu, got {line:?}",
                    idx + 1
                )));
            }
            let mut vals = [0.0f64; 3];
            for (slot, field) in vals.iter_mut().zip(&fields) {
                *slot = field.trim().parse().map_err(|e| {
                    usage(format!("batch line {}: {e}: {field:?}", idx + 1))
                })?;
            }
            let p = PhysParams::new(vals[0], vals[1], vals[2]);
            let cls = classify_point(&c, &p, &ccfg)
                .map_err(|e| domain(format!("batch line {}: {e}", idx + 1)))?;
            let _ = writeln!(
                body,
                "{},{},{},{},{}",
                fmt_g17(p.gamma),
                fmt_g17(p.beta),
                fmt_g17(p.mu),
                cls.label.short(),
                cls.evidence.top_exponent.map(fmt_g17).unwrap_or_default()
            );
        }
        ctx.write_primary(&body)
    } else {
        let mut params = ctx.cfg.params.clone();
        if let Some(v) = args.gamma {
            params.gamma = Some(v);
        }
        if let Some(v) = args.beta {
            params.beta = Some(v);
        }
        if let Some(v) = args.mu {
            params.mu = Some(v);
        }
        let p = params.resolve_phys();
        echo.params = ParamsTable::filled_phys(&p);
        ctx.write_sidecar(&echo)?;
        let cls = classify_point(&c, &p, &ccfg).map_err(domain)?;
        let mut kv = Kv::new();
        kv.put_f("gamma", p.gamma);
        kv.put_f("beta", p.beta);
        kv.put_f("mu", p.mu);
        kv.put("label", cls.label.short());
        if let z4lab_core::classify::ClassLabel::Unclassified(reason) = &cls.label {
            kv.put("note", reason);
        }
        let ev = &cls.evidence;
        kv.put_opt("top_exponent", ev.top_exponent);
        kv.put_opt("symmetry_distance", ev.symmetry_distance);
        kv.put("visits_from_minus", signs_string(&ev.visits_from_minus));
        kv.put("visits_from_plus", signs_string(&ev.visits_from_plus));
        kv.put_opt("closest_to_plus", ev.closest_to_plus);
        kv.put_opt("closest_to_minus", ev.closest_to_minus);
        kv.put("occupied_cells", ev.occupied_cells);
        ctx.write_primary(&kv.0)
    }
}

// ---------------------------------------------------------------------------
// reduce

pub struct ReduceSmArgs {
    pub rho: Option<f64>,
    pub omega: Option<f64>,
    pub mu: Option<f64>,
}

pub fn cmd_reduce_sm(ctx: &Ctx, args: &ReduceSmArgs) -> Result<(), CliError> {
    let c = ctx.cfg.system.resolve()?;
    let mut params = ctx.cfg.params.clone();
    if let Some(v) = args.rho {
        params.rho = Some(v);
    }
    if let Some(v) = args.omega {
        params.omega = Some(v);
    }
    if let Some(v) = args.mu {
        params.mu = Some(v);
    }
    let r = params.resolve_rescaled(&c)?;
    let radius = ctx.cfg.reduce.radius.unwrap_or(REDUCE_RADIUS);
    let samples = ctx.cfg.reduce.samples.unwrap_or(REDUCE_SAMPLES);
    let seed = ctx.seed.unwrap_or(REDUCE_SEED);
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(usage("[reduce]: radius must be positive"));
    }

    let mut echo = ctx.base_echo("reduce");
    echo.seed = Some(seed);
    echo.system = SystemTable::filled(&c);
    echo.params = ParamsTable::filled_rescaled(&r);
    echo.reduce = ReduceTable {
        alpha: None,
        lambda: None,
        radius: Some(radius),
        samples: Some(samples),
    };
    ctx.write_sidecar(&echo)?;

    let red = sm_reduction(&c, &r).map_err(domain)?;
    let residual = sm_residual(&c, &r, radius, samples, seed).map_err(domain)?;
    let mut kv = Kv::new();
    kv.put_f("rho", r.rho);
    kv.put_f("omega", r.omega);
    kv.put_f("mu", r.mu);
    kv.put_f("mu1", red.mu1);
    kv.put_f("mu2", red.mu2);
    kv.put_f("alpha", red.alpha);
    kv.put_f("lambda", red.lambda);
    kv.put_f("l11", red.l11);
    kv.put_f("l12", red.l12);
    kv.put_f("sx", red.sx);
    kv.put_f("sy", red.sy);
    kv.put_f("t_scale", red.t_scale);
    kv.put("window_ok", red.window_ok);
    kv.put_f("residual", residual);
    ctx.write_primary(&kv.0)
}

pub struct ReduceInverseArgs {
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
}

pub fn cmd_reduce_inverse(ctx: &Ctx, args: &ReduceInverseArgs) -> Result<(), CliError> {
    let c = ctx.cfg.system.resolve()?;
    let alpha = args.alpha.or(ctx.cfg.reduce.alpha).unwrap_or(REDUCE_ALPHA);
    let lambda = args.lambda.or(ctx.cfg.reduce.lambda).unwrap_or(REDUCE_LAMBDA);
    let mu = args.mu.or(ctx.cfg.params.mu).unwrap_or(REDUCE_MU);
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(usage("[reduce]: mu must be positive"));
    }
    let sm = SMParams::new_unchecked(alpha, lambda).map_err(|e| usage(format!("[reduce]: {e}")))?;

    let mut echo = ctx.base_echo("reduce");
    echo.system = SystemTable::filled(&c);
    echo.params = ParamsTable {
        mu: Some(mu),
        ..ParamsTable::default()
    };
    echo.reduce = ReduceTable {
        alpha: Some(alpha),
        lambda: Some(lambda),
        radius: None,
        samples: None,
    };
    ctx.write_sidecar(&echo)?;

    let inv = sm_point_to_phys(&c, &sm, mu).map_err(domain)?;
    let mut kv = Kv::new();
    kv.put_f("alpha", sm.alpha);
    kv.put_f("lambda", sm.lambda);
    kv.put_f("mu", mu);
    kv.put_f("gamma", inv.phys.gamma);
    kv.put_f("beta", inv.phys.beta);
    kv.put_f("rho", inv.rescaled.rho);
    kv.put_f("omega", inv.rescaled.omega);
    kv.put_f("mu1", inv.mu1);
    kv.put_f("mu2", inv.mu2);
    ctx.write_primary(&kv.0)
}

// ---------------------------------------------------------------------------
// map

pub struct MapIterateArgs {
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub n: Option<usize>,
}

pub fn cmd_map_iterate(ctx: &Ctx, args: &MapIterateArgs) -> Result<(), CliError> {
    let p = ctx.cfg.map.resolve()?;
    let it = ctx.cfg.map.iterate.clone().unwrap_or_default();
    let x0 = args.x0.or(it.x0).unwrap_or(ITERATE_X0);
    let y0 = args.y0.or(it.y0).unwrap_or(ITERATE_Y0);
    let n = args.n.or(it.n).unwrap_or(ITERATE_N);

    let mut echo = ctx.base_echo("map");
    let mut map_echo = MapTable::filled(&p);
    map_echo.iterate = Some(IterateTable {
        x0: Some(x0),
        y0: Some(y0),
        n: Some(n),
    });
    echo.map = map_echo;
    ctx.write_sidecar(&echo)?;

    let mut body = Vec::new();
    let _ = writeln!(body, "k,x,y,sign");
    let (mut x, mut y) = (x0, y0);
    for k in 0..n {
        if y == 0.0 || !y.is_finite() {
            return Err(domain(format!(
                "orbit left the map's domain (Y = {y}) at step {k}"
            )));
        }
        let sign: i8 = if y > 0.0 { 1 } else { -1 };
        let _ = writeln!(body, "{k},{},{},{sign}", fmt_g17(x), fmt_g17(y));
        if k + 1 < n {
            (x, y) = map_t(&p, x, y).map_err(|e| domain(format!("step {}: {e}", k + 1)))?;
        }
    }
    ctx.write_primary(&body)
}

pub fn cmd_map_cones(ctx: &Ctx) -> Result<(), CliError> {
    let p = ctx.cfg.map.resolve()?;
    let ct = ctx.cfg.map.cones.clone().unwrap_or_default();
    let grid = ct.grid()?;
    let slopes = ct.slopes(&p);

    let mut echo = ctx.base_echo("map");
    let mut map_echo = MapTable::filled(&p);
    map_echo.cones = Some(ConesTable::filled(&grid, &slopes));
    echo.map = map_echo;
    ctx.write_sidecar(&echo)?;

    let cert = verify_cones(&p, &grid, slopes).map_err(map_map_err)?;
    let mut kv = Kv::new();
    kv.put_f("slope_u", cert.slopes.slope_u);
    kv.put_f("slope_ss", cert.slopes.slope_ss);
    kv.put_f("min_expansion", cert.min_expansion);
    kv.put_f("max_contraction", cert.max_contraction);
    kv.put("u_invariant", cert.u_invariant);
    kv.put("ss_invariant", cert.ss_invariant);
    kv.put("points_checked", cert.points_checked);
    kv.put("valid", cert.valid());
    ctx.write_primary(&kv.0)
}

pub struct MapRegionsArgs {
    pub theta: Option<f64>,
    pub k: Option<i64>,
}

pub fn cmd_map_regions(ctx: &Ctx, args: &MapRegionsArgs) -> Result<(), CliError> {
    let p = ctx.cfg.map.resolve()?;
    let rt = ctx.cfg.map.regions.clone().unwrap_or_default();
    let k = args.k.or(rt.k).unwrap_or(REGION_K);
    let omega = rt.omega.unwrap_or(REGION_OMEGA);
    let nu_hat = rt.nu_hat.unwrap_or(REGION_NU_HAT);
    let k1 = rt.k1.unwrap_or(REGION_K1);
    let k2 = rt.k2.unwrap_or(REGION_K2);
    let theta = args.theta.or(rt.theta).unwrap_or(REGION_THETA);
    let sign_a22 = rt.sign_a22.unwrap_or(1.0);
    let rs = RegionSpec::new(k, omega, p.nu, nu_hat, k1, k2)
        .map_err(|e| usage(format!("[map.regions]: {e}")))?;

    let mut echo = ctx.base_echo("map");
    let mut map_echo = MapTable::filled(&p);
    map_echo.regions = Some(RegionsTable {
        k: Some(k),
        omega: Some(omega),
        nu_hat: Some(nu_hat),
        k1: Some(k1),
        k2: Some(k2),
        theta: Some(theta),
        sign_a22: Some(sign_a22),
    });
    echo.map = map_echo;
    ctx.write_sidecar(&echo)?;

    let check = region_predicate(&rs, theta, p.delta).map_err(map_map_err)?;
    let mut kv = Kv::new();
    kv.put("k", k);
    kv.put_f("omega", omega);
    kv.put_f("nu", rs.nu);
    kv.put_f("nu_hat", rs.nu_hat);
    kv.put_f("k1", rs.k1);
    kv.put_f("k2", rs.k2);
    kv.put_f("theta", theta);
    kv.put_f("delta", p.delta);
    kv.put_f("band_factor", rs.band_factor(theta));
    kv.put_f("lower", rs.lower_bound(theta));
    kv.put_f("upper", rs.upper_bound(theta));
    kv.put("inside", check.inside);
    if let Some(reason) = &check.reason {
        kv.put("reason", reason);
    }
    if p.delta != 0.0 {
        let sigma = sigma_sign(k, sign_a22, omega, p.delta.signum()).map_err(map_map_err)?;
        kv.put("sigma", sigma);
    }
    ctx.write_primary(&kv.0)
}

// ---------------------------------------------------------------------------
// henon

pub struct HenonArgs {
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub b: Option<f64>,
}

pub fn cmd_henon(ctx: &Ctx, args: &HenonArgs) -> Result<(), CliError> {
    let m1 = args.m1.or(ctx.cfg.henon.m1).unwrap_or(HENON_M1);
    let m2 = args.m2.or(ctx.cfg.henon.m2).unwrap_or(HENON_M2);
    let b = args.b.or(ctx.cfg.henon.b).unwrap_or(HENON_B);
    if !(m1.is_finite() && m2.is_finite() && b.is_finite()) {
        return Err(usage("[henon]: coefficients must be finite"));
    }

    let mut echo = ctx.base_echo("henon");
    echo.henon = HenonTable {
        m1: Some(m1),
        m2: Some(m2),
        b: Some(b),
    };
    ctx.write_sidecar(&echo)?;

    let fixed_points = henon_analysis(m1, m2, b);
    let mut body = Vec::new();
    let _ = writeln!(
        body,
        "p,mult1_re,mult1_im,mult2_re,mult2_im,mult3_re,mult3_im,product_re,product_im"
    );
    for fp in &fixed_points {
        let m = &fp.multipliers;
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{},{}",
            fmt_g17(fp.p),
            fmt_g17(m[0].re),
            fmt_g17(m[0].im),
            fmt_g17(m[1].re),
            fmt_g17(m[1].im),
            fmt_g17(m[2].re),
            fmt_g17(m[2].im),
            fmt_g17(fp.product.re),
            fmt_g17(fp.product.im)
        );
    }
    ctx.write_primary(&body)
}
