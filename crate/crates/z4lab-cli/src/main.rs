//! `z4lab` — driver for the z4lab-core numerics library.
//!
//! Settings resolve in three layers: built-in defaults, then the `--config`
//! TOML file, then command-line flags. Every run echoes its fully resolved
//! configuration to a sidecar TOML next to the primary output; that sidecar
//! is itself a valid `--config` file reproducing the run.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    cmd_classify, cmd_henon, cmd_heteroclinic, cmd_map_cones, cmd_map_iterate, cmd_map_regions,
    cmd_reduce_inverse, cmd_reduce_sm, cmd_simulate, cmd_sweep, ClassifyArgs, Ctx, HenonArgs,
    HetArgs, MapIterateArgs, MapRegionsArgs, ReduceInverseArgs, ReduceSmArgs, SimulateArgs,
    SweepArgs,
};
use config::{parse_config, RunConfig};
use error::{usage, CliError};

#[derive(Parser)]
#[command(
    name = "z4lab",
    version,
    about = "Numerics for a fourfold-symmetric triple-instability system",
    propagate_version = true
)]
struct Cli {
    /// TOML configuration file (flags override its values).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads for the sweep; falls back to Z4LAB_THREADS, then the
    /// configuration file, then the machine's parallelism.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Seed override for seeded computations (Lyapunov launches, residual
    /// sampling).
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    /// Primary output file; standard output when absent. The resolved
    /// configuration is echoed to `<out>.resolved.toml` (or
    /// `z4lab.resolved.toml`).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one orbit and write a `t,x,y,z` CSV.
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t_total: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        sample_dt: Option<f64>,
    },
    /// Two-parameter Lyapunov sweep with a resumable JSONL checkpoint.
    Sweep {
        /// Continue from an existing checkpoint instead of refusing it.
        #[arg(long)]
        resume: bool,
        /// JSONL checkpoint path (appended cell by cell).
        #[arg(long, value_name = "PATH")]
        checkpoint: Option<PathBuf>,
        /// Also write a PGM heatmap of the top exponent.
        #[arg(long, value_name = "PATH")]
        heatmap: Option<PathBuf>,
    },
    /// Locate the saddle-connection surface `rho*(omega, mu)` by shooting.
    Heteroclinic {
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
    },
    /// Classify the attractor at one parameter point (or a CSV batch).
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        /// CSV of `gamma,beta,mu` rows to classify one by one.
        #[arg(long, value_name = "PATH")]
        batch: Option<PathBuf>,
    },
    /// Shimizu-Morioka reduction of the rescaled system.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// The two-dimensional model return map.
    #[command(subcommand)]
    Map(MapCommand),
    /// Fixed points and multipliers of the cubic Henon-like map.
    Henon {
        #[arg(long, allow_hyphen_values = true)]
        m1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        m2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
    },
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Reduce a rescaled parameter point to Shimizu-Morioka form.
    Sm {
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
    },
    /// Map Shimizu-Morioka parameters back to full-system parameters.
    Inverse {
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
    },
}

#[derive(Subcommand)]
enum MapCommand {
    /// Iterate the map and write a `k,x,y,sign` CSV.
    Iterate {
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        y0: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Verify expansion/contraction cone fields over a grid.
    Cones {},
    /// Test a `(theta, delta)` point against the parameter-region predicate.
    Regions {
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Sweep { .. } => "sweep",
            Command::Heteroclinic { .. } => "heteroclinic",
            Command::Classify { .. } => "classify",
            Command::Reduce(_) => "reduce",
            Command::Map(_) => "map",
            Command::Henon { .. } => "henon",
        }
    }
}

fn resolve_threads(flag: Option<usize>, cfg: &RunConfig) -> Result<usize, CliError> {
    if let Some(n) = flag {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        return Ok(n);
    }
    if let Ok(raw) = std::env::var("Z4LAB_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| usage(format!("Z4LAB_THREADS must be a positive integer, got {raw:?}")))?;
        if n == 0 {
            return Err(usage("Z4LAB_THREADS must be at least 1"));
        }
        return Ok(n);
    }
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(usage("threads in the configuration must be at least 1"));
        }
        return Ok(n);
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("config file {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(expected) = &cfg.command {
        if expected != cli.command.name() {
            return Err(usage(format!(
                "configuration is for command {expected:?} but {:?} was invoked",
                cli.command.name()
            )));
        }
    }
    let threads = resolve_threads(cli.threads, &cfg)?;
    let seed = cli.seed.or(cfg.seed);
    let out = cli.out.clone().or_else(|| cfg.out.clone().map(PathBuf::from));
    let ctx = Ctx {
        cfg,
        threads,
        seed,
        out,
    };

    match cli.command {
        Command::Simulate {
            gamma,
            beta,
            mu,
            t_total,
            sample_dt,
        } => cmd_simulate(
            &ctx,
            &SimulateArgs {
                gamma,
                beta,
                mu,
                t_total,
                sample_dt,
            },
        ),
        Command::Sweep {
            resume,
            checkpoint,
            heatmap,
        } => cmd_sweep(
            &ctx,
            &SweepArgs {
                resume,
                checkpoint,
                heatmap,
            },
        ),
        Command::Heteroclinic { omega, mu } => cmd_heteroclinic(&ctx, &HetArgs { omega, mu }),
        Command::Classify {
            gamma,
            beta,
            mu,
            batch,
        } => cmd_classify(
            &ctx,
            &ClassifyArgs {
                gamma,
                beta,
                mu,
                batch,
            },
        ),
        Command::Reduce(ReduceCommand::Sm { rho, omega, mu }) => {
            cmd_reduce_sm(&ctx, &ReduceSmArgs { rho, omega, mu })
        }
        Command::Reduce(ReduceCommand::Inverse { alpha, lambda, mu }) => {
            cmd_reduce_inverse(&ctx, &ReduceInverseArgs { alpha, lambda, mu })
        }
        Command::Map(MapCommand::Iterate { x0, y0, n }) => {
            cmd_map_iterate(&ctx, &MapIterateArgs { x0, y0, n })
        }
        Command::Map(MapCommand::Cones {}) => cmd_map_cones(&ctx),
        Command::Map(MapCommand::Regions { theta, k }) => {
            cmd_map_regions(&ctx, &MapRegionsArgs { theta, k })
        }
        Command::Henon { m1, m2, b } => cmd_henon(&ctx, &HenonArgs { m1, m2, b }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
