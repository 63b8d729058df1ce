//! `rydnet`: experiment runner for hard-core interacting-particle
//! networks. Subcommands expose the exact equilibrium, event-driven
//! simulation, hitting times, drive tuning, the achievable-region test,
//! and config validation; outputs are plain CSV.

mod commands;
mod config;
mod graphio;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, RatesConfig, ScalarOrVec, TopologyConfig};
use output::OutputContext;

#[derive(Parser)]
#[command(
    name = "rydnet",
    version,
    about = "Hard-core interacting-particle networks: exact equilibrium, \
             event-driven simulation, and drive tuning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact stationary distribution and excitation probabilities.
    Equilibrium(EquilibriumArgs),
    /// One event-driven trajectory.
    Simulate(SimulateArgs),
    /// First-passage times to the dominant (maximum packing) configurations.
    #[command(name = "hitting-time")]
    HittingTime(HittingArgs),
    /// Tune per-particle drives toward target excitation probabilities.
    Tune(TuneArgs),
    /// Test whether target excitation probabilities are reachable at all.
    Achievable(AchievableArgs),
    /// Check a config without running: schema, regime, schedule, targets.
    Validate(ValidateArgs),
}

/// Options shared by every subcommand. Precedence: defaults, then
/// `--preset`, then `--config`, then these flags; `--seed` also beats the
/// `RYDNET_SEED` environment variable.
#[derive(Args)]
struct CommonArgs {
    /// Experiment config file (TOML).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Built-in preset: fig4, fig5, fig6, or fig7.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Master RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's output_dir, else ".").
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Omit the timestamp header line so reruns are byte-identical.
    #[arg(long)]
    reproducible: bool,
    /// Cap the worker-thread count (default: all cores).
    #[arg(long, value_name = "K")]
    threads: Option<usize>,
    /// Grid topology with N rows and M columns.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    lattice: Option<Vec<usize>>,
    /// Line topology: N particles, each blocking the B nearest per side.
    #[arg(long, num_args = 2, value_names = ["N", "B"])]
    line: Option<Vec<usize>>,
    /// Graph file (positions + radius, or explicit edges).
    #[arg(long, value_name = "FILE")]
    graph: Option<PathBuf>,
    /// Uniform rates nu = RHO, mu = 1 per second (replaces [physics]/[rates]).
    #[arg(long, value_name = "RHO")]
    rho: Option<f64>,
}

#[derive(Args)]
struct EquilibriumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also write the full state list and the dominant configurations.
    #[arg(long)]
    dump_states: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trajectory length in seconds.
    #[arg(long, value_name = "SECONDS")]
    horizon: Option<f64>,
}

#[derive(Args)]
struct HittingArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of independent runs.
    #[arg(long, value_name = "K")]
    samples: Option<usize>,
    /// Per-run give-up time in seconds (default: 10^4 / min rate).
    #[arg(long, value_name = "SECONDS")]
    cap: Option<f64>,
    /// Fixed histogram bin count (default: Freedman-Diaconis).
    #[arg(long, value_name = "K")]
    bins: Option<usize>,
    /// Also write the mean-occupancy relaxation curve.
    #[arg(long)]
    curve: bool,
    /// Allow instances beyond the default particle budget.
    #[arg(long)]
    large: bool,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Estimator: exact, ensemble, or time_average.
    #[arg(long, value_name = "NAME")]
    estimator: Option<String>,
    /// Iteration cap.
    #[arg(long, value_name = "N")]
    iterations: Option<usize>,
    /// Target excitation probabilities (one value, or comma-separated
    /// per-particle values).
    #[arg(long, value_name = "PHI", value_delimiter = ',')]
    targets: Option<Vec<f64>>,
}

#[derive(Args)]
struct AchievableArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target excitation probabilities (one value, or comma-separated
    /// per-particle values).
    #[arg(long, value_name = "PHI", value_delimiter = ',')]
    targets: Option<Vec<f64>>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Config file to check (same as --config).
    #[arg(value_name = "FILE")]
    path: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
    /// Regime-check strictness: warn when factor x omega_r exceeds
    /// omega_e or gamma.
    #[arg(long, value_name = "FACTOR", default_value_t = commands::DEFAULT_REGIME_FACTOR)]
    regime_factor: f64,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Equilibrium(args) => {
            let mut cfg = load_config(&args.common)?;
            if args.dump_states {
                let mut section = cfg.equilibrium.take().unwrap_or_default();
                section.dump_states = true;
                cfg.equilibrium = Some(section);
            }
            let (ctx, _) = prepare(&args.common, &mut cfg, "equilibrium")?;
            commands::equilibrium(&cfg, &ctx)
        }
        Command::Simulate(args) => {
            let mut cfg = load_config(&args.common)?;
            if args.horizon.is_some() {
                let mut section = cfg.simulate.take().unwrap_or_default();
                section.horizon = args.horizon;
                cfg.simulate = Some(section);
            }
            let (ctx, seed) = prepare(&args.common, &mut cfg, "simulate")?;
            commands::simulate_cmd(&cfg, &ctx, seed)
        }
        Command::HittingTime(args) => {
            let mut cfg = load_config(&args.common)?;
            let mut section = cfg.hitting.take().unwrap_or_default();
            if args.samples.is_some() {
                section.samples = args.samples;
            }
            if args.cap.is_some() {
                section.cap = args.cap;
            }
            if args.bins.is_some() {
                section.bins = args.bins;
            }
            if args.curve {
                section.curve = Some(true);
            }
            cfg.hitting = Some(section);
            let (ctx, seed) = prepare(&args.common, &mut cfg, "hitting-time")?;
            commands::hitting(&cfg, &ctx, seed, args.large)
        }
        Command::Tune(args) => {
            let mut cfg = load_config(&args.common)?;
            let mut section = cfg.tune.take().unwrap_or_default();
            if args.estimator.is_some() {
                section.estimator = args.estimator.clone();
            }
            if args.iterations.is_some() {
                section.max_iterations = args.iterations;
            }
            if let Some(t) = &args.targets {
                section.targets = Some(targets_from_flag(t));
            }
            cfg.tune = Some(section);
            let (ctx, seed) = prepare(&args.common, &mut cfg, "tune")?;
            commands::tune(&cfg, &ctx, seed)
        }
        Command::Achievable(args) => {
            let mut cfg = load_config(&args.common)?;
            if let Some(t) = &args.targets {
                let mut section = cfg.achievable.take().unwrap_or_default();
                section.targets = Some(targets_from_flag(t));
                cfg.achievable = Some(section);
            }
            let (ctx, _) = prepare(&args.common, &mut cfg, "achievable")?;
            commands::achievable(&cfg, &ctx)
        }
        Command::Validate(args) => {
            let mut common = args.common;
            if let Some(path) = args.path {
                if common.config.is_some() {
                    bail!("give the config as either the positional argument or --config, not both");
                }
                common.config = Some(path);
            }
            let mut cfg = load_config(&common)?;
            cfg.seed = Some(config::resolve_seed(&cfg, common.seed)?);
            init_threads(&common)?;
            commands::validate(&cfg, args.regime_factor)
        }
    }
}

/// Builds the layered config: defaults, preset, file, then flag patches.
fn load_config(common: &CommonArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(name) = &common.preset {
        let text = presets::preset(name)?;
        cfg.overlay(
            ExperimentConfig::from_toml(text).with_context(|| format!("in preset {name}"))?,
        );
    }
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        cfg.overlay(
            ExperimentConfig::from_toml(&text)
                .with_context(|| format!("in config file {}", path.display()))?,
        );
    }

    let topologies_given =
        usize::from(common.lattice.is_some()) + usize::from(common.line.is_some()) + usize::from(common.graph.is_some());
    if topologies_given > 1 {
        bail!("give at most one of --lattice, --line, --graph");
    }
    if let Some(nm) = &common.lattice {
        cfg.topology = Some(TopologyConfig {
            kind: "lattice".into(),
            n: Some(nm[0]),
            m: Some(nm[1]),
            b: None,
            file: None,
        });
    }
    if let Some(nb) = &common.line {
        cfg.topology = Some(TopologyConfig {
            kind: "line".into(),
            n: Some(nb[0]),
            m: None,
            b: Some(nb[1]),
            file: None,
        });
    }
    if let Some(file) = &common.graph {
        cfg.topology = Some(TopologyConfig {
            kind: "unit_disk".into(),
            n: None,
            m: None,
            b: None,
            file: Some(file.clone()),
        });
    }
    if let Some(rho) = common.rho {
        cfg.physics = None;
        cfg.rates = Some(RatesConfig {
            nu: ScalarOrVec::Scalar(rho),
            mu: ScalarOrVec::Scalar(1.0),
        });
    }
    Ok(cfg)
}

fn targets_from_flag(values: &[f64]) -> ScalarOrVec {
    if values.len() == 1 {
        ScalarOrVec::Scalar(values[0])
    } else {
        ScalarOrVec::PerParticle(values.to_vec())
    }
}

/// Resolves the seed into the config (so headers show it), picks the
/// output directory, and applies the thread cap.
fn prepare(
    common: &CommonArgs,
    cfg: &mut ExperimentConfig,
    command: &'static str,
) -> Result<(OutputContext, u64)> {
    let seed = config::resolve_seed(cfg, common.seed)?;
    cfg.seed = Some(seed);
    let out_dir = common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    init_threads(common)?;
    let ctx = OutputContext::new(command, cfg, out_dir, common.reproducible)?;
    Ok((ctx, seed))
}

fn init_threads(common: &CommonArgs) -> Result<()> {
    if let Some(k) = common.threads {
        if k == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("setting the worker-thread count")?;
    }
    Ok(())
}
