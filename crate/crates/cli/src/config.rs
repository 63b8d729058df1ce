//! Experiment configuration: the TOML schema, preset/file/flag layering,
//! and resolution into core-library objects.
//!
//! Configs are assembled in layers, later layers winning: built-in
//! defaults, then `--preset`, then `--config`, then individual flags.
//! Whole sections replace whole sections between layers; flags patch
//! single fields. The rate parameterization is exclusive: a layer that
//! supplies `[physics]` or `[rates]` (or `--rho`) drops both from the
//! layers below, and one layer supplying both is a config error.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use rydnet_core::physics::{LaserParams, TWO_PI_MHZ};
use rydnet_core::tuner::{CountRule, HorizonRule, Schedule, StepRule};
use rydnet_core::{InterferenceGraph, RateVector};

/// The only frequency unit accepted in config files: all of `gamma`,
/// `omega_r`, `omega_e`, `omega_min`, `omega_max` are in units of
/// 2π·MHz (a value of 3.0 means an angular frequency of 2π·3 MHz).
pub const FREQUENCY_UNIT: &str = "2pi_MHz";

/// A value given once for all particles or per particle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    /// One value broadcast to every particle.
    Scalar(f64),
    /// One value per particle, in particle order.
    PerParticle(Vec<f64>),
}

impl ScalarOrVec {
    /// Expands to one value per particle, checking lengths.
    pub fn broadcast(&self, n: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            ScalarOrVec::Scalar(v) => Ok(vec![*v; n]),
            ScalarOrVec::PerParticle(v) if v.len() == n => Ok(v.clone()),
            ScalarOrVec::PerParticle(v) => {
                bail!("{what} lists {} values but the topology has {n} particles", v.len())
            }
        }
    }
}

/// Root of the config file. Unknown keys anywhere are errors.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Unit contract for every frequency-valued key; see [`FREQUENCY_UNIT`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_unit: Option<String>,
    /// Master RNG seed. Overridden by `RYDNET_SEED`, then by `--seed`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Where output CSVs go; `--out` overrides. Defaults to the current
    /// directory. Never echoed in output headers, so moving the output
    /// directory does not change the output bytes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Interference graph.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopologyConfig>,
    /// Laser parameterization (exclusive with `[rates]`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physics: Option<PhysicsConfig>,
    /// Direct flip-rate parameterization (exclusive with `[physics]`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<RatesConfig>,
    /// `equilibrium` subcommand parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<EquilibriumConfig>,
    /// `simulate` subcommand parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    /// `hitting-time` subcommand parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hitting: Option<HittingConfig>,
    /// `tune` subcommand parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tune: Option<TuneConfig>,
    /// `achievable` subcommand parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achievable: Option<AchievableConfig>,
}

/// `[topology]`: which interference graph to build.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    /// `"lattice"` (needs `n`, `m`), `"line"` (needs `n`, `b`), or
    /// `"unit_disk"` (needs `file`).
    pub kind: String,
    /// Lattice rows, or line length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Lattice columns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Line blocking range: each particle blocks the `b` nearest on each side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    /// Graph file (positions + radius, or explicit edges).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl TopologyConfig {
    fn reject_unused(&self, kind: &str, used: &[&str]) -> Result<()> {
        let present: [(&str, bool); 4] = [
            ("n", self.n.is_some()),
            ("m", self.m.is_some()),
            ("b", self.b.is_some()),
            ("file", self.file.is_some()),
        ];
        for (name, is_set) in present {
            if is_set && !used.contains(&name) {
                bail!("topology key {name:?} does not apply to kind {kind:?}");
            }
        }
        Ok(())
    }

    /// Builds the graph, reading the graph file for `unit_disk`.
    pub fn build_graph(&self) -> Result<InterferenceGraph> {
        match self.kind.as_str() {
            "lattice" => {
                self.reject_unused("lattice", &["n", "m"])?;
                let n = self.n.context("lattice topology needs n (rows)")?;
                let m = self.m.context("lattice topology needs m (columns)")?;
                Ok(InterferenceGraph::lattice(n, m)?)
            }
            "line" => {
                self.reject_unused("line", &["n", "b"])?;
                let n = self.n.context("line topology needs n (particles)")?;
                let b = self.b.context("line topology needs b (blocking range)")?;
                Ok(InterferenceGraph::line(n, b)?)
            }
            "unit_disk" => {
                self.reject_unused("unit_disk", &["file"])?;
                let file = self.file.as_ref().context("unit_disk topology needs file")?;
                crate::graphio::read_graph(file)
            }
            other => bail!("unknown topology kind {other:?} (expected lattice, line, or unit_disk)"),
        }
    }
}

/// `[physics]`: laser parameters, all in units of 2π·MHz.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    /// Intermediate-state decay rate.
    pub gamma: f64,
    /// Upper-transition drive, scalar or per particle.
    pub omega_r: ScalarOrVec,
    /// Lower-transition drive, scalar or per particle. For `tune` this is
    /// the starting point of the iteration.
    pub omega_e: ScalarOrVec,
}

impl PhysicsConfig {
    /// Converts to internal rad/s laser parameters for an `n`-particle graph.
    pub fn to_laser_params(&self, n: usize) -> Result<LaserParams> {
        let to_rad = |v: Vec<f64>| v.into_iter().map(|x| x * TWO_PI_MHZ).collect::<Vec<_>>();
        let omega_e = to_rad(self.omega_e.broadcast(n, "physics.omega_e")?);
        let omega_r = to_rad(self.omega_r.broadcast(n, "physics.omega_r")?);
        Ok(LaserParams::new(omega_e, omega_r, self.gamma * TWO_PI_MHZ)?)
    }
}

/// `[rates]`: direct excitation/de-excitation rates, in events per second.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    /// Excitation (activation) rate ν, scalar or per particle.
    pub nu: ScalarOrVec,
    /// De-excitation (deactivation) rate μ, scalar or per particle.
    pub mu: ScalarOrVec,
}

impl RatesConfig {
    /// Converts to a rate vector for an `n`-particle graph.
    pub fn to_rate_vector(&self, n: usize) -> Result<RateVector> {
        Ok(RateVector::new(
            self.nu.broadcast(n, "rates.nu")?,
            self.mu.broadcast(n, "rates.mu")?,
        )?)
    }
}

/// `[equilibrium]` parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriumConfig {
    /// Also write the full state list and the dominant-configuration list.
    pub dump_states: bool,
}

/// `[simulate]` parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    /// Trajectory length in seconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Particles (1-based) excited at time zero; empty = all ground.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub initial: Vec<usize>,
}

/// `[hitting]` parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HittingConfig {
    /// Number of independent runs (default 1000).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Per-run give-up time in seconds (default 10^4 / min rate).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    /// Fixed histogram bin count; default is Freedman-Diaconis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    /// Explicit target configurations as occupancy bitstrings (particle 1
    /// leftmost), bypassing dominant-set enumeration on large instances.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<String>>,
    /// Also write the mean-occupancy relaxation curve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<bool>,
    /// Curve horizon in seconds (default 100 / min rate).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_horizon: Option<f64>,
    /// Curve grid resolution (default 200 points).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_points: Option<usize>,
}

/// `[tune]` parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuneConfig {
    /// Target excitation probabilities, scalar or per particle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<ScalarOrVec>,
    /// `"ensemble"` (default), `"time_average"`, or `"exact"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator: Option<String>,
    /// Iteration cap (default 10).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    /// Iteration numbers at which the exact excitation probabilities of
    /// the current drives are recorded (0 = before any update).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_checkpoints: Option<Vec<usize>>,
    /// Lower clamp on the drives during tuning, 2π·MHz.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    /// Upper clamp on the drives during tuning, 2π·MHz.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    /// Step-size / horizon / sample-count rules.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleConfig>,
}

/// `[tune.schedule]`: the three per-iteration rules.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    /// Step sizes a(n).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<FamilyConfig>,
    /// Per-sample horizons T(n) in seconds (default: constant 1 s).
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<FamilyConfig>,
    /// Sample counts m(n) (default: constant 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<FamilyConfig>,
}

/// One rule family with its parameters. `family` selects which other
/// keys apply: `"constant"` uses `value`; `"power"` uses `scale` and
/// `exponent` (decay n^-exponent for step sizes, growth n^exponent for
/// horizons and counts); `"sqrt_damped"` uses `scale` and `offset`
/// (step sizes only); `"table"` uses `values`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    /// Family name.
    pub family: String,
    /// Constant value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Power-law or sqrt-damped prefactor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Power-law exponent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// Sqrt-damped denominator offset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    /// Table entries; iterations past the end clamp to the last one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl FamilyConfig {
    fn reject_unused(&self, what: &str, used: &[&str]) -> Result<()> {
        let present: [(&str, bool); 5] = [
            ("value", self.value.is_some()),
            ("scale", self.scale.is_some()),
            ("exponent", self.exponent.is_some()),
            ("offset", self.offset.is_some()),
            ("values", self.values.is_some()),
        ];
        for (name, is_set) in present {
            if is_set && !used.contains(&name) {
                bail!("{what}: key {name:?} does not apply to family {:?}", self.family);
            }
        }
        Ok(())
    }

    fn need(&self, what: &str, key: &str, field: Option<f64>) -> Result<f64> {
        field.ok_or_else(|| anyhow!("{what}: family {:?} needs {key}", self.family))
    }

    /// Interprets the family as a step-size rule a(n).
    pub fn to_step_rule(&self, what: &str) -> Result<StepRule> {
        match self.family.as_str() {
            "constant" => {
                self.reject_unused(what, &["value"])?;
                Ok(StepRule::Constant(self.need(what, "value", self.value)?))
            }
            "power" => {
                self.reject_unused(what, &["scale", "exponent"])?;
                Ok(StepRule::PowerLaw {
                    scale: self.need(what, "scale", self.scale)?,
                    exponent: self.need(what, "exponent", self.exponent)?,
                })
            }
            "sqrt_damped" => {
                self.reject_unused(what, &["scale", "offset"])?;
                Ok(StepRule::SqrtDamped {
                    scale: self.need(what, "scale", self.scale)?,
                    offset: self.need(what, "offset", self.offset)?,
                })
            }
            "table" => {
                self.reject_unused(what, &["values"])?;
                let values = self.values.clone().context("table family needs values")?;
                Ok(StepRule::Table(values))
            }
            other => bail!("{what}: unknown family {other:?}"),
        }
    }

    /// Interprets the family as a per-sample horizon rule T(n).
    pub fn to_horizon_rule(&self, what: &str) -> Result<HorizonRule> {
        match self.family.as_str() {
            "constant" => {
                self.reject_unused(what, &["value"])?;
                Ok(HorizonRule::Constant(self.need(what, "value", self.value)?))
            }
            "power" => {
                self.reject_unused(what, &["scale", "exponent"])?;
                Ok(HorizonRule::PowerLaw {
                    scale: self.need(what, "scale", self.scale)?,
                    exponent: self.need(what, "exponent", self.exponent)?,
                })
            }
            "table" => {
                self.reject_unused(what, &["values"])?;
                let values = self.values.clone().context("table family needs values")?;
                Ok(HorizonRule::Table(values))
            }
            other => bail!("{what}: unknown family {other:?} (horizons support constant, power, table)"),
        }
    }

    /// Interprets the family as a sample-count rule m(n).
    pub fn to_count_rule(&self, what: &str) -> Result<CountRule> {
        match self.family.as_str() {
            "constant" => {
                self.reject_unused(what, &["value"])?;
                let v = self.need(what, "value", self.value)?;
                Ok(CountRule::Constant(as_count(what, v)?))
            }
            "power" => {
                self.reject_unused(what, &["scale", "exponent"])?;
                Ok(CountRule::PowerLaw {
                    scale: self.need(what, "scale", self.scale)?,
                    exponent: self.need(what, "exponent", self.exponent)?,
                })
            }
            "table" => {
                self.reject_unused(what, &["values"])?;
                let values = self.values.clone().context("table family needs values")?;
                let counts = values
                    .into_iter()
                    .map(|v| as_count(what, v))
                    .collect::<Result<Vec<usize>>>()?;
                Ok(CountRule::Table(counts))
            }
            other => bail!("{what}: unknown family {other:?} (counts support constant, power, table)"),
        }
    }
}

fn as_count(what: &str, v: f64) -> Result<usize> {
    if !(v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= usize::MAX as f64) {
        bail!("{what}: sample counts must be positive integers, got {v}");
    }
    Ok(v as usize)
}

/// Default per-sample horizon when `[tune.schedule.T]` is omitted.
const DEFAULT_HORIZON_RULE: HorizonRule = HorizonRule::Constant(1.0);
/// Default sample count when `[tune.schedule.m]` is omitted.
const DEFAULT_COUNT_RULE: CountRule = CountRule::Constant(1);
/// Default iteration cap.
pub const DEFAULT_MAX_ITERATIONS: usize = 10;

impl TuneConfig {
    /// Builds the core schedule from the config, defaulting the horizon
    /// rule to 1 s and the count rule to 1 when omitted.
    pub fn build_schedule(&self) -> Result<Schedule> {
        let sched = self.schedule.as_ref().cloned().unwrap_or_default();
        let step = sched
            .a
            .as_ref()
            .context("tune needs a step-size rule [tune.schedule.a]")?
            .to_step_rule("tune.schedule.a")?;
        let horizon = match &sched.horizon {
            Some(f) => f.to_horizon_rule("tune.schedule.T")?,
            None => DEFAULT_HORIZON_RULE,
        };
        let count = match &sched.m {
            Some(f) => f.to_count_rule("tune.schedule.m")?,
            None => DEFAULT_COUNT_RULE,
        };
        let max_iterations = self.max_iterations.unwrap_or(DEFAULT_MAX_ITERATIONS);
        Ok(Schedule::new(step, horizon, count, max_iterations)?)
    }
}

/// `[achievable]` parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AchievableConfig {
    /// Target excitation probabilities to test.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<ScalarOrVec>,
}

impl ExperimentConfig {
    /// Parses a config from TOML text; parse errors carry line/column.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.check_frequency_unit()?;
        Ok(cfg)
    }

    fn check_frequency_unit(&self) -> Result<()> {
        if let Some(unit) = &self.frequency_unit {
            if unit != FREQUENCY_UNIT {
                bail!("frequency_unit {unit:?} is not supported; the only accepted value is \"{FREQUENCY_UNIT}\"");
            }
        }
        Ok(())
    }

    /// Lays `upper` over `self`: whole sections replace whole sections,
    /// and a parameterization in `upper` evicts both below.
    pub fn overlay(&mut self, upper: ExperimentConfig) {
        if upper.physics.is_some() || upper.rates.is_some() {
            self.physics = None;
            self.rates = None;
        }
        let ExperimentConfig {
            frequency_unit,
            seed,
            output_dir,
            topology,
            physics,
            rates,
            equilibrium,
            simulate,
            hitting,
            tune,
            achievable,
        } = upper;
        merge(&mut self.frequency_unit, frequency_unit);
        merge(&mut self.seed, seed);
        merge(&mut self.output_dir, output_dir);
        merge(&mut self.topology, topology);
        merge(&mut self.physics, physics);
        merge(&mut self.rates, rates);
        merge(&mut self.equilibrium, equilibrium);
        merge(&mut self.simulate, simulate);
        merge(&mut self.hitting, hitting);
        merge(&mut self.tune, tune);
        merge(&mut self.achievable, achievable);
    }

    /// Errors unless exactly one of `[physics]` / `[rates]` is present;
    /// returns the rates plus the laser parameters when they exist.
    pub fn resolve_rates(&self, n: usize) -> Result<(RateVector, Option<LaserParams>)> {
        match (&self.physics, &self.rates) {
            (Some(_), Some(_)) => bail!(
                "both [physics] and [rates] are set; exactly one parameterization is allowed"
            ),
            (Some(p), None) => {
                let params = p.to_laser_params(n)?;
                let rates = rydnet_core::physics::rates_from_rabi(&params);
                Ok((rates, Some(params)))
            }
            (None, Some(r)) => Ok((r.to_rate_vector(n)?, None)),
            (None, None) => bail!(
                "no rate parameterization: add a [physics] or [rates] section (or pass --rho)"
            ),
        }
    }

    /// The topology section, or an error telling the user how to add one.
    pub fn topology(&self) -> Result<&TopologyConfig> {
        self.topology
            .as_ref()
            .context("no topology: add a [topology] section or pass --lattice/--line/--graph")
    }

    /// Serializes the resolved config for output headers. `output_dir` is
    /// omitted so output bytes do not depend on where they are written.
    pub fn header_toml(&self) -> Result<String> {
        let mut for_header = self.clone();
        for_header.output_dir = None;
        for_header.frequency_unit = Some(FREQUENCY_UNIT.to_string());
        Ok(toml::to_string(&for_header)?)
    }
}

fn merge<T>(slot: &mut Option<T>, upper: Option<T>) {
    if upper.is_some() {
        *slot = upper;
    }
}

/// Resolves the master seed: `--seed` beats `RYDNET_SEED` beats the
/// config file beats 0.
pub fn resolve_seed(cfg: &ExperimentConfig, flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(text) = std::env::var_os("RYDNET_SEED") {
        let text = text
            .into_string()
            .map_err(|_| anyhow!("RYDNET_SEED is not valid UTF-8"))?;
        return text
            .trim()
            .parse::<u64>()
            .with_context(|| format!("RYDNET_SEED must be an unsigned integer, got {text:?}"));
    }
    Ok(cfg.seed.unwrap_or(0))
}

/// Converts 1-based particle labels (as used in config files and CSVs)
/// to 0-based indices.
pub fn to_zero_based(labels: &[usize], n: usize, what: &str) -> Result<Vec<usize>> {
    labels
        .iter()
        .map(|&p| {
            if p == 0 || p > n {
                bail!("{what}: particle {p} is out of range 1..={n}");
            }
            Ok(p - 1)
        })
        .collect()
}
