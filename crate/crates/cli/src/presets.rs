//! Built-in experiment presets, embedded so each headline result is one
//! command away: `rydnet <subcommand> --preset <name>`.

use anyhow::{bail, Result};

/// 4x4 grid hitting times: how long the gas takes to first assemble a
/// maximum packing, with the drive strengths giving nu/mu = 9.
pub const FIG4: &str = r#"frequency_unit = "2pi_MHz"
seed = 1905

[topology]
kind = "lattice"
n = 4
m = 4

[physics]
gamma = 6.0
omega_r = 1.0
omega_e = 3.0

[hitting]
samples = 1000
"#;

/// Excitation probabilities along a 9-particle nearest-neighbor line at
/// a uniform rate ratio of 10: strongly alternating boundary-driven
/// profile.
pub const FIG5: &str = r#"frequency_unit = "2pi_MHz"

[topology]
kind = "line"
n = 9
b = 1

[rates]
nu = 10.0
mu = 1.0
"#;

/// Stochastic drive tuning on a 9-particle line with blocking range 4,
/// aiming every particle at excitation probability 1/6, with the
/// square-root-damped step sizes and quadratically growing sample counts.
pub const FIG6: &str = r#"frequency_unit = "2pi_MHz"
seed = 1905

[topology]
kind = "line"
n = 9
b = 4

[physics]
gamma = 6.0
omega_r = 1.0
omega_e = 1.0

[tune]
targets = 0.16666666666666666
estimator = "ensemble"
max_iterations = 10

[tune.schedule.a]
family = "sqrt_damped"
scale = 100.0
offset = 10.0

[tune.schedule.T]
family = "constant"
value = 250e-6

[tune.schedule.m]
family = "power"
scale = 25.0
exponent = 2.0
"#;

/// The same tuning run with exact excitation probabilities recorded
/// before the first update and after iterations 3 and 10.
pub const FIG7: &str = r#"frequency_unit = "2pi_MHz"
seed = 1905

[topology]
kind = "line"
n = 9
b = 4

[physics]
gamma = 6.0
omega_r = 1.0
omega_e = 1.0

[tune]
targets = 0.16666666666666666
estimator = "ensemble"
max_iterations = 10
theta_checkpoints = [0, 3, 10]

[tune.schedule.a]
family = "sqrt_damped"
scale = 100.0
offset = 10.0

[tune.schedule.T]
family = "constant"
value = 250e-6

[tune.schedule.m]
family = "power"
scale = 25.0
exponent = 2.0
"#;

/// Preset names in display order.
pub const NAMES: [&str; 4] = ["fig4", "fig5", "fig6", "fig7"];

/// Looks up a preset's TOML text by name.
pub fn preset(name: &str) -> Result<&'static str> {
    match name {
        "fig4" => Ok(FIG4),
        "fig5" => Ok(FIG5),
        "fig6" => Ok(FIG6),
        "fig7" => Ok(FIG7),
        other => bail!("unknown preset {other:?} (available: {})", NAMES.join(", ")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn every_preset_parses_and_builds() {
        for name in NAMES {
            let cfg = ExperimentConfig::from_toml(preset(name).unwrap())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            let graph = cfg.topology().unwrap().build_graph().unwrap();
            cfg.resolve_rates(graph.n_particles()).unwrap();
            if let Some(tune) = &cfg.tune {
                tune.build_schedule().unwrap();
            }
        }
    }

    #[test]
    fn fig6_schedule_matches_published_run() {
        let cfg = ExperimentConfig::from_toml(FIG6).unwrap();
        let sched = cfg.tune.as_ref().unwrap().build_schedule().unwrap();
        assert!((sched.step().at(1) - 100.0 / 11.0).abs() < 1e-12);
        assert!((sched.horizon().at(5) - 250e-6).abs() < 1e-18);
        assert_eq!(sched.count().at(10), 2500);
        assert_eq!(sched.max_iterations(), 10);
        let targets = match cfg.tune.as_ref().unwrap().targets.as_ref().unwrap() {
            crate::config::ScalarOrVec::Scalar(v) => *v,
            crate::config::ScalarOrVec::PerParticle(_) => unreachable!(),
        };
        assert_eq!(targets, 1.0 / 6.0);
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(preset("fig9").is_err());
    }
}
