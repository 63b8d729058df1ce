//! The six subcommands. Each one resolves the config into core-library
//! objects, runs, and writes CSVs through [`OutputContext`] so every file
//! carries the resolved config in its header.

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use rydnet_core::dynamics::{
    default_hitting_cap, hitting_time, simulate, HittingOutcome, Trajectory,
};
use rydnet_core::equilibrium::stationary_distribution;
use rydnet_core::physics::{check_validity, rates_from_rabi, LaserParams, TWO_PI_MHZ};
use rydnet_core::rng::subseed;
use rydnet_core::statespace::StateSpace;
use rydnet_core::tuner::{
    check_achievable, tune_exact_with, tune_stochastic_with, validate_schedule, Achievability,
    Estimator, TunerState,
};
use rydnet_core::{Configuration, InterferenceGraph, RateVector};

use crate::config::{to_zero_based, ExperimentConfig, ScalarOrVec};
use crate::output::{histogram, OutputContext};

/// Particle-count guard for `hitting-time`; larger instances need `--large`.
pub const HITTING_SIZE_BUDGET: usize = 36;

/// Default regime-check factor for `validate`: the canonical drive choice
/// (upper drive a third of the lower, and a sixth of the decay rate) sits
/// exactly on this margin, so it validates cleanly while clearly
/// out-of-regime parameters still warn. Stricter audits can raise it.
pub const DEFAULT_REGIME_FACTOR: f64 = 3.0;

/// Renders a configuration as an occupancy bitstring, particle 1 leftmost.
fn bitstring(config: &Configuration) -> String {
    (0..config.n_particles())
        .map(|i| if config.is_excited(i) { '1' } else { '0' })
        .collect()
}

/// Parses an occupancy bitstring (particle 1 leftmost).
fn parse_bitstring(s: &str, n: usize, what: &str) -> Result<Configuration> {
    if s.len() != n {
        bail!("{what}: bitstring {s:?} has {} characters for {n} particles", s.len());
    }
    let bits: Vec<bool> = s
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => bail!("{what}: bitstring {s:?} contains {other:?}; only 0 and 1 are allowed"),
        })
        .collect::<Result<_>>()?;
    Ok(Configuration::from_occupancy(&bits))
}

fn build_instance(cfg: &ExperimentConfig) -> Result<(InterferenceGraph, RateVector)> {
    let graph = cfg.topology()?.build_graph()?;
    let (rates, _) = cfg.resolve_rates(graph.n_particles())?;
    Ok((graph, rates))
}

/// `equilibrium`: exact stationary law by enumeration.
pub fn equilibrium(cfg: &ExperimentConfig, ctx: &OutputContext) -> Result<()> {
    let (graph, rates) = build_instance(cfg)?;
    let space = StateSpace::enumerate(&graph)?;
    let eq = stationary_distribution(&space, &rates)?;
    let dump = cfg.equilibrium.as_ref().is_some_and(|e| e.dump_states);

    let mut f = ctx.create(
        "equilibrium_states.csv",
        &[],
        "state_index, n_excited, log_weight, pi",
    )?;
    for idx in 0..space.len() {
        f.row(&format!(
            "{idx}, {}, {}, {}",
            space.occupancy(idx),
            eq.log_weights()[idx],
            eq.pi()[idx]
        ))?;
    }
    println!("wrote {}", f.finish()?.display());

    let mut f = ctx.create("theta.csv", &[], "particle, theta")?;
    for (i, theta) in eq.excitation_probabilities().iter().enumerate() {
        f.row(&format!("{}, {theta}", i + 1))?;
    }
    println!("wrote {}", f.finish()?.display());

    if dump {
        let mut f = ctx.create("states.csv", &[], "state_index, occupancy_bits, n_excited")?;
        for idx in 0..space.len() {
            f.row(&format!("{idx}, {}, {}", bitstring(&space.state(idx)), space.occupancy(idx)))?;
        }
        println!("wrote {}", f.finish()?.display());

        let mut f = ctx.create("dominant.csv", &[], "state_index, occupancy_bits, n_excited")?;
        for idx in space.dominant_indices() {
            f.row(&format!("{idx}, {}, {}", bitstring(&space.state(idx)), space.occupancy(idx)))?;
        }
        println!("wrote {}", f.finish()?.display());

        std::fs::create_dir_all(ctx.dir())?;
        let graph_path = ctx.dir().join("graph.txt");
        std::fs::write(&graph_path, crate::graphio::write_graph(&graph))
            .with_context(|| format!("cannot write {}", graph_path.display()))?;
        println!("wrote {}", graph_path.display());
    }

    let dominant = space.dominant_indices();
    let dominant_mass: f64 = dominant.iter().map(|&i| eq.pi()[i]).sum();
    println!(
        "{} particles, {} feasible configurations, log Z = {}",
        graph.n_particles(),
        space.len(),
        eq.log_z()
    );
    println!(
        "dominant: {} configuration(s) of size {}, equilibrium mass {:.6}",
        dominant.len(),
        space.max_occupancy(),
        dominant_mass
    );
    Ok(())
}

/// `simulate`: one event-driven trajectory.
pub fn simulate_cmd(cfg: &ExperimentConfig, ctx: &OutputContext, seed: u64) -> Result<()> {
    let (graph, rates) = build_instance(cfg)?;
    let n = graph.n_particles();
    let sim = cfg.simulate.clone().unwrap_or_default();
    let horizon = sim
        .horizon
        .context("simulate needs a horizon: set [simulate].horizon or pass --horizon")?;
    let excited = to_zero_based(&sim.initial, n, "simulate.initial")?;
    let initial = Configuration::from_excited(n, &excited)?;
    let trajectory = simulate(&graph, &rates, horizon, &initial, seed)?;

    let notes = [
        format!("initial_configuration = {}", bitstring(&initial)),
        format!("horizon_seconds = {horizon}"),
        format!("events = {}", trajectory.events().len()),
    ];
    let mut f = ctx.create("trajectory.csv", &notes, "time, particle, direction")?;
    for ev in trajectory.events() {
        let dir = match ev.direction {
            rydnet_core::dynamics::Direction::Up => "up",
            rydnet_core::dynamics::Direction::Down => "down",
        };
        f.row(&format!("{}, {}, {dir}", ev.time, ev.particle + 1))?;
    }
    println!("wrote {}", f.finish()?.display());
    println!(
        "{} events over {horizon} s; final configuration {}",
        trajectory.events().len(),
        bitstring(&trajectory.final_configuration())
    );
    Ok(())
}

struct HittingTargets {
    configs: Vec<Configuration>,
    packing_size: u32,
    note: String,
}

fn resolve_hitting_targets(
    cfg: Option<&Vec<String>>,
    graph: &InterferenceGraph,
) -> Result<HittingTargets> {
    let n = graph.n_particles();
    match cfg {
        Some(strings) => {
            if strings.is_empty() {
                bail!("hitting.targets must list at least one configuration");
            }
            let configs = strings
                .iter()
                .map(|s| parse_bitstring(s, n, "hitting.targets"))
                .collect::<Result<Vec<_>>>()?;
            let packing_size = configs.iter().map(Configuration::n_excited).max().unwrap_or(0);
            let note = format!("targets = explicit ({} configuration(s))", configs.len());
            Ok(HittingTargets { configs, packing_size, note })
        }
        None => {
            let space = StateSpace::enumerate(graph)
                .context("enumerating the state space to find the dominant configurations; \
                          on instances past the budget, list [hitting] targets explicitly")?;
            let configs = space.maximum_independent_sets();
            let packing_size = space.max_occupancy();
            let note = format!(
                "targets = dominant configurations ({} of size {packing_size})",
                configs.len()
            );
            Ok(HittingTargets { configs, packing_size, note })
        }
    }
}

/// `hitting-time`: independent first-passage runs to the dominant set.
pub fn hitting(cfg: &ExperimentConfig, ctx: &OutputContext, seed: u64, large: bool) -> Result<()> {
    let (graph, rates) = build_instance(cfg)?;
    let n = graph.n_particles();
    if n > HITTING_SIZE_BUDGET && !large {
        bail!(
            "hitting-time on {n} particles exceeds the default budget of {HITTING_SIZE_BUDGET}; \
             rerun with --large (expect long runtimes)"
        );
    }
    let hit = cfg.hitting.clone().unwrap_or_default();
    let samples = hit.samples.unwrap_or(1000);
    if samples == 0 {
        bail!("hitting needs at least one sample");
    }
    let targets = resolve_hitting_targets(hit.targets.as_ref(), &graph)?;
    let cap = hit.cap.unwrap_or_else(|| default_hitting_cap(&rates));

    // One independent seed stream per run; order-independent, so the
    // parallel collect is deterministic.
    let outcomes = (0..samples)
        .into_par_iter()
        .map(|s| hitting_time(&graph, &rates, &targets.configs, subseed(seed, s as u64), cap))
        .collect::<rydnet_core::Result<Vec<HittingOutcome>>>()?;

    let notes = [targets.note.clone(), format!("cap_seconds = {cap}")];
    let mut f = ctx.create("hitting_times.csv", &notes, "seed, tau_or_timeout")?;
    let mut hits = Vec::with_capacity(samples);
    for (s, outcome) in outcomes.iter().enumerate() {
        let run_seed = subseed(seed, s as u64);
        match outcome {
            HittingOutcome::Hit(t) => {
                hits.push(*t);
                f.row(&format!("{run_seed}, {t}"))?;
            }
            HittingOutcome::TimedOut(_) => f.row(&format!("{run_seed}, timeout"))?,
        }
    }
    println!("wrote {}", f.finish()?.display());

    let timeouts = samples - hits.len();
    if let Some(h) = histogram(&hits, hit.bins) {
        let notes = [
            targets.note.clone(),
            format!("binning = {}", h.description),
            format!("hits = {}, timeouts = {timeouts}", hits.len()),
        ];
        let mut f = ctx.create("hitting_histogram.csv", &notes, "bin_left, bin_right, count")?;
        for (k, count) in h.counts.iter().enumerate() {
            f.row(&format!("{}, {}, {count}", h.edges[k], h.edges[k + 1]))?;
        }
        println!("wrote {}", f.finish()?.display());
    } else {
        println!("no hits within the cap; skipping the histogram");
    }

    if hits.is_empty() {
        println!("{samples} runs, all timed out at {cap} s");
    } else {
        let mean = hits.iter().sum::<f64>() / hits.len() as f64;
        println!(
            "{samples} runs: {} hits, {timeouts} timeouts, mean tau = {mean} s",
            hits.len()
        );
    }

    if hit.curve.unwrap_or(false) {
        write_occupancy_curve(cfg, ctx, seed, samples, &rates, &graph, &targets, &hit)?;
    }
    Ok(())
}

/// Mean excited count over fresh runs on a fixed time grid, normalized by
/// the dominant packing size.
fn write_occupancy_curve(
    _cfg: &ExperimentConfig,
    ctx: &OutputContext,
    seed: u64,
    samples: usize,
    rates: &RateVector,
    graph: &InterferenceGraph,
    targets: &HittingTargets,
    hit: &crate::config::HittingConfig,
) -> Result<()> {
    if targets.packing_size == 0 {
        bail!("cannot normalize the occupancy curve: the target packing is empty");
    }
    let horizon = hit.curve_horizon.unwrap_or(100.0 / rates.min_rate());
    let points = hit.curve_points.unwrap_or(200).max(1);
    let initial = Configuration::empty(graph.n_particles());

    // Streams `samples..2*samples` keep the curve runs independent of the
    // hitting runs under the same master seed.
    let per_run: Vec<Vec<u32>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let traj = simulate(graph, rates, horizon, &initial, subseed(seed, (samples + s) as u64))?;
            Ok(occupancy_on_grid(&traj, horizon, points))
        })
        .collect::<rydnet_core::Result<_>>()?;

    let mut totals = vec![0u64; points + 1];
    for run in &per_run {
        for (t, c) in totals.iter_mut().zip(run) {
            *t += u64::from(*c);
        }
    }

    let scale = samples as f64 * f64::from(targets.packing_size);
    let notes = [
        format!("normalization = mean excited count / {} (dominant packing size)", targets.packing_size),
        format!("runs = {samples} (independent of the hitting runs)"),
        format!("horizon_seconds = {horizon}"),
    ];
    let mut f = ctx.create("occupancy_curve.csv", &notes, "time, mean_excited_normalized")?;
    for (k, total) in totals.iter().enumerate() {
        let t = horizon * k as f64 / points as f64;
        f.row(&format!("{t}, {}", *total as f64 / scale))?;
    }
    println!("wrote {}", f.finish()?.display());
    Ok(())
}

/// Excited counts at `points + 1` evenly spaced times, replaying the
/// trajectory once.
fn occupancy_on_grid(trajectory: &Trajectory, horizon: f64, points: usize) -> Vec<u32> {
    let mut counts = Vec::with_capacity(points + 1);
    let mut current = trajectory.initial().n_excited();
    let mut events = trajectory.events().iter().peekable();
    for k in 0..=points {
        let t = horizon * k as f64 / points as f64;
        while let Some(ev) = events.peek() {
            if ev.time > t {
                break;
            }
            match ev.direction {
                rydnet_core::dynamics::Direction::Up => current += 1,
                rydnet_core::dynamics::Direction::Down => current -= 1,
            }
            events.next();
        }
        counts.push(current);
    }
    counts
}

/// `tune`: stochastic-approximation drive tuning.
pub fn tune(cfg: &ExperimentConfig, ctx: &OutputContext, seed: u64) -> Result<()> {
    let graph = cfg.topology()?.build_graph()?;
    let n = graph.n_particles();
    if cfg.rates.is_some() {
        bail!(
            "tune drives laser amplitudes, so it needs a [physics] section; \
             a [rates] parameterization has no drives to move"
        );
    }
    let physics = cfg
        .physics
        .as_ref()
        .context("tune needs a [physics] section (gamma, omega_r, and the starting omega_e)")?;
    let params = physics.to_laser_params(n)?;
    let tcfg = cfg.tune.clone().unwrap_or_default();
    let targets = tcfg
        .targets
        .as_ref()
        .context("tune needs targets: set [tune].targets")?
        .broadcast(n, "tune.targets")?;
    let schedule = tcfg.build_schedule()?;

    let mut state = TunerState::new(params.omega_e().to_vec(), targets.clone())?;
    match (tcfg.omega_min, tcfg.omega_max) {
        (Some(lo), Some(hi)) => state.set_clamp(lo * TWO_PI_MHZ, hi * TWO_PI_MHZ)?,
        (None, None) => {}
        _ => bail!("tune.omega_min and tune.omega_max must be given together"),
    }

    let estimator = tcfg.estimator.as_deref().unwrap_or("ensemble");
    let omega_r = params.omega_r().to_vec();
    let gamma = params.gamma();
    let (state, exact_outcome) = match estimator {
        "exact" => {
            let result = tune_exact_with(&graph, &omega_r, gamma, state, &schedule)?;
            (result.state, Some((result.converged, result.final_error)))
        }
        "ensemble" => (
            tune_stochastic_with(&graph, &omega_r, gamma, state, &schedule, Estimator::Ensemble, seed)?,
            None,
        ),
        "time_average" => (
            tune_stochastic_with(&graph, &omega_r, gamma, state, &schedule, Estimator::TimeAverage, seed)?,
            None,
        ),
        other => bail!("unknown estimator {other:?} (expected exact, ensemble, or time_average)"),
    };

    let notes = [
        format!("estimator = {estimator}"),
        format!(
            "initial_omega_e_2piMHz = [{}]",
            join(state.initial_omega_e().iter().map(|w| w / TWO_PI_MHZ))
        ),
    ];
    let mut f = ctx.create(
        "tuner_history.csv",
        &notes,
        "n, particle, omega_e_2piMHz, theta_hat, target, a_n",
    )?;
    for (idx, record) in state.history().iter().enumerate() {
        let n_iter = idx + 1;
        for i in 0..n {
            f.row(&format!(
                "{n_iter}, {}, {}, {}, {}, {}",
                i + 1,
                record.omega_e[i] / TWO_PI_MHZ,
                record.theta_hat[i],
                targets[i],
                record.step_size
            ))?;
        }
    }
    println!("wrote {}", f.finish()?.display());

    if let Some(checkpoints) = &tcfg.theta_checkpoints {
        write_theta_checkpoints(ctx, &graph, &state, &omega_r, gamma, &targets, checkpoints)?;
    }

    println!(
        "final omega_e (2pi MHz): [{}]",
        join(state.omega_e().iter().map(|w| w / TWO_PI_MHZ))
    );
    if let Some((converged, error)) = exact_outcome {
        println!(
            "{} after {} iteration(s), max |theta - target| = {error}",
            if converged { "converged" } else { "hit the iteration cap" },
            state.iteration()
        );
    }
    Ok(())
}

/// Exact excitation probabilities of the drives held at selected
/// iterations (0 = before any update).
fn write_theta_checkpoints(
    ctx: &OutputContext,
    graph: &InterferenceGraph,
    state: &TunerState,
    omega_r: &[f64],
    gamma: f64,
    targets: &[f64],
    checkpoints: &[usize],
) -> Result<()> {
    let space = StateSpace::enumerate(graph)
        .context("theta checkpoints need the exact equilibrium, so the state space must fit the enumeration budget")?;
    let mut f = ctx.create("theta_checkpoints.csv", &[], "n, particle, theta, target")?;
    for &ckpt in checkpoints {
        let omega_e = if ckpt == 0 {
            state.initial_omega_e()
        } else {
            &state
                .history()
                .get(ckpt - 1)
                .ok_or_else(|| {
                    anyhow!("theta checkpoint {ckpt} is beyond the {} iterations run", state.iteration())
                })?
                .omega_e
        };
        let params = LaserParams::new(omega_e.to_vec(), omega_r.to_vec(), gamma)?;
        let eq = stationary_distribution(&space, &rates_from_rabi(&params))?;
        for (i, theta) in eq.excitation_probabilities().iter().enumerate() {
            f.row(&format!("{ckpt}, {}, {theta}, {}", i + 1, targets[i]))?;
        }
    }
    println!("wrote {}", f.finish()?.display());
    Ok(())
}

/// `achievable`: can any positive rates produce these excitation
/// probabilities?
pub fn achievable(cfg: &ExperimentConfig, ctx: &OutputContext) -> Result<()> {
    let graph = cfg.topology()?.build_graph()?;
    let n = graph.n_particles();
    let targets = cfg
        .achievable
        .as_ref()
        .and_then(|a| a.targets.as_ref())
        .context("achievable needs targets: set [achievable].targets or pass --targets")?
        .broadcast(n, "achievable.targets")?;

    let space = StateSpace::enumerate(&graph)?;
    let margin = 1e-9 / space.len() as f64;
    let verdict = check_achievable(&space, &targets)?;

    let mut f = ctx.create(
        "achievable_verdict.csv",
        &[format!("targets = [{}]", join(targets.iter().copied()))],
        "achievable, margin, max_residual, infeasibility",
    )?;
    match &verdict {
        Achievability::Achievable { max_residual, .. } => {
            f.row(&format!("true, {margin}, {max_residual}, nan"))?;
        }
        Achievability::NotAchievable { margin, infeasibility } => {
            f.row(&format!("false, {margin}, nan, {infeasibility}"))?;
        }
    }
    println!("wrote {}", f.finish()?.display());

    match verdict {
        Achievability::Achievable { witness, max_residual } => {
            let notes = [format!("reconstruction_residual = {max_residual}")];
            let mut f = ctx.create(
                "achievable_witness.csv",
                &notes,
                "state_index, occupancy_bits, weight",
            )?;
            for (idx, weight) in witness.iter().enumerate() {
                f.row(&format!("{idx}, {}, {weight}", bitstring(&space.state(idx))))?;
            }
            println!("wrote {}", f.finish()?.display());
            println!("achievable: yes (witness residual {max_residual})");
        }
        Achievability::NotAchievable { infeasibility, .. } => {
            println!("achievable: no (constraint violation {infeasibility} at the closest weighting)");
        }
    }
    Ok(())
}

fn join(values: impl Iterator<Item = f64>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// `validate`: schema, topology, physics-regime, schedule, and
/// quick target-feasibility checks, without running anything.
pub fn validate(cfg: &ExperimentConfig, regime_factor: f64) -> Result<()> {
    let mut oks: Vec<String> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut errors: Vec<String> = Vec::new();

    let graph = match cfg.topology().and_then(|t| t.build_graph()) {
        Ok(g) => {
            oks.push(format!(
                "topology: {} particles, {} interference edge(s)",
                g.n_particles(),
                g.n_edges()
            ));
            Some(g)
        }
        Err(e) => {
            errors.push(format!("{e:#}"));
            None
        }
    };

    match (&cfg.physics, &cfg.rates) {
        (Some(_), Some(_)) => errors.push(
            "both [physics] and [rates] are set; exactly one parameterization is allowed".into(),
        ),
        (Some(p), None) => {
            let n = graph.as_ref().map_or(1, InterferenceGraph::n_particles);
            match p.to_laser_params(n) {
                Ok(params) => {
                    let rates = rates_from_rabi(&params);
                    oks.push(format!(
                        "physics: nu in [{}, {}] /s, mu in [{}, {}] /s",
                        min_of(rates.nu()),
                        max_of(rates.nu()),
                        min_of(rates.mu()),
                        max_of(rates.mu()),
                    ));
                    match check_validity(&params, regime_factor) {
                        Ok(regime) => {
                            for w in regime {
                                warnings.push(format!("rate-equation regime: {w}"));
                            }
                        }
                        Err(e) => errors.push(format!("{e:#}")),
                    }
                }
                Err(e) => errors.push(format!("{e:#}")),
            }
        }
        (None, Some(r)) => {
            let n = graph.as_ref().map_or(1, InterferenceGraph::n_particles);
            match r.to_rate_vector(n) {
                Ok(_) => oks.push("rates: valid".into()),
                Err(e) => errors.push(format!("{e:#}")),
            }
        }
        (None, None) => warnings.push(
            "no [physics] or [rates] section; commands will need one (or --rho)".into(),
        ),
    }

    if let Some(tune) = &cfg.tune {
        match tune.build_schedule() {
            Ok(schedule) => {
                let schedule_warnings = validate_schedule(&schedule);
                if schedule_warnings.is_empty() {
                    oks.push("tune schedule: conditions satisfied".into());
                }
                for w in schedule_warnings {
                    warnings.push(format!("tune schedule: {w}"));
                }
                if let Some(checkpoints) = &tune.theta_checkpoints {
                    for &c in checkpoints {
                        if c > schedule.max_iterations() {
                            errors.push(format!(
                                "tune.theta_checkpoints: {c} is beyond max_iterations = {}",
                                schedule.max_iterations()
                            ));
                        }
                    }
                }
            }
            Err(e) => errors.push(format!("{e:#}")),
        }
        let estimator = tune.estimator.as_deref().unwrap_or("ensemble");
        if !matches!(estimator, "exact" | "ensemble" | "time_average") {
            errors.push(format!("unknown estimator {estimator:?}"));
        }
        check_targets(&graph, cfg, tune.targets.as_ref(), "tune.targets", &mut errors);
    }

    if let Some(ach) = &cfg.achievable {
        check_targets(&graph, cfg, ach.targets.as_ref(), "achievable.targets", &mut errors);
    }

    if let (Some(hit), Some(g)) = (&cfg.hitting, &graph) {
        if let Some(strings) = &hit.targets {
            for s in strings {
                match parse_bitstring(s, g.n_particles(), "hitting.targets") {
                    Ok(c) => match rydnet_core::statespace::is_feasible(&c, g) {
                        Ok(true) => {}
                        Ok(false) => errors.push(format!("hitting.targets: {s} is infeasible")),
                        Err(e) => errors.push(format!("{e:#}")),
                    },
                    Err(e) => errors.push(format!("{e:#}")),
                }
            }
        }
        if hit.samples == Some(0) {
            errors.push("hitting.samples must be at least 1".into());
        }
    }

    if let Some(sim) = &cfg.simulate {
        if let Some(h) = sim.horizon {
            if !(h.is_finite() && h > 0.0) {
                errors.push(format!("simulate.horizon must be positive and finite, got {h}"));
            }
        }
        if let Some(g) = &graph {
            if let Err(e) = to_zero_based(&sim.initial, g.n_particles(), "simulate.initial") {
                errors.push(format!("{e:#}"));
            }
        }
    }

    for line in &oks {
        println!("ok: {line}");
    }
    for line in &warnings {
        println!("warning: {line}");
    }
    for line in &errors {
        println!("error: {line}");
    }
    if !errors.is_empty() {
        bail!("invalid config: {} error(s)", errors.len());
    }
    if warnings.is_empty() {
        println!("valid, no warnings");
    } else {
        println!("valid, {} warning(s)", warnings.len());
    }
    Ok(())
}

/// Fast necessary conditions on targets, surfaced before any simulation:
/// each target must lie in (0,1), targets of mutually blocking particles
/// must sum below 1, and on a line every window of b+1 consecutive
/// particles (a blocking clique) must sum below 1.
fn check_targets(
    graph: &Option<InterferenceGraph>,
    cfg: &ExperimentConfig,
    targets: Option<&ScalarOrVec>,
    what: &str,
    errors: &mut Vec<String>,
) {
    let (Some(graph), Some(targets)) = (graph, targets) else {
        return;
    };
    let n = graph.n_particles();
    let phi = match targets.broadcast(n, what) {
        Ok(phi) => phi,
        Err(e) => {
            errors.push(format!("{e:#}"));
            return;
        }
    };
    for (i, &p) in phi.iter().enumerate() {
        if !(p.is_finite() && p > 0.0 && p < 1.0) {
            errors.push(format!(
                "{what}: infeasible target: particle {} target {p} is outside (0, 1)",
                i + 1
            ));
            return;
        }
    }
    for (i, j) in graph.edges() {
        if phi[i] + phi[j] >= 1.0 {
            errors.push(format!(
                "{what}: infeasible target: particles {} and {} block each other, so their \
                 targets must sum below 1 (got {})",
                i + 1,
                j + 1,
                phi[i] + phi[j]
            ));
            return;
        }
    }
    if let Some(topo) = &cfg.topology {
        if topo.kind == "line" {
            if let Some(b) = topo.b {
                let window = (b + 1).min(n);
                for start in 0..=(n - window) {
                    let sum: f64 = phi[start..start + window].iter().sum();
                    if sum >= 1.0 {
                        errors.push(format!(
                            "{what}: infeasible target: particles {}..{} mutually block, so \
                             their targets must sum below 1 (got {sum})",
                            start + 1,
                            start + window
                        ));
                        return;
                    }
                }
            }
        }
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
