//! Iterative tuning of per-particle drive strengths toward target
//! excitation probabilities.
//!
//! Each iteration estimates the per-particle excitation probabilities
//! θ̂ under the current drives and applies the multiplicative update
//! Ω_e,i ← Ω_e,i · exp(−(a/2)(θ̂_i − φ_i)), which leaves Ω_e positive and
//! has the target φ as its fixed point. The estimate can come from exact
//! enumeration (deterministic, for verification), from independent
//! restarted samples, or from time averages along one persistent
//! realization. For blocking-range line graphs the fixed point is known in
//! closed form, and a linear feasibility solve decides whether a target is
//! reachable at all.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{estimate_ensemble, Walker};
use crate::equilibrium::{stationary_distribution, RateVector};
use crate::error::{invalid, Error, Result};
use crate::graph::{blocking_count, InterferenceGraph};
use crate::math;
use crate::physics::{rates_from_rabi, LaserParams};
use crate::rng;
use crate::simplex::{self, Feasibility};
use crate::statespace::{set_bits, Configuration, StateSpace};

/// Largest state space the achievability solver will accept; the dense
/// feasibility tableau has one column per state.
pub const ACHIEVABLE_STATE_CAP: usize = 200_000;

/// Convergence tolerance on max |θ_i − φ_i| for the exact tuning loop.
pub const EXACT_TOLERANCE: f64 = 1e-6;

/// Step-size sequence a(n), defined for iterations n >= 1.
#[derive(Debug, Clone, PartialEq)]
pub enum StepRule {
    /// a(n) = value for every n. Zero is allowed and makes updates no-ops.
    Constant(f64),
    /// a(n) = scale · n^(−exponent).
    PowerLaw {
        /// Positive prefactor.
        scale: f64,
        /// Decay exponent p; summability conditions hold for 1/2 < p <= 1.
        exponent: f64,
    },
    /// a(n) = scale / (offset + √n).
    SqrtDamped {
        /// Positive prefactor.
        scale: f64,
        /// Nonnegative additive damping in the denominator.
        offset: f64,
    },
    /// Explicit per-iteration values; iterations past the end clamp to the
    /// last entry.
    Table(Vec<f64>),
}

impl StepRule {
    /// The step size at iteration `n` (1-based).
    #[must_use]
    pub fn at(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match self {
            StepRule::Constant(a) => *a,
            StepRule::PowerLaw { scale, exponent } => scale * math::powf(n as f64, -exponent),
            StepRule::SqrtDamped { scale, offset } => scale / (offset + math::sqrt(n as f64)),
            StepRule::Table(values) => values[(n - 1).min(values.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            StepRule::Constant(a) if a.is_finite() && *a >= 0.0 => Ok(()),
            StepRule::PowerLaw { scale, exponent }
                if scale.is_finite() && *scale > 0.0 && exponent.is_finite() =>
            {
                Ok(())
            }
            StepRule::SqrtDamped { scale, offset }
                if scale.is_finite() && *scale > 0.0 && offset.is_finite() && *offset >= 0.0 =>
            {
                Ok(())
            }
            StepRule::Table(values)
                if !values.is_empty() && values.iter().all(|a| a.is_finite() && *a >= 0.0) =>
            {
                Ok(())
            }
            _ => Err(invalid!("step-size rule has non-positive or non-finite parameters")),
        }
    }

    /// Asymptotic decay exponent p with a(n) ~ n^(−p); tables clamp to
    /// their last entry and so behave as constants.
    fn decay_exponent(&self) -> f64 {
        match self {
            StepRule::Constant(_) | StepRule::Table(_) => 0.0,
            StepRule::PowerLaw { exponent, .. } => *exponent,
            StepRule::SqrtDamped { .. } => 0.5,
        }
    }

    /// True when a(n) = 0 from some iteration onward (trivially summable).
    fn eventually_zero(&self) -> bool {
        match self {
            StepRule::Constant(a) => *a == 0.0,
            StepRule::Table(values) => *values.last().expect("validated nonempty") == 0.0,
            _ => false,
        }
    }
}

/// Per-sample time horizon T(n) in seconds, defined for n >= 1.
#[derive(Debug, Clone, PartialEq)]
pub enum HorizonRule {
    /// T(n) = value for every n.
    Constant(f64),
    /// T(n) = scale · n^exponent.
    PowerLaw {
        /// Positive prefactor in seconds.
        scale: f64,
        /// Growth exponent.
        exponent: f64,
    },
    /// Explicit values; clamps to the last entry.
    Table(Vec<f64>),
}

impl HorizonRule {
    /// The horizon at iteration `n` (1-based), in seconds.
    #[must_use]
    pub fn at(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match self {
            HorizonRule::Constant(t) => *t,
            HorizonRule::PowerLaw { scale, exponent } => scale * math::powf(n as f64, *exponent),
            HorizonRule::Table(values) => values[(n - 1).min(values.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            HorizonRule::Constant(t) if t.is_finite() && *t > 0.0 => Ok(()),
            HorizonRule::PowerLaw { scale, exponent }
                if scale.is_finite() && *scale > 0.0 && exponent.is_finite() =>
            {
                Ok(())
            }
            HorizonRule::Table(values)
                if !values.is_empty() && values.iter().all(|t| t.is_finite() && *t > 0.0) =>
            {
                Ok(())
            }
            _ => Err(invalid!("horizon rule has non-positive or non-finite parameters")),
        }
    }

    fn growth_exponent(&self) -> f64 {
        match self {
            HorizonRule::Constant(_) | HorizonRule::Table(_) => 0.0,
            HorizonRule::PowerLaw { exponent, .. } => *exponent,
        }
    }
}

/// Sample count m(n), defined for n >= 1.
#[derive(Debug, Clone, PartialEq)]
pub enum CountRule {
    /// m(n) = value for every n.
    Constant(usize),
    /// m(n) = max(1, round(scale · n^exponent)).
    PowerLaw {
        /// Positive prefactor.
        scale: f64,
        /// Growth exponent.
        exponent: f64,
    },
    /// Explicit values; clamps to the last entry.
    Table(Vec<usize>),
}

impl CountRule {
    /// The sample count at iteration `n` (1-based); always at least 1.
    #[must_use]
    pub fn at(&self, n: usize) -> usize {
        debug_assert!(n >= 1);
        match self {
            CountRule::Constant(m) => *m,
            CountRule::PowerLaw { scale, exponent } => {
                let raw = scale * math::powf(n as f64, *exponent);
                (math::round(raw) as usize).max(1)
            }
            CountRule::Table(values) => values[(n - 1).min(values.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            CountRule::Constant(m) if *m >= 1 => Ok(()),
            CountRule::PowerLaw { scale, exponent }
                if scale.is_finite() && *scale > 0.0 && exponent.is_finite() =>
            {
                Ok(())
            }
            CountRule::Table(values) if !values.is_empty() && values.iter().all(|m| *m >= 1) => {
                Ok(())
            }
            _ => Err(invalid!("sample-count rule must yield at least one sample")),
        }
    }

    fn growth_exponent(&self) -> f64 {
        match self {
            CountRule::Constant(_) | CountRule::Table(_) => 0.0,
            CountRule::PowerLaw { exponent, .. } => *exponent,
        }
    }
}

/// Full iteration schedule: step sizes, per-sample horizons, sample
/// counts, and the iteration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    step: StepRule,
    horizon: HorizonRule,
    count: CountRule,
    max_iterations: usize,
}

impl Schedule {
    /// Builds a schedule, validating every rule's parameters.
    pub fn new(
        step: StepRule,
        horizon: HorizonRule,
        count: CountRule,
        max_iterations: usize,
    ) -> Result<Self> {
        step.validate()?;
        horizon.validate()?;
        count.validate()?;
        if max_iterations == 0 {
            return Err(invalid!("max_iterations must be at least 1"));
        }
        Ok(Self {
            step,
            horizon,
            count,
            max_iterations,
        })
    }

    /// Step-size rule a(n).
    #[must_use]
    pub fn step(&self) -> &StepRule {
        &self.step
    }

    /// Horizon rule T(n).
    #[must_use]
    pub fn horizon(&self) -> &HorizonRule {
        &self.horizon
    }

    /// Sample-count rule m(n).
    #[must_use]
    pub fn count(&self) -> &CountRule {
        &self.count
    }

    /// Iteration cap.
    #[must_use]
    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }
}

/// One recorded iteration: the drive vector after the update, the estimate
/// that drove it, and the step size used.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Drive amplitudes after the update, rad/s.
    pub omega_e: Vec<f64>,
    /// Excitation-probability estimate the update was based on.
    pub theta_hat: Vec<f64>,
    /// Step size applied.
    pub step_size: f64,
}

/// Evolving tuner state: current drives, fixed targets, the full
/// iteration history, and an optional box the drives are clamped into.
#[derive(Debug, Clone, PartialEq)]
pub struct TunerState {
    initial_omega_e: Vec<f64>,
    omega_e: Vec<f64>,
    targets: Vec<f64>,
    history: Vec<IterationRecord>,
    clamp: Option<(f64, f64)>,
}

impl TunerState {
    /// Starts a tuning run at the given drive amplitudes (rad/s) and
    /// targets; targets must lie strictly inside (0, 1).
    pub fn new(omega_e: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        if omega_e.len() != targets.len() {
            return Err(invalid!(
                "{} drive amplitudes for {} targets",
                omega_e.len(),
                targets.len()
            ));
        }
        if omega_e.is_empty() {
            return Err(invalid!("tuner needs at least one particle"));
        }
        if !omega_e.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(invalid!("drive amplitudes must be positive and finite"));
        }
        if !targets.iter().all(|p| p.is_finite() && *p > 0.0 && *p < 1.0) {
            return Err(invalid!("targets must lie strictly between 0 and 1"));
        }
        Ok(Self {
            initial_omega_e: omega_e.clone(),
            omega_e,
            targets,
            history: Vec::new(),
            clamp: None,
        })
    }

    /// Restricts all future (and the current) drive amplitudes to
    /// [min, max], rad/s. Off by default: the multiplicative update keeps
    /// drives positive on its own.
    pub fn set_clamp(&mut self, min: f64, max: f64) -> Result<()> {
        if !(min.is_finite() && max.is_finite() && min > 0.0 && min <= max) {
            return Err(invalid!("clamp bounds must satisfy 0 < min <= max"));
        }
        self.clamp = Some((min, max));
        for w in &mut self.omega_e {
            *w = w.clamp(min, max);
        }
        Ok(())
    }

    /// The drive clamp, if one is set.
    #[must_use]
    pub fn clamp_bounds(&self) -> Option<(f64, f64)> {
        self.clamp
    }

    /// Number of particles being tuned.
    #[must_use]
    pub fn n_particles(&self) -> usize {
        self.omega_e.len()
    }

    /// Completed iteration count.
    #[must_use]
    pub fn iteration(&self) -> usize {
        self.history.len()
    }

    /// Drive amplitudes before any update, rad/s.
    #[must_use]
    pub fn initial_omega_e(&self) -> &[f64] {
        &self.initial_omega_e
    }

    /// Current drive amplitudes, rad/s.
    #[must_use]
    pub fn omega_e(&self) -> &[f64] {
        &self.omega_e
    }

    /// Target excitation probabilities.
    #[must_use]
    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// All recorded iterations, oldest first.
    #[must_use]
    pub fn history(&self) -> &[IterationRecord] {
        &self.history
    }
}

/// Applies one multiplicative update: Ω_e,i ← Ω_e,i · exp(−(a/2)(θ̂_i − φ_i)).
///
/// An estimate above target damps that particle's drive, one below boosts
/// it, and θ̂ = φ changes nothing. A step size of zero is allowed and
/// leaves the state unchanged apart from the history entry.
pub fn tune_step(state: &mut TunerState, theta_hat: &[f64], a: f64) -> Result<()> {
    if theta_hat.len() != state.n_particles() {
        return Err(invalid!(
            "estimate covers {} particles, state has {}",
            theta_hat.len(),
            state.n_particles()
        ));
    }
    if !theta_hat.iter().all(|t| t.is_finite() && (0.0..=1.0).contains(t)) {
        return Err(invalid!("estimates must lie in [0, 1]"));
    }
    if !a.is_finite() || a < 0.0 {
        return Err(invalid!("step size must be nonnegative and finite, got {a}"));
    }
    for (w, (t, phi)) in state
        .omega_e
        .iter_mut()
        .zip(theta_hat.iter().zip(&state.targets))
    {
        *w *= math::exp(-0.5 * a * (t - phi));
        if let Some((min, max)) = state.clamp {
            *w = w.clamp(min, max);
        }
    }
    state.history.push(IterationRecord {
        omega_e: state.omega_e.clone(),
        theta_hat: theta_hat.to_vec(),
        step_size: a,
    });
    Ok(())
}

/// Outcome of a tuning run that can measure its own error exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    /// Final tuner state with the full history.
    pub state: TunerState,
    /// Whether max |θ_i − φ_i| reached [`EXACT_TOLERANCE`] before the
    /// iteration cap.
    pub converged: bool,
    /// max |θ_i − φ_i| at the final drives.
    pub final_error: f64,
}

fn validate_run_inputs(
    graph: &InterferenceGraph,
    omega_r: &[f64],
    gamma: f64,
    state: &TunerState,
) -> Result<()> {
    let n = graph.n_particles();
    if omega_r.len() != n {
        return Err(invalid!(
            "{} lower-drive amplitudes for {n} particles",
            omega_r.len()
        ));
    }
    if state.n_particles() != n {
        return Err(invalid!(
            "tuner state covers {} particles, graph has {n}",
            state.n_particles()
        ));
    }
    // Drive positivity is re-checked by LaserParams at every iteration;
    // gamma is validated here so errors surface before any enumeration.
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(invalid!("gamma must be positive and finite, got {gamma}"));
    }
    Ok(())
}

fn exact_theta(
    space: &StateSpace,
    omega_e: &[f64],
    omega_r: &[f64],
    gamma: f64,
) -> Result<Vec<f64>> {
    let params = LaserParams::new(omega_e.to_vec(), omega_r.to_vec(), gamma)?;
    let rates = rates_from_rabi(&params);
    let eq = stationary_distribution(space, &rates)?;
    Ok(eq.excitation_probabilities().to_vec())
}

fn max_abs_error(theta: &[f64], targets: &[f64]) -> f64 {
    theta
        .iter()
        .zip(targets)
        .map(|(t, phi)| (t - phi).abs())
        .fold(0.0, f64::max)
}

/// Deterministic tuning loop: each iteration computes the exact
/// equilibrium excitation probabilities by enumeration and feeds them to
/// [`tune_step`]. Starts from Ω_e = Ω_r and stops once
/// max |θ_i − φ_i| <= [`EXACT_TOLERANCE`] or at the iteration cap,
/// whichever comes first.
pub fn tune_exact(
    graph: &InterferenceGraph,
    omega_r: &[f64],
    gamma: f64,
    targets: &[f64],
    schedule: &Schedule,
) -> Result<TuneResult> {
    let state = TunerState::new(omega_r.to_vec(), targets.to_vec())?;
    tune_exact_with(graph, omega_r, gamma, state, schedule)
}

/// [`tune_exact`] from an explicit starting state, for callers overriding
/// the default Ω_e = Ω_r start or clamping the drives.
pub fn tune_exact_with(
    graph: &InterferenceGraph,
    omega_r: &[f64],
    gamma: f64,
    mut state: TunerState,
    schedule: &Schedule,
) -> Result<TuneResult> {
    validate_run_inputs(graph, omega_r, gamma, &state)?;
    let space = StateSpace::enumerate(graph)?;
    let mut theta = exact_theta(&space, state.omega_e(), omega_r, gamma)?;
    let mut error = max_abs_error(&theta, state.targets());
    let mut converged = error <= EXACT_TOLERANCE;
    while !converged && state.iteration() < schedule.max_iterations() {
        let n = state.iteration() + 1;
        let theta_now = theta;
        tune_step(&mut state, &theta_now, schedule.step().at(n))?;
        theta = exact_theta(&space, state.omega_e(), omega_r, gamma)?;
        error = max_abs_error(&theta, state.targets());
        converged = error <= EXACT_TOLERANCE;
    }
    Ok(TuneResult {
        state,
        converged,
        final_error: error,
    })
}

/// Which stochastic estimate drives the updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// m(n) independent restarts from all-ground, each run to T(n); θ̂_i is
    /// the fraction ending with particle i excited.
    Ensemble,
    /// One persistent realization; θ̂_i is the fraction of the iteration's
    /// window (of length m(n)·T(n)) spent excited.
    TimeAverage,
}

/// Stochastic tuning loop: per iteration, estimates θ̂ with the chosen
/// estimator and applies [`tune_step`]; always runs the schedule's full
/// iteration count and returns the complete history for inspection.
///
/// Reproducibility: iteration n of the ensemble variant draws from seeds
/// derived from `(seed, n)`, with one stream per sample; the time-average
/// variant consumes a single stream continuously. Reruns with the same
/// arguments give identical histories.
pub fn tune_stochastic(
    graph: &InterferenceGraph,
    omega_r: &[f64],
    gamma: f64,
    targets: &[f64],
    schedule: &Schedule,
    estimator: Estimator,
    seed: u64,
) -> Result<TunerState> {
    let state = TunerState::new(omega_r.to_vec(), targets.to_vec())?;
    tune_stochastic_with(graph, omega_r, gamma, state, schedule, estimator, seed)
}

/// [`tune_stochastic`] from an explicit starting state, for callers
/// overriding the default Ω_e = Ω_r start or clamping the drives.
pub fn tune_stochastic_with(
    graph: &InterferenceGraph,
    omega_r: &[f64],
    gamma: f64,
    mut state: TunerState,
    schedule: &Schedule,
    estimator: Estimator,
    seed: u64,
) -> Result<TunerState> {
    validate_run_inputs(graph, omega_r, gamma, &state)?;
    let n_particles = graph.n_particles();

    let rates_at = |omega_e: &[f64]| -> Result<RateVector> {
        let params = LaserParams::new(omega_e.to_vec(), omega_r.to_vec(), gamma)?;
        Ok(rates_from_rabi(&params))
    };

    match estimator {
        Estimator::Ensemble => {
            for n in 1..=schedule.max_iterations() {
                let rates = rates_at(state.omega_e())?;
                let theta_hat = estimate_ensemble(
                    graph,
                    &rates,
                    schedule.count().at(n),
                    schedule.horizon().at(n),
                    rng::subseed(seed, n as u64),
                )?;
                tune_step(&mut state, &theta_hat, schedule.step().at(n))?;
            }
        }
        Estimator::TimeAverage => {
            let initial = Configuration::empty(n_particles);
            let mut walker = Walker::new(
                graph,
                &rates_at(state.omega_e())?,
                &initial,
                rng::stream_rng(seed, 0),
            )?;
            let mut occupied = vec![0.0f64; n_particles];
            for n in 1..=schedule.max_iterations() {
                walker.set_rates(&rates_at(state.omega_e())?)?;
                let window = schedule.count().at(n) as f64 * schedule.horizon().at(n);
                occupied.fill(0.0);
                walker.occupancy_window(window, &mut occupied);
                let theta_hat: Vec<f64> =
                    occupied.iter().map(|o| (o / window).clamp(0.0, 1.0)).collect();
                tune_step(&mut state, &theta_hat, schedule.step().at(n))?;
            }
        }
    }
    Ok(state)
}

/// Closed-form drive amplitudes that put every particle of a
/// blocking-range-`b` line at excitation probability `phi`.
///
/// With w(i) the number of particles blocked by particle i, the squared
/// drive ratio is (Ω_e,i/Ω_r)² = [φ/(1−(1+b)φ)] · κ^(w(i)−w(0)) where
/// κ = (1−bφ)/(1−(1+b)φ). Requires 0 < φ < 1/(1+b); at or beyond that
/// bound no positive drives reach the target.
pub fn line_analytic_solution(n: usize, b: usize, phi: f64, omega_r: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid!("line must have at least one particle"));
    }
    if !omega_r.is_finite() || omega_r <= 0.0 {
        return Err(invalid!(
            "lower-drive amplitude must be positive and finite, got {omega_r}"
        ));
    }
    if !phi.is_finite() || phi <= 0.0 {
        return Err(invalid!("target must be positive, got {phi}"));
    }
    let b_eff = b as f64;
    let tail = 1.0 - (1.0 + b_eff) * phi;
    if tail <= 0.0 {
        return Err(Error::InfeasibleTarget(format!(
            "uniform target {phi} requires phi < 1/(1+b) = {}; no drive vector reaches it",
            1.0 / (1.0 + b_eff)
        )));
    }
    let base = phi / tail;
    let kappa = (1.0 - b_eff * phi) / tail;
    let w0 = blocking_count(n, b, 0)?;
    let mut omega_e = Vec::with_capacity(n);
    for i in 0..n {
        let w = blocking_count(n, b, i)?;
        // Exponents w(i) − w(0) are small integers; symmetric particles
        // get bit-identical drives.
        let diff = w as i32 - w0 as i32;
        let ratio_sq = base * math::powf(kappa, f64::from(diff));
        omega_e.push(omega_r * math::sqrt(ratio_sq));
    }
    Ok(omega_e)
}

/// Verdict of the achievability test.
#[derive(Debug, Clone, PartialEq)]
pub enum Achievability {
    /// The target is a strictly positive convex combination of feasible
    /// configurations; `witness` gives one such weighting (indexed like
    /// the state space) and `max_residual` its worst reconstruction error.
    Achievable {
        /// Per-state weights, all at least the positivity margin.
        witness: Vec<f64>,
        /// max over particles of |Σ_σ α_σ σ_i − φ_i|, and |Σ α − 1|.
        max_residual: f64,
    },
    /// No such combination exists with weights at least `margin`; targets
    /// on the region's boundary are reported this way too.
    NotAchievable {
        /// Positivity margin δ = 1e−9 / |S| that was required.
        margin: f64,
        /// Total constraint violation at the closest weighting found.
        infeasibility: f64,
    },
}

impl Achievability {
    /// True for the achievable verdict.
    #[must_use]
    pub fn is_achievable(&self) -> bool {
        matches!(self, Achievability::Achievable { .. })
    }
}

/// Decides whether target probabilities `phi` can be realized as the
/// excitation probabilities of some equilibrium, i.e. whether φ lies in
/// the open convex hull of the feasible configurations.
///
/// Solved as linear feasibility: find weights α_σ ≥ δ with Σα = 1 and
/// Σ α_σ σ = φ, where δ = 1e−9/|S| stands in for strict positivity (the
/// open boundary itself is numerically inaccessible). Any returned
/// witness is re-verified to 1e−8; verification failure is a solver
/// error, distinct from a clean "not achievable".
pub fn check_achievable(space: &StateSpace, phi: &[f64]) -> Result<Achievability> {
    let n = space.graph().n_particles();
    if phi.len() != n {
        return Err(invalid!("{} targets for {n} particles", phi.len()));
    }
    if !phi.iter().all(|p| p.is_finite() && *p > 0.0 && *p < 1.0) {
        return Err(invalid!("targets must lie strictly between 0 and 1"));
    }
    let n_states = space.len();
    if n_states > ACHIEVABLE_STATE_CAP {
        return Err(Error::CapacityExceeded {
            cap: ACHIEVABLE_STATE_CAP,
            reached: n_states,
        });
    }
    let delta = 1e-9 / n_states as f64;

    // Equality system over the shifted weights β = α − δ >= 0:
    // rows 0..n are the per-particle occupancy constraints, the last row
    // is total mass. Column s is state s.
    let rows = n + 1;
    let mut a = vec![0.0f64; rows * n_states];
    let mut excited_count = vec![0usize; n];
    for (s, words) in space.iter().enumerate() {
        for i in set_bits(words) {
            a[i * n_states + s] = 1.0;
            excited_count[i] += 1;
        }
        a[n * n_states + s] = 1.0;
    }
    let mut b = Vec::with_capacity(rows);
    for i in 0..n {
        b.push(phi[i] - delta * excited_count[i] as f64);
    }
    b.push(1.0 - delta * n_states as f64);

    match simplex::solve(&a, rows, n_states, &b, 0.5 * delta)? {
        Feasibility::Infeasible { infeasibility } => Ok(Achievability::NotAchievable {
            margin: delta,
            infeasibility,
        }),
        Feasibility::Feasible(beta) => {
            let witness: Vec<f64> = beta.iter().map(|w| w + delta).collect();
            let mut max_residual = 0.0f64;
            for i in 0..n {
                let mut acc = 0.0;
                for (s, w) in witness.iter().enumerate() {
                    acc += a[i * n_states + s] * w;
                }
                max_residual = max_residual.max((acc - phi[i]).abs());
            }
            let mass: f64 = witness.iter().sum();
            max_residual = max_residual.max((mass - 1.0).abs());
            if max_residual > 1e-8 {
                return Err(Error::SolverFailure(format!(
                    "achievability witness failed verification (residual {max_residual:.3e})"
                )));
            }
            Ok(Achievability::Achievable {
                witness,
                max_residual,
            })
        }
    }
}

/// A schedule property that undermines convergence of the stochastic
/// tuning loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleWarning {
    /// The step sizes have a finite sum, so the total movement the loop
    /// can ever make is bounded and it may stall short of the target.
    StepsSummable,
    /// The squared step sizes do not have a finite sum, so estimate noise
    /// is never averaged out and the iterates keep fluctuating.
    StepsNotSquareSummable,
    /// Per-iteration simulated time m(n)·T(n) grows too slowly relative
    /// to the step sizes for the noise conditions to hold.
    WindowGrowthTooSlow,
}

impl core::fmt::Display for ScheduleWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScheduleWarning::StepsSummable => f.write_str(
                "step sizes are summable; updates may stall before reaching the target",
            ),
            ScheduleWarning::StepsNotSquareSummable => f.write_str(
                "squared step sizes are not summable; iterates may fluctuate indefinitely",
            ),
            ScheduleWarning::WindowGrowthTooSlow => f.write_str(
                "per-iteration simulated time grows too slowly for the step sizes",
            ),
        }
    }
}

/// Checks the standard stochastic-approximation conditions symbolically
/// for the built-in rule families: Σ a(n) should diverge, Σ a(n)² should
/// converge, and Σ a(n)/(m(n)·T(n)) should converge. Tables clamp to
/// their last entry, so they are classified as eventually constant.
#[must_use]
pub fn validate_schedule(schedule: &Schedule) -> Vec<ScheduleWarning> {
    let mut warnings = Vec::new();
    if schedule.step().eventually_zero() {
        // a(n) -> 0 exactly: every series converges, including Σ a(n).
        warnings.push(ScheduleWarning::StepsSummable);
        return warnings;
    }
    let p = schedule.step().decay_exponent();
    if p > 1.0 {
        warnings.push(ScheduleWarning::StepsSummable);
    }
    if p <= 0.5 {
        warnings.push(ScheduleWarning::StepsNotSquareSummable);
    }
    let window_growth =
        schedule.horizon().growth_exponent() + schedule.count().growth_exponent();
    if p + window_growth <= 1.0 {
        warnings.push(ScheduleWarning::WindowGrowthTooSlow);
    }
    warnings
}
