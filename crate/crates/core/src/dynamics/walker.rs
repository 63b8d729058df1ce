//! Event-driven (kinetic Monte Carlo) realization of the flip process.
//!
//! The standard race construction: the process holds for an exponential
//! time at the total enabled rate, then one enabled flip is selected with
//! probability proportional to its rate. A ground particle with an excited
//! neighbor contributes no activation clock, so feasibility is invariant by
//! construction. The walker works directly on packed configurations and
//! never enumerates the state space, which is what lets it scale to
//! thousands of particles.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use crate::equilibrium::RateVector;
use crate::error::{invalid, Result};
use crate::graph::InterferenceGraph;
use crate::rng;
use crate::statespace::{is_feasible, Configuration};

/// Flip direction of one event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Ground to excited (activation at rate ν).
    Up,
    /// Excited to ground (deactivation at rate μ).
    Down,
}

/// One jump of the process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    /// Absolute event time in seconds.
    pub time: f64,
    /// 0-based particle that flipped.
    pub particle: usize,
    /// Flip direction.
    pub direction: Direction,
}

/// A complete realization over a horizon: the initial configuration plus
/// the strictly increasing event sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    initial: Configuration,
    events: Vec<Event>,
    horizon: f64,
    seed: u64,
}

impl Trajectory {
    /// The configuration at time zero.
    #[must_use]
    pub fn initial(&self) -> &Configuration {
        &self.initial
    }

    /// All jumps, in strictly increasing time order.
    #[must_use]
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// The simulated horizon in seconds.
    #[must_use]
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// The seed this trajectory was generated from.
    #[must_use]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The configuration at time `t`, replaying events up to and including
    /// `t`. Times before zero give the initial configuration; times at or
    /// past the horizon give the final one.
    #[must_use]
    pub fn configuration_at(&self, t: f64) -> Configuration {
        let mut cfg = self.initial.clone();
        for ev in &self.events {
            if ev.time > t {
                break;
            }
            cfg.set(ev.particle, ev.direction == Direction::Up);
        }
        cfg
    }

    /// The configuration at the horizon.
    #[must_use]
    pub fn final_configuration(&self) -> Configuration {
        self.configuration_at(self.horizon)
    }
}

/// Hitting-time verdict: the first time a target was reached, or a timeout
/// at the cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HittingOutcome {
    /// A target configuration was reached at this time (seconds).
    Hit(f64),
    /// No target was reached before the cap (seconds).
    TimedOut(f64),
}

impl HittingOutcome {
    /// The hitting time, if there was one.
    #[must_use]
    pub fn time(&self) -> Option<f64> {
        match *self {
            HittingOutcome::Hit(t) => Some(t),
            HittingOutcome::TimedOut(_) => None,
        }
    }
}

/// Mutable simulation state: packed occupancy, per-particle excited
/// neighbor counts, and the owned RNG.
pub(crate) struct Walker<'g> {
    graph: &'g InterferenceGraph,
    nu: Vec<f64>,
    mu: Vec<f64>,
    words: Vec<u64>,
    blocked: Vec<u32>,
    t: f64,
    rng: ChaCha8Rng,
}

impl<'g> Walker<'g> {
    pub(crate) fn new(
        graph: &'g InterferenceGraph,
        rates: &RateVector,
        initial: &Configuration,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if rates.len() != graph.n_particles() {
            return Err(invalid!(
                "rates cover {} particles, graph has {}",
                rates.len(),
                graph.n_particles()
            ));
        }
        if !is_feasible(initial, graph)? {
            return Err(invalid!("initial configuration {initial} is infeasible"));
        }
        let n = graph.n_particles();
        let mut blocked = vec![0u32; n];
        for i in initial.excited() {
            for &j in graph.neighbors(i) {
                blocked[j] += 1;
            }
        }
        Ok(Self {
            graph,
            nu: rates.nu().to_vec(),
            mu: rates.mu().to_vec(),
            words: initial.words().to_vec(),
            blocked,
            t: 0.0,
            rng,
        })
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Swaps in new rates; the configuration and clock carry over.
    pub(crate) fn set_rates(&mut self, rates: &RateVector) -> Result<()> {
        if rates.len() != self.graph.n_particles() {
            return Err(invalid!(
                "rates cover {} particles, graph has {}",
                rates.len(),
                self.graph.n_particles()
            ));
        }
        self.nu.copy_from_slice(rates.nu());
        self.mu.copy_from_slice(rates.mu());
        Ok(())
    }

    #[inline]
    fn is_excited(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Total enabled rate: μ over excited particles, ν over unblocked
    /// ground ones. Strictly positive (an all-blocked ground particle would
    /// need an excited neighbor, and excited particles always may decay).
    fn total_rate(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.graph.n_particles() {
            if self.is_excited(i) {
                total += self.mu[i];
            } else if self.blocked[i] == 0 {
                total += self.nu[i];
            }
        }
        total
    }

    /// Advances to the next event, or to `horizon` (returning `None`) when
    /// the next event would land beyond it. Event times are strictly
    /// increasing.
    pub(crate) fn next_event(&mut self, horizon: f64) -> Option<Event> {
        debug_assert!(self.t <= horizon);
        let total = self.total_rate();
        debug_assert!(total > 0.0);
        let dt = rng::exponential(&mut self.rng, total);
        let mut t_next = self.t + dt;
        if t_next > horizon {
            self.t = horizon;
            return None;
        }
        if t_next <= self.t {
            t_next = self.t.next_up();
            if t_next > horizon {
                self.t = horizon;
                return None;
            }
        }

        // Proportional selection over the same enumeration order as
        // total_rate; the final enabled flip absorbs rounding slack.
        let mut target = rng::uniform(&mut self.rng) * total;
        let mut chosen = usize::MAX;
        let mut direction = Direction::Up;
        for i in 0..self.graph.n_particles() {
            let rate = if self.is_excited(i) {
                self.mu[i]
            } else if self.blocked[i] == 0 {
                self.nu[i]
            } else {
                continue;
            };
            chosen = i;
            direction = if self.is_excited(i) {
                Direction::Down
            } else {
                Direction::Up
            };
            target -= rate;
            if target < 0.0 {
                break;
            }
        }
        debug_assert_ne!(chosen, usize::MAX);

        self.t = t_next;
        self.flip(chosen, direction);
        Some(Event {
            time: t_next,
            particle: chosen,
            direction,
        })
    }

    fn flip(&mut self, i: usize, direction: Direction) {
        match direction {
            Direction::Up => {
                debug_assert!(!self.is_excited(i) && self.blocked[i] == 0);
                self.words[i / 64] |= 1 << (i % 64);
                for &j in self.graph.neighbors(i) {
                    self.blocked[j] += 1;
                }
            }
            Direction::Down => {
                debug_assert!(self.is_excited(i));
                self.words[i / 64] &= !(1 << (i % 64));
                for &j in self.graph.neighbors(i) {
                    debug_assert!(self.blocked[j] > 0);
                    self.blocked[j] -= 1;
                }
            }
        }
    }

    /// Runs for `duration` more seconds, adding each particle's occupied
    /// time within that window into `acc`.
    pub(crate) fn occupancy_window(&mut self, duration: f64, acc: &mut [f64]) {
        debug_assert_eq!(acc.len(), self.graph.n_particles());
        debug_assert!(duration > 0.0);
        let start = self.t;
        let end = start + duration;
        let mut since = vec![start; self.graph.n_particles()];
        while let Some(ev) = self.next_event(end) {
            if ev.direction == Direction::Down {
                acc[ev.particle] += ev.time - since[ev.particle];
            } else {
                since[ev.particle] = ev.time;
            }
        }
        for i in 0..self.graph.n_particles() {
            if self.is_excited(i) {
                acc[i] += end - since[i];
            }
        }
    }
}

/// Simulates one exact event-driven realization over `[0, horizon]`.
///
/// Identical `(graph, rates, horizon, initial, seed)` always produce the
/// identical trajectory.
pub fn simulate(
    graph: &InterferenceGraph,
    rates: &RateVector,
    horizon: f64,
    initial: &Configuration,
    seed: u64,
) -> Result<Trajectory> {
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(invalid!("horizon must be positive and finite, got {horizon}"));
    }
    let mut walker = Walker::new(graph, rates, initial, rng::stream_rng(seed, 0))?;
    let mut events = Vec::new();
    while let Some(ev) = walker.next_event(horizon) {
        events.push(ev);
    }
    Ok(Trajectory {
        initial: initial.clone(),
        events,
        horizon,
        seed,
    })
}

/// Default hitting-time cap: 10^4 over the smallest rate.
#[must_use]
pub fn default_hitting_cap(rates: &RateVector) -> f64 {
    1e4 / rates.min_rate()
}

/// First time the process, started from the all-ground configuration,
/// equals any target; `TimedOut` if the cap elapses first.
pub fn hitting_time(
    graph: &InterferenceGraph,
    rates: &RateVector,
    targets: &[Configuration],
    seed: u64,
    cap: f64,
) -> Result<HittingOutcome> {
    if targets.is_empty() {
        return Err(invalid!("hitting time needs at least one target"));
    }
    if !cap.is_finite() || cap <= 0.0 {
        return Err(invalid!("cap must be positive and finite, got {cap}"));
    }
    for target in targets {
        if !is_feasible(target, graph)? {
            return Err(invalid!("target {target} is infeasible"));
        }
    }
    let initial = Configuration::empty(graph.n_particles());
    if targets.iter().any(|t| *t == initial) {
        return Ok(HittingOutcome::Hit(0.0));
    }
    let target_words: Vec<&[u64]> = targets.iter().map(|t| t.words()).collect();
    let mut walker = Walker::new(graph, rates, &initial, rng::stream_rng(seed, 0))?;
    while let Some(ev) = walker.next_event(cap) {
        if target_words.iter().any(|tw| *tw == walker.words()) {
            return Ok(HittingOutcome::Hit(ev.time));
        }
    }
    Ok(HittingOutcome::TimedOut(cap))
}

/// Ensemble estimator: m independent restarts from all-ground, each run to
/// the horizon; θ̂_i is the fraction of runs with particle i excited at the
/// horizon.
///
/// Sample s draws from stream s of the seed, and the per-particle counts
/// are integers, so the result is bit-identical no matter how samples are
/// scheduled across threads.
pub fn estimate_ensemble(
    graph: &InterferenceGraph,
    rates: &RateVector,
    sample_count: usize,
    sample_horizon: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if sample_count == 0 {
        return Err(invalid!("ensemble estimation needs at least one sample"));
    }
    if !sample_horizon.is_finite() || sample_horizon <= 0.0 {
        return Err(invalid!(
            "sample horizon must be positive and finite, got {sample_horizon}"
        ));
    }
    let n = graph.n_particles();
    if rates.len() != n {
        return Err(invalid!("rates cover {} particles, graph has {n}", rates.len()));
    }
    let initial = Configuration::empty(n);

    let run = |s: usize| -> Vec<u64> {
        let mut walker = Walker::new(graph, rates, &initial, rng::stream_rng(seed, s as u64))
            .expect("validated inputs");
        while walker.next_event(sample_horizon).is_some() {}
        walker.words().to_vec()
    };

    #[cfg(feature = "parallel")]
    let finals: Vec<Vec<u64>> = {
        use rayon::prelude::*;
        (0..sample_count).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let finals: Vec<Vec<u64>> = (0..sample_count).map(run).collect();

    let mut counts = vec![0u64; n];
    for words in &finals {
        for i in crate::statespace::set_bits(words) {
            counts[i] += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / sample_count as f64)
        .collect())
}

/// Time-average estimator: θ̂_i is the fraction of the window during which
/// particle i was excited in the given trajectory.
pub fn estimate_time_average(
    trajectory: &Trajectory,
    window_start: f64,
    window_end: f64,
) -> Result<Vec<f64>> {
    if !(window_start >= 0.0 && window_start < window_end && window_end <= trajectory.horizon()) {
        return Err(invalid!(
            "window [{window_start}, {window_end}] must be non-empty and inside [0, {}]",
            trajectory.horizon()
        ));
    }
    let n = trajectory.initial().n_particles();
    let mut acc = vec![0.0; n];
    let mut since = vec![0.0f64; n];
    let mut excited = vec![false; n];
    for i in trajectory.initial().excited() {
        excited[i] = true;
    }
    for ev in trajectory.events() {
        match ev.direction {
            Direction::Up => {
                excited[ev.particle] = true;
                since[ev.particle] = ev.time;
            }
            Direction::Down => {
                excited[ev.particle] = false;
                let overlap = ev.time.min(window_end) - since[ev.particle].max(window_start);
                if overlap > 0.0 {
                    acc[ev.particle] += overlap;
                }
            }
        }
    }
    for i in 0..n {
        if excited[i] {
            let overlap = window_end - since[i].max(window_start);
            if overlap > 0.0 {
                acc[i] += overlap;
            }
        }
    }
    let len = window_end - window_start;
    Ok(acc.into_iter().map(|a| a / len).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::InterferenceGraph;
    use crate::statespace::{is_feasible, StateSpace};

    fn single() -> InterferenceGraph {
        InterferenceGraph::from_edges(1, &[]).unwrap()
    }

    #[test]
    fn simulate_is_deterministic() {
        let g = single();
        let rates = RateVector::new(vec![2.0], vec![3.0]).unwrap();
        let init = Configuration::empty(1);
        let a = simulate(&g, &rates, 50.0, &init, 42).unwrap();
        let b = simulate(&g, &rates, 50.0, &init, 42).unwrap();
        assert_eq!(a, b);
        assert!(!a.events().is_empty());
        let c = simulate(&g, &rates, 50.0, &init, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn event_times_strictly_increase_and_stay_feasible() {
        let g = InterferenceGraph::lattice(3, 3).unwrap();
        let rates = RateVector::from_ratio(9, 5.0).unwrap();
        let traj = simulate(&g, &rates, 20.0, &Configuration::empty(9), 7).unwrap();
        let mut prev = 0.0;
        for ev in traj.events() {
            assert!(ev.time > prev);
            assert!(ev.time <= traj.horizon());
            prev = ev.time;
            let cfg = traj.configuration_at(ev.time);
            assert!(is_feasible(&cfg, &g).unwrap());
        }
    }

    #[test]
    fn blocked_pair_never_joint_excited() {
        let g = InterferenceGraph::from_edges(2, &[(0, 1)]).unwrap();
        let rates = RateVector::from_ratio(2, 50.0).unwrap();
        let traj = simulate(&g, &rates, 100.0, &Configuration::empty(2), 3).unwrap();
        for ev in traj.events() {
            let cfg = traj.configuration_at(ev.time);
            assert!(!(cfg.is_excited(0) && cfg.is_excited(1)));
        }
    }

    #[test]
    fn simulate_validates_input() {
        let g = InterferenceGraph::from_edges(2, &[(0, 1)]).unwrap();
        let rates = RateVector::from_ratio(2, 1.0).unwrap();
        let bad: Configuration = "11".parse().unwrap();
        assert!(simulate(&g, &rates, 1.0, &bad, 0).is_err());
        let init = Configuration::empty(2);
        assert!(simulate(&g, &rates, 0.0, &init, 0).is_err());
        assert!(simulate(&g, &rates, f64::NAN, &init, 0).is_err());
    }

    #[test]
    fn occupied_fraction_matches_two_state_law() {
        let nu = 2.0;
        let mu = 3.0;
        let g = single();
        let rates = RateVector::new(vec![nu], vec![mu]).unwrap();
        let horizon = 20_000.0;
        let traj = simulate(&g, &rates, horizon, &Configuration::empty(1), 11).unwrap();
        let theta = estimate_time_average(&traj, 0.1 * horizon, horizon).unwrap();
        let expect = nu / (nu + mu);
        // Rough standard error for the ergodic average of the two-state
        // chain over ~1.8e4 time units: well under 0.01 at these rates.
        assert!((theta[0] - expect).abs() < 0.01, "theta = {}", theta[0]);
    }

    #[test]
    fn time_average_trivial_windows() {
        let g = single();
        // No events, excited throughout.
        let traj = Trajectory {
            initial: "1".parse().unwrap(),
            events: Vec::new(),
            horizon: 2.0,
            seed: 0,
        };
        assert_eq!(estimate_time_average(&traj, 0.0, 2.0).unwrap(), vec![1.0]);
        // No events, ground throughout.
        let traj = Trajectory {
            initial: "0".parse().unwrap(),
            events: Vec::new(),
            horizon: 2.0,
            seed: 0,
        };
        assert_eq!(estimate_time_average(&traj, 0.5, 1.5).unwrap(), vec![0.0]);
        assert!(estimate_time_average(&traj, 1.5, 1.5).is_err());
        assert!(estimate_time_average(&traj, 0.0, 3.0).is_err());
        let _ = g;
    }

    #[test]
    fn hitting_time_trivial_and_distributional() {
        let g = single();
        let nu = 2.0;
        let rates = RateVector::new(vec![nu], vec![3.0]).unwrap();
        // Initial state already in targets.
        let outcome =
            hitting_time(&g, &rates, &[Configuration::empty(1)], 0, 10.0).unwrap();
        assert_eq!(outcome, HittingOutcome::Hit(0.0));

        // First hit of {1} is Exp(nu): empirical mean within 3 SE.
        let target: Configuration = "1".parse().unwrap();
        let m = 10_000;
        let mut sum = 0.0;
        for s in 0..m {
            match hitting_time(&g, &rates, core::slice::from_ref(&target), rng::subseed(99, s), 1e4).unwrap() {
                HittingOutcome::Hit(t) => sum += t,
                HittingOutcome::TimedOut(_) => panic!("two-state chain cannot time out here"),
            }
        }
        let mean = sum / m as f64;
        let se = (1.0 / nu) / (m as f64).sqrt();
        assert!((mean - 1.0 / nu).abs() < 3.0 * se, "mean = {mean}");
    }

    #[test]
    fn hitting_time_validates_targets() {
        let g = InterferenceGraph::from_edges(2, &[(0, 1)]).unwrap();
        let rates = RateVector::from_ratio(2, 1.0).unwrap();
        assert!(hitting_time(&g, &rates, &[], 0, 1.0).is_err());
        let bad: Configuration = "11".parse().unwrap();
        assert!(hitting_time(&g, &rates, &[bad], 0, 1.0).is_err());
    }

    #[test]
    fn hitting_time_can_time_out() {
        // Tiny activation rate and a short cap: the excited target is
        // essentially never reached.
        let g = single();
        let rates = RateVector::new(vec![1e-8], vec![1.0]).unwrap();
        let target: Configuration = "1".parse().unwrap();
        let outcome = hitting_time(&g, &rates, &[target], 5, 1e-3).unwrap();
        assert_eq!(outcome, HittingOutcome::TimedOut(1e-3));
    }

    #[test]
    fn ensemble_estimator_two_state() {
        let nu = 2.0;
        let mu = 3.0;
        let g = single();
        let rates = RateVector::new(vec![nu], vec![mu]).unwrap();
        let m = 10_000;
        // Horizon far beyond the relaxation time 1/(nu+mu).
        let theta = estimate_ensemble(&g, &rates, m, 10.0, 21).unwrap();
        let expect = nu / (nu + mu);
        let se = (expect * (1.0 - expect) / m as f64).sqrt();
        assert!((theta[0] - expect).abs() < 3.0 * se, "theta = {}", theta[0]);
    }

    #[test]
    fn ensemble_single_sample_is_indicator() {
        let g = single();
        let rates = RateVector::new(vec![1000.0], vec![1e-3]).unwrap();
        // Overwhelming activation: the single sample ends excited.
        let theta = estimate_ensemble(&g, &rates, 1, 10.0, 0).unwrap();
        assert_eq!(theta, vec![1.0]);
    }

    #[test]
    fn ensemble_respects_blocking() {
        let g = InterferenceGraph::from_edges(2, &[(0, 1)]).unwrap();
        let rates = RateVector::from_ratio(2, 30.0).unwrap();
        let theta = estimate_ensemble(&g, &rates, 2000, 5.0, 17).unwrap();
        assert!(theta[0] + theta[1] <= 1.0 + 1e-12);
    }

    #[test]
    fn ensemble_agrees_with_exact_equilibrium() {
        let g = InterferenceGraph::line(5, 1).unwrap();
        let rates = RateVector::from_ratio(5, 1.0).unwrap();
        let s = StateSpace::enumerate(&g).unwrap();
        let eq = crate::equilibrium::stationary_distribution(&s, &rates).unwrap();
        let m = 20_000;
        let theta = estimate_ensemble(&g, &rates, m, 100.0, 1234).unwrap();
        for (got, want) in theta.iter().zip(eq.excitation_probabilities()) {
            let se = (want * (1.0 - want) / m as f64).sqrt();
            assert!((got - want).abs() < 3.5 * se, "got {got}, want {want}");
        }
    }

    #[test]
    fn walker_window_accumulation_matches_trajectory_replay() {
        let g = InterferenceGraph::line(4, 1).unwrap();
        let rates = RateVector::from_ratio(4, 2.0).unwrap();
        let horizon = 50.0;
        let traj = simulate(&g, &rates, horizon, &Configuration::empty(4), 5).unwrap();
        let replay = estimate_time_average(&traj, 0.0, horizon).unwrap();

        let mut walker = Walker::new(
            &g,
            &rates,
            &Configuration::empty(4),
            rng::stream_rng(5, 0),
        )
        .unwrap();
        let mut acc = vec![0.0; 4];
        walker.occupancy_window(horizon, &mut acc);
        for (a, b) in acc.iter().map(|a| a / horizon).zip(&replay) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
