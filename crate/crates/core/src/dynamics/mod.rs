//! The stochastic process itself: generator matrices over the enumerated
//! state space, exact transient solutions of the master equation,
//! event-driven simulation, hitting times, and the two Monte Carlo
//! estimators of the excitation probabilities.

mod ode;
mod walker;

pub use walker::{
    default_hitting_cap, estimate_ensemble, estimate_time_average, hitting_time, simulate,
    Direction, Event, HittingOutcome, Trajectory,
};

pub(crate) use walker::Walker;

use alloc::vec::Vec;

use crate::equilibrium::RateVector;
use crate::error::{invalid, Error, Result};
use crate::statespace::{set_bits, StateSpace};

/// Sparse transition-rate matrix Q over the canonical state order.
///
/// Off-diagonal entries are the single-particle flip rates: σ → σ + e_i at
/// rate ν_i when the excitation stays feasible, σ → σ − e_i at rate μ_i when
/// particle i is excited. The diagonal is the negative row sum, so every row
/// sums to zero exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    n_states: usize,
    n_particles: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    rate: Vec<f64>,
    diag: Vec<f64>,
}

impl Generator {
    /// Builds the generator for a complete state space and rate vector.
    pub fn build(space: &StateSpace, rates: &RateVector) -> Result<Self> {
        let n = space.graph().n_particles();
        if rates.len() != n {
            return Err(invalid!(
                "rates cover {} particles, graph has {n}",
                rates.len()
            ));
        }
        let graph = space.graph();
        let wps = space.words_per_state();
        let n_states = space.len();

        let mut row_ptr = Vec::with_capacity(n_states + 1);
        let mut col_idx = Vec::new();
        let mut rate = Vec::new();
        let mut diag = Vec::with_capacity(n_states);
        row_ptr.push(0);

        let mut blocked = alloc::vec![0u64; wps];
        let mut target = alloc::vec![0u64; wps];
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(n);

        for a in 0..n_states {
            let sigma = space.state_words(a);
            blocked.fill(0);
            for i in set_bits(sigma) {
                for (b, m) in blocked.iter_mut().zip(graph.neighbor_mask(i)) {
                    *b |= m;
                }
            }
            row.clear();
            let mut out_rate = 0.0;
            for i in 0..n {
                let word = i / 64;
                let bit = 1u64 << (i % 64);
                target.copy_from_slice(sigma);
                let r = if sigma[word] & bit != 0 {
                    target[word] &= !bit;
                    rates.mu()[i]
                } else if blocked[word] & bit == 0 {
                    target[word] |= bit;
                    rates.nu()[i]
                } else {
                    continue;
                };
                let b = space
                    .index_of_words(&target)
                    .ok_or_else(|| Error::SolverFailure(alloc::format!(
                        "state space is not closed under single flips at state {a}"
                    )))?;
                row.push((b, r));
                out_rate += r;
            }
            row.sort_unstable_by_key(|&(b, _)| b);
            for &(b, r) in &row {
                col_idx.push(b);
                rate.push(r);
            }
            diag.push(-out_rate);
            row_ptr.push(col_idx.len());
        }

        Ok(Self {
            n_states,
            n_particles: n,
            row_ptr,
            col_idx,
            rate,
            diag,
        })
    }

    /// Number of states (matrix dimension).
    #[must_use]
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// Number of particles of the underlying graph.
    #[must_use]
    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    /// Number of nonzero off-diagonal entries.
    #[must_use]
    pub fn nnz_off_diagonal(&self) -> usize {
        self.col_idx.len()
    }

    /// Off-diagonal columns and rates of row `a`, sorted by column.
    #[must_use]
    pub fn row(&self, a: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[a]..self.row_ptr[a + 1];
        (&self.col_idx[span.clone()], &self.rate[span])
    }

    /// Diagonal entry of row `a` (the negative total exit rate).
    #[must_use]
    pub fn diagonal(&self, a: usize) -> f64 {
        self.diag[a]
    }

    /// Entry Q_ab; zero when the states are not a single flip apart.
    #[must_use]
    pub fn rate(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return self.diag[a];
        }
        let (cols, rates) = self.row(a);
        match cols.binary_search(&b) {
            Ok(k) => rates[k],
            Err(_) => 0.0,
        }
    }

    /// Writes `out = p·Q` (the row-vector product of the forward equation).
    pub fn apply_row_vector(&self, p: &[f64], out: &mut [f64]) {
        debug_assert_eq!(p.len(), self.n_states);
        debug_assert_eq!(out.len(), self.n_states);
        out.fill(0.0);
        for a in 0..self.n_states {
            let pa = p[a];
            if pa == 0.0 {
                continue;
            }
            out[a] += pa * self.diag[a];
            let (cols, rates) = self.row(a);
            for (&b, &r) in cols.iter().zip(rates) {
                out[b] += pa * r;
            }
        }
    }
}

/// Solves the forward (master) equation dp/dt = pQ from `p0` to time `t` by
/// adaptive Dormand-Prince integration (relative tolerance 1e-9, absolute
/// 1e-12), then clamps vanishing negatives and renormalizes.
pub fn transient_solve(generator: &Generator, p0: &[f64], t: f64) -> Result<Vec<f64>> {
    if p0.len() != generator.n_states() {
        return Err(invalid!(
            "p0 has {} entries, generator has {} states",
            p0.len(),
            generator.n_states()
        ));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(invalid!("time must be nonnegative and finite, got {t}"));
    }
    if p0.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(invalid!("p0 entries must be nonnegative and finite"));
    }
    let total: f64 = p0.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid!("p0 must sum to 1, got {total}"));
    }
    if t == 0.0 {
        return Ok(p0.to_vec());
    }

    let mut p = ode::integrate(
        &|y: &[f64], dy: &mut [f64]| generator.apply_row_vector(y, dy),
        p0,
        t,
        &ode::Options::default(),
    )?;

    let mut sum = 0.0;
    for entry in &mut p {
        if *entry < 0.0 {
            if *entry < -1e-6 {
                return Err(Error::SolverFailure(alloc::format!(
                    "transient probability fell to {entry}, beyond tolerance"
                )));
            }
            *entry = 0.0;
        }
        sum += *entry;
    }
    if !(sum.is_finite() && sum > 0.0) {
        return Err(Error::SolverFailure(alloc::format!(
            "transient mass degenerated to {sum}"
        )));
    }
    for entry in &mut p {
        *entry /= sum;
    }
    Ok(p)
}

/// Convenience: the index of a configuration in the generator's canonical
/// order is the state space's; checking feasibility first gives friendlier
/// errors at the CLI boundary.
pub fn point_mass(space: &StateSpace, at: &crate::Configuration) -> Result<Vec<f64>> {
    let idx = space
        .index_of(at)
        .ok_or_else(|| invalid!("configuration {at} is not a feasible state of this space"))?;
    let mut p0 = alloc::vec![0.0; space.len()];
    p0[idx] = 1.0;
    Ok(p0)
}
