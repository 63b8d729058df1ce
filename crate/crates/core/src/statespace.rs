//! Feasible configurations (independent sets of the interference graph) and
//! their exact enumeration.
//!
//! A configuration assigns each particle ground (0) or excited (1); it is
//! feasible when no two blocked particles are excited together. The set S of
//! feasible configurations is the state space of the Markov process; its
//! maximum-occupancy members (maximum independent sets) are the dominant
//! configurations that carry almost all equilibrium mass at large rate
//! ratios.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::graph::InterferenceGraph;

/// Default enumeration budget: at most this many feasible states.
pub const DEFAULT_STATE_BUDGET: usize = 50_000_000;

/// Occupancy vector packed little-endian: particle 0 is bit 0 of word 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    n: usize,
    words: Vec<u64>,
}

impl Configuration {
    /// Words needed for `n` particles.
    #[inline]
    #[must_use]
    pub fn words_for(n: usize) -> usize {
        n.div_ceil(64)
    }

    /// All-ground configuration over `n` particles.
    #[must_use]
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; Self::words_for(n)],
        }
    }

    /// Builds from a ground/excited flag per particle.
    #[must_use]
    pub fn from_occupancy(bits: &[bool]) -> Self {
        let mut cfg = Self::empty(bits.len());
        for (i, &set) in bits.iter().enumerate() {
            if set {
                cfg.words[i / 64] |= 1u64 << (i % 64);
            }
        }
        cfg
    }

    /// Builds the configuration over `n` particles with the given ones
    /// excited.
    pub fn from_excited(n: usize, excited: &[usize]) -> Result<Self> {
        let mut cfg = Self::empty(n);
        for &i in excited {
            if i >= n {
                return Err(invalid!("particle index {i} out of range for n = {n}"));
            }
            cfg.words[i / 64] |= 1u64 << (i % 64);
        }
        Ok(cfg)
    }

    pub(crate) fn from_words(n: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), Self::words_for(n));
        Self { n, words }
    }

    /// Number of particles N.
    #[inline]
    #[must_use]
    pub fn n_particles(&self) -> usize {
        self.n
    }

    /// Packed occupancy words.
    #[inline]
    #[must_use]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Whether particle `i` is excited.
    #[inline]
    #[must_use]
    pub fn is_excited(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Sets particle `i` ground or excited.
    pub fn set(&mut self, i: usize, excited: bool) {
        debug_assert!(i < self.n);
        if excited {
            self.words[i / 64] |= 1u64 << (i % 64);
        } else {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    /// Number of excited particles.
    #[must_use]
    pub fn n_excited(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Indices of the excited particles, ascending.
    pub fn excited(&self) -> impl Iterator<Item = usize> + '_ {
        set_bits(&self.words)
    }
}

/// Iterates the set bit positions of a packed bitset, ascending.
pub(crate) fn set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut bits = word;
        core::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(w * 64 + b)
        })
    })
}

/// True when two packed bitsets share a set bit.
#[inline]
pub(crate) fn words_intersect(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// Orders packed words as the integers they encode (most significant word
/// first). This is the canonical state order.
#[inline]
pub(crate) fn cmp_words(a: &[u64], b: &[u64]) -> core::cmp::Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            core::cmp::Ordering::Equal => {}
            other => return other,
        }
    }
    core::cmp::Ordering::Equal
}

impl PartialOrd for Configuration {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Configuration {
    /// Integer order of the packed occupancy value; comparing
    /// configurations of different lengths orders by length first.
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| cmp_words(&self.words, &other.words))
    }
}

impl core::fmt::Display for Configuration {
    /// Occupancy string with particle 1 leftmost, e.g. `"100"` for a
    /// three-particle state whose first particle is excited.
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.is_excited(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl core::fmt::Debug for Configuration {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Configuration({self})")
    }
}

impl core::str::FromStr for Configuration {
    type Err = Error;

    /// Parses an occupancy string of `0`/`1` characters, particle 1 first.
    fn from_str(s: &str) -> Result<Self> {
        let mut cfg = Self::empty(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => cfg.set(i, true),
                _ => return Err(invalid!("occupancy strings use only 0 and 1, got {c:?}")),
            }
        }
        if cfg.n == 0 {
            return Err(invalid!("empty occupancy string"));
        }
        Ok(cfg)
    }
}

/// True iff no blocked pair is simultaneously excited.
pub fn is_feasible(config: &Configuration, graph: &InterferenceGraph) -> Result<bool> {
    if config.n_particles() != graph.n_particles() {
        return Err(invalid!(
            "configuration has {} particles, graph has {}",
            config.n_particles(),
            graph.n_particles()
        ));
    }
    Ok(config
        .excited()
        .all(|i| !words_intersect(config.words(), graph.neighbor_mask(i))))
}

/// The complete, canonically ordered set S of feasible configurations.
///
/// States are stored contiguously (`words_per_state` words each) in
/// ascending order of their packed occupancy integer, so indices are
/// deterministic and lookups are binary searches. Immutable after
/// enumeration.
#[derive(Debug, Clone)]
pub struct StateSpace {
    graph: InterferenceGraph,
    words_per_state: usize,
    arena: Vec<u64>,
    max_occupancy: u32,
}

impl StateSpace {
    /// Enumerates all feasible configurations with the default budget of
    /// [`DEFAULT_STATE_BUDGET`] states.
    pub fn enumerate(graph: &InterferenceGraph) -> Result<Self> {
        Self::enumerate_with_budget(graph, DEFAULT_STATE_BUDGET)
    }

    /// Enumerates all feasible configurations, failing with a capacity
    /// error if there are more than `budget` of them.
    ///
    /// Two passes: count first, then fill an exactly sized arena, so peak
    /// memory is `count × words_per_state × 8` bytes with no growth slack.
    pub fn enumerate_with_budget(graph: &InterferenceGraph, budget: usize) -> Result<Self> {
        if budget == 0 {
            return Err(invalid!("enumeration budget must be at least 1"));
        }
        let n = graph.n_particles();
        let words_per_state = Configuration::words_for(n);

        let arena = if n <= 64 {
            let masks: Vec<u64> = (0..n).map(|i| graph.neighbor_mask(i)[0]).collect();
            let mut count = 0usize;
            walk_word(n, 0, 0, &masks, &mut |_| bump(&mut count, budget))?;
            let mut arena = Vec::with_capacity(count);
            walk_word(n, 0, 0, &masks, &mut |occ| {
                arena.push(occ);
                Ok(())
            })?;
            debug_assert_eq!(arena.len(), count);
            arena
        } else {
            let mut count = 0usize;
            let mut scratch = WideWalk::new(graph);
            scratch.walk(&mut |_| bump(&mut count, budget))?;
            let mut arena = Vec::with_capacity(count * words_per_state);
            let mut scratch = WideWalk::new(graph);
            scratch.walk(&mut |occ| {
                arena.extend_from_slice(occ);
                Ok(())
            })?;
            debug_assert_eq!(arena.len(), count * words_per_state);
            arena
        };

        let max_occupancy = arena
            .chunks_exact(words_per_state)
            .map(|s| s.iter().map(|w| w.count_ones()).sum())
            .max()
            .unwrap_or(0);

        Ok(Self {
            graph: graph.clone(),
            words_per_state,
            arena,
            max_occupancy,
        })
    }

    /// Number of feasible configurations |S|.
    #[must_use]
    pub fn len(&self) -> usize {
        self.arena.len() / self.words_per_state
    }

    /// S always contains the all-ground state, so it is never empty.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The interference graph this space was enumerated from.
    #[must_use]
    pub fn graph(&self) -> &InterferenceGraph {
        &self.graph
    }

    /// Words per stored state.
    #[must_use]
    pub fn words_per_state(&self) -> usize {
        self.words_per_state
    }

    /// Packed words of state `idx`.
    #[inline]
    #[must_use]
    pub fn state_words(&self, idx: usize) -> &[u64] {
        &self.arena[idx * self.words_per_state..(idx + 1) * self.words_per_state]
    }

    /// State `idx` as an owned configuration.
    #[must_use]
    pub fn state(&self, idx: usize) -> Configuration {
        Configuration::from_words(self.graph.n_particles(), self.state_words(idx).to_vec())
    }

    /// Number of excited particles in state `idx`.
    #[must_use]
    pub fn occupancy(&self, idx: usize) -> u32 {
        self.state_words(idx).iter().map(|w| w.count_ones()).sum()
    }

    /// Iterates the packed states in canonical (ascending) order.
    pub fn iter(&self) -> impl Iterator<Item = &[u64]> + '_ {
        self.arena.chunks_exact(self.words_per_state)
    }

    /// Canonical index of a configuration, or `None` when it is infeasible
    /// or sized for a different graph.
    #[must_use]
    pub fn index_of(&self, config: &Configuration) -> Option<usize> {
        if config.n_particles() != self.graph.n_particles() {
            return None;
        }
        self.index_of_words(config.words())
    }

    /// Canonical index of a packed state, or `None` when absent.
    #[must_use]
    pub fn index_of_words(&self, words: &[u64]) -> Option<usize> {
        debug_assert_eq!(words.len(), self.words_per_state);
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match cmp_words(self.state_words(mid), words) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Largest occupancy over S.
    #[must_use]
    pub fn max_occupancy(&self) -> u32 {
        self.max_occupancy
    }

    /// All dominant configurations: the feasible states of maximum
    /// occupancy (the maximum independent sets), in canonical order.
    #[must_use]
    pub fn maximum_independent_sets(&self) -> Vec<Configuration> {
        self.dominant_indices()
            .into_iter()
            .map(|i| self.state(i))
            .collect()
    }

    /// Canonical indices of the dominant configurations.
    #[must_use]
    pub fn dominant_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.occupancy(i) == self.max_occupancy)
            .collect()
    }
}

fn bump(count: &mut usize, budget: usize) -> Result<()> {
    if *count == budget {
        return Err(Error::CapacityExceeded {
            cap: budget,
            reached: budget,
        });
    }
    *count += 1;
    Ok(())
}

/// Depth-first walk over feasible subsets of particles [0, n) packed in one
/// word. Particles are decided from the highest index down with the ground
/// branch first, which emits states in ascending integer order.
fn walk_word(
    depth: usize,
    occ: u64,
    blocked: u64,
    masks: &[u64],
    visit: &mut impl FnMut(u64) -> Result<()>,
) -> Result<()> {
    if depth == 0 {
        return visit(occ);
    }
    let i = depth - 1;
    walk_word(i, occ, blocked, masks, visit)?;
    if blocked >> i & 1 == 0 {
        walk_word(i, occ | 1 << i, blocked | masks[i], masks, visit)?;
    }
    Ok(())
}

/// The same walk for graphs beyond 64 particles: occupancy words plus a
/// blocked-neighbor counter per particle, both updated incrementally.
struct WideWalk<'g> {
    graph: &'g InterferenceGraph,
    occ: Vec<u64>,
    blocked: Vec<u32>,
}

impl<'g> WideWalk<'g> {
    fn new(graph: &'g InterferenceGraph) -> Self {
        Self {
            graph,
            occ: vec![0; Configuration::words_for(graph.n_particles())],
            blocked: vec![0; graph.n_particles()],
        }
    }

    fn walk(&mut self, visit: &mut impl FnMut(&[u64]) -> Result<()>) -> Result<()> {
        self.descend(self.graph.n_particles(), visit)
    }

    fn descend(&mut self, depth: usize, visit: &mut impl FnMut(&[u64]) -> Result<()>) -> Result<()> {
        if depth == 0 {
            return visit(&self.occ);
        }
        let i = depth - 1;
        self.descend(i, visit)?;
        if self.blocked[i] == 0 {
            self.occ[i / 64] |= 1 << (i % 64);
            for j in 0..self.graph.neighbors(i).len() {
                let nb = self.graph.neighbors(i)[j];
                self.blocked[nb] += 1;
            }
            self.descend(i, visit)?;
            for j in 0..self.graph.neighbors(i).len() {
                let nb = self.graph.neighbors(i)[j];
                self.blocked[nb] -= 1;
            }
            self.occ[i / 64] &= !(1 << (i % 64));
        }
        Ok(())
    }
}
