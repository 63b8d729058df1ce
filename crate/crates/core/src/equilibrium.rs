//! Exact stationary analysis of the hard-core flip process.
//!
//! With activation rates ν and deactivation rates μ the chain is reversible
//! with the product-form stationary law π_σ ∝ Π_i (ν_i/μ_i)^{σ_i} over the
//! feasible set S. Everything here works in log-space so rate ratios up to
//! 10^6 on dozens of particles never overflow.

use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::Generator;
use crate::error::{invalid, Result};
use crate::math;
use crate::statespace::{set_bits, StateSpace};

/// Guard added to the denominator of relative residuals so zero-rate
/// transitions do not produce 0/0.
const RESIDUAL_GUARD: f64 = 1e-300;

/// Per-particle activation (ν) and deactivation (μ) rates, units 1/time.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector {
    nu: Vec<f64>,
    mu: Vec<f64>,
}

impl RateVector {
    /// Builds from per-particle rate vectors; all entries must be strictly
    /// positive and finite, and the lengths must match.
    pub fn new(nu: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if nu.is_empty() || nu.len() != mu.len() {
            return Err(invalid!(
                "rate vectors must be non-empty and equally long, got {} and {}",
                nu.len(),
                mu.len()
            ));
        }
        for (i, (&n, &m)) in nu.iter().zip(&mu).enumerate() {
            if !math::is_positive_finite(n) || !math::is_positive_finite(m) {
                return Err(invalid!("rates must be positive and finite, particle {i} has nu = {n}, mu = {m}"));
            }
        }
        Ok(Self { nu, mu })
    }

    /// Same activation and deactivation rate for every particle.
    pub fn uniform(n: usize, nu: f64, mu: f64) -> Result<Self> {
        Self::new(vec![nu; n], vec![mu; n])
    }

    /// Uniform rates with ratio `rho`: ν = rho, μ = 1.
    pub fn from_ratio(n: usize, rho: f64) -> Result<Self> {
        Self::uniform(n, rho, 1.0)
    }

    /// Number of particles.
    #[must_use]
    pub fn len(&self) -> usize {
        self.nu.len()
    }

    /// Rate vectors are never empty.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Activation rates ν.
    #[must_use]
    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Deactivation rates μ.
    #[must_use]
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Ratio ν_i/μ_i.
    #[must_use]
    pub fn ratio(&self, i: usize) -> f64 {
        self.nu[i] / self.mu[i]
    }

    /// ln(ν_i/μ_i).
    #[must_use]
    pub fn log_ratio(&self, i: usize) -> f64 {
        math::ln(self.nu[i]) - math::ln(self.mu[i])
    }

    /// Smallest rate over both vectors.
    #[must_use]
    pub fn min_rate(&self) -> f64 {
        self.nu
            .iter()
            .chain(&self.mu)
            .fold(f64::INFINITY, |acc, &r| acc.min(r))
    }
}

/// The stationary law over a complete state space: log weights, log Z, the
/// normalized probabilities, and the per-particle excitation probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumTable {
    n_particles: usize,
    log_weights: Vec<f64>,
    log_z: f64,
    pi: Vec<f64>,
    theta: Vec<f64>,
}

impl EquilibriumTable {
    /// Number of states |S|.
    #[must_use]
    pub fn n_states(&self) -> usize {
        self.pi.len()
    }

    /// Number of particles N.
    #[must_use]
    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    /// Unnormalized log weight Σ_i σ_i ln(ν_i/μ_i) per state.
    #[must_use]
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// ln Z, the log of the partition sum.
    #[must_use]
    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// The partition sum Z itself; may overflow to infinity for extreme
    /// ratios, in which case use [`Self::log_z`].
    #[must_use]
    pub fn z(&self) -> f64 {
        math::exp(self.log_z)
    }

    /// Stationary probability per state, in canonical state order.
    #[must_use]
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Per-particle stationary excitation probabilities
    /// θ_i = Σ_σ σ_i π_σ.
    #[must_use]
    pub fn excitation_probabilities(&self) -> &[f64] {
        &self.theta
    }
}

/// Computes the product-form stationary law π_σ ∝ Π_i (ν_i/μ_i)^{σ_i} over
/// a complete state space.
///
/// Log-space throughout: weights are summed log ratios, Z comes from a
/// log-sum-exp with max subtraction, so no ratio magnitude overflows.
pub fn stationary_distribution(space: &StateSpace, rates: &RateVector) -> Result<EquilibriumTable> {
    let n = space.graph().n_particles();
    if rates.len() != n {
        return Err(invalid!(
            "rates cover {} particles, graph has {n}",
            rates.len()
        ));
    }
    let log_ratio: Vec<f64> = (0..n).map(|i| rates.log_ratio(i)).collect();

    let mut log_weights = Vec::with_capacity(space.len());
    let mut max_lw = f64::NEG_INFINITY;
    for state in space.iter() {
        let lw: f64 = set_bits(state).map(|i| log_ratio[i]).sum();
        max_lw = max_lw.max(lw);
        log_weights.push(lw);
    }

    let mut z_scaled = 0.0;
    let mut pi: Vec<f64> = log_weights
        .iter()
        .map(|&lw| {
            let w = math::exp(lw - max_lw);
            z_scaled += w;
            w
        })
        .collect();
    let log_z = max_lw + math::ln(z_scaled);
    for p in &mut pi {
        *p /= z_scaled;
    }

    let mut theta = vec![0.0; n];
    for (state, &p) in space.iter().zip(&pi) {
        for i in set_bits(state) {
            theta[i] += p;
        }
    }

    Ok(EquilibriumTable {
        n_particles: n,
        log_weights,
        log_z,
        pi,
        theta,
    })
}

/// Maximum relative detailed-balance residual
/// |π_a Q_ab − π_b Q_ba| / max(π_a Q_ab, π_b Q_ba, guard) over all state
/// pairs of the generator.
pub fn verify_detailed_balance(eq: &EquilibriumTable, generator: &Generator) -> Result<f64> {
    if generator.n_states() != eq.n_states() || generator.n_particles() != eq.n_particles() {
        return Err(invalid!(
            "generator is {}x{} over {} particles, table has {} states over {} particles",
            generator.n_states(),
            generator.n_states(),
            generator.n_particles(),
            eq.n_states(),
            eq.n_particles()
        ));
    }
    let pi = eq.pi();
    let mut worst = 0.0f64;
    for a in 0..generator.n_states() {
        let (cols, rates) = generator.row(a);
        for (&b, &q_ab) in cols.iter().zip(rates) {
            if b <= a {
                continue;
            }
            let forward = pi[a] * q_ab;
            let backward = pi[b] * generator.rate(b, a);
            let denom = forward.max(backward).max(RESIDUAL_GUARD);
            worst = worst.max(math::abs(forward - backward) / denom);
        }
    }
    Ok(worst)
}

/// Max-norm of πQ, the stationarity residual, in units of 1/time.
pub fn stationarity_residual(eq: &EquilibriumTable, generator: &Generator) -> Result<f64> {
    if generator.n_states() != eq.n_states() {
        return Err(invalid!(
            "generator has {} states, table has {}",
            generator.n_states(),
            eq.n_states()
        ));
    }
    let mut flow = vec![0.0; eq.n_states()];
    generator.apply_row_vector(eq.pi(), &mut flow);
    Ok(flow.iter().fold(0.0f64, |acc, &x| acc.max(math::abs(x))))
}

/// How close the stationary law is to the uniform law over the dominant
/// configurations at a given uniform rate ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantGap {
    /// Total stationary mass outside the dominant configurations.
    pub mass_off_dominant: f64,
    /// Maximum relative deviation from uniformity within the dominant set:
    /// max over dominant σ of |π_σ·|I| / mass_I − 1|.
    pub max_uniformity_error: f64,
}

/// Measures the gap to the large-ratio limit (uniform over the maximum
/// independent sets) at uniform ratio `rho`.
///
/// The uniform-ratio restriction is built into the signature: the limit
/// statement only holds when every particle has the same ν/μ.
pub fn dominant_limit_gap(space: &StateSpace, rho: f64) -> Result<DominantGap> {
    if !math::is_positive_finite(rho) {
        return Err(invalid!("rho must be positive and finite, got {rho}"));
    }
    let n = space.graph().n_particles();
    let eq = stationary_distribution(space, &RateVector::from_ratio(n, rho)?)?;
    let dominant = space.dominant_indices();
    let count = dominant.len() as f64;

    let mut mass_in = 0.0;
    for &idx in &dominant {
        mass_in += eq.pi()[idx];
    }
    // Summing the (few) dominant probabilities and the complement directly
    // keeps the off-mass accurate when it is tiny.
    let mut mass_off = 0.0;
    let mut is_dominant = vec![false; space.len()];
    for &idx in &dominant {
        is_dominant[idx] = true;
    }
    for (idx, &p) in eq.pi().iter().enumerate() {
        if !is_dominant[idx] {
            mass_off += p;
        }
    }

    let mut uniformity = 0.0f64;
    for &idx in &dominant {
        uniformity = uniformity.max(math::abs(eq.pi()[idx] * count / mass_in - 1.0));
    }

    Ok(DominantGap {
        mass_off_dominant: mass_off,
        max_uniformity_error: uniformity,
    })
}
