//! Mapping between laser parameters and flip rates.
//!
//! Each particle is driven by two lasers (lower-transition Rabi frequency
//! Ω_e, upper-transition Ω_r) through an intermediate level decaying at γ.
//! In the regime Ω_r ≪ Ω_e and Ω_r ≪ γ the three-level dynamics collapses
//! to a two-state rate equation with excitation rate ν and decay rate μ:
//!
//! μ = 2γΩ_r⁴ / [(Ω_r² − 2Ω_e²)² + 2γ²(Ω_e² + Ω_r²)],  ν = (Ω_e²/Ω_r²)·μ.
//!
//! All angular frequencies are carried in rad/s internally; interfaces that
//! speak the 2π·MHz convention convert by the exact constant [`TWO_PI_MHZ`].

use alloc::vec;
use alloc::vec::Vec;

use crate::equilibrium::RateVector;
use crate::error::{invalid, Result};
use crate::math;

/// One 2π·MHz in rad/s; multiply user-facing frequency values by this.
pub const TWO_PI_MHZ: f64 = 2.0 * core::f64::consts::PI * 1.0e6;

/// Default margin for the validity checks: each "much larger" condition is
/// flagged unless it holds by at least this factor.
pub const DEFAULT_VALIDITY_FACTOR: f64 = 5.0;

/// Per-particle Rabi frequencies and the global intermediate decay rate,
/// all in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct LaserParams {
    omega_e: Vec<f64>,
    omega_r: Vec<f64>,
    gamma: f64,
}

impl LaserParams {
    /// Builds validated laser parameters: equal-length vectors, everything
    /// strictly positive and finite.
    pub fn new(omega_e: Vec<f64>, omega_r: Vec<f64>, gamma: f64) -> Result<Self> {
        if omega_e.is_empty() || omega_e.len() != omega_r.len() {
            return Err(invalid!(
                "Rabi frequency vectors must be non-empty and equally long, got {} and {}",
                omega_e.len(),
                omega_r.len()
            ));
        }
        if !math::is_positive_finite(gamma) {
            return Err(invalid!("gamma must be positive and finite, got {gamma}"));
        }
        for (i, (&e, &r)) in omega_e.iter().zip(&omega_r).enumerate() {
            if !math::is_positive_finite(e) || !math::is_positive_finite(r) {
                return Err(invalid!(
                    "Rabi frequencies must be positive and finite, particle {i} has omega_e = {e}, omega_r = {r}"
                ));
            }
        }
        Ok(Self {
            omega_e,
            omega_r,
            gamma,
        })
    }

    /// Uniform parameters for `n` particles.
    pub fn uniform(n: usize, omega_e: f64, omega_r: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![omega_e; n], vec![omega_r; n], gamma)
    }

    /// Number of particles.
    #[must_use]
    pub fn n_particles(&self) -> usize {
        self.omega_e.len()
    }

    /// Lower-transition Rabi frequencies (rad/s).
    #[must_use]
    pub fn omega_e(&self) -> &[f64] {
        &self.omega_e
    }

    /// Upper-transition Rabi frequencies (rad/s).
    #[must_use]
    pub fn omega_r(&self) -> &[f64] {
        &self.omega_r
    }

    /// Intermediate-state decay rate (rad/s).
    #[must_use]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Maps laser parameters to per-particle flip rates.
///
/// The ratio ν_i/μ_i equals Ω_e,i²/Ω_r,i² by construction (ν is computed as
/// that ratio times μ), which is what the equilibrium law depends on.
#[must_use]
pub fn rates_from_rabi(params: &LaserParams) -> RateVector {
    let n = params.n_particles();
    let mut nu = Vec::with_capacity(n);
    let mut mu = Vec::with_capacity(n);
    for i in 0..n {
        let e2 = params.omega_e[i] * params.omega_e[i];
        let r2 = params.omega_r[i] * params.omega_r[i];
        let gamma = params.gamma;
        let detuned = r2 - 2.0 * e2;
        let denom = detuned * detuned + 2.0 * gamma * gamma * (e2 + r2);
        let m = 2.0 * gamma * r2 * r2 / denom;
        mu.push(m);
        nu.push(e2 / r2 * m);
    }
    RateVector::new(nu, mu).expect("positive finite inputs give positive finite rates")
}

/// Inverse map for tuner initialization: the Ω_e giving ratio ν/μ = `rho`
/// at the given Ω_r, namely Ω_r·√rho.
pub fn omega_e_for_ratio(omega_r: f64, rho: f64) -> Result<f64> {
    if !math::is_positive_finite(omega_r) || !math::is_positive_finite(rho) {
        return Err(invalid!(
            "omega_r and rho must be positive and finite, got {omega_r} and {rho}"
        ));
    }
    Ok(omega_r * math::sqrt(rho))
}

/// Which rate-equation validity condition a particle violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeCondition {
    /// Ω_r is not much smaller than Ω_e: the upper transition is not weakly
    /// driven relative to the lower one.
    UpperDriveNotWeak,
    /// Ω_r is not much smaller than γ: the intermediate level does not decay
    /// fast relative to the upper drive.
    DecayNotFast,
}

/// A validity warning for one particle. `particle` is 0-based; rendered
/// messages use 1-based labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidityWarning {
    /// 0-based particle index.
    pub particle: usize,
    /// The violated condition.
    pub condition: RegimeCondition,
}

impl core::fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let what = match self.condition {
            RegimeCondition::UpperDriveNotWeak => {
                "upper transition not weakly driven (factor x omega_r exceeds omega_e)"
            }
            RegimeCondition::DecayNotFast => {
                "intermediate decay not fast (factor x omega_r exceeds gamma)"
            }
        };
        write!(f, "particle {}: {what}", self.particle + 1)
    }
}

/// Flags every particle whose parameters leave the rate-equation regime:
/// a warning wherever `factor·Ω_r > Ω_e` or `factor·Ω_r > γ`.
pub fn check_validity(params: &LaserParams, factor: f64) -> Result<Vec<ValidityWarning>> {
    if !factor.is_finite() || factor < 1.0 {
        return Err(invalid!("validity factor must be at least 1, got {factor}"));
    }
    let mut warnings = Vec::new();
    for i in 0..params.n_particles() {
        if params.omega_r[i] * factor > params.omega_e[i] {
            warnings.push(ValidityWarning {
                particle: i,
                condition: RegimeCondition::UpperDriveNotWeak,
            });
        }
        if params.omega_r[i] * factor > params.gamma {
            warnings.push(ValidityWarning {
                particle: i,
                condition: RegimeCondition::DecayNotFast,
            });
        }
    }
    Ok(warnings)
}

/// Closed-form single-atom transient:
/// p₁(t) = ν/(ν+μ) + (p₁(0) − ν/(ν+μ))·e^{−(ν+μ)t}.
///
/// Preconditions (debug-asserted): positive rates, `t ≥ 0`,
/// `p1_0` in [0, 1].
#[must_use]
pub fn single_atom_transient(nu: f64, mu: f64, p1_0: f64, t: f64) -> f64 {
    debug_assert!(math::is_positive_finite(nu) && math::is_positive_finite(mu));
    debug_assert!(t >= 0.0);
    debug_assert!((0.0..=1.0).contains(&p1_0));
    let stationary = nu / (nu + mu);
    stationary + (p1_0 - stationary) * math::exp(-(nu + mu) * t)
}

/// Checks that the half-exponent Rabi update and the full-exponent rate
/// update agree at the ratio level.
///
/// Returns ν/μ = Ω_e²/Ω_r² before and after the update
/// Ω_e ← Ω_e·exp(−(a/2)δ); the after value equals before·exp(−aδ) exactly
/// because squaring doubles the exponent.
pub fn rabi_ratio_update_consistency(
    omega_e: f64,
    omega_r: f64,
    a: f64,
    delta: f64,
) -> Result<(f64, f64)> {
    if !math::is_positive_finite(omega_e) || !math::is_positive_finite(omega_r) {
        return Err(invalid!(
            "Rabi frequencies must be positive and finite, got omega_e = {omega_e}, omega_r = {omega_r}"
        ));
    }
    if !a.is_finite() || !delta.is_finite() {
        return Err(invalid!("a and delta must be finite, got {a} and {delta}"));
    }
    let before = (omega_e / omega_r) * (omega_e / omega_r);
    let updated = omega_e * math::exp(-0.5 * a * delta);
    let after = (updated / omega_r) * (updated / omega_r);
    Ok((before, after))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn params_validation() {
        assert!(LaserParams::new(vec![1.0], vec![1.0], 1.0).is_ok());
        assert!(LaserParams::new(vec![], vec![], 1.0).is_err());
        assert!(LaserParams::new(vec![1.0, 2.0], vec![1.0], 1.0).is_err());
        assert!(LaserParams::new(vec![0.0], vec![1.0], 1.0).is_err());
        assert!(LaserParams::new(vec![1.0], vec![1.0], 0.0).is_err());
        assert!(LaserParams::new(vec![1.0], vec![f64::NAN], 1.0).is_err());
    }

    #[test]
    fn equal_rabi_gives_equal_rates() {
        let p = LaserParams::uniform(3, 2.0, 2.0, 10.0).unwrap();
        let rates = rates_from_rabi(&p);
        for i in 0..3 {
            assert_relative_eq!(rates.nu()[i], rates.mu()[i], max_relative = 1e-14);
        }
    }

    #[test]
    fn reference_parameters() {
        // gamma = 2pi*6 MHz, omega_e = 2pi*3 MHz, omega_r = 2pi*1 MHz:
        // mu = (12/1009)*2pi MHz and nu = 9*mu.
        let p = LaserParams::uniform(1, 3.0 * TWO_PI_MHZ, TWO_PI_MHZ, 6.0 * TWO_PI_MHZ).unwrap();
        let rates = rates_from_rabi(&p);
        assert_relative_eq!(rates.mu()[0], 12.0 / 1009.0 * TWO_PI_MHZ, max_relative = 1e-13);
        assert_relative_eq!(rates.nu()[0], 9.0 * rates.mu()[0], max_relative = 1e-14);
        // In plain 2pi*MHz units: mu ~ 0.011893, nu ~ 0.10704.
        assert_relative_eq!(rates.mu()[0] / TWO_PI_MHZ, 0.011893, max_relative = 1e-4);
        assert_relative_eq!(rates.nu()[0] / TWO_PI_MHZ, 0.107037, max_relative = 1e-4);
    }

    #[test]
    fn ratio_is_exact_square() {
        let p = LaserParams::new(vec![3.7e6, 1.1e7], vec![5.0e5, 2.0e6], 4.0e7).unwrap();
        let rates = rates_from_rabi(&p);
        for i in 0..2 {
            let expect = (p.omega_e()[i] / p.omega_r()[i]) * (p.omega_e()[i] / p.omega_r()[i]);
            assert_relative_eq!(rates.ratio(i), expect, max_relative = 1e-14);
        }
    }

    #[test]
    fn doubling_omega_e_quadruples_ratio() {
        let base = LaserParams::uniform(1, 2.0e6, 1.0e6, 4.0e7).unwrap();
        let doubled = LaserParams::uniform(1, 4.0e6, 1.0e6, 4.0e7).unwrap();
        let r1 = rates_from_rabi(&base);
        let r2 = rates_from_rabi(&doubled);
        assert_relative_eq!(r2.ratio(0), 4.0 * r1.ratio(0), max_relative = 1e-14);
    }

    #[test]
    fn rates_scale_homogeneously() {
        // Scaling all frequencies by c scales mu by c and fixes the ratio.
        let base = LaserParams::uniform(1, 3.0e6, 1.0e6, 6.0e6).unwrap();
        let r1 = rates_from_rabi(&base);
        for c in [1e-3, 7.0, 2.5e4] {
            let scaled = LaserParams::uniform(1, 3.0e6 * c, 1.0e6 * c, 6.0e6 * c).unwrap();
            let r2 = rates_from_rabi(&scaled);
            assert_relative_eq!(r2.mu()[0], c * r1.mu()[0], max_relative = 1e-13);
            assert_relative_eq!(r2.ratio(0), r1.ratio(0), max_relative = 1e-14);
        }
    }

    #[test]
    fn validity_warnings() {
        // Reference parameters pass at factor 3 (3*1 <= 3 and 3*1 <= 6).
        let p = LaserParams::uniform(1, 3.0, 1.0, 6.0).unwrap();
        assert!(check_validity(&p, 3.0).unwrap().is_empty());
        // omega_r = omega_e at factor 5: the weak-drive condition fails.
        let p = LaserParams::uniform(1, 1.0, 1.0, 100.0).unwrap();
        let warnings = check_validity(&p, 5.0).unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].condition, RegimeCondition::UpperDriveNotWeak);
        // gamma = omega_r / 10: the fast-decay condition fails.
        let p = LaserParams::uniform(1, 100.0, 1.0, 0.1).unwrap();
        let warnings = check_validity(&p, 5.0).unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].condition, RegimeCondition::DecayNotFast);
        assert!(check_validity(&p, 0.5).is_err());
    }

    #[test]
    fn transient_closed_form() {
        assert_relative_eq!(single_atom_transient(2.0, 3.0, 0.7, 0.0), 0.7);
        // Long-time limit is nu/(nu+mu).
        assert_relative_eq!(
            single_atom_transient(2.0, 3.0, 0.7, 1e3),
            0.4,
            max_relative = 1e-12
        );
        // nu = mu, p1(0) = 0, t = ln(2)/(2 nu): p1 = 1/4.
        let nu = 1.7;
        let t = core::f64::consts::LN_2 / (2.0 * nu);
        assert_relative_eq!(single_atom_transient(nu, nu, 0.0, t), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn ratio_update_consistency() {
        // delta = 0 leaves the ratio unchanged.
        let (before, after) = rabi_ratio_update_consistency(2.0, 1.0, 1.5, 0.0).unwrap();
        assert_relative_eq!(before, after, max_relative = 1e-15);
        // a = 1, delta = 1 multiplies the ratio by e^-1.
        let (before, after) = rabi_ratio_update_consistency(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(after, before * (-1.0f64).exp(), max_relative = 1e-14);
        // a = 2, delta = -0.5 multiplies the ratio by e.
        let (before, after) = rabi_ratio_update_consistency(2.0, 1.0, 2.0, -0.5).unwrap();
        assert_relative_eq!(after, before * 1.0f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn omega_for_ratio_inverts() {
        let omega_r = 2.0e6;
        for rho in [0.25, 1.0, 16.0] {
            let omega_e = omega_e_for_ratio(omega_r, rho).unwrap();
            let p = LaserParams::uniform(1, omega_e, omega_r, 1e8).unwrap();
            assert_relative_eq!(rates_from_rabi(&p).ratio(0), rho, max_relative = 1e-14);
        }
        assert!(omega_e_for_ratio(0.0, 1.0).is_err());
    }
}
