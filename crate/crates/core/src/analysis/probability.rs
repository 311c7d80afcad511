//! Spike probability of a neuron whose membrane potential has distribution
//! `p(v)`, under a fixed threshold and averaged over a uniform threshold
//! distribution.

use serde::{Deserialize, Serialize};
use libm::erfc;

use super::quadrature::adaptive_simpson;
use crate::error::{Error, Result};

/// Absolute tolerance of the threshold-averaged probability.
pub const QUADRATURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MembraneDistribution {
    Gaussian { mean: f64, std: f64 },
    /// Pooled membrane samples, e.g. captured from forward passes.
    Empirical { samples: Vec<f64> },
}

impl MembraneDistribution {
    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        if !(std > 0.0 && std.is_finite() && mean.is_finite()) {
            return Err(Error::invalid("std", "gaussian needs finite mean and std > 0"));
        }
        Ok(Self::Gaussian { mean, std })
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("empirical membrane samples"));
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                what: "membrane samples",
                index,
            });
        }
        Ok(Self::Empirical { samples })
    }

    /// `P(V >= theta)`.
    pub fn tail(&self, theta: f64) -> f64 {
        match self {
            Self::Gaussian { mean, std } => {
                0.5 * erfc((theta - mean) / (std * std::f64::consts::SQRT_2))
            }
            Self::Empirical { samples } => {
                samples.iter().filter(|&&v| v >= theta).count() as f64 / samples.len() as f64
            }
        }
    }
}

pub fn spike_prob_fixed(dist: &MembraneDistribution, theta: f64) -> f64 {
    dist.tail(theta)
}

/// Spike probability averaged over `theta ~ U(theta_min, theta_max)`.
///
/// Gaussian tails are integrated by adaptive Simpson; for empirical samples
/// the integral of the exceedance fraction is exact:
/// `mean_i clamp(v_i - theta_min, 0, theta_max - theta_min)`.
pub fn expected_spike_prob_continuous(
    dist: &MembraneDistribution,
    theta_min: f64,
    theta_max: f64,
) -> Result<f64> {
    if !(theta_min < theta_max) {
        return Err(Error::invalid(
            "theta_min",
            format!("must be below theta_max, got [{theta_min}, {theta_max}]"),
        ));
    }
    let width = theta_max - theta_min;
    let integral = match dist {
        MembraneDistribution::Gaussian { .. } => {
            adaptive_simpson(|t| dist.tail(t), theta_min, theta_max, QUADRATURE_TOL * width)
        }
        MembraneDistribution::Empirical { samples } => {
            samples
                .iter()
                .map(|&v| (v - theta_min).clamp(0.0, width))
                .sum::<f64>()
                / samples.len() as f64
        }
    };
    Ok(integral / width)
}

/// Spike probability averaged over a finite threshold set.
pub fn expected_spike_prob_discrete(dist: &MembraneDistribution, theta_set: &[f64]) -> Result<f64> {
    if theta_set.is_empty() {
        return Err(Error::Empty("theta_set"));
    }
    Ok(theta_set.iter().map(|&t| dist.tail(t)).sum::<f64>() / theta_set.len() as f64)
}

/// `f(E[theta]) - E[f(theta)]` for `theta ~ U(theta_min, theta_max)`.
///
/// Positive where the tail is concave over the interval (the whole interval
/// lies below the gaussian mean); it can be negative in the convex region.
pub fn jensen_gap(dist: &MembraneDistribution, theta_min: f64, theta_max: f64) -> Result<f64> {
    if theta_min == theta_max {
        return Ok(0.0);
    }
    let mid = 0.5 * (theta_min + theta_max);
    Ok(spike_prob_fixed(dist, mid) - expected_spike_prob_continuous(dist, theta_min, theta_max)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_threshold_examples() {
        let g = MembraneDistribution::gaussian(1.0, 0.5).unwrap();
        assert!((spike_prob_fixed(&g, 1.0) - 0.5).abs() < 1e-15);
        assert!(spike_prob_fixed(&g, 1e6) == 0.0);
        let e = MembraneDistribution::empirical(vec![0.5, 1.5]).unwrap();
        assert_eq!(spike_prob_fixed(&e, 1.0), 0.5);
    }

    #[test]
    fn continuous_limits() {
        let g = MembraneDistribution::gaussian(1.5, 0.5).unwrap();
        let narrow = expected_spike_prob_continuous(&g, 1.2, 1.2 + 1e-7).unwrap();
        assert!((narrow - spike_prob_fixed(&g, 1.2)).abs() < 1e-7);
        let below = MembraneDistribution::gaussian(-5.0, 0.3).unwrap();
        assert!(expected_spike_prob_continuous(&below, 1.0, 2.0).unwrap() < 1e-8);
        assert!(expected_spike_prob_continuous(&g, 2.0, 1.0).is_err());
        assert!(expected_spike_prob_continuous(&g, 1.0, 1.0).is_err());
    }

    #[test]
    fn discrete_symmetric_pair() {
        let g = MembraneDistribution::gaussian(1.5, 0.5).unwrap();
        let p = expected_spike_prob_discrete(&g, &[1.0, 2.0]).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(
            expected_spike_prob_discrete(&g, &[1.3]).unwrap(),
            spike_prob_fixed(&g, 1.3)
        );
        assert!(expected_spike_prob_discrete(&g, &[]).is_err());
    }

    #[test]
    fn empirical_continuous_matches_quadrature_of_step_tail() {
        let e = MembraneDistribution::empirical(vec![0.2, 1.1, 1.3, 1.9, 2.5]).unwrap();
        // exceedance fraction is 4/5, 3/5, 2/5, 1/5 on [1,1.1), [1.1,1.3),
        // [1.3,1.9), [1.9,2]
        let by_hand = 0.1 * 0.8 + 0.2 * 0.6 + 0.6 * 0.4 + 0.1 * 0.2;
        let got = expected_spike_prob_continuous(&e, 1.0, 2.0).unwrap();
        assert!((got - by_hand).abs() < 1e-12, "{got} vs {by_hand}");
    }

    #[test]
    fn jensen_sign_regimes() {
        let high = MembraneDistribution::gaussian(3.0, 0.6).unwrap();
        assert!(jensen_gap(&high, 1.0, 2.0).unwrap() > 0.0);
        let low = MembraneDistribution::gaussian(-1.0, 0.6).unwrap();
        assert!(jensen_gap(&low, 1.0, 2.0).unwrap() <= 0.0);
        assert_eq!(jensen_gap(&high, 1.5, 1.5).unwrap(), 0.0);
    }
}
