//! Spike-probability theory, threshold sweeps and relative metrics.

mod metrics;
mod probability;
mod quadrature;
mod sweep;

pub use metrics::{apply_deltas, delta_metrics};
pub use probability::{
    expected_spike_prob_continuous, expected_spike_prob_discrete, jensen_gap, spike_prob_fixed,
    MembraneDistribution, QUADRATURE_TOL,
};
pub use quadrature::adaptive_simpson;
pub use sweep::{
    evaluate, sweep, Baseline, OperatingPoint, SweepCurve, SweepReport, ThetaGrid, SWEEP_HEADER,
};

use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::network::NetworkModel;

/// Pooled pre-threshold hidden membrane values over (up to) `max_samples`
/// inputs of `data`, as an empirical distribution.
pub fn capture_membranes(
    model: &NetworkModel,
    data: &EncodedDataset,
    theta: f64,
    max_samples: usize,
) -> Result<MembraneDistribution> {
    if data.is_empty() || max_samples == 0 {
        return Err(Error::Empty("membrane capture dataset"));
    }
    let mut pooled = Vec::new();
    for r in data.rasters().iter().take(max_samples) {
        pooled.extend(model.membrane_samples(r, theta)?);
    }
    MembraneDistribution::empirical(pooled)
}
