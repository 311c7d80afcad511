//! Leaky integrate-and-fire networks trained under randomly drawn firing
//! thresholds, so that the threshold can be turned at inference time to trade
//! accuracy for spikes (and therefore energy) without retraining.
//!
//! The pipeline is
//! IMU window → [`encoder`] → spike raster → [`network`] → class decision,
//! with [`trainer`] fitting the network, [`analysis`] sweeping thresholds and
//! [`pareto`] picking a model and threshold for a given budget.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod cli;
pub mod data;
pub mod encoder;
pub mod error;
pub mod lif;
pub mod network;
pub mod pareto;
pub mod trainer;

pub use error::{Error, Result};
pub use lif::{LifParams, LifState, SpikeRaster, Surrogate};
pub use network::{build_synnet, NetworkModel, SynNetBuilder};
pub use trainer::{train, ThresholdDistribution, TrainConfig};
