//! Surrogate-gradient BPTT training with one sampled threshold per batch.

mod adam;
mod bptt;
mod schedule;
mod threshold;

pub use adam::{Adam, AdamConfig};
pub use bptt::{cross_entropy, loss_and_grad, relaxed_forward, SampleGrad};
pub use schedule::Schedule;
pub use threshold::{sample_threshold, ThresholdDistribution};

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::lif::Surrogate;
use crate::network::{argmax, NetworkModel, SpikeFn};

/// Mixed into the seed of the threshold stream so it is independent of the
/// shuffling stream.
const THETA_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub scheduler: Schedule,
    pub seed: u64,
    pub dist: ThresholdDistribution,
    #[serde(default)]
    pub adam: AdamConfig,
    #[serde(default)]
    pub surrogate: Surrogate,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            epochs: 60,
            batch_size: 16,
            scheduler: Schedule::Constant,
            seed: 0,
            dist: ThresholdDistribution::fixed(1.0),
            adam: AdamConfig::default(),
            surrogate: Surrogate::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return Err(Error::invalid("lr", "must be finite and >= 0"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs", "must be >= 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size", "must be >= 1"));
        }
        if !(self.surrogate.width > 0.0) {
            return Err(Error::invalid("surrogate.width", "must be > 0"));
        }
        self.scheduler.validate()?;
        self.dist.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub epoch: usize,
    pub batch: usize,
    pub loss: f64,
    pub lr: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EpochSummary {
    pub epoch: usize,
    pub mean_loss: f64,
    /// Training accuracy of the forward passes made during the epoch.
    pub accuracy: f64,
    pub mean_spikes: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct History {
    pub batches: Vec<BatchRecord>,
    pub epochs: Vec<EpochSummary>,
}

impl History {
    /// CSV with header `epoch,batch,loss,lr,theta_sampled`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,batch,loss,lr,theta_sampled\n");
        for r in &self.batches {
            writeln!(out, "{},{},{},{},{}", r.epoch, r.batch, r.loss, r.lr, r.theta).unwrap();
        }
        out
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.batches.iter().map(|r| r.theta).collect()
    }
}

/// Train `model` in place of a copy and return it with the history.
///
/// Every batch draws one threshold, shared by all hidden neurons and all
/// samples of the batch. Per-sample gradients are computed in parallel and
/// reduced in sample order, so results do not depend on the thread count.
pub fn train(
    model: &NetworkModel,
    data: &EncodedDataset,
    config: &TrainConfig,
) -> Result<(NetworkModel, History)> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("training dataset"));
    }
    if data.n_classes() > model.n_out {
        return Err(Error::invalid(
            "dataset",
            format!("{} classes but model has {} outputs", data.n_classes(), model.n_out),
        ));
    }
    let mut model = model.clone();
    model.train_dist = Some(config.dist.clone());
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut theta_rng = ChaCha8Rng::seed_from_u64(config.seed ^ THETA_STREAM);
    let mut adam = Adam::new(config.adam, model.weights());
    let mut history = History::default();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut global_batch = 0usize;

    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let lr = config.scheduler.lr(config.lr, epoch);
        let mut summary = EpochSummary {
            epoch,
            ..Default::default()
        };
        let mut correct = 0usize;
        let mut spikes = 0u64;
        for (b, batch) in order.chunks(config.batch_size).enumerate() {
            let theta = config.dist.sample(&mut theta_rng);
            let per_sample = batch
                .par_iter()
                .map(|&k| {
                    loss_and_grad(
                        &model,
                        &data.rasters()[k],
                        data.labels()[k],
                        theta,
                        SpikeFn::Hard,
                        config.surrogate,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let scale = 1.0 / batch.len() as f64;
            let mut grads: Vec<Vec<f64>> =
                model.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect();
            let mut loss = 0.0;
            for (g, &k) in per_sample.iter().zip(batch) {
                loss += g.loss * scale;
                correct += usize::from(argmax(&g.logits) == data.labels()[k]);
                spikes += g.hidden_spikes;
                for (acc, gl) in grads.iter_mut().zip(&g.grads) {
                    for (a, &x) in acc.iter_mut().zip(gl) {
                        *a += x * scale;
                    }
                }
            }
            if !loss.is_finite() {
                return Err(Error::NanLoss {
                    batch: global_batch,
                });
            }
            adam.step(lr, model.layers.iter_mut().map(|l| &mut l.weights), &grads);
            history.batches.push(BatchRecord {
                epoch,
                batch: b,
                loss,
                lr,
                theta,
            });
            summary.mean_loss += loss * batch.len() as f64 / data.len() as f64;
            global_batch += 1;
        }
        summary.accuracy = correct as f64 / data.len() as f64;
        summary.mean_spikes = spikes as f64 / data.len() as f64;
        history.epochs.push(summary);
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lif::SpikeRaster;
    use crate::network::build_synnet;

    fn toy() -> EncodedDataset {
        let mut rasters = Vec::new();
        let mut labels = Vec::new();
        for k in 0..8 {
            let mut r = SpikeRaster::zeros(20, 15, 1.0);
            let ch = if k % 2 == 0 { 0..7 } else { 8..15 };
            for t in 0..20 {
                for c in ch.clone() {
                    r.set(t, c, (t + c + k) % 2 == 0);
                }
            }
            rasters.push(r);
            labels.push(k % 2);
        }
        EncodedDataset::new(rasters, labels, 2).unwrap()
    }

    #[test]
    fn zero_lr_leaves_weights() {
        let m = build_synnet(2, &[2, 4, 8], 4).unwrap();
        let cfg = TrainConfig {
            lr: 0.0,
            epochs: 3,
            batch_size: 4,
            dist: ThresholdDistribution::continuous(1.0, 1.5),
            ..Default::default()
        };
        let (trained, hist) = train(&m, &toy(), &cfg).unwrap();
        assert_eq!(trained.layers, m.layers);
        assert_eq!(hist.batches.len(), 6);
    }

    #[test]
    fn empty_dataset_rejected() {
        let m = build_synnet(2, &[2, 4, 8], 4).unwrap();
        let empty = EncodedDataset::new(vec![], vec![], 2).unwrap();
        assert!(matches!(train(&m, &empty, &TrainConfig::default()), Err(Error::Empty(_))));
    }

    #[test]
    fn theta_sequence_reproducible() {
        let m = build_synnet(2, &[2, 4, 8], 4).unwrap();
        let cfg = TrainConfig {
            epochs: 2,
            batch_size: 2,
            seed: 77,
            dist: ThresholdDistribution::discrete(1.0, 2.0, 0.1),
            ..Default::default()
        };
        let (_, h1) = train(&m, &toy(), &cfg).unwrap();
        let (_, h2) = train(&m, &toy(), &cfg).unwrap();
        assert_eq!(h1.thetas(), h2.thetas());
        let support = cfg.dist.support();
        assert!(h1.thetas().iter().all(|t| support.contains(t)));
        assert!(h1.to_csv().starts_with("epoch,batch,loss,lr,theta_sampled\n"));
    }
}
