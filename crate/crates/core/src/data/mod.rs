//! Datasets of labeled IMU windows and their persistence.

mod archive;
mod raster_text;
mod synthetic;
mod ucihar;

pub use archive::{
    digest_hex, load_dataset, load_rasters, read_dataset, read_rasters, save_dataset,
    save_rasters, write_dataset, write_rasters, ARCHIVE_VERSION,
};
pub use raster_text::{read_raster_text, write_raster_text};
pub use synthetic::{make_synthetic, ClassSignature, SyntheticSpec, Tone};
pub use ucihar::load_ucihar_raw;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoder::Encoder;
use crate::error::{Error, Result};
use crate::lif::SpikeRaster;

/// Multichannel samples stored time-major (`data[t * n_channels + c]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    sample_rate: f64,
    n_channels: usize,
    data: Vec<f64>,
}

impl TimeSeries {
    pub fn new(sample_rate: f64, n_channels: usize, data: Vec<f64>) -> Result<Self> {
        if n_channels == 0 {
            return Err(Error::invalid("n_channels", "must be >= 1"));
        }
        if !data.len().is_multiple_of(n_channels) {
            return Err(Error::ShapeMismatch {
                what: "time series length",
                expected: data.len() / n_channels * n_channels,
                actual: data.len(),
            });
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::invalid("sample_rate", "must be positive"));
        }
        Ok(Self {
            sample_rate,
            n_channels,
            data,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    /// Number of samples per channel.
    pub fn len(&self) -> usize {
        self.data.len() / self.n_channels
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.data
            .iter()
            .skip(c)
            .step_by(self.n_channels)
            .copied()
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledWindow {
    pub imu: TimeSeries,
    pub label: usize,
}

/// An ordered, immutable collection of equally shaped windows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    windows: Vec<LabeledWindow>,
    n_classes: usize,
}

impl Dataset {
    /// Validates shared geometry, finite samples and label range.
    pub fn new(windows: Vec<LabeledWindow>, n_classes: usize) -> Result<Self> {
        if let Some(first) = windows.first() {
            for (k, w) in windows.iter().enumerate() {
                if w.imu.len() != first.imu.len()
                    || w.imu.n_channels() != first.imu.n_channels()
                    || w.imu.sample_rate() != first.imu.sample_rate()
                {
                    return Err(Error::invalid(
                        format!("window[{k}]"),
                        "length, channel count and sample rate must match window 0",
                    ));
                }
                if w.label >= n_classes {
                    return Err(Error::invalid(
                        format!("window[{k}].label"),
                        format!("{} not in [0, {n_classes})", w.label),
                    ));
                }
                if let Some(i) = w.imu.data().iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonFinite {
                        what: "window sample",
                        index: k * w.imu.data().len() + i,
                    });
                }
            }
        }
        Ok(Self { windows, n_classes })
    }

    pub fn windows(&self) -> &[LabeledWindow] {
        &self.windows
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.windows.iter().map(|w| w.label).collect()
    }
}

/// Spike rasters with labels, the input format of training and sweeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedDataset {
    rasters: Vec<SpikeRaster>,
    labels: Vec<usize>,
    n_classes: usize,
}

impl EncodedDataset {
    pub fn new(rasters: Vec<SpikeRaster>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if rasters.len() != labels.len() {
            return Err(Error::ShapeMismatch {
                what: "labels",
                expected: rasters.len(),
                actual: labels.len(),
            });
        }
        if let Some(first) = rasters.first() {
            if let Some(k) = rasters.iter().position(|r| {
                r.n_channels() != first.n_channels()
                    || r.n_steps() != first.n_steps()
                    || r.dt() != first.dt()
            }) {
                return Err(Error::invalid(format!("raster[{k}]"), "shape differs from raster 0"));
            }
        }
        if let Some(k) = labels.iter().position(|&l| l >= n_classes) {
            return Err(Error::invalid(
                format!("labels[{k}]"),
                format!("{} not in [0, {n_classes})", labels[k]),
            ));
        }
        Ok(Self {
            rasters,
            labels,
            n_classes,
        })
    }

    /// Encode every window, in order. Windows are encoded in parallel.
    pub fn encode(encoder: &Encoder, dataset: &Dataset) -> Result<Self> {
        let rasters = dataset
            .windows()
            .par_iter()
            .map(|w| encoder.encode(&w.imu))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rasters, dataset.labels(), dataset.n_classes())
    }

    pub fn rasters(&self) -> &[SpikeRaster] {
        &self.rasters
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.rasters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rasters.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SpikeRaster, usize)> {
        self.rasters.iter().zip(self.labels.iter().copied())
    }
}
