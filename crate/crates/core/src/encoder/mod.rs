//! IMU to spike conversion: bandpass filter bank, full-wave rectifier and
//! integrate-and-fire neurons with subtraction reset.
//!
//! Channel `axis * n_bands + band` of the output raster carries band `band`
//! of axis `axis`, so with the default five bands channels 0..5 are X,
//! 5..10 are Y and 10..15 are Z.

mod filter;

pub use filter::{to_db, BandpassFilter, Biquad};

use serde::{Deserialize, Serialize};

use crate::data::TimeSeries;
use crate::error::{Error, Result};
use crate::lif::SpikeRaster;

pub const DEFAULT_BANDS: [(f64, f64); 5] =
    [(1.0, 2.0), (2.0, 4.0), (4.0, 8.0), (8.0, 16.0), (16.0, 32.0)];

/// Fraction of Nyquist that a clipped high edge is moved to.
pub const NYQUIST_CLIP: f64 = 0.999;

pub const IMU_AXES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterBankSpec {
    pub band_edges: Vec<(f64, f64)>,
    pub filter_order: usize,
    pub sample_rate: f64,
    /// Move high edges at or above Nyquist to `NYQUIST_CLIP * Nyquist`
    /// instead of rejecting the spec.
    #[serde(default)]
    pub clip_to_nyquist: bool,
}

impl FilterBankSpec {
    /// The five octave bands from 1 to 32 Hz, order 4, with Nyquist clipping.
    pub fn default_for(sample_rate: f64) -> Self {
        Self {
            band_edges: DEFAULT_BANDS.to_vec(),
            filter_order: 4,
            sample_rate,
            clip_to_nyquist: true,
        }
    }

    pub fn n_bands(&self) -> usize {
        self.band_edges.len()
    }
}

/// A designed filter bank plus a record of which edges were clipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterBank {
    pub filters: Vec<BandpassFilter>,
    /// `(band index, requested high edge)` for every clipped band.
    pub clipped: Vec<(usize, f64)>,
}

pub fn design_filterbank(spec: &FilterBankSpec) -> Result<FilterBank> {
    if spec.band_edges.is_empty() {
        return Err(Error::Empty("band_edges"));
    }
    let limit = NYQUIST_CLIP * spec.sample_rate / 2.0;
    let mut clipped = Vec::new();
    let filters = spec
        .band_edges
        .iter()
        .enumerate()
        .map(|(k, &(lo, hi))| {
            let hi = if spec.clip_to_nyquist && hi >= limit && lo < limit {
                clipped.push((k, hi));
                limit
            } else {
                hi
            };
            BandpassFilter::butterworth(lo, hi, spec.filter_order, spec.sample_rate)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FilterBank { filters, clipped })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IafParams {
    pub threshold: f64,
    /// Integration step, ms.
    pub dt: f64,
    /// Cap on spikes emitted in one step.
    pub max_spikes_per_step: u32,
}

impl IafParams {
    /// Threshold calibrated on the default synthetic dataset so the mean
    /// per-channel rate sits inside [0.01, 0.2] spikes per step.
    pub const DEFAULT_THRESHOLD: f64 = 20.0;

    pub fn for_sample_rate(sample_rate: f64) -> Self {
        Self {
            threshold: Self::DEFAULT_THRESHOLD,
            dt: 1000.0 / sample_rate,
            max_spikes_per_step: 1,
        }
    }
}

/// Integrate one rectified sample. Returns the new potential and the number
/// of spikes emitted, each spike subtracting one threshold.
pub fn iaf_step(potential: f64, input: f64, params: &IafParams) -> (f64, u32) {
    let v = potential + input * params.dt;
    let whole = (v / params.threshold).floor();
    let spikes = if whole >= 1.0 {
        (whole as u64).min(u64::from(params.max_spikes_per_step)) as u32
    } else {
        0
    };
    (v - params.threshold * f64::from(spikes), spikes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub filterbank: FilterBankSpec,
    pub iaf: IafParams,
}

impl EncoderConfig {
    pub fn default_for(sample_rate: f64) -> Self {
        Self {
            filterbank: FilterBankSpec::default_for(sample_rate),
            iaf: IafParams::for_sample_rate(sample_rate),
        }
    }
}

/// Reusable encoder holding the designed filter bank.
#[derive(Debug, Clone)]
pub struct Encoder {
    config: EncoderConfig,
    bank: FilterBank,
}

impl Encoder {
    pub fn new(config: EncoderConfig) -> Result<Self> {
        if !(config.iaf.threshold > 0.0) {
            return Err(Error::invalid("iaf.threshold", "must be > 0"));
        }
        if !(config.iaf.dt > 0.0) {
            return Err(Error::invalid("iaf.dt", "must be > 0"));
        }
        if config.iaf.max_spikes_per_step != 1 {
            return Err(Error::invalid(
                "iaf.max_spikes_per_step",
                "binary rasters need at most one spike per step",
            ));
        }
        let bank = design_filterbank(&config.filterbank)?;
        Ok(Self { config, bank })
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    pub fn bank(&self) -> &FilterBank {
        &self.bank
    }

    pub fn n_channels(&self) -> usize {
        IMU_AXES * self.bank.filters.len()
    }

    pub fn encode(&self, imu: &TimeSeries) -> Result<SpikeRaster> {
        if imu.n_channels() != IMU_AXES {
            return Err(Error::ShapeMismatch {
                what: "imu channels",
                expected: IMU_AXES,
                actual: imu.n_channels(),
            });
        }
        if let Some(index) = imu.data().iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "imu", index });
        }
        let sr = self.config.filterbank.sample_rate;
        if (imu.sample_rate() - sr).abs() > 1e-9 * sr {
            return Err(Error::invalid(
                "imu.sample_rate",
                format!("encoder designed for {sr} Hz, got {}", imu.sample_rate()),
            ));
        }
        let n_bands = self.bank.filters.len();
        let mut raster = SpikeRaster::zeros(imu.len(), self.n_channels(), self.config.iaf.dt);
        for axis in 0..IMU_AXES {
            let x = imu.channel(axis);
            for (band, f) in self.bank.filters.iter().enumerate() {
                let ch = axis * n_bands + band;
                let mut v = 0.0;
                for (t, y) in f.filter(&x).into_iter().enumerate() {
                    let (next, spikes) = iaf_step(v, y.abs(), &self.config.iaf);
                    v = next;
                    if spikes > 0 {
                        raster.set(t, ch, true);
                    }
                }
            }
        }
        Ok(raster)
    }
}

/// One-shot encode of a 3-axis IMU series into `3 * n_bands` spike channels.
pub fn encode(imu: &TimeSeries, spec: &FilterBankSpec, iaf: &IafParams) -> Result<SpikeRaster> {
    Encoder::new(EncoderConfig {
        filterbank: spec.clone(),
        iaf: *iaf,
    })?
    .encode(imu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine_on_axis(axis: usize, freq: f64, amp: f64, fs: f64, n: usize) -> TimeSeries {
        let mut data = vec![0.0; n * 3];
        for t in 0..n {
            data[t * 3 + axis] = amp * (2.0 * PI * freq * t as f64 / fs).sin();
        }
        TimeSeries::new(fs, 3, data).unwrap()
    }

    #[test]
    fn default_bank_clips_top_band() {
        let bank = design_filterbank(&FilterBankSpec::default_for(50.0)).unwrap();
        assert_eq!(bank.filters.len(), 5);
        assert_eq!(bank.clipped, vec![(4, 32.0)]);
        assert!((bank.filters[4].high_hz - 24.975).abs() < 1e-12);
        for f in &bank.filters {
            let peak = (1..2000)
                .map(|k| f.magnitude(25.0 * k as f64 / 2000.0))
                .fold(0.0, f64::max);
            assert!(to_db(f.magnitude(f.geometric_center()) / peak) >= -3.0);
            if 4.0 * f.high_hz < 25.0 {
                assert!(to_db(f.magnitude(4.0 * f.high_hz) / peak) <= -20.0);
            }
        }
    }

    #[test]
    fn explicit_spec_above_nyquist_is_rejected() {
        let spec = FilterBankSpec {
            band_edges: vec![(20.0, 30.0)],
            filter_order: 4,
            sample_rate: 50.0,
            clip_to_nyquist: false,
        };
        assert!(design_filterbank(&spec).is_err());
    }

    #[test]
    fn iaf_subtraction_reset() {
        let p = IafParams {
            threshold: 1.0,
            dt: 1.0,
            max_spikes_per_step: 1,
        };
        let (v, s) = iaf_step(0.9, 0.2, &p);
        assert_eq!(s, 1);
        assert!((v - 0.1).abs() < 1e-12);
        let mut v = 0.0;
        for _ in 0..1000 {
            let (nv, s) = iaf_step(v, 0.0, &p);
            assert_eq!(s, 0);
            v = nv;
        }
    }

    #[test]
    fn iaf_long_run_rate() {
        let p = IafParams {
            threshold: 1.0,
            dt: 1.0,
            max_spikes_per_step: 1,
        };
        let c = 0.37;
        let (mut v, mut total) = (0.0, 0u64);
        let n = 100_000;
        for _ in 0..n {
            let (nv, s) = iaf_step(v, c, &p);
            v = nv;
            total += u64::from(s);
        }
        assert!((total as f64 / n as f64 - c).abs() < 1e-4);
    }

    #[test]
    fn zero_input_zero_raster() {
        let enc = Encoder::new(EncoderConfig::default_for(50.0)).unwrap();
        let imu = TimeSeries::new(50.0, 3, vec![0.0; 3 * 128]).unwrap();
        assert_eq!(enc.encode(&imu).unwrap().spike_count(), 0);
    }

    #[test]
    fn wrong_channel_count_rejected() {
        let enc = Encoder::new(EncoderConfig::default_for(50.0)).unwrap();
        let imu = TimeSeries::new(50.0, 2, vec![0.0; 2 * 10]).unwrap();
        assert!(matches!(
            enc.encode(&imu),
            Err(Error::ShapeMismatch { expected: 3, actual: 2, .. })
        ));
    }

    #[test]
    fn three_hz_on_x_lands_on_channel_1() {
        let enc = Encoder::new(EncoderConfig::default_for(50.0)).unwrap();
        let r = enc.encode(&sine_on_axis(0, 3.0, 1.0, 50.0, 512)).unwrap();
        let counts = r.channel_counts();
        let total: u64 = counts.iter().sum();
        assert!(total > 0);
        assert!(counts[1] as f64 >= 0.8 * total as f64, "{counts:?}");
    }

    #[test]
    fn twelve_hz_on_z_dominates_channel_13() {
        let enc = Encoder::new(EncoderConfig::default_for(50.0)).unwrap();
        let r = enc.encode(&sine_on_axis(2, 12.0, 1.0, 50.0, 512)).unwrap();
        let counts = r.channel_counts();
        let best = (0..15).max_by_key(|&c| (counts[c], std::cmp::Reverse(c))).unwrap();
        assert_eq!(best, 13, "{counts:?}");
        assert!(counts[..10].iter().all(|&c| c == 0));
    }
}
