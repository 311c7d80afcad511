//! Seeded synthetic IMU windows: per-class sinusoid mixtures plus noise.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Dataset, LabeledWindow, TimeSeries};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub axis: usize,
    pub freq_hz: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSignature {
    pub tones: Vec<Tone>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_classes: usize,
    pub windows_per_class: usize,
    pub window_len_steps: usize,
    pub sample_rate_hz: f64,
    pub signatures: Vec<ClassSignature>,
    pub noise_std: f64,
    /// Each window's tone amplitudes are scaled by a factor drawn uniformly
    /// from `[1 - jitter, 1 + jitter]`.
    #[serde(default)]
    pub amplitude_jitter: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Three classes at 3, 6 and 12 Hz (one per encoder band 2..4), 50 Hz
    /// sampling, 128-sample windows. Every class drives all three axes with
    /// decreasing amplitude X > Y > Z.
    pub fn three_class(windows_per_class: usize, seed: u64) -> Self {
        let sig = |f: f64| ClassSignature {
            tones: vec![
                Tone { axis: 0, freq_hz: f, amplitude: 1.0 },
                Tone { axis: 1, freq_hz: f, amplitude: 0.6 },
                Tone { axis: 2, freq_hz: f, amplitude: 0.3 },
            ],
        };
        Self {
            n_classes: 3,
            windows_per_class,
            window_len_steps: 128,
            sample_rate_hz: 50.0,
            signatures: vec![sig(3.0), sig(6.0), sig(12.0)],
            noise_std: 0.1,
            amplitude_jitter: 0.3,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.signatures.len() != self.n_classes {
            return Err(Error::invalid(
                "signatures",
                format!("{} signatures for {} classes", self.signatures.len(), self.n_classes),
            ));
        }
        if self.window_len_steps == 0 {
            return Err(Error::invalid("window_len_steps", "must be >= 1"));
        }
        if !(self.noise_std >= 0.0) {
            return Err(Error::invalid("noise_std", "must be >= 0"));
        }
        if !(0.0..1.0).contains(&self.amplitude_jitter) {
            return Err(Error::invalid("amplitude_jitter", "must be in [0, 1)"));
        }
        let nyq = self.sample_rate_hz / 2.0;
        for (c, sig) in self.signatures.iter().enumerate() {
            for t in &sig.tones {
                if t.axis >= 3 || !(t.freq_hz > 0.0 && t.freq_hz < nyq) {
                    return Err(Error::invalid(
                        format!("signatures[{c}]"),
                        "tone axis must be < 3 and frequency in (0, Nyquist)",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Generate the dataset class by class. Windows carry a random phase per tone
/// and per-window amplitude jitter; zero windows per class yields an empty
/// dataset.
pub fn make_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_std.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::invalid("noise_std", e.to_string()))?;
    let n = spec.window_len_steps;
    let fs = spec.sample_rate_hz;
    let mut windows = Vec::with_capacity(spec.n_classes * spec.windows_per_class);
    for (label, sig) in spec.signatures.iter().enumerate() {
        for _ in 0..spec.windows_per_class {
            let scale = 1.0 + spec.amplitude_jitter * (2.0 * rng.random::<f64>() - 1.0);
            let phases: Vec<f64> = sig.tones.iter().map(|_| 2.0 * PI * rng.random::<f64>()).collect();
            let mut data = vec![0.0; n * 3];
            for t in 0..n {
                let time = t as f64 / fs;
                for (tone, &ph) in sig.tones.iter().zip(&phases) {
                    data[t * 3 + tone.axis] +=
                        scale * tone.amplitude * (2.0 * PI * tone.freq_hz * time + ph).sin();
                }
            }
            if spec.noise_std > 0.0 {
                for x in &mut data {
                    *x += noise.sample(&mut rng);
                }
            }
            windows.push(LabeledWindow {
                imu: TimeSeries::new(fs, 3, data)?,
                label,
            });
        }
    }
    Dataset::new(windows, spec.n_classes)
}
