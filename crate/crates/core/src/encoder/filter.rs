//! Butterworth bandpass filters as cascaded second-order sections.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized biquad `b0 + b1 z^-1 + b2 z^-2 / 1 + a1 z^-1 + a2 z^-2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        let num = self.b[0] + z_inv * self.b[1] + z2 * self.b[2];
        let den = 1.0 + z_inv * self.a[0] + z2 * self.a[1];
        num / den
    }
}

/// Transposed direct-form II state for one section.
#[derive(Debug, Clone, Copy, Default)]
struct SectionState {
    s1: f64,
    s2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandpassFilter {
    pub low_hz: f64,
    pub high_hz: f64,
    pub sample_rate: f64,
    pub sections: Vec<Biquad>,
}

impl BandpassFilter {
    /// Design an order-`order` Butterworth bandpass (2 * order poles) via the
    /// bilinear transform with prewarped edges. Gain is unity at the
    /// prewarped center frequency.
    pub fn butterworth(low_hz: f64, high_hz: f64, order: usize, sample_rate: f64) -> Result<Self> {
        let nyquist = sample_rate / 2.0;
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::invalid("sample_rate", "must be positive"));
        }
        if order == 0 {
            return Err(Error::invalid("filter_order", "must be >= 1"));
        }
        if !(low_hz > 0.0 && low_hz < high_hz) {
            return Err(Error::invalid(
                "band_edges",
                format!("need 0 < low < high, got ({low_hz}, {high_hz})"),
            ));
        }
        if high_hz >= nyquist {
            return Err(Error::invalid(
                "band_edges",
                format!("high edge {high_hz} Hz at or above Nyquist {nyquist} Hz"),
            ));
        }

        let fs2 = 2.0 * sample_rate;
        let wl = fs2 * (PI * low_hz / sample_rate).tan();
        let wh = fs2 * (PI * high_hz / sample_rate).tan();
        let w0 = (wl * wh).sqrt();
        let bw = wh - wl;

        let bilinear = |s: Complex64| (fs2 + s) / (fs2 - s);
        let section = |z1: Complex64, z2: Complex64| Biquad {
            b: [1.0, 0.0, -1.0],
            a: [-(z1 + z2).re, (z1 * z2).re],
        };

        let mut sections = Vec::with_capacity(order);
        for k in 0..order {
            let angle = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            let p = Complex64::from_polar(1.0, angle);
            // Each prototype pole p maps to the two roots of s^2 - p*bw*s + w0^2.
            let disc = (p * p * bw * bw - 4.0 * w0 * w0).sqrt();
            let r1 = (p * bw + disc) / 2.0;
            let r2 = (p * bw - disc) / 2.0;
            if p.im.abs() < 1e-12 {
                sections.push(section(bilinear(r1), bilinear(r2)));
            } else if p.im > 0.0 {
                let z1 = bilinear(r1);
                let z2 = bilinear(r2);
                sections.push(section(z1, z1.conj()));
                sections.push(section(z2, z2.conj()));
            }
        }

        let mut filter = Self {
            low_hz,
            high_hz,
            sample_rate,
            sections,
        };
        let center = 2.0 * (w0 / fs2).atan();
        let g = filter.response_at_omega(center).norm();
        for b in &mut filter.sections[0].b {
            *b /= g;
        }
        Ok(filter)
    }

    fn response_at_omega(&self, omega: f64) -> Complex64 {
        let z_inv = Complex64::from_polar(1.0, -omega);
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(z_inv))
    }

    /// Linear magnitude response at `freq_hz`.
    pub fn magnitude(&self, freq_hz: f64) -> f64 {
        self.response_at_omega(2.0 * PI * freq_hz / self.sample_rate)
            .norm()
    }

    pub fn geometric_center(&self) -> f64 {
        (self.low_hz * self.high_hz).sqrt()
    }

    pub fn filter(&self, input: &[f64]) -> Vec<f64> {
        let mut state = vec![SectionState::default(); self.sections.len()];
        input
            .iter()
            .map(|&x| {
                let mut y = x;
                for (sec, st) in self.sections.iter().zip(&mut state) {
                    let out = sec.b[0] * y + st.s1;
                    st.s1 = sec.b[1] * y - sec.a[0] * out + st.s2;
                    st.s2 = sec.b[2] * y - sec.a[1] * out;
                    y = out;
                }
                y
            })
            .collect()
    }
}

pub fn to_db(gain: f64) -> f64 {
    20.0 * gain.log10()
}
