//! Leaky integrate-and-fire dynamics.
//!
//! Each neuron carries a synaptic current `i_s` and a membrane potential
//! `v_m`. Both are first-order linear filters, discretized with the
//! exponential-Euler rule so that the zero-input decay is exact:
//!
//! ```text
//! i_s' = a_s * i_s + (1 - a_s) * input          a_s = exp(-dt / tau_s)
//! v_m' = a_m * v_m + (1 - a_m) * (i_s' + bias)  a_m = exp(-dt / tau_m)
//! spike = v_m' >= theta
//! v_m'  = v_reset                               (after a spike)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-layer neuron constants. `tau_s` is per neuron so that a layer can mix
/// short and long synaptic integration windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifParams {
    /// Synaptic time constant for each neuron, ms.
    pub tau_s: Vec<f64>,
    /// Membrane time constant, ms.
    pub tau_m: f64,
    pub theta0: f64,
    pub v_reset: f64,
    pub bias: f64,
    /// Simulation step, ms.
    pub dt: f64,
}

impl LifParams {
    pub const DEFAULT_DT: f64 = 1.0;
    pub const DEFAULT_TAU_M: f64 = 2.0;

    /// Layer of `n` neurons sharing one synaptic time constant, with the
    /// default reset, bias and step.
    pub fn uniform(n: usize, tau_s: f64, tau_m: f64) -> Self {
        Self {
            tau_s: vec![tau_s; n],
            tau_m,
            theta0: 1.0,
            v_reset: 0.0,
            bias: 0.0,
            dt: Self::DEFAULT_DT,
        }
    }

    pub fn len(&self) -> usize {
        self.tau_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_s.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive and finite"));
        }
        if !(self.tau_m >= self.dt) {
            return Err(Error::invalid("tau_m", "must be >= dt"));
        }
        if let Some(k) = self.tau_s.iter().position(|&t| !(t >= self.dt)) {
            return Err(Error::invalid(format!("tau_s[{k}]"), "must be >= dt"));
        }
        if !(self.theta0 > 0.0) {
            return Err(Error::invalid("theta0", "must be > 0"));
        }
        if !(self.theta0 > self.v_reset) {
            return Err(Error::invalid("v_reset", "must be below theta0"));
        }
        if !self.bias.is_finite() {
            return Err(Error::invalid("bias", "must be finite"));
        }
        Ok(())
    }

    pub fn decay(&self) -> Decay {
        Decay {
            alpha_s: self.tau_s.iter().map(|&t| (-self.dt / t).exp()).collect(),
            alpha_m: (-self.dt / self.tau_m).exp(),
            bias: self.bias,
            v_reset: self.v_reset,
        }
    }
}

/// Precomputed per-step decay factors for one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Decay {
    pub alpha_s: Vec<f64>,
    pub alpha_m: f64,
    pub bias: f64,
    pub v_reset: f64,
}

impl Decay {
    /// Advance the two linear filters by one step and return nothing; the
    /// pre-reset membrane is left in `state.v_m`.
    #[inline]
    pub fn integrate(&self, state: &mut LifState, input: &[f64]) {
        let am = self.alpha_m;
        for k in 0..state.i_s.len() {
            let a = self.alpha_s[k];
            let i = a * state.i_s[k] + (1.0 - a) * input[k];
            state.i_s[k] = i;
            state.v_m[k] = am * state.v_m[k] + (1.0 - am) * (i + self.bias);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifState {
    pub i_s: Vec<f64>,
    pub v_m: Vec<f64>,
}

impl LifState {
    pub fn zeros(n: usize) -> Self {
        Self {
            i_s: vec![0.0; n],
            v_m: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.v_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_m.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.i_s.iter().chain(&self.v_m).all(|x| x.is_finite())
    }
}

/// Spike indicator. The boundary `v == theta` fires.
#[inline]
pub fn heaviside(v: f64, theta: f64) -> u8 {
    u8::from(v >= theta)
}

/// Triangular surrogate derivative of the spike nonlinearity.
///
/// `width` is the half-width of the support relative to `theta`; the default
/// of 1.0 gives support `[0, 2 theta]` with peak 1 at `v == theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Surrogate {
    pub width: f64,
}

impl Default for Surrogate {
    fn default() -> Self {
        Self { width: 1.0 }
    }
}

impl Surrogate {
    #[inline]
    pub fn grad(&self, v: f64, theta: f64) -> f64 {
        let half = self.width * theta;
        (1.0 - (v - theta).abs() / half).max(0.0)
    }

    /// Antiderivative of [`Surrogate::grad`] anchored at zero below the
    /// support: a piecewise-quadratic ramp from 0 up to `width * theta`.
    #[inline]
    pub fn relaxed(&self, v: f64, theta: f64) -> f64 {
        let half = self.width * theta;
        let lo = theta - half;
        let hi = theta + half;
        if v <= lo {
            0.0
        } else if v <= theta {
            let d = v - lo;
            d * d / (2.0 * half)
        } else if v < hi {
            let d = hi - v;
            half - d * d / (2.0 * half)
        } else {
            half
        }
    }
}

/// Surrogate derivative with the default width.
#[inline]
pub fn surrogate_grad(v: f64, theta: f64) -> f64 {
    Surrogate::default().grad(v, theta)
}

/// One exponential-Euler step of a LIF layer with hard reset.
///
/// Returns the binary spike vector for this step; `state` is updated in
/// place. Non-finite input is rejected before anything is modified.
pub fn lif_step(
    state: &mut LifState,
    params: &LifParams,
    input_current: &[f64],
    theta_eff: f64,
) -> Result<Vec<u8>> {
    if !(theta_eff > 0.0) {
        return Err(Error::invalid("theta_eff", "must be > 0"));
    }
    let n = state.len();
    if input_current.len() != n {
        return Err(Error::ShapeMismatch {
            what: "input_current",
            expected: n,
            actual: input_current.len(),
        });
    }
    if params.len() != n {
        return Err(Error::ShapeMismatch {
            what: "params.tau_s",
            expected: n,
            actual: params.len(),
        });
    }
    if let Some(index) = input_current.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "input_current",
            index,
        });
    }
    let decay = params.decay();
    decay.integrate(state, input_current);
    Ok(fire_reset(state, theta_eff, decay.v_reset))
}

/// Threshold the pre-reset membrane and apply the hard reset.
#[inline]
pub fn fire_reset(state: &mut LifState, theta: f64, v_reset: f64) -> Vec<u8> {
    state
        .v_m
        .iter_mut()
        .map(|v| {
            let s = heaviside(*v, theta);
            if s == 1 {
                *v = v_reset;
            }
            s
        })
        .collect()
}

/// Binary spike matrix, rows are time steps and columns are channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpikeRaster {
    n_steps: usize,
    n_channels: usize,
    /// Step in ms, stored as raw bits so the raster stays `Eq`.
    dt_bits: u64,
    data: Vec<u8>,
}

impl SpikeRaster {
    pub fn zeros(n_steps: usize, n_channels: usize, dt: f64) -> Self {
        Self {
            n_steps,
            n_channels,
            dt_bits: dt.to_bits(),
            data: vec![0; n_steps * n_channels],
        }
    }

    /// Build from row-major data; every entry must be 0 or 1.
    pub fn from_data(n_steps: usize, n_channels: usize, dt: f64, data: Vec<u8>) -> Result<Self> {
        if data.len() != n_steps * n_channels {
            return Err(Error::ShapeMismatch {
                what: "raster data",
                expected: n_steps * n_channels,
                actual: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!("raster[{k}]"), "entries must be 0 or 1"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive and finite"));
        }
        Ok(Self {
            n_steps,
            n_channels,
            dt_bits: dt.to_bits(),
            data,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn dt(&self) -> f64 {
        f64::from_bits(self.dt_bits)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn row(&self, t: usize) -> &[u8] {
        &self.data[t * self.n_channels..(t + 1) * self.n_channels]
    }

    pub fn get(&self, t: usize, c: usize) -> u8 {
        self.data[t * self.n_channels + c]
    }

    pub fn set(&mut self, t: usize, c: usize, spike: bool) {
        self.data[t * self.n_channels + c] = u8::from(spike);
    }

    pub fn set_row(&mut self, t: usize, spikes: &[u8]) {
        self.data[t * self.n_channels..(t + 1) * self.n_channels].copy_from_slice(spikes);
    }

    pub fn spike_count(&self) -> u64 {
        self.data.iter().map(|&b| u64::from(b)).sum()
    }

    pub fn channel_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_channels];
        for row in self.data.chunks_exact(self.n_channels.max(1)) {
            for (c, &b) in counts.iter_mut().zip(row) {
                *c += u64::from(b);
            }
        }
        counts
    }

    /// `(t, channel)` pairs of every spike in row-major order.
    pub fn events(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nc = self.n_channels;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(move |(k, _)| (k / nc, k % nc))
    }
}
