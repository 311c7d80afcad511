//! Feed-forward LIF network: 15 encoder channels, three hidden layers of 48
//! neurons with a pyramid of synaptic time constants, and a non-spiking
//! leaky readout.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lif::{heaviside, LifParams, SpikeRaster, Surrogate};
use crate::trainer::ThresholdDistribution;

pub const SCHEMA_VERSION: u32 = 1;
pub const SYNNET_INPUTS: usize = 15;
pub const SYNNET_HIDDEN: [usize; 3] = [48, 48, 48];
pub const DEFAULT_TAU_CONFIG: [u32; 3] = [2, 4, 8];
pub const WEIGHT_PRECISION: &str = "f64";

/// Dense connection into one layer. `weights` is row-major `n_in x n_out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub n_in: usize,
    pub n_out: usize,
    pub params: LifParams,
    pub weights: Vec<f64>,
}

impl Layer {
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n_out + j]
    }
}

/// Hidden layers followed by the readout layer (last entry of `layers`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub schema_version: u32,
    pub n_in: usize,
    pub hidden_sizes: Vec<usize>,
    pub n_out: usize,
    pub tau_config: Vec<u32>,
    pub precision: String,
    pub layers: Vec<Layer>,
    /// Threshold distribution the weights were trained under, if any.
    pub train_dist: Option<ThresholdDistribution>,
    pub seed: u64,
}

/// Synaptic time constants for a layer of `n` neurons split evenly over
/// `2^1 .. 2^levels` ms, assigned in contiguous index blocks.
pub fn tau_pyramid(n: usize, levels: u32) -> Result<Vec<f64>> {
    if levels == 0 || !n.is_multiple_of(levels as usize) {
        return Err(Error::invalid(
            "tau_config",
            format!("{n} neurons cannot be split evenly over {levels} time constants"),
        ));
    }
    let block = n / levels as usize;
    Ok((0..n).map(|j| 2f64.powi(1 + (j / block) as i32)).collect())
}

/// Builder for SynNet-style models.
#[derive(Debug, Clone)]
pub struct SynNetBuilder {
    pub n_in: usize,
    pub hidden_sizes: Vec<usize>,
    pub n_out: usize,
    pub tau_config: Vec<u32>,
    pub tau_m: f64,
    pub readout_tau_s: f64,
    /// Hidden weights are uniform in `+-init_gain / sqrt(fan_in)`.
    pub init_gain: f64,
    /// Same for the readout weights.
    pub readout_gain: f64,
    pub seed: u64,
}

impl SynNetBuilder {
    pub const DEFAULT_INIT_GAIN: f64 = 22.0;
    pub const DEFAULT_READOUT_GAIN: f64 = 1.0;

    pub fn new(n_out: usize, seed: u64) -> Self {
        Self {
            n_in: SYNNET_INPUTS,
            hidden_sizes: SYNNET_HIDDEN.to_vec(),
            n_out,
            tau_config: DEFAULT_TAU_CONFIG.to_vec(),
            tau_m: LifParams::DEFAULT_TAU_M,
            readout_tau_s: 2.0,
            init_gain: Self::DEFAULT_INIT_GAIN,
            readout_gain: Self::DEFAULT_READOUT_GAIN,
            seed,
        }
    }

    pub fn tau_config(mut self, tau_config: &[u32]) -> Self {
        self.tau_config = tau_config.to_vec();
        self
    }

    pub fn init_gain(mut self, gain: f64) -> Self {
        self.init_gain = gain;
        self
    }

    pub fn readout_gain(mut self, gain: f64) -> Self {
        self.readout_gain = gain;
        self
    }

    pub fn build(&self) -> Result<NetworkModel> {
        if self.n_out == 0 {
            return Err(Error::invalid("n_out", "must be >= 1"));
        }
        if self.tau_config.len() != self.hidden_sizes.len() {
            return Err(Error::invalid(
                "tau_config",
                format!(
                    "{} entries for {} hidden layers",
                    self.tau_config.len(),
                    self.hidden_sizes.len()
                ),
            ));
        }
        for (name, g) in [("init_gain", self.init_gain), ("readout_gain", self.readout_gain)] {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::invalid(name, "must be finite and >= 0"));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut init = |n_in: usize, n_out: usize, params: LifParams, gain: f64| {
            let bound = gain / (n_in as f64).sqrt();
            let weights = (0..n_in * n_out)
                .map(|_| bound * (2.0 * rng.random::<f64>() - 1.0))
                .collect();
            Layer {
                n_in,
                n_out,
                params,
                weights,
            }
        };
        let mut layers = Vec::with_capacity(self.hidden_sizes.len() + 1);
        let mut fan_in = self.n_in;
        for (&n, &levels) in self.hidden_sizes.iter().zip(&self.tau_config) {
            let params = LifParams {
                tau_s: tau_pyramid(n, levels)?,
                ..LifParams::uniform(n, 2.0, self.tau_m)
            };
            params.validate()?;
            layers.push(init(fan_in, n, params, self.init_gain));
            fan_in = n;
        }
        let readout = LifParams::uniform(self.n_out, self.readout_tau_s, self.tau_m);
        readout.validate()?;
        layers.push(init(fan_in, self.n_out, readout, self.readout_gain));
        Ok(NetworkModel {
            schema_version: SCHEMA_VERSION,
            n_in: self.n_in,
            hidden_sizes: self.hidden_sizes.clone(),
            n_out: self.n_out,
            tau_config: self.tau_config.clone(),
            precision: WEIGHT_PRECISION.to_owned(),
            layers,
            train_dist: None,
            seed: self.seed,
        })
    }
}

/// SynNet with 15 inputs, 3 x 48 hidden neurons and the default weight init.
pub fn build_synnet(n_out: usize, tau_config: &[u32], rng_seed: u64) -> Result<NetworkModel> {
    SynNetBuilder::new(n_out, rng_seed)
        .tau_config(tau_config)
        .build()
}

/// Spike nonlinearity used during simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpikeFn {
    /// Binary Heaviside spikes.
    Hard,
    /// The surrogate's antiderivative in place of the Heaviside.
    Relaxed(Surrogate),
}

impl SpikeFn {
    #[inline]
    fn apply(self, v: f64, theta: f64) -> f64 {
        match self {
            SpikeFn::Hard => f64::from(heaviside(v, theta)),
            SpikeFn::Relaxed(s) => s.relaxed(v, theta),
        }
    }
}

/// Per-layer, per-step record for backpropagation through time. For each
/// layer `ell`, `inputs[ell][t]` is what fed the layer at step `t`,
/// `pre_reset[ell][t]` the membrane before thresholding and `spikes[ell][t]`
/// the emitted spike value.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    pub inputs: Vec<Vec<Vec<f64>>>,
    pub pre_reset: Vec<Vec<Vec<f64>>>,
    pub spikes: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    /// One raster per hidden layer.
    pub hidden: Vec<SpikeRaster>,
    /// Readout membrane summed over time, per class.
    pub output: Vec<f64>,
    pub hidden_spikes: u64,
}

impl ForwardTrace {
    /// Argmax of the readout; ties go to the lowest class index.
    pub fn decision(&self) -> usize {
        argmax(&self.output)
    }

    pub fn layer_counts(&self) -> Vec<u64> {
        self.hidden.iter().map(SpikeRaster::spike_count).collect()
    }
}

pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = k;
        }
    }
    best
}

/// Hidden-layer spike total of a trace; the readout does not spike.
pub fn count_spikes(trace: &ForwardTrace) -> u64 {
    trace.hidden_spikes
}

/// Result of a raw simulation.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub logits: Vec<f64>,
    pub hidden_spikes: u64,
    pub tape: Option<Tape>,
    /// Pre-threshold hidden membrane values, if requested.
    pub membranes: Option<Vec<f64>>,
}

impl NetworkModel {
    /// Assemble a model from explicit layers (hidden layers then readout).
    pub fn from_layers(layers: Vec<Layer>, seed: u64) -> Result<Self> {
        let (readout, hidden) = layers
            .split_last()
            .ok_or_else(|| Error::invalid("layers", "need at least a readout layer"))?;
        let tau_config = hidden
            .iter()
            .map(|l| {
                let mut taus = l.params.tau_s.clone();
                taus.sort_by(f64::total_cmp);
                taus.dedup();
                taus.len() as u32
            })
            .collect();
        let model = Self {
            schema_version: SCHEMA_VERSION,
            n_in: layers[0].n_in,
            hidden_sizes: hidden.iter().map(|l| l.n_out).collect(),
            n_out: readout.n_out,
            tau_config,
            precision: WEIGHT_PRECISION.to_owned(),
            layers,
            train_dist: None,
            seed,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn n_hidden_layers(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("found {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.precision != WEIGHT_PRECISION {
            return Err(Error::invalid("precision", format!("unsupported {:?}", self.precision)));
        }
        if self.layers.len() != self.hidden_sizes.len() + 1 {
            return Err(Error::invalid("layers", "expected one per hidden size plus readout"));
        }
        let sizes: Vec<usize> = self
            .hidden_sizes
            .iter()
            .copied()
            .chain(std::iter::once(self.n_out))
            .collect();
        let mut fan_in = self.n_in;
        for (k, (layer, &n)) in self.layers.iter().zip(&sizes).enumerate() {
            if layer.n_in != fan_in || layer.n_out != n || layer.weights.len() != fan_in * n {
                return Err(Error::invalid(format!("layers[{k}]"), "shape does not chain"));
            }
            if layer.params.len() != n {
                return Err(Error::invalid(format!("layers[{k}].params"), "tau_s length"));
            }
            layer.params.validate()?;
            if let Some(i) = layer.weights.iter().position(|w| !w.is_finite()) {
                return Err(Error::NonFinite {
                    what: "weights",
                    index: i,
                });
            }
            fan_in = n;
        }
        Ok(())
    }

    /// Flat views of all weight matrices, input layer first.
    pub fn weights(&self) -> impl Iterator<Item = &[f64]> {
        self.layers.iter().map(|l| l.weights.as_slice())
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len()).sum()
    }

    fn check_input(&self, input: &SpikeRaster, theta: f64) -> Result<()> {
        if input.n_channels() != self.n_in {
            return Err(Error::ShapeMismatch {
                what: "input channels",
                expected: self.n_in,
                actual: input.n_channels(),
            });
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::invalid("theta_eff", "must be positive and finite"));
        }
        Ok(())
    }

    /// Run the network on one raster with `theta` applied to every hidden
    /// neuron.
    pub fn forward(&self, input: &SpikeRaster, theta_eff: f64) -> Result<ForwardTrace> {
        self.check_input(input, theta_eff)?;
        let n_hidden = self.n_hidden_layers();
        let mut hidden: Vec<SpikeRaster> = self.layers[..n_hidden]
            .iter()
            .map(|l| SpikeRaster::zeros(input.n_steps(), l.n_out, input.dt()))
            .collect();
        let sim = self.run(input, theta_eff, SpikeFn::Hard, false, false, |layer, t, s| {
            let row: Vec<u8> = s.iter().map(|&x| x as u8).collect();
            hidden[layer].set_row(t, &row);
        });
        Ok(ForwardTrace {
            hidden,
            output: sim.logits,
            hidden_spikes: sim.hidden_spikes,
        })
    }

    /// Class decision and hidden spike count without building rasters.
    pub fn classify(&self, input: &SpikeRaster, theta_eff: f64) -> Result<(usize, u64)> {
        self.check_input(input, theta_eff)?;
        let sim = self.run(input, theta_eff, SpikeFn::Hard, false, false, |_, _, _| {});
        Ok((argmax(&sim.logits), sim.hidden_spikes))
    }

    /// Pre-threshold hidden membrane values pooled over neurons and steps.
    pub fn membrane_samples(&self, input: &SpikeRaster, theta_eff: f64) -> Result<Vec<f64>> {
        self.check_input(input, theta_eff)?;
        let sim = self.run(input, theta_eff, SpikeFn::Hard, false, true, |_, _, _| {});
        Ok(sim.membranes.unwrap_or_default())
    }

    /// Simulation with an explicit spike nonlinearity, optionally recording
    /// a tape for backpropagation.
    pub fn simulate(
        &self,
        input: &SpikeRaster,
        theta: f64,
        spike_fn: SpikeFn,
        record: bool,
    ) -> Result<Simulation> {
        self.check_input(input, theta)?;
        Ok(self.run(input, theta, spike_fn, record, false, |_, _, _| {}))
    }

    fn run(
        &self,
        input: &SpikeRaster,
        theta: f64,
        spike_fn: SpikeFn,
        record: bool,
        keep_membranes: bool,
        mut on_spikes: impl FnMut(usize, usize, &[f64]),
    ) -> Simulation {
        let n_layers = self.layers.len();
        let n_hidden = n_layers - 1;
        let decays: Vec<_> = self.layers.iter().map(|l| l.params.decay()).collect();
        let mut i_s: Vec<Vec<f64>> = self.layers.iter().map(|l| vec![0.0; l.n_out]).collect();
        let mut v_m = i_s.clone();
        let mut logits = vec![0.0; self.n_out];
        let mut hidden_spikes = 0u64;
        let mut tape = record.then(|| Tape {
            inputs: vec![Vec::with_capacity(input.n_steps()); n_layers],
            pre_reset: vec![Vec::with_capacity(input.n_steps()); n_layers],
            spikes: vec![Vec::with_capacity(input.n_steps()); n_hidden],
        });
        let mut membranes = keep_membranes.then(Vec::new);
        let mut drive = Vec::new();

        for t in 0..input.n_steps() {
            let mut x: Vec<f64> = input.row(t).iter().map(|&b| f64::from(b)).collect();
            for (ell, layer) in self.layers.iter().enumerate() {
                drive.clear();
                drive.resize(layer.n_out, 0.0);
                for (i, &xi) in x.iter().enumerate() {
                    if xi != 0.0 {
                        let row = &layer.weights[i * layer.n_out..(i + 1) * layer.n_out];
                        for (d, &w) in drive.iter_mut().zip(row) {
                            *d += xi * w;
                        }
                    }
                }
                let dec = &decays[ell];
                let (is, vm) = (&mut i_s[ell], &mut v_m[ell]);
                for k in 0..layer.n_out {
                    let a = dec.alpha_s[k];
                    is[k] = a * is[k] + (1.0 - a) * drive[k];
                    vm[k] = dec.alpha_m * vm[k] + (1.0 - dec.alpha_m) * (is[k] + dec.bias);
                }
                if let Some(tp) = tape.as_mut() {
                    tp.inputs[ell].push(std::mem::take(&mut x));
                    tp.pre_reset[ell].push(vm.clone());
                }
                if ell == n_hidden {
                    for (l, &v) in logits.iter_mut().zip(vm.iter()) {
                        *l += v;
                    }
                    break;
                }
                if let Some(m) = membranes.as_mut() {
                    m.extend_from_slice(vm);
                }
                let mut s = vec![0.0; layer.n_out];
                for k in 0..layer.n_out {
                    let u = vm[k];
                    let sk = spike_fn.apply(u, theta);
                    s[k] = sk;
                    vm[k] = u * (1.0 - sk) + dec.v_reset * sk;
                }
                if spike_fn == SpikeFn::Hard {
                    hidden_spikes += s.iter().map(|&v| v as u64).sum::<u64>();
                    on_spikes(ell, t, &s);
                }
                if let Some(tp) = tape.as_mut() {
                    tp.spikes[ell].push(s.clone());
                }
                x = s;
            }
        }
        Simulation {
            logits,
            hidden_spikes,
            tape,
            membranes,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}
