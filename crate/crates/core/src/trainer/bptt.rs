//! Backpropagation through time for [`NetworkModel`].
//!
//! The backward pass differentiates the recorded simulation exactly, with
//! the spike nonlinearity's derivative replaced by the surrogate. Under
//! [`SpikeFn::Relaxed`] the surrogate *is* the derivative of the forward
//! nonlinearity, so the gradient is exact and can be checked by finite
//! differences. The reset path `v = u (1 - s) + v_reset s` is differentiated
//! through both `u` and `s`.

use crate::error::Result;
use crate::lif::{SpikeRaster, Surrogate};
use crate::network::{NetworkModel, SpikeFn, Tape};

/// Softmax cross-entropy and its gradient with respect to the logits.
pub fn cross_entropy(logits: &[f64], label: usize) -> (f64, Vec<f64>) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    let loss = sum.ln() + max - logits[label];
    let mut grad: Vec<f64> = exp.iter().map(|e| e / sum).collect();
    grad[label] -= 1.0;
    (loss, grad)
}

/// Loss, logits, hidden spike count and per-layer weight gradients for one
/// sample.
#[derive(Debug, Clone)]
pub struct SampleGrad {
    pub loss: f64,
    pub logits: Vec<f64>,
    pub hidden_spikes: u64,
    pub grads: Vec<Vec<f64>>,
}

pub fn loss_and_grad(
    model: &NetworkModel,
    input: &SpikeRaster,
    label: usize,
    theta: f64,
    spike_fn: SpikeFn,
    surrogate: Surrogate,
) -> Result<SampleGrad> {
    let sim = model.simulate(input, theta, spike_fn, true)?;
    let tape = sim.tape.expect("tape requested");
    let (loss, g_logits) = cross_entropy(&sim.logits, label);
    let grads = backward(model, &tape, &g_logits, theta, surrogate);
    Ok(SampleGrad {
        loss,
        logits: sim.logits,
        hidden_spikes: sim.hidden_spikes,
        grads,
    })
}

fn backward(
    model: &NetworkModel,
    tape: &Tape,
    g_logits: &[f64],
    theta: f64,
    surrogate: Surrogate,
) -> Vec<Vec<f64>> {
    let n_layers = model.layers.len();
    let readout = n_layers - 1;
    let n_steps = tape.pre_reset[0].len();
    let mut grads: Vec<Vec<f64>> = model.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect();
    // Gradient w.r.t. the spikes emitted by the layer below, per step.
    let mut g_below: Vec<Vec<f64>> = Vec::new();

    for ell in (0..n_layers).rev() {
        let layer = &model.layers[ell];
        let dec = layer.params.decay();
        let (n_in, n_out) = (layer.n_in, layer.n_out);
        let am = dec.alpha_m;
        let need_gx = ell > 0;
        let mut g_next_below = if need_gx {
            vec![vec![0.0; n_in]; n_steps]
        } else {
            Vec::new()
        };
        let mut gu_next = vec![0.0; n_out];
        let mut gi_next = vec![0.0; n_out];
        let mut gu = vec![0.0; n_out];
        let mut ga = vec![0.0; n_out];
        let dw = &mut grads[ell];

        for t in (0..n_steps).rev() {
            let u = &tape.pre_reset[ell][t];
            if ell == readout {
                for k in 0..n_out {
                    gu[k] = g_logits[k] + am * gu_next[k];
                }
            } else {
                let s = &tape.spikes[ell][t];
                let gs_ext = &g_below[t];
                for k in 0..n_out {
                    let gv = am * gu_next[k];
                    let gs = gs_ext[k] + gv * (dec.v_reset - u[k]);
                    gu[k] = gv * (1.0 - s[k]) + gs * surrogate.grad(u[k], theta);
                }
            }
            for k in 0..n_out {
                let a = dec.alpha_s[k];
                let gi = a * gi_next[k] + (1.0 - am) * gu[k];
                gi_next[k] = gi;
                ga[k] = (1.0 - a) * gi;
            }
            gu_next.copy_from_slice(&gu);

            let x = &tape.inputs[ell][t];
            for (i, &xi) in x.iter().enumerate() {
                let row = &layer.weights[i * n_out..(i + 1) * n_out];
                if xi != 0.0 {
                    let drow = &mut dw[i * n_out..(i + 1) * n_out];
                    for (d, &g) in drow.iter_mut().zip(&ga) {
                        *d += xi * g;
                    }
                }
                if need_gx {
                    g_next_below[t][i] = row.iter().zip(&ga).map(|(w, g)| w * g).sum();
                }
            }
        }
        g_below = g_next_below;
    }
    grads
}

/// Loss of the fully smooth network, for gradient checking.
pub fn relaxed_forward(
    model: &NetworkModel,
    input: &SpikeRaster,
    label: usize,
    theta: f64,
    surrogate: Surrogate,
) -> Result<f64> {
    let sim = model.simulate(input, theta, SpikeFn::Relaxed(surrogate), false)?;
    Ok(cross_entropy(&sim.logits, label).0)
}
