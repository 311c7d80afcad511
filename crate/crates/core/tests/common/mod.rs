//! Independent reference implementations shared by the integration tests.
//! The oracles do not call the library code they are compared against.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spikewise::lif::{LifParams, SpikeRaster, Surrogate};
use spikewise::network::{Layer, NetworkModel, SpikeFn};
use spikewise::trainer::{loss_and_grad, relaxed_forward};

/// Membrane potential after `n` steps of constant input `current` from rest,
/// in closed form (no firing).
pub fn lif_closed_form(current: f64, alpha_s: f64, alpha_m: f64, n: u32) -> f64 {
    let n = n as i32;
    current * (1.0 - alpha_m.powi(n))
        - current * (1.0 - alpha_m) * alpha_s * (alpha_m.powi(n) - alpha_s.powi(n))
            / (alpha_m - alpha_s)
}

/// Monte-Carlo estimate of `E_theta[P(V >= theta)]` for gaussian `V` and
/// `theta ~ U(lo, hi)`, with its standard error.
pub fn mc_spike_prob(mean: f64, std: f64, lo: f64, hi: f64, draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..draws {
        // Box-Muller
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        let v = mean + std * z;
        let theta = lo + (hi - lo) * rng.random::<f64>();
        if v >= theta {
            hits += 1;
        }
    }
    let p = hits as f64 / draws as f64;
    (p, (p * (1.0 - p) / draws as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pt {
    pub id: String,
    pub theta: f64,
    pub acc: f64,
    pub spk: f64,
}

fn dom(a: &Pt, b: &Pt) -> bool {
    a.acc >= b.acc && a.spk <= b.spk && (a.acc > b.acc || a.spk < b.spk)
}

fn key_less(a: &Pt, b: &Pt) -> bool {
    (a.id.as_str(), a.theta) < (b.id.as_str(), b.theta)
}

/// Pairwise O(n^2) non-dominated filter. Among identical (acc, spk) pairs only
/// the smallest (id, theta) survives. Returned sorted by (spk, -acc, id, theta).
pub fn brute_front(points: &[Pt]) -> Vec<Pt> {
    let mut out: Vec<Pt> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let mut keep = true;
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            if dom(q, p) {
                keep = false;
            }
            let same = q.acc == p.acc && q.spk == p.spk;
            if same && (key_less(q, p) || (q.id == p.id && q.theta == p.theta && j < i)) {
                keep = false;
            }
        }
        if keep {
            out.push(p.clone());
        }
    }
    out.sort_by(|a, b| {
        a.spk
            .partial_cmp(&b.spk)
            .unwrap()
            .then(b.acc.partial_cmp(&a.acc).unwrap())
            .then(a.id.cmp(&b.id))
            .then(a.theta.partial_cmp(&b.theta).unwrap())
    });
    out
}

/// Exhaustive single-curve selection: best accuracy under the cap, larger
/// theta on ties.
pub fn scan_single(points: &[Pt], cap: f64) -> Option<Pt> {
    let mut best: Option<&Pt> = None;
    for p in points {
        if p.spk > cap {
            continue;
        }
        best = match best {
            None => Some(p),
            Some(b) if p.acc > b.acc || (p.acc == b.acc && p.theta > b.theta) => Some(p),
            keep => keep,
        };
    }
    best.cloned()
}

/// Exhaustive multi-model selection: best accuracy, then fewer spikes, then
/// smaller id, then larger theta.
pub fn scan_multi(points: &[Pt], cap: f64) -> Option<Pt> {
    let mut best: Option<&Pt> = None;
    for p in points {
        if p.spk > cap {
            continue;
        }
        let better = |b: &Pt| {
            if p.acc != b.acc {
                return p.acc > b.acc;
            }
            if p.spk != b.spk {
                return p.spk < b.spk;
            }
            if p.id != b.id {
                return p.id < b.id;
            }
            p.theta > b.theta
        };
        if best.is_none_or(better) {
            best = Some(p);
        }
    }
    best.cloned()
}

/// A random 3-input, 4-hidden, 2-output network and a random 6-step input.
pub fn micro_net(seed: u64) -> (NetworkModel, SpikeRaster, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = |n: usize, scale: f64| -> Vec<f64> {
        (0..n).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect()
    };
    let hidden = LifParams {
        tau_s: vec![2.0, 2.0, 4.0, 4.0],
        ..LifParams::uniform(4, 2.0, 2.0)
    };
    let w1 = w(3 * 4, 4.0);
    let w2 = w(4 * 2, 2.0);
    let model = NetworkModel::from_layers(
        vec![
            Layer { n_in: 3, n_out: 4, params: hidden, weights: w1 },
            Layer { n_in: 4, n_out: 2, params: LifParams::uniform(2, 2.0, 2.0), weights: w2 },
        ],
        seed,
    )
    .unwrap();
    let data: Vec<u8> = (0..6 * 3).map(|_| u8::from(rng.random::<f64>() < 0.5)).collect();
    let input = SpikeRaster::from_data(6, 3, 1.0, data).unwrap();
    let label = (rng.random::<u32>() % 2) as usize;
    (model, input, label)
}

/// Dominant frequency among `candidates` by DFT power summed over the three
/// axes of a time-major window.
pub fn band_energy_class(window: &[f64], sample_rate: f64, candidates: &[f64]) -> usize {
    let n = window.len() / 3;
    let power = |f: f64| -> f64 {
        (0..3)
            .map(|axis| {
                let (mut re, mut im) = (0.0, 0.0);
                for t in 0..n {
                    let ph = 2.0 * std::f64::consts::PI * f * t as f64 / sample_rate;
                    re += window[t * 3 + axis] * ph.cos();
                    im += window[t * 3 + axis] * ph.sin();
                }
                re * re + im * im
            })
            .sum()
    };
    let mut best = 0;
    let mut best_p = f64::NEG_INFINITY;
    for (k, &f) in candidates.iter().enumerate() {
        let p = power(f);
        if p > best_p {
            best = k;
            best_p = p;
        }
    }
    best
}

/// Twenty (mean, std, theta_lo, theta_hi) cases for the probability checks.
/// Every fifth case puts the mean at or above `theta_hi`.
pub fn probability_cases() -> Vec<(f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    (0..20)
        .map(|k| {
            let lo = 0.6 + 0.9 * rng.random::<f64>();
            let hi = lo + 0.1 + 0.9 * rng.random::<f64>();
            let std = 0.2 + 1.3 * rng.random::<f64>();
            let mean = if k % 5 == 0 {
                hi + 1.5 * rng.random::<f64>()
            } else {
                0.3 + 2.7 * rng.random::<f64>()
            };
            (mean, std, lo, hi)
        })
        .collect()
}

/// A unit sine at `freq` Hz on one axis of a three-axis series.
pub fn sine_on_axis(axis: usize, freq: f64, fs: f64, n: usize) -> spikewise::data::TimeSeries {
    let mut data = vec![0.0; n * 3];
    for t in 0..n {
        data[t * 3 + axis] = (2.0 * std::f64::consts::PI * freq * t as f64 / fs).sin();
    }
    spikewise::data::TimeSeries::new(fs, 3, data).unwrap()
}

/// For every (axis, band): the fraction of spikes on the matching channel
/// and the number of spikes on other axes' channels, using the default
/// encoder at 50 Hz and a band-center sine.
pub fn encoder_selectivity() -> Vec<(usize, usize, f64, u64)> {
    use spikewise::encoder::{Encoder, EncoderConfig};
    let enc = Encoder::new(EncoderConfig::default_for(50.0)).unwrap();
    let n_bands = enc.bank().filters.len();
    let mut out = Vec::new();
    for axis in 0..3 {
        for band in 0..n_bands {
            let f = enc.bank().filters[band].geometric_center();
            let counts = enc.encode(&sine_on_axis(axis, f, 50.0, 512)).unwrap().channel_counts();
            let own: u64 = counts[axis * n_bands..(axis + 1) * n_bands].iter().sum();
            let total: u64 = counts.iter().sum();
            let frac = counts[axis * n_bands + band] as f64 / total.max(1) as f64;
            out.push((axis, band, frac, total - own));
        }
    }
    out
}

pub fn cli(dir: &std::path::Path, args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_spikewise"))
        .current_dir(dir)
        .env_remove("SPIKEWISE_OUT_DIR")
        .args(args)
        .output()
        .unwrap()
}

fn cli_ok(dir: &std::path::Path, args: &[&str]) -> String {
    let out = cli(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// synth, encode, train two models, sweep, pareto and select inside `dir`
/// using relative paths only. Returns every produced file, sorted by name,
/// plus the selection printed by `select`.
pub fn cli_pipeline(dir: &std::path::Path) -> (Vec<(String, Vec<u8>)>, String) {
    cli_ok(dir, &["--seed", "4", "synth", "--windows-per-class", "6", "--name", "train"]);
    cli_ok(dir, &["encode", "--input", "train.swd"]);
    for (name, dist) in [("fixed", "fixed:1.0"), ("stoch", "uniform:1.0:1.5")] {
        cli_ok(
            dir,
            &["--seed", "9", "train", "--data", "train.swr", "--dist", dist, "--epochs", "2", "--name", name],
        );
        cli_ok(dir, &["sweep", "--model", &format!("{name}.model.json"), "--data", "train.swr"]);
    }
    cli_ok(dir, &["pareto", "--sweeps", "fixed.sweep.csv", "stoch.sweep.csv"]);
    let chosen = cli_ok(dir, &["select", "--front", "front.csv", "--max-spikes", "1e9"]);
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    (files, chosen)
}

/// Largest relative error between the backward pass and central differences
/// of the relaxed network, over every weight of `micro_net(seed)`.
pub fn max_rel_error(seed: u64) -> f64 {
    let (model, input, label) = micro_net(seed);
    let sur = Surrogate::default();
    let theta = 1.0;
    let g = loss_and_grad(&model, &input, label, theta, SpikeFn::Relaxed(sur), sur).unwrap();
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for l in 0..model.layers.len() {
        for k in 0..model.layers[l].weights.len() {
            let mut plus = model.clone();
            plus.layers[l].weights[k] += h;
            let mut minus = model.clone();
            minus.layers[l].weights[k] -= h;
            let fd = (relaxed_forward(&plus, &input, label, theta, sur).unwrap()
                - relaxed_forward(&minus, &input, label, theta, sur).unwrap())
                / (2.0 * h);
            let an = g.grads[l][k];
            let err = (fd - an).abs() / fd.abs().max(an.abs()).max(1e-6);
            worst = worst.max(err);
        }
    }
    worst
}
