//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use spikewise::analysis::{
    apply_deltas, expected_spike_prob_continuous, expected_spike_prob_discrete, jensen_gap, sweep,
    MembraneDistribution, OperatingPoint, SweepCurve,
};
use spikewise::data::{make_synthetic, EncodedDataset, SyntheticSpec};
use spikewise::encoder::{Encoder, EncoderConfig};
use spikewise::lif::{lif_step, LifParams, LifState};
use spikewise::network::SynNetBuilder;
use spikewise::pareto::{battery_days, build_front, select_multi, select_single, Budget};
use spikewise::trainer::{train, Schedule, ThresholdDistribution, TrainConfig};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn lif_analytics() -> Outcome {
    let t = Instant::now();
    let params = LifParams::uniform(1, 4.0, 2.0);
    let alpha_m = (-0.5f64).exp();
    let mut st = LifState { i_s: vec![0.0], v_m: vec![0.9] };
    let mut expected = 0.9;
    let mut worst_decay: f64 = 0.0;
    for _ in 0..50 {
        lif_step(&mut st, &params, &[0.0], 1.0).unwrap();
        expected *= alpha_m;
        worst_decay = worst_decay.max(((st.v_m[0] - expected) / expected).abs());
    }
    let mut st = LifState::zeros(1);
    let mut worst_steady: f64 = 0.0;
    for n in 1..=400u32 {
        lif_step(&mut st, &params, &[1.5], 1e9).unwrap();
        let oracle = common::lif_closed_form(1.5, (-0.25f64).exp(), alpha_m, n);
        worst_steady = worst_steady.max((st.v_m[0] - oracle).abs());
    }
    let settled = (st.v_m[0] - 1.5).abs();
    let elapsed = t.elapsed();
    outcome(
        worst_decay < 1e-10 && worst_steady < 1e-6 && settled < 1e-6 && within(elapsed, 1.0),
        format!(
            "decay rel err {worst_decay:.1e}, closed-form err {worst_steady:.1e}, steady-state err {settled:.1e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn gradient_check() -> Outcome {
    let t = Instant::now();
    let worst = (0..100).map(common::max_rel_error).fold(0.0, f64::max);
    let elapsed = t.elapsed();
    outcome(
        worst < 1e-4 && within(elapsed, 30.0),
        format!("max rel err {worst:.2e} over 100 nets, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn encoder_selectivity() -> Outcome {
    let t = Instant::now();
    let table = common::encoder_selectivity();
    let worst = table.iter().map(|r| r.2).fold(1.0, f64::min);
    let leak: u64 = table.iter().map(|r| r.3).sum();
    let elapsed = t.elapsed();
    outcome(
        worst >= 0.8 && leak == 0 && within(elapsed, 10.0),
        format!(
            "worst on-channel fraction {worst:.3}, cross-axis spikes {leak}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn probability_suite() -> Outcome {
    let t = Instant::now();
    let cases = common::probability_cases();
    let mut worst_z: f64 = 0.0;
    let mut jensen_ok = true;
    let mut jensen_cases = 0;
    for (k, &(mean, std, lo, hi)) in cases.iter().enumerate() {
        let g = MembraneDistribution::gaussian(mean, std).unwrap();
        let p = expected_spike_prob_continuous(&g, lo, hi).unwrap();
        let (mc, se) = common::mc_spike_prob(mean, std, lo, hi, 1_000_000, 11 + k as u64);
        worst_z = worst_z.max((p - mc).abs() / se);
        if mean >= hi {
            jensen_cases += 1;
            jensen_ok &= jensen_gap(&g, lo, hi).unwrap() > 0.0;
        }
    }
    let mut worst_ratio_dev: f64 = 0.0;
    for &(mean, std, lo, hi) in &cases {
        let g = MembraneDistribution::gaussian(mean, std).unwrap();
        let exact = expected_spike_prob_continuous(&g, lo, hi).unwrap();
        let err = |intervals: u32| {
            let d = ThresholdDistribution::discrete(lo, hi, (hi - lo) / intervals as f64);
            (expected_spike_prob_discrete(&g, &d.support()).unwrap() - exact).abs()
        };
        let errs: Vec<f64> = [16, 32, 64, 128].iter().map(|&n| err(n)).collect();
        for w in errs.windows(2) {
            worst_ratio_dev = worst_ratio_dev.max((w[0] / w[1] - 2.0).abs());
        }
    }
    let elapsed = t.elapsed();
    outcome(
        worst_z <= 3.0 && worst_ratio_dev < 0.2 && jensen_ok && jensen_cases > 0 && within(elapsed, 60.0),
        format!(
            "max |z| {worst_z:.2} over {} cases, halving ratio off by <= {worst_ratio_dev:.3}, jensen > 0 on {jensen_cases} cases, {:.2}s",
            cases.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn metric_fixtures() -> Outcome {
    let base = |acc, spk| OperatingPoint { theta: 1.0, accuracy: acc, mean_spikes: spk };
    let (ku_acc, ku_spk) = apply_deltas(&base(84.7, 16017.0), 0.0012, -0.465);
    let (uci_acc, uci_spk) = apply_deltas(&base(75.86, 7933.0), 0.0214, 0.140);
    let ok = (ku_acc - 84.8).abs() <= 0.1
        && (ku_spk - 8570.0).abs() <= 5.0
        && (uci_acc - 77.4).abs() <= 0.1
        && (uci_spk - 9044.0).abs() <= 5.0;
    outcome(
        ok,
        format!("KU-HAR {ku_acc:.2}% / {ku_spk:.1}, UCI-HAR {uci_acc:.2}% / {uci_spk:.1}"),
    )
}

/// Train the fixed and stochastic models on the synthetic set and sweep
/// both on a held-out split.
fn robustness_curves() -> (SweepCurve, SweepCurve, f64) {
    let enc = Encoder::new(EncoderConfig::default_for(50.0)).unwrap();
    let split = |seed| {
        let ds = make_synthetic(&SyntheticSpec::three_class(100, seed)).unwrap();
        EncodedDataset::encode(&enc, &ds).unwrap()
    };
    let (train_set, test_set) = (split(1), split(2));
    let init = SynNetBuilder::new(3, 7).build().unwrap();
    let grid: Vec<f64> = (0..=18).map(|k| (6 + k) as f64 / 10.0).collect();
    let mut curves = Vec::new();
    let mut slowest: f64 = 0.0;
    for (id, dist) in [
        ("fixed", ThresholdDistribution::fixed(1.0)),
        ("stochastic", ThresholdDistribution::continuous(1.0, 1.5)),
    ] {
        let start = Instant::now();
        let cfg = TrainConfig {
            lr: 1e-3,
            epochs: 30,
            batch_size: 16,
            seed: 3,
            scheduler: Schedule::Constant,
            dist,
            ..Default::default()
        };
        let (model, _) = train(&init, &train_set, &cfg).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        curves.push(sweep(&model, &test_set, &grid, id).unwrap());
    }
    let stochastic = curves.pop().unwrap();
    (curves.pop().unwrap(), stochastic, slowest)
}

fn robustness(fixed: &SweepCurve, stochastic: &SweepCurve, slowest_s: f64) -> Outcome {
    let in_range = |c: &SweepCurve| -> Vec<OperatingPoint> {
        c.points.iter().filter(|p| p.theta >= 1.0 - 1e-9 && p.theta <= 1.6 + 1e-9).copied().collect()
    };
    let f0 = *fixed.at(1.0).unwrap();
    let s0 = *stochastic.at(1.0).unwrap();
    let fixed_drop = in_range(fixed).iter().map(|p| f0.accuracy - p.accuracy).fold(f64::MIN, f64::max);
    let stoch_dev = in_range(stochastic)
        .iter()
        .map(|p| (p.accuracy - s0.accuracy).abs())
        .fold(0.0, f64::max);
    // Cheapest stochastic point that matches the fixed model's nominal
    // accuracy to within 2.5 points.
    let matched = stochastic
        .points
        .iter()
        .filter(|p| p.accuracy >= f0.accuracy - 0.025)
        .min_by(|a, b| a.mean_spikes.total_cmp(&b.mean_spikes));
    let ratio = matched.map_or(f64::INFINITY, |m| m.mean_spikes / f0.mean_spikes);
    outcome(
        stoch_dev <= 0.05 && fixed_drop > 0.15 && ratio <= 0.7 && slowest_s < 600.0,
        format!(
            "stochastic max dev {:.1} pp, fixed max drop {:.1} pp, matched spikes ratio {ratio:.3} (theta {}), slowest train {slowest_s:.1}s",
            100.0 * stoch_dev,
            100.0 * fixed_drop,
            matched.map_or(f64::NAN, |m| m.theta),
        ),
    )
}

fn sweep_monotonicity(curves: &[&SweepCurve]) -> Outcome {
    let mut worst: f64 = 0.0;
    for c in curves {
        for w in c.points.windows(2) {
            worst = worst.max((w[1].mean_spikes - w[0].mean_spikes) / w[0].mean_spikes.max(1e-12));
        }
    }
    outcome(
        worst <= 0.01,
        format!("largest relative increase {:.4} over {} curves", worst.max(0.0), curves.len()),
    )
}

fn pareto_correctness() -> Outcome {
    use rand::{Rng, SeedableRng};
    let t = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = 0;
    for _ in 0..200 {
        let curves: Vec<SweepCurve> = (0..rng.random_range(1..=4))
            .map(|m| SweepCurve {
                model_id: format!("m{m}"),
                points: (0..rng.random_range(1..=12))
                    .map(|k| OperatingPoint {
                        theta: 0.6 + 0.2 * k as f64,
                        accuracy: rng.random_range(0..=20) as f64 / 20.0,
                        mean_spikes: 100.0 * rng.random_range(1..=30) as f64,
                    })
                    .collect(),
            })
            .collect();
        let pts: Vec<common::Pt> = curves
            .iter()
            .flat_map(|c| {
                c.points.iter().map(|p| common::Pt {
                    id: c.model_id.clone(),
                    theta: p.theta,
                    acc: p.accuracy,
                    spk: p.mean_spikes,
                })
            })
            .collect();
        let front = build_front(&curves).unwrap();
        let front_pts: Vec<common::Pt> = front
            .entries
            .iter()
            .map(|e| common::Pt { id: e.model_id.clone(), theta: e.theta, acc: e.accuracy, spk: e.mean_spikes })
            .collect();
        if front_pts != common::brute_front(&pts) {
            mismatches += 1;
        }
        let mut prev = f64::NEG_INFINITY;
        for cap in (1..=32).map(|k| 100.0 * k as f64) {
            let budget = Budget::spikes(cap).unwrap();
            let multi = select_multi(&front, &budget).unwrap();
            let want = common::scan_multi(&front_pts, cap);
            if multi.as_ref().map(|c| (c.model_id.clone(), c.point.theta))
                != want.as_ref().map(|w| (w.id.clone(), w.theta))
            {
                mismatches += 1;
            }
            let acc = multi.map_or(f64::NEG_INFINITY, |c| c.point.accuracy);
            if acc < prev {
                mismatches += 1;
            }
            prev = acc;
            for c in &curves {
                let single = select_single(c, &budget).unwrap().map(|c| c.point.theta);
                let own: Vec<common::Pt> = pts.iter().filter(|p| p.id == c.model_id).cloned().collect();
                if single != common::scan_single(&own, cap).map(|p| p.theta) {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = t.elapsed();
    outcome(
        mismatches == 0 && within(elapsed, 30.0),
        format!("{mismatches} mismatches over 200 sets, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn battery_arithmetic() -> Outcome {
    let small = battery_days(100.0, 3.7, 120e-6).unwrap();
    let large = battery_days(200.0, 3.7, 100e-6).unwrap();
    outcome(
        (small - 128.0).abs() <= 1.0 && large > 183.0,
        format!("100 mAh @ 120 uW: {small:.2} days; 200 mAh @ 100 uW: {large:.1} days"),
    )
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (fa, sa) = common::cli_pipeline(a.path());
    let (fb, sb) = common::cli_pipeline(b.path());
    let differing: Vec<&str> = fa
        .iter()
        .zip(&fb)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    outcome(
        fa.len() == fb.len() && differing.is_empty() && sa == sb,
        format!("{} artifacts compared, differing: {differing:?}", fa.len()),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |n: u32, name: &str, o: Outcome| {
        println!("{} criterion {n} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        if !o.ok {
            failed += 1;
        }
    };
    report(1, "lif analytics", lif_analytics());
    report(2, "gradient check", gradient_check());
    report(3, "encoder selectivity", encoder_selectivity());
    report(4, "spike probability", probability_suite());
    report(5, "metric fixtures", metric_fixtures());
    let (fixed, stochastic, slowest) = robustness_curves();
    report(6, "threshold robustness", robustness(&fixed, &stochastic, slowest));
    report(7, "sweep monotonicity", sweep_monotonicity(&[&fixed, &stochastic]));
    report(8, "pareto correctness", pareto_correctness());
    report(9, "battery arithmetic", battery_arithmetic());
    report(10, "determinism", determinism());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
