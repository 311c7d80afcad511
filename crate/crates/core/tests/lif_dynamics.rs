mod common;

use proptest::prelude::*;
use spikewise::lif::{lif_step, LifParams, LifState};

fn run(params: &LifParams, inputs: &[f64], theta: f64) -> (Vec<f64>, u32) {
    let mut st = LifState::zeros(1);
    let mut vs = Vec::new();
    let mut spikes = 0;
    for &x in inputs {
        spikes += u32::from(lif_step(&mut st, params, &[x], theta).unwrap()[0]);
        vs.push(st.v_m[0]);
    }
    (vs, spikes)
}

#[test]
fn constant_input_matches_frozen_closed_form() {
    let params = LifParams::uniform(1, 4.0, 2.0);
    let (vs, spikes) = run(&params, &[1.5; 20], 1e9);
    assert_eq!(spikes, 0);
    // closed-form oracle values at n = 1, 2, 5, 20
    for (n, frozen) in [
        (1, 0.1305526649354647),
        (2, 0.311411376609813),
        (5, 0.8314393562971314),
        (20, 1.4820748381538753),
    ] {
        assert!((vs[n - 1] - frozen).abs() < 1e-14, "n={n}: {}", vs[n - 1]);
        let oracle = common::lif_closed_form(1.5, (-0.25f64).exp(), (-0.5f64).exp(), n as u32);
        assert!((oracle - frozen).abs() < 1e-14);
    }
}

#[test]
fn steady_state_is_input_plus_bias() {
    let params = LifParams { bias: 0.25, ..LifParams::uniform(1, 8.0, 2.0) };
    let (vs, _) = run(&params, &[0.6; 400], 1e9);
    assert!((vs[399] - 0.85).abs() < 1e-6);
}

#[test]
fn zero_input_decays_by_alpha_m() {
    let params = LifParams::uniform(1, 4.0, 2.0);
    let mut st = LifState { i_s: vec![0.0], v_m: vec![0.9] };
    let am = (-0.5f64).exp();
    let mut expected = 0.9;
    for _ in 0..30 {
        lif_step(&mut st, &params, &[0.0], 1.0).unwrap();
        expected *= am;
        assert!(((st.v_m[0] - expected) / expected).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn closed_form_holds_for_any_time_constants(
        current in -5.0f64..5.0,
        tau_s in 1.5f64..32.0,
        tau_m in 1.0f64..16.0,
        n in 1u32..60,
    ) {
        prop_assume!((tau_s - tau_m).abs() > 1e-3);
        let params = LifParams::uniform(1, tau_s, tau_m);
        let (vs, _) = run(&params, &vec![current; n as usize], 1e12);
        let oracle = common::lif_closed_form(current, (-1.0 / tau_s).exp(), (-1.0 / tau_m).exp(), n);
        prop_assert!((vs[n as usize - 1] - oracle).abs() <= 1e-10 * (1.0 + oracle.abs()));
    }

    /// With non-negative drive and reset to zero, a lower threshold never
    /// yields fewer spikes.
    #[test]
    fn spike_count_non_increasing_in_theta(
        inputs in prop::collection::vec(0.0f64..4.0, 1..80),
        lo in 0.1f64..2.0,
        extra in 0.0f64..2.0,
        tau_s in 1.0f64..16.0,
    ) {
        let params = LifParams::uniform(1, tau_s, 2.0);
        let (_, low) = run(&params, &inputs, lo);
        let (_, high) = run(&params, &inputs, lo + extra);
        prop_assert!(low >= high);
    }

    /// Below threshold the neuron is a linear filter of its input.
    #[test]
    fn subthreshold_response_is_linear(
        x in prop::collection::vec(-2.0f64..2.0, 1..40),
        y_seed in prop::collection::vec(-2.0f64..2.0, 40),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let params = LifParams::uniform(1, 4.0, 2.0);
        let y = &y_seed[..x.len()];
        let mix: Vec<f64> = x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        let (vx, _) = run(&params, &x, 1e12);
        let (vy, _) = run(&params, y, 1e12);
        let (vm, _) = run(&params, &mix, 1e12);
        for t in 0..x.len() {
            prop_assert!((vm[t] - (a * vx[t] + b * vy[t])).abs() < 1e-12);
        }
    }
}
