//! Drive a single LIF neuron with a step current and print its membrane
//! trace at a few thresholds.

use spikewise::lif::{lif_step, LifParams, LifState};

fn main() -> spikewise::Result<()> {
    let params = LifParams::uniform(1, 4.0, 2.0);
    let input: Vec<f64> = (0..40).map(|t| if (5..30).contains(&t) { 2.5 } else { 0.0 }).collect();

    for theta in [0.8, 1.2, 2.0] {
        let mut state = LifState::zeros(1);
        let mut raster = String::new();
        for &x in &input {
            let s = lif_step(&mut state, &params, &[x], theta)?;
            raster.push(if s[0] == 1 { '|' } else { '.' });
        }
        let count = raster.matches('|').count();
        println!("theta {theta:.1}  {raster}  {count} spikes");
    }

    // no reset: membrane converges to the input
    let mut state = LifState::zeros(1);
    for t in 1..=12 {
        lif_step(&mut state, &params, &[1.5], f64::MAX)?;
        println!("t={t:2} i_s={:.4} v_m={:.4}", state.i_s[0], state.v_m[0]);
    }
    Ok(())
}
