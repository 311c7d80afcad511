//! Spike probability of a gaussian membrane under a fixed threshold versus a
//! uniformly drawn one, and the discrete approximation of the latter.

use spikewise::analysis::{
    expected_spike_prob_continuous, expected_spike_prob_discrete, jensen_gap, spike_prob_fixed,
    MembraneDistribution,
};
use spikewise::ThresholdDistribution;

fn main() -> spikewise::Result<()> {
    let (lo, hi) = (1.0, 1.5);
    println!("mean   P(fixed 1.25)  E[P] over U(1,1.5)  gap");
    for mean in [0.6, 1.0, 1.25, 1.5, 2.0] {
        let g = MembraneDistribution::gaussian(mean, 0.3)?;
        println!(
            "{mean:.2}   {:.5}        {:.5}             {:+.5}",
            spike_prob_fixed(&g, 0.5 * (lo + hi)),
            expected_spike_prob_continuous(&g, lo, hi)?,
            jensen_gap(&g, lo, hi)?
        );
    }

    let g = MembraneDistribution::gaussian(1.3, 0.3)?;
    let exact = expected_spike_prob_continuous(&g, lo, hi)?;
    for n in [5, 10, 20, 40] {
        let d = ThresholdDistribution::discrete(lo, hi, (hi - lo) / n as f64);
        let approx = expected_spike_prob_discrete(&g, &d.support())?;
        println!("{:3} thresholds: error {:.2e}", n + 1, (approx - exact).abs());
    }
    Ok(())
}
