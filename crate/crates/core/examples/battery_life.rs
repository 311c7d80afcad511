//! Battery life of a wearable at different mean spike counts.

use spikewise::pareto::{battery_days, spikes_to_power, EnergyModel};

fn main() -> spikewise::Result<()> {
    println!("100 mAh @ 3.7 V, 120 uW: {:.1} days", battery_days(100.0, 3.7, 120e-6)?);
    println!("200 mAh @ 3.7 V, 100 uW: {:.1} days", battery_days(200.0, 3.7, 100e-6)?);

    // anchor two measured (spikes, power) pairs, then interpolate
    let em = EnergyModel::calibrate((10_000.0, 250e-6), (5_000.0, 150e-6), 2.56)?;
    println!("calibrated: {:.3e} J/spike, idle {:.1} uW", em.e_spike, em.p_idle * 1e6);
    for spikes in [2_000.0, 5_000.0, 8_570.0, 16_017.0] {
        let p = spikes_to_power(spikes, &em);
        println!("{spikes:>7} spikes: {:6.1} uW, {:5.1} days", p * 1e6, battery_days(100.0, 3.7, p)?);
    }
    Ok(())
}
