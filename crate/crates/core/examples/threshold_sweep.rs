//! Sweep a briefly trained model over the default threshold grid and print
//! each point relative to the nominal threshold.

use spikewise::analysis::{delta_metrics, evaluate, sweep, ThetaGrid};
use spikewise::data::{make_synthetic, EncodedDataset, SyntheticSpec};
use spikewise::encoder::{Encoder, EncoderConfig};
use spikewise::{train, SynNetBuilder, ThresholdDistribution, TrainConfig};

fn main() -> spikewise::Result<()> {
    let enc = Encoder::new(EncoderConfig::default_for(50.0))?;
    let data = EncodedDataset::encode(&enc, &make_synthetic(&SyntheticSpec::three_class(30, 1))?)?;
    let cfg = TrainConfig {
        epochs: 8,
        dist: ThresholdDistribution::discrete(1.0, 1.5, 0.1),
        ..Default::default()
    };
    let (model, _) = train(&SynNetBuilder::new(3, 7).build()?, &data, &cfg)?;

    let grid = ThetaGrid::default().points()?;
    let curve = sweep(&model, &data, &grid, "demo")?;
    let base = evaluate(&model, &data, 1.0)?;
    println!("theta  acc    spikes  dAcc     dSpk");
    for p in &curve.points {
        let (da, ds) = delta_metrics(p, &base)?;
        println!("{:.1}    {:.3}  {:6.1}  {:+.2}%  {:+.1}%", p.theta, p.accuracy, p.mean_spikes, 100.0 * da, 100.0 * ds);
    }
    Ok(())
}
