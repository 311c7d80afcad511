//! Train one network with a fixed threshold and one with thresholds drawn
//! from U(1.0, 1.5), then compare them away from the nominal threshold.
//!
//! ```text
//! cargo run --release --example train_stochastic -- [epochs]
//! ```

use spikewise::analysis::evaluate;
use spikewise::data::{make_synthetic, EncodedDataset, SyntheticSpec};
use spikewise::encoder::{Encoder, EncoderConfig};
use spikewise::{train, SynNetBuilder, ThresholdDistribution, TrainConfig};

fn main() -> spikewise::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30);
    let enc = Encoder::new(EncoderConfig::default_for(50.0))?;
    let split = |wpc, seed| -> spikewise::Result<EncodedDataset> {
        EncodedDataset::encode(&enc, &make_synthetic(&SyntheticSpec::three_class(wpc, seed))?)
    };
    let (train_set, test_set) = (split(100, 1)?, split(100, 2)?);
    let init = SynNetBuilder::new(3, 7).build()?;

    for dist in [ThresholdDistribution::fixed(1.0), ThresholdDistribution::continuous(1.0, 1.5)] {
        let cfg = TrainConfig { epochs, seed: 3, dist: dist.clone(), ..Default::default() };
        let (model, history) = train(&init, &train_set, &cfg)?;
        let last = history.epochs.last().expect("at least one epoch");
        println!("{}: final loss {:.3}, train acc {:.3}", dist.label(), last.mean_loss, last.accuracy);
        for theta in [1.0, 1.3, 1.6] {
            let p = evaluate(&model, &test_set, theta)?;
            println!("  theta {theta:.1}: acc {:.3}, {:.0} spikes", p.accuracy, p.mean_spikes);
        }
    }
    Ok(())
}
