//! Generate the three-class synthetic set, save it, reload it and encode it.

use spikewise::data::{load_dataset, make_synthetic, save_dataset, EncodedDataset, SyntheticSpec};
use spikewise::encoder::{Encoder, EncoderConfig};

fn main() -> spikewise::Result<()> {
    let spec = SyntheticSpec::three_class(20, 1);
    let ds = make_synthetic(&spec)?;
    let path = std::env::temp_dir().join("spikewise_synthetic.swd");
    save_dataset(&ds, &path)?;
    let back = load_dataset(&path)?;
    assert_eq!(back, ds);
    println!("{} windows, {} classes, saved to {}", ds.len(), ds.n_classes(), path.display());

    let enc = Encoder::new(EncoderConfig::default_for(spec.sample_rate_hz))?;
    let encoded = EncodedDataset::encode(&enc, &ds)?;
    for class in 0..3 {
        let (n, spikes) = encoded
            .iter()
            .filter(|(_, l)| *l == class)
            .fold((0, 0), |(n, s), (r, _)| (n + 1, s + r.spike_count()));
        println!("class {class} ({} Hz): {:.1} input spikes per window", spec.signatures[class].tones[0].freq_hz, spikes as f64 / n as f64);
    }
    Ok(())
}
