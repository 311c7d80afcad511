//! Load one UCI-HAR split and encode it.
//!
//! ```text
//! cargo run --example ucihar_loading -- "/path/UCI HAR Dataset/test"
//! ```
//!
//! Without an argument a two-window fixture is written to a temp directory
//! and loaded instead.

use std::fs;
use std::path::PathBuf;

use spikewise::data::{load_ucihar_raw, EncodedDataset};
use spikewise::encoder::{Encoder, EncoderConfig};

fn fixture() -> std::io::Result<PathBuf> {
    let dir = std::env::temp_dir().join("spikewise_ucihar").join("test");
    fs::create_dir_all(dir.join("Inertial Signals"))?;
    fs::write(dir.join("y_test.txt"), "1\n5\n")?;
    for (k, axis) in ["x", "y", "z"].iter().enumerate() {
        let rows: Vec<String> = (0..2)
            .map(|r| {
                (0..128)
                    .map(|t| format!("{:e}", (0.3 * (t + 7 * r + k) as f64).sin()))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        fs::write(dir.join("Inertial Signals").join(format!("total_acc_{axis}_test.txt")), rows.join("\n"))?;
    }
    Ok(dir)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => fixture()?,
    };
    let ds = load_ucihar_raw(&dir)?;
    println!("{}: {} windows", dir.display(), ds.len());
    let mut per_class = vec![0; ds.n_classes()];
    for l in ds.labels() {
        per_class[l] += 1;
    }
    println!("windows per class {per_class:?}");
    let enc = Encoder::new(EncoderConfig::default_for(50.0))?;
    let encoded = EncodedDataset::encode(&enc, &ds)?;
    let total: u64 = encoded.rasters().iter().map(|r| r.spike_count()).sum();
    println!("mean input spikes per window {:.1}", total as f64 / encoded.len() as f64);
    Ok(())
}
