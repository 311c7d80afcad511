//! Encode a two-tone IMU window and show which channels fire.

use std::f64::consts::PI;

use spikewise::data::TimeSeries;
use spikewise::encoder::{Encoder, EncoderConfig};

fn main() -> spikewise::Result<()> {
    let fs = 50.0;
    let n = 256;
    let mut data = vec![0.0; n * 3];
    for t in 0..n {
        let s = t as f64 / fs;
        data[t * 3] = (2.0 * PI * 3.0 * s).sin(); // X: 3 Hz
        data[t * 3 + 2] = 0.8 * (2.0 * PI * 12.0 * s).sin(); // Z: 12 Hz
    }
    let imu = TimeSeries::new(fs, 3, data)?;

    let enc = Encoder::new(EncoderConfig::default_for(fs))?;
    for (band, hz) in &enc.bank().clipped {
        println!("band {band}: high edge {hz} Hz clipped below Nyquist");
    }
    let raster = enc.encode(&imu)?;
    println!("{} steps x {} channels, {} spikes", raster.n_steps(), raster.n_channels(), raster.spike_count());
    for (c, count) in raster.channel_counts().iter().enumerate() {
        let f = &enc.bank().filters[c % 5];
        println!(
            "ch {c:2} axis {} {:5.2}-{:5.2} Hz  {}",
            ["x", "y", "z"][c / 5],
            f.low_hz,
            f.high_hz,
            "#".repeat((*count as usize).div_ceil(2))
        );
    }
    Ok(())
}
