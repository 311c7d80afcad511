//! Plain-text spike event lists.
//!
//! ```text
//! # spike-raster v1
//! dt 20
//! n_channels 15
//! n_steps 128
//! 0 3
//! 4 3
//! ```
//!
//! After the three header fields, each line is `t_index channel_index`,
//! sorted by time then channel.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lif::SpikeRaster;

const MAGIC: &str = "# spike-raster v1";

pub fn write_raster_text(raster: &SpikeRaster) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "dt {}", raster.dt()).unwrap();
    writeln!(out, "n_channels {}", raster.n_channels()).unwrap();
    writeln!(out, "n_steps {}", raster.n_steps()).unwrap();
    for (t, c) in raster.events() {
        writeln!(out, "{t} {c}").unwrap();
    }
    out
}

pub fn read_raster_text(text: &str, source: impl AsRef<Path>) -> Result<SpikeRaster> {
    let source = source.as_ref();
    let err = |line: usize, reason: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => return Err(err(1, format!("expected {MAGIC:?}"))),
    }
    let mut field = |name: &str| -> Result<String> {
        let (k, l) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing header field {name}")))?;
        l.strip_prefix(name)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(|v| v.trim().to_owned())
            .ok_or_else(|| err(k + 1, format!("expected header field {name}")))
    };
    let dt: f64 = field("dt")?.parse().map_err(|_| err(2, "bad dt".into()))?;
    let n_channels: usize = field("n_channels")?
        .parse()
        .map_err(|_| err(3, "bad n_channels".into()))?;
    let n_steps: usize = field("n_steps")?
        .parse()
        .map_err(|_| err(4, "bad n_steps".into()))?;
    let mut raster = SpikeRaster::from_data(n_steps, n_channels, dt, vec![0; n_steps * n_channels])?;
    for (k, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(t)), Some(Ok(c)), None) if t < n_steps && c < n_channels => {
                raster.set(t, c, true)
            }
            _ => return Err(err(k + 1, format!("bad event line {line:?}"))),
        }
    }
    Ok(raster)
}
