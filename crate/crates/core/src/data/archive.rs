//! Binary archives for datasets and encoded rasters.
//!
//! Both archive kinds share one framing, all integers little-endian:
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 8    | magic (`SWDSET\0\0` or `SWRAST\0\0`)    |
//! | 8      | 4    | version (u32)                           |
//! | 12     | 8    | payload length in bytes (u64)           |
//! | 20     | 32   | SHA-256 of the payload                  |
//! | 52     | ...  | payload                                 |
//!
//! Dataset payload: `n_windows u64, n_classes u32, n_channels u32,
//! window_len u64, sample_rate f64`, then per window `label u32` followed by
//! `window_len * n_channels` f64 samples, time-major.
//!
//! Raster payload: `n_items u64, n_classes u32, n_channels u32, n_steps u64,
//! dt f64`, then per item `label u32` followed by the row-major spike bits
//! packed LSB-first into `ceil(n_steps * n_channels / 8)` bytes.

use std::fs;
use std::path::Path;

use byteorder::{ByteOrder, LittleEndian, WriteBytesExt};
use sha2::{Digest, Sha256};

use super::{Dataset, EncodedDataset, LabeledWindow, TimeSeries};
use crate::error::{Error, Result};
use crate::lif::SpikeRaster;

pub const ARCHIVE_VERSION: u32 = 1;
const DATASET_MAGIC: &[u8; 8] = b"SWDSET\0\0";
const RASTER_MAGIC: &[u8; 8] = b"SWRAST\0\0";
const HEADER_LEN: usize = 52;

fn sha256(payload: &[u8]) -> [u8; 32] {
    let mut out = [0u8; 32];
    out.copy_from_slice(&Sha256::digest(payload));
    out
}

/// Lowercase hex SHA-256 of arbitrary bytes.
pub fn digest_hex(bytes: &[u8]) -> String {
    sha256(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn frame(magic: &[u8; 8], payload: Vec<u8>) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(magic);
    out.write_u32::<LittleEndian>(ARCHIVE_VERSION).unwrap();
    out.write_u64::<LittleEndian>(payload.len() as u64).unwrap();
    out.extend_from_slice(&sha256(&payload));
    out.extend_from_slice(&payload);
    out
}

/// Bounds-checked little-endian reader that reports absolute offsets.
struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Truncated {
                offset: self.bytes.len() as u64,
                what,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(LittleEndian::read_u32(self.take(4, what)?))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64> {
        Ok(LittleEndian::read_u64(self.take(8, what)?))
    }

    fn usize(&mut self, what: &'static str) -> Result<usize> {
        usize::try_from(self.u64(what)?).map_err(|_| Error::invalid(what, "does not fit in usize"))
    }

    fn f64(&mut self, what: &'static str) -> Result<f64> {
        Ok(LittleEndian::read_f64(self.take(8, what)?))
    }
}

/// Validate framing and return a reader positioned at the payload.
fn unframe<'a>(bytes: &'a [u8], magic: &[u8; 8]) -> Result<Reader<'a>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8, "magic")? != magic {
        return Err(Error::Magic);
    }
    let version = r.u32("version")?;
    if version != ARCHIVE_VERSION {
        return Err(Error::Version {
            found: version,
            expected: ARCHIVE_VERSION,
        });
    }
    let len = r.usize("payload length")?;
    let sum = r.take(32, "checksum")?;
    let payload_start = r.pos;
    if bytes.len() - payload_start < len {
        return Err(Error::Truncated {
            offset: bytes.len() as u64,
            what: "payload",
        });
    }
    if bytes.len() - payload_start > len {
        return Err(Error::invalid("archive", "trailing bytes after payload"));
    }
    if sha256(&bytes[payload_start..]) != sum {
        return Err(Error::Checksum);
    }
    Ok(r)
}

pub fn write_dataset(ds: &Dataset) -> Vec<u8> {
    let (n_channels, window_len, sample_rate) = ds
        .windows()
        .first()
        .map(|w| (w.imu.n_channels(), w.imu.len(), w.imu.sample_rate()))
        .unwrap_or((3, 0, 0.0));
    let mut p = Vec::new();
    p.write_u64::<LittleEndian>(ds.len() as u64).unwrap();
    p.write_u32::<LittleEndian>(ds.n_classes() as u32).unwrap();
    p.write_u32::<LittleEndian>(n_channels as u32).unwrap();
    p.write_u64::<LittleEndian>(window_len as u64).unwrap();
    p.write_f64::<LittleEndian>(sample_rate).unwrap();
    for w in ds.windows() {
        p.write_u32::<LittleEndian>(w.label as u32).unwrap();
        for &x in w.imu.data() {
            p.write_f64::<LittleEndian>(x).unwrap();
        }
    }
    frame(DATASET_MAGIC, p)
}

pub fn read_dataset(bytes: &[u8]) -> Result<Dataset> {
    let mut r = unframe(bytes, DATASET_MAGIC)?;
    let n = r.usize("n_windows")?;
    let n_classes = r.u32("n_classes")? as usize;
    let n_channels = r.u32("n_channels")? as usize;
    let len = r.usize("window_len")?;
    let sample_rate = r.f64("sample_rate")?;
    let mut windows = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let label = r.u32("label")? as usize;
        let data = (0..len * n_channels)
            .map(|_| r.f64("sample"))
            .collect::<Result<Vec<_>>>()?;
        windows.push(LabeledWindow {
            imu: TimeSeries::new(sample_rate, n_channels, data)?,
            label,
        });
    }
    Dataset::new(windows, n_classes)
}

pub fn write_rasters(ds: &EncodedDataset) -> Vec<u8> {
    let (n_channels, n_steps, dt) = ds
        .rasters()
        .first()
        .map(|r| (r.n_channels(), r.n_steps(), r.dt()))
        .unwrap_or((0, 0, 1.0));
    let mut p = Vec::new();
    p.write_u64::<LittleEndian>(ds.len() as u64).unwrap();
    p.write_u32::<LittleEndian>(ds.n_classes() as u32).unwrap();
    p.write_u32::<LittleEndian>(n_channels as u32).unwrap();
    p.write_u64::<LittleEndian>(n_steps as u64).unwrap();
    p.write_f64::<LittleEndian>(dt).unwrap();
    for (raster, label) in ds.iter() {
        p.write_u32::<LittleEndian>(label as u32).unwrap();
        let mut packed = vec![0u8; raster.data().len().div_ceil(8)];
        for (k, &b) in raster.data().iter().enumerate() {
            packed[k / 8] |= b << (k % 8);
        }
        p.extend_from_slice(&packed);
    }
    frame(RASTER_MAGIC, p)
}

pub fn read_rasters(bytes: &[u8]) -> Result<EncodedDataset> {
    let mut r = unframe(bytes, RASTER_MAGIC)?;
    let n = r.usize("n_items")?;
    let n_classes = r.u32("n_classes")? as usize;
    let n_channels = r.u32("n_channels")? as usize;
    let n_steps = r.usize("n_steps")?;
    let dt = r.f64("dt")?;
    let cells = n_steps * n_channels;
    let mut rasters = Vec::with_capacity(n.min(1 << 20));
    let mut labels = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        labels.push(r.u32("label")? as usize);
        let packed = r.take(cells.div_ceil(8), "spike bits")?;
        let data = (0..cells).map(|k| (packed[k / 8] >> (k % 8)) & 1).collect();
        rasters.push(SpikeRaster::from_data(n_steps, n_channels, dt, data)?);
    }
    EncodedDataset::new(rasters, labels, n_classes)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &write_dataset(ds))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    read_dataset(&read_file(path.as_ref())?)
}

pub fn save_rasters(ds: &EncodedDataset, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &write_rasters(ds))
}

pub fn load_rasters(path: impl AsRef<Path>) -> Result<EncodedDataset> {
    read_rasters(&read_file(path.as_ref())?)
}
