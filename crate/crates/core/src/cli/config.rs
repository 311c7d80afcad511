//! TOML run configuration. Every key is optional; command-line flags win over
//! file values, and the resolved settings are written next to the outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable that replaces the output directory when `--out` is
/// not given.
pub const OUT_DIR_ENV: &str = "SPIKEWISE_OUT_DIR";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub synth: SynthSection,
    pub encode: EncodeSection,
    pub train: TrainSection,
    pub sweep: SweepSection,
    pub energy: EnergySection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub windows_per_class: Option<usize>,
    pub noise_std: Option<f64>,
    pub amplitude_jitter: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodeSection {
    pub iaf_threshold: Option<f64>,
    pub filter_order: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub dist: Option<String>,
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub batch_size: Option<usize>,
    pub scheduler: Option<String>,
    pub init_gain: Option<f64>,
    pub readout_gain: Option<f64>,
    pub tau_config: Option<Vec<u32>>,
    pub surrogate_width: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub grid: Option<String>,
    pub baseline_theta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySection {
    pub e_spike: Option<f64>,
    pub p_idle: Option<f64>,
    pub window: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                path: source.to_path_buf(),
                line,
                reason: e.message().to_owned(),
            }
        })
    }
}

/// `flag` if given, else `file`, else `default`.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Output directory from `--out`, then the environment, then the file, then
/// the current directory.
pub fn resolve_out_dir(flag: Option<PathBuf>, file: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or(file)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Snapshot of the settings a command actually ran with.
#[derive(Debug, Clone, Serialize)]
pub struct Snapshot<'a, T: Serialize> {
    pub command: &'a str,
    pub seed: u64,
    pub threads: usize,
    pub out_dir: &'a Path,
    pub settings: T,
}

impl<T: Serialize> Snapshot<'_, T> {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::invalid("config snapshot", e.to_string()))
    }
}
