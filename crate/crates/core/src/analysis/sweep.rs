//! Post-training threshold sweeps and their CSV report format.
//!
//! A sweep report looks like
//!
//! ```text
//! # baseline,fixed,1,0.93,812.5
//! # spike_count,hidden_layers
//! # model_path,runs/fixed/model.json
//! model_id,theta,accuracy,mean_spikes,dAcc_rel,dSpk_rel
//! fixed,0.6,0.91,1503.2,-0.0215,0.85
//! ```
//!
//! `#` lines are `key,value...` metadata; the baseline line carries
//! `model_id,theta,accuracy,mean_spikes` of the reference point the relative
//! columns are computed against.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::delta_metrics;
use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::network::NetworkModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub theta: f64,
    /// Fraction in [0, 1].
    pub accuracy: f64,
    /// Hidden-layer spikes per sample.
    pub mean_spikes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub model_id: String,
    pub points: Vec<OperatingPoint>,
}

impl SweepCurve {
    pub fn validate(&self) -> Result<()> {
        if self.points.windows(2).any(|w| !(w[0].theta < w[1].theta)) {
            return Err(Error::invalid(
                format!("curve {}", self.model_id),
                "thetas must be strictly increasing",
            ));
        }
        Ok(())
    }

    /// The point whose theta is closest to `theta`.
    pub fn nearest(&self, theta: f64) -> Option<&OperatingPoint> {
        self.points
            .iter()
            .min_by(|a, b| (a.theta - theta).abs().total_cmp(&(b.theta - theta).abs()))
    }

    pub fn at(&self, theta: f64) -> Option<&OperatingPoint> {
        self.points.iter().find(|p| (p.theta - theta).abs() < 1e-9)
    }
}

/// Evenly spaced threshold grid `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for ThetaGrid {
    /// 0.6 to 2.4 in steps of 0.2.
    fn default() -> Self {
        Self {
            start: 0.6,
            stop: 2.4,
            step: 0.2,
        }
    }
}

impl ThetaGrid {
    /// Parse `start:stop:step`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let field = |k: usize, name: &str| -> Result<f64> {
            parts
                .get(k)
                .and_then(|p| p.trim().parse().ok())
                .ok_or_else(|| Error::invalid(format!("grid.{name}"), format!("cannot parse {s:?}")))
        };
        if parts.len() != 3 {
            return Err(Error::invalid("grid", format!("expected start:stop:step, got {s:?}")));
        }
        let grid = Self {
            start: field(0, "start")?,
            stop: field(1, "stop")?,
            step: field(2, "step")?,
        };
        grid.points()?;
        Ok(grid)
    }

    /// Grid values, rounded to 1e-9 so that decimal steps print cleanly.
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid("grid.step", "must be > 0"));
        }
        if !(self.start > 0.0 && self.start <= self.stop && self.stop.is_finite()) {
            return Err(Error::invalid("grid.start", "need 0 < start <= stop"));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n)
            .map(|k| ((self.start + k as f64 * self.step) * 1e9).round() / 1e9)
            .collect())
    }
}

/// Accuracy and mean hidden spike count over the whole dataset at `theta`.
pub fn evaluate(model: &NetworkModel, data: &EncodedDataset, theta: f64) -> Result<OperatingPoint> {
    if data.is_empty() {
        return Err(Error::Empty("evaluation dataset"));
    }
    let results = data
        .rasters()
        .par_iter()
        .map(|r| model.classify(r, theta))
        .collect::<Result<Vec<_>>>()?;
    let correct = results
        .iter()
        .zip(data.labels())
        .filter(|((d, _), &l)| *d == l)
        .count();
    let spikes: u64 = results.iter().map(|&(_, s)| s).sum();
    Ok(OperatingPoint {
        theta,
        accuracy: correct as f64 / data.len() as f64,
        mean_spikes: spikes as f64 / data.len() as f64,
    })
}

/// Evaluate `model` at every grid threshold without touching its weights.
pub fn sweep(
    model: &NetworkModel,
    data: &EncodedDataset,
    theta_grid: &[f64],
    model_id: &str,
) -> Result<SweepCurve> {
    if data.is_empty() {
        return Err(Error::Empty("sweep dataset"));
    }
    let points = theta_grid
        .iter()
        .map(|&t| evaluate(model, data, t))
        .collect::<Result<Vec<_>>>()?;
    let curve = SweepCurve {
        model_id: model_id.to_owned(),
        points,
    };
    curve.validate()?;
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    pub model_id: String,
    pub point: OperatingPoint,
}

/// A sweep curve with its baseline and free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub curve: SweepCurve,
    pub baseline: Baseline,
    pub meta: Vec<(String, String)>,
}

pub const SWEEP_HEADER: &str = "model_id,theta,accuracy,mean_spikes,dAcc_rel,dSpk_rel";

impl SweepReport {
    pub fn to_csv(&self) -> Result<String> {
        let b = &self.baseline;
        let mut out = String::new();
        writeln!(
            out,
            "# baseline,{},{},{},{}",
            b.model_id, b.point.theta, b.point.accuracy, b.point.mean_spikes
        )
        .unwrap();
        for (k, v) in &self.meta {
            writeln!(out, "# {k},{v}").unwrap();
        }
        writeln!(out, "{SWEEP_HEADER}").unwrap();
        for p in &self.curve.points {
            let (da, ds) = delta_metrics(p, &b.point)?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.curve.model_id, p.theta, p.accuracy, p.mean_spikes, da, ds
            )
            .unwrap();
        }
        Ok(out)
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn from_csv(text: &str, source: impl AsRef<Path>) -> Result<Self> {
        let source = source.as_ref();
        let err = |line: usize, reason: String| Error::Parse {
            path: source.to_path_buf(),
            line,
            reason,
        };
        let num = |line: usize, s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| err(line, format!("bad number {s:?}")))
        };
        let mut baseline = None;
        let mut meta = Vec::new();
        let mut model_id: Option<String> = None;
        let mut points = Vec::new();
        let mut seen_header = false;
        for (k, line) in text.lines().enumerate() {
            let n = k + 1;
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                let (key, value) = rest.split_once(',').unwrap_or((rest, ""));
                if key == "baseline" {
                    let f: Vec<&str> = value.split(',').collect();
                    if f.len() != 4 {
                        return Err(err(n, "baseline needs model_id,theta,accuracy,mean_spikes".into()));
                    }
                    baseline = Some(Baseline {
                        model_id: f[0].to_owned(),
                        point: OperatingPoint {
                            theta: num(n, f[1])?,
                            accuracy: num(n, f[2])?,
                            mean_spikes: num(n, f[3])?,
                        },
                    });
                } else {
                    meta.push((key.to_owned(), value.to_owned()));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !seen_header {
                if line.trim() != SWEEP_HEADER {
                    return Err(err(n, format!("expected header {SWEEP_HEADER:?}")));
                }
                seen_header = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(err(n, format!("expected 6 fields, got {}", f.len())));
            }
            match &model_id {
                None => model_id = Some(f[0].to_owned()),
                Some(id) if id != f[0] => {
                    return Err(err(n, format!("mixed model ids {id:?} and {:?}", f[0])))
                }
                _ => {}
            }
            points.push(OperatingPoint {
                theta: num(n, f[1])?,
                accuracy: num(n, f[2])?,
                mean_spikes: num(n, f[3])?,
            });
        }
        let baseline = baseline.ok_or_else(|| err(1, "missing '# baseline' line".into()))?;
        let curve = SweepCurve {
            model_id: model_id.ok_or_else(|| err(0, "no data rows".into()))?,
            points,
        };
        curve.validate()?;
        Ok(Self {
            curve,
            baseline,
            meta,
        })
    }
}
