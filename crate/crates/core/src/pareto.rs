//! Global accuracy/spike front over several models' sweep curves, budgeted
//! selection of a (model, threshold) pair, and the spike to power model.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{OperatingPoint, SweepCurve};
use crate::error::{Error, Result};

/// Joules per spike used when nothing else is configured.
pub const DEFAULT_E_SPIKE: f64 = 23e-12;
/// 128 samples at 50 Hz.
pub const DEFAULT_WINDOW_S: f64 = 2.56;
pub const DEFAULT_P_IDLE: f64 = 120e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub model_id: String,
    pub theta: f64,
    pub accuracy: f64,
    pub mean_spikes: f64,
    /// Index of the segment of `model_id` this entry belongs to.
    pub segment: usize,
}

impl FrontEntry {
    pub fn point(&self) -> OperatingPoint {
        OperatingPoint {
            theta: self.theta,
            accuracy: self.accuracy,
            mean_spikes: self.mean_spikes,
        }
    }
}

/// A maximal run of consecutive grid thresholds of one model that all lie on
/// the front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub model_id: String,
    pub index: usize,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    /// Sorted by spikes ascending, then accuracy, model id and threshold.
    pub entries: Vec<FrontEntry>,
    pub segments: Vec<Segment>,
}

/// True when `a` dominates `b`: at least as accurate, at most as many spikes,
/// strictly better in one of the two.
pub fn dominates(a: &OperatingPoint, b: &OperatingPoint) -> bool {
    a.accuracy >= b.accuracy
        && a.mean_spikes <= b.mean_spikes
        && (a.accuracy > b.accuracy || a.mean_spikes < b.mean_spikes)
}

fn key_cmp(a: (&str, f64), b: (&str, f64)) -> Ordering {
    a.0.cmp(b.0).then(a.1.total_cmp(&b.1))
}

pub fn build_front(curves: &[SweepCurve]) -> Result<ParetoFront> {
    if curves.is_empty() {
        return Err(Error::Empty("sweep curves"));
    }
    for c in curves {
        c.validate()?;
        for (index, p) in c.points.iter().enumerate() {
            if !(p.accuracy.is_finite() && p.mean_spikes.is_finite() && p.theta.is_finite()) {
                return Err(Error::NonFinite { what: "operating point", index });
            }
        }
    }
    // (curve, grid index)
    let mut all: Vec<(usize, usize)> = curves
        .iter()
        .enumerate()
        .flat_map(|(c, curve)| (0..curve.points.len()).map(move |k| (c, k)))
        .collect();
    all.sort_by(|&(ca, ka), &(cb, kb)| {
        key_cmp(
            (&curves[ca].model_id, curves[ca].points[ka].theta),
            (&curves[cb].model_id, curves[cb].points[kb].theta),
        )
    });
    all.dedup_by(|b, a| {
        curves[a.0].model_id == curves[b.0].model_id
            && curves[a.0].points[a.1].theta == curves[b.0].points[b.1].theta
    });

    // In (spikes asc, accuracy desc, key asc) order a point survives iff it is
    // strictly more accurate than everything before it.
    let mut order = all.clone();
    order.sort_by(|&(ca, ka), &(cb, kb)| {
        let (pa, pb) = (&curves[ca].points[ka], &curves[cb].points[kb]);
        pa.mean_spikes
            .total_cmp(&pb.mean_spikes)
            .then(pb.accuracy.total_cmp(&pa.accuracy))
            .then(key_cmp(
                (&curves[ca].model_id, pa.theta),
                (&curves[cb].model_id, pb.theta),
            ))
    });
    let mut kept: Vec<(usize, usize)> = Vec::new();
    let mut best_acc = f64::NEG_INFINITY;
    for &(c, k) in &order {
        let p = &curves[c].points[k];
        if p.accuracy > best_acc {
            best_acc = p.accuracy;
            kept.push((c, k));
        }
    }

    let mut by_model: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    for &(c, k) in &kept {
        by_model.entry(&curves[c].model_id).or_default().push((c, k));
    }
    let mut segments = Vec::new();
    let mut seg_of = BTreeMap::new();
    for (id, mut members) in by_model {
        members.sort_by(|a, b| {
            curves[a.0].points[a.1].theta.total_cmp(&curves[b.0].points[b.1].theta)
        });
        let mut index = 0;
        let mut start = 0;
        for j in 0..members.len() {
            let ends = j + 1 == members.len() || {
                let (c0, k0) = members[j];
                let (c1, k1) = members[j + 1];
                !(c0 == c1 && k1 == k0 + 1)
            };
            seg_of.insert(members[j], index);
            if ends {
                segments.push(Segment {
                    model_id: id.to_owned(),
                    index,
                    theta_lo: curves[members[start].0].points[members[start].1].theta,
                    theta_hi: curves[members[j].0].points[members[j].1].theta,
                    len: j + 1 - start,
                });
                index += 1;
                start = j + 1;
            }
        }
    }

    let entries = kept
        .iter()
        .map(|ck| {
            let p = &curves[ck.0].points[ck.1];
            FrontEntry {
                model_id: curves[ck.0].model_id.clone(),
                theta: p.theta,
                accuracy: p.accuracy,
                mean_spikes: p.mean_spikes,
                segment: seg_of[ck],
            }
        })
        .collect();
    Ok(ParetoFront { entries, segments })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    pub e_spike: f64,
    pub p_idle: f64,
    pub window: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            e_spike: DEFAULT_E_SPIKE,
            p_idle: DEFAULT_P_IDLE,
            window: DEFAULT_WINDOW_S,
        }
    }
}

impl EnergyModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("energy.e_spike", self.e_spike),
            ("energy.p_idle", self.p_idle),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, "must be finite and >= 0"));
            }
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::invalid("energy.window", "must be > 0"));
        }
        Ok(())
    }

    /// Fit `e_spike` and `p_idle` so that `a.0` spikes per window draw `a.1`
    /// watts and `b.0` spikes draw `b.1` watts.
    pub fn calibrate(a: (f64, f64), b: (f64, f64), window: f64) -> Result<Self> {
        if a.0 == b.0 {
            return Err(Error::invalid("energy.anchor", "anchors need distinct spike counts"));
        }
        let slope = (a.1 - b.1) / (a.0 - b.0);
        let em = Self {
            e_spike: slope * window,
            p_idle: a.1 - slope * a.0,
            window,
        };
        em.validate()?;
        Ok(em)
    }

    pub fn energy_per_window(&self, mean_spikes: f64) -> f64 {
        spikes_to_power(mean_spikes, self) * self.window
    }
}

pub fn spikes_to_power(mean_spikes: f64, em: &EnergyModel) -> f64 {
    mean_spikes * em.e_spike / em.window + em.p_idle
}

/// Days of continuous operation at `avg_power_w`.
pub fn battery_days(capacity_mah: f64, voltage_v: f64, avg_power_w: f64) -> Result<f64> {
    for (name, v) in [
        ("capacity_mah", capacity_mah),
        ("voltage_v", voltage_v),
        ("avg_power_w", avg_power_w),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, "must be finite and > 0"));
        }
    }
    Ok(capacity_mah * voltage_v * 3.6 / avg_power_w / 86_400.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Budget {
    /// Maximum mean spikes per inference.
    SpikeCap { max_spikes: f64 },
    /// Joules per inference window, converted through the energy model.
    EnergyCap { joules: f64, energy: EnergyModel },
}

impl Budget {
    pub fn spikes(max_spikes: f64) -> Result<Self> {
        let b = Self::SpikeCap { max_spikes };
        b.spike_cap()?;
        Ok(b)
    }

    pub fn energy(joules: f64, energy: EnergyModel) -> Result<Self> {
        let b = Self::EnergyCap { joules, energy };
        b.spike_cap()?;
        Ok(b)
    }

    /// The cap expressed in mean spikes. An energy cap below the idle energy
    /// yields a negative cap, which nothing satisfies.
    pub fn spike_cap(&self) -> Result<f64> {
        match *self {
            Self::SpikeCap { max_spikes } => {
                if !(max_spikes > 0.0) || max_spikes.is_nan() {
                    return Err(Error::invalid("budget.max_spikes", "must be > 0"));
                }
                Ok(max_spikes)
            }
            Self::EnergyCap { joules, energy } => {
                energy.validate()?;
                if !(joules > 0.0) || joules.is_nan() {
                    return Err(Error::invalid("budget.joules", "must be > 0"));
                }
                let dynamic = joules - energy.p_idle * energy.window;
                if energy.e_spike == 0.0 {
                    return Ok(if dynamic >= 0.0 { f64::INFINITY } else { -1.0 });
                }
                Ok(dynamic / energy.e_spike)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Choice {
    pub model_id: String,
    pub point: OperatingPoint,
}

/// Most accurate feasible grid point of one curve; ties go to the larger
/// threshold. `None` when no point fits the budget.
pub fn select_single(curve: &SweepCurve, budget: &Budget) -> Result<Option<Choice>> {
    if curve.points.is_empty() {
        return Err(Error::Empty("sweep curve"));
    }
    let cap = budget.spike_cap()?;
    let best = curve
        .points
        .iter()
        .filter(|p| p.mean_spikes <= cap)
        .max_by(|a, b| a.accuracy.total_cmp(&b.accuracy).then(a.theta.total_cmp(&b.theta)));
    Ok(best.map(|p| Choice {
        model_id: curve.model_id.clone(),
        point: *p,
    }))
}

/// Most accurate feasible front entry; ties go to fewer spikes, then the
/// lexicographically smaller model id, then the larger threshold.
pub fn select_multi(front: &ParetoFront, budget: &Budget) -> Result<Option<Choice>> {
    if front.entries.is_empty() {
        return Err(Error::Empty("pareto front"));
    }
    let cap = budget.spike_cap()?;
    let best = front
        .entries
        .iter()
        .filter(|e| e.mean_spikes <= cap)
        .max_by(|a, b| {
            a.accuracy
                .total_cmp(&b.accuracy)
                .then(b.mean_spikes.total_cmp(&a.mean_spikes))
                .then(b.model_id.cmp(&a.model_id))
                .then(a.theta.total_cmp(&b.theta))
        });
    Ok(best.map(|e| Choice {
        model_id: e.model_id.clone(),
        point: e.point(),
    }))
}

pub const FRONT_HEADER: &str = "model_id,theta,accuracy,mean_spikes,segment_index";

impl ParetoFront {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{FRONT_HEADER}\n");
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{}",
                e.model_id, e.theta, e.accuracy, e.mean_spikes, e.segment
            )
            .unwrap();
        }
        out
    }

    /// Parse a front CSV; segments are rebuilt from the entries' segment
    /// indices.
    pub fn from_csv(text: &str, source: impl AsRef<Path>) -> Result<Self> {
        let source = source.as_ref();
        let err = |line: usize, reason: String| Error::Parse {
            path: source.to_path_buf(),
            line,
            reason,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == FRONT_HEADER => {}
            _ => return Err(err(1, format!("expected header {FRONT_HEADER:?}"))),
        }
        let mut entries = Vec::new();
        for (k, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(err(k + 1, format!("expected 5 fields, got {}", f.len())));
            }
            let num = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|_| err(k + 1, format!("bad number {s:?}")))
            };
            entries.push(FrontEntry {
                model_id: f[0].to_owned(),
                theta: num(f[1])?,
                accuracy: num(f[2])?,
                mean_spikes: num(f[3])?,
                segment: f[4]
                    .trim()
                    .parse()
                    .map_err(|_| err(k + 1, format!("bad segment index {:?}", f[4])))?,
            });
        }
        let mut groups: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
        for e in &entries {
            groups.entry((e.model_id.clone(), e.segment)).or_default().push(e.theta);
        }
        let segments = groups
            .into_iter()
            .map(|((model_id, index), thetas)| Segment {
                model_id,
                index,
                theta_lo: thetas.iter().copied().fold(f64::INFINITY, f64::min),
                theta_hi: thetas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                len: thetas.len(),
            })
            .collect();
        Ok(Self { entries, segments })
    }

    pub fn segments_of<'a>(&'a self, model_id: &'a str) -> impl Iterator<Item = &'a Segment> + 'a {
        self.segments.iter().filter(move |s| s.model_id == model_id)
    }
}

/// Model files backing a front, one `model_id,path` line each.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub models: Vec<(String, PathBuf)>,
}

impl Manifest {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model_id,model_path\n");
        for (id, p) in &self.models {
            writeln!(out, "{},{}", id, p.display()).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str, source: impl AsRef<Path>) -> Result<Self> {
        let mut models = Vec::new();
        for (k, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let (id, path) = line.split_once(',').ok_or_else(|| Error::Parse {
                path: source.as_ref().to_path_buf(),
                line: k + 1,
                reason: "expected model_id,model_path".into(),
            })?;
            models.push((id.to_owned(), PathBuf::from(path)));
        }
        Ok(Self { models })
    }

    pub fn path_of(&self, model_id: &str) -> Option<&Path> {
        self.models
            .iter()
            .find(|(id, _)| id == model_id)
            .map(|(_, p)| p.as_path())
    }
}
