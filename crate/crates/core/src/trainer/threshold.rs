use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution the hidden-layer firing threshold is drawn from, once per
/// training batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdDistribution {
    Fixed {
        theta: f64,
    },
    ContinuousUniform {
        theta_min: f64,
        theta_max: f64,
    },
    /// Uniform over `theta_min, theta_min + step, ..., theta_max`, or over
    /// `explicit_set` when given.
    DiscreteUniform {
        theta_min: f64,
        theta_max: f64,
        step: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        explicit_set: Option<Vec<f64>>,
    },
}

impl ThresholdDistribution {
    pub fn fixed(theta: f64) -> Self {
        Self::Fixed { theta }
    }

    pub fn continuous(theta_min: f64, theta_max: f64) -> Self {
        Self::ContinuousUniform {
            theta_min,
            theta_max,
        }
    }

    pub fn discrete(theta_min: f64, theta_max: f64, step: f64) -> Self {
        Self::DiscreteUniform {
            theta_min,
            theta_max,
            step,
            explicit_set: None,
        }
    }

    pub fn from_set(mut set: Vec<f64>) -> Result<Self> {
        set.sort_by(f64::total_cmp);
        let (lo, hi) = match (set.first(), set.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Err(Error::invalid("dist.explicit_set", "must be nonempty")),
        };
        let d = Self::DiscreteUniform {
            theta_min: lo,
            theta_max: hi,
            step: 0.0,
            explicit_set: Some(set),
        };
        d.validate()?;
        Ok(d)
    }

    /// Parse `fixed:T`, `uniform:LO:HI`, `discrete:LO:HI:STEP` or
    /// `set:T1,T2,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::invalid("dist", format!("cannot parse {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let nums = |rest: &str, sep: char| -> Result<Vec<f64>> {
            rest.split(sep)
                .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        let d = match (kind.trim(), nums(rest, if kind.trim() == "set" { ',' } else { ':' })?.as_slice()) {
            ("fixed", &[t]) => Self::fixed(t),
            ("uniform", &[lo, hi]) => Self::continuous(lo, hi),
            ("discrete", &[lo, hi, step]) => Self::discrete(lo, hi, step),
            ("set", set) => return Self::from_set(set.to_vec()),
            _ => return Err(bad()),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn theta_min(&self) -> f64 {
        match *self {
            Self::Fixed { theta } => theta,
            Self::ContinuousUniform { theta_min, .. } | Self::DiscreteUniform { theta_min, .. } => {
                theta_min
            }
        }
    }

    pub fn theta_max(&self) -> f64 {
        match *self {
            Self::Fixed { theta } => theta,
            Self::ContinuousUniform { theta_max, .. } | Self::DiscreteUniform { theta_max, .. } => {
                theta_max
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
            }
        };
        match self {
            Self::Fixed { theta } => positive("dist.theta", *theta),
            Self::ContinuousUniform {
                theta_min,
                theta_max,
            } => {
                positive("dist.theta_min", *theta_min)?;
                positive("dist.theta_max", *theta_max)?;
                if theta_min > theta_max {
                    return Err(Error::invalid(
                        "dist.theta_min",
                        format!("{theta_min} exceeds theta_max {theta_max}"),
                    ));
                }
                Ok(())
            }
            Self::DiscreteUniform { explicit_set: Some(set), .. } => {
                if set.is_empty() {
                    return Err(Error::invalid("dist.explicit_set", "must be nonempty"));
                }
                for (k, &v) in set.iter().enumerate() {
                    positive(&format!("dist.explicit_set[{k}]"), v)?;
                }
                if set.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid(
                        "dist.explicit_set",
                        "must be strictly increasing",
                    ));
                }
                Ok(())
            }
            Self::DiscreteUniform {
                theta_min,
                theta_max,
                step,
                explicit_set: None,
            } => {
                positive("dist.theta_min", *theta_min)?;
                positive("dist.theta_max", *theta_max)?;
                if theta_min > theta_max {
                    return Err(Error::invalid(
                        "dist.theta_min",
                        format!("{theta_min} exceeds theta_max {theta_max}"),
                    ));
                }
                if theta_max > theta_min {
                    positive("dist.step", *step)?;
                    let n = (theta_max - theta_min) / step;
                    if (n - n.round()).abs() > 1e-6 {
                        return Err(Error::invalid(
                            "dist.step",
                            format!("range {theta_min}..{theta_max} is not a multiple of {step}"),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Every value a discrete distribution can take, in increasing order.
    /// Continuous and fixed distributions return their endpoints.
    pub fn support(&self) -> Vec<f64> {
        match self {
            Self::Fixed { theta } => vec![*theta],
            Self::ContinuousUniform {
                theta_min,
                theta_max,
            } => vec![*theta_min, *theta_max],
            Self::DiscreteUniform { explicit_set: Some(set), .. } => set.clone(),
            Self::DiscreteUniform {
                theta_min,
                theta_max,
                step,
                explicit_set: None,
            } => {
                if theta_max <= theta_min {
                    return vec![*theta_min];
                }
                let n = ((theta_max - theta_min) / step).round() as usize + 1;
                (0..n).map(|k| theta_min + k as f64 * step).collect()
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Fixed { theta } => *theta,
            Self::ContinuousUniform {
                theta_min,
                theta_max,
            } => 0.5 * (theta_min + theta_max),
            Self::DiscreteUniform { .. } => {
                let s = self.support();
                s.iter().sum::<f64>() / s.len() as f64
            }
        }
    }

    /// Draw one threshold. A fixed distribution consumes no randomness.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Fixed { theta } => *theta,
            Self::ContinuousUniform {
                theta_min,
                theta_max,
            } => theta_min + (theta_max - theta_min) * rng.random::<f64>(),
            Self::DiscreteUniform { .. } => {
                let s = self.support();
                s[rng.random_range(0..s.len())]
            }
        }
    }

    /// Short human-readable label, e.g. `U(1,1.5)` or `U{1..1.5/0.1}`.
    pub fn label(&self) -> String {
        match self {
            Self::Fixed { theta } => format!("fixed({theta})"),
            Self::ContinuousUniform {
                theta_min,
                theta_max,
            } => format!("U({theta_min},{theta_max})"),
            Self::DiscreteUniform { explicit_set: Some(set), .. } => {
                let items: Vec<String> = set.iter().map(f64::to_string).collect();
                format!("U{{{}}}", items.join(","))
            }
            Self::DiscreteUniform {
                theta_min,
                theta_max,
                step,
                ..
            } => format!("U{{{theta_min}..{theta_max}/{step}}}"),
        }
    }
}

pub fn sample_threshold<R: Rng + ?Sized>(dist: &ThresholdDistribution, rng: &mut R) -> f64 {
    dist.sample(rng)
}
