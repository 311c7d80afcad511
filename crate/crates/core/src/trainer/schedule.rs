use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Learning-rate schedule, stepped once per epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Constant,
    /// Cosine annealing to zero over `t0` steps, restarting at the base rate
    /// with the period multiplied by `t_mult` after each restart.
    CosineWarmRestarts { t0: usize, t_mult: usize },
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Schedule::Constant => Ok(()),
            Schedule::CosineWarmRestarts { t0, t_mult } => {
                if t0 == 0 {
                    return Err(Error::invalid("scheduler.t0", "must be >= 1"));
                }
                if t_mult == 0 {
                    return Err(Error::invalid("scheduler.t_mult", "must be >= 1"));
                }
                Ok(())
            }
        }
    }

    /// Parse `constant` or `cosine:T0:T_MULT`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::invalid("scheduler", format!("cannot parse {s:?}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let sched = match parts.as_slice() {
            ["constant"] => Schedule::Constant,
            ["cosine", t0, m] => Schedule::CosineWarmRestarts {
                t0: t0.parse().map_err(|_| bad())?,
                t_mult: m.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        sched.validate()?;
        Ok(sched)
    }

    pub fn lr(&self, base_lr: f64, step: usize) -> f64 {
        match *self {
            Schedule::Constant => base_lr,
            Schedule::CosineWarmRestarts { t0, t_mult } => {
                let (mut t_cur, mut period) = (step, t0);
                while t_cur >= period {
                    t_cur -= period;
                    period *= t_mult;
                }
                base_lr * (1.0 + (PI * t_cur as f64 / period as f64).cos()) / 2.0
            }
        }
    }
}
