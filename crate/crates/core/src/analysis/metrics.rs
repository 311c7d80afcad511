use super::sweep::OperatingPoint;
use crate::error::{Error, Result};

/// Relative accuracy and spike-count change of `model_point` against
/// `baseline_point`, as signed fractions.
pub fn delta_metrics(model_point: &OperatingPoint, baseline_point: &OperatingPoint) -> Result<(f64, f64)> {
    if !(baseline_point.accuracy > 0.0) {
        return Err(Error::invalid("baseline.accuracy", "must be > 0"));
    }
    if !(baseline_point.mean_spikes > 0.0) {
        return Err(Error::invalid("baseline.mean_spikes", "must be > 0"));
    }
    Ok((
        (model_point.accuracy - baseline_point.accuracy) / baseline_point.accuracy,
        (model_point.mean_spikes - baseline_point.mean_spikes) / baseline_point.mean_spikes,
    ))
}

/// Inverse of [`delta_metrics`]: the `(accuracy, mean_spikes)` a point with
/// the given relative changes must have.
pub fn apply_deltas(baseline_point: &OperatingPoint, d_acc: f64, d_spk: f64) -> (f64, f64) {
    (
        baseline_point.accuracy * (1.0 + d_acc),
        baseline_point.mean_spikes * (1.0 + d_spk),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(accuracy: f64, mean_spikes: f64) -> OperatingPoint {
        OperatingPoint { theta: 1.0, accuracy, mean_spikes }
    }

    #[test]
    fn identity_is_zero() {
        let p = pt(0.8, 1234.0);
        assert_eq!(delta_metrics(&p, &p).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn zero_baseline_rejected() {
        assert!(delta_metrics(&pt(0.5, 1.0), &pt(0.0, 1.0)).is_err());
        assert!(delta_metrics(&pt(0.5, 1.0), &pt(0.5, 0.0)).is_err());
    }

    #[test]
    fn inverse_recovers_point() {
        let base = pt(0.7586, 7933.0);
        let m = pt(0.7748, 9044.0);
        let (da, ds) = delta_metrics(&m, &base).unwrap();
        let (a, s) = apply_deltas(&base, da, ds);
        assert!((a - m.accuracy).abs() < 1e-15);
        assert!((s - m.mean_spikes).abs() < 1e-9);
    }
}
