//! Build a Pareto front over two sweep curves and pick operating points for
//! a few spike and energy budgets.

use spikewise::analysis::{OperatingPoint, SweepCurve};
use spikewise::pareto::{build_front, select_multi, select_single, Budget, EnergyModel};

fn curve(id: &str, rows: &[(f64, f64, f64)]) -> SweepCurve {
    SweepCurve {
        model_id: id.into(),
        points: rows
            .iter()
            .map(|&(theta, accuracy, mean_spikes)| OperatingPoint { theta, accuracy, mean_spikes })
            .collect(),
    }
}

fn main() -> spikewise::Result<()> {
    let narrow = curve("u1.0-1.5", &[(0.8, 0.86, 15000.0), (1.0, 0.85, 11000.0), (1.2, 0.848, 8570.0), (1.4, 0.80, 6000.0), (1.6, 0.70, 4700.0)]);
    let wide = curve("u1.0-2.0", &[(0.8, 0.82, 20000.0), (1.0, 0.845, 13000.0), (1.2, 0.846, 9000.0), (1.4, 0.84, 6500.0), (1.6, 0.837, 4776.0)]);
    let front = build_front(&[narrow.clone(), wide])?;
    println!("{}", front.to_csv());
    for s in &front.segments {
        println!("segment {} #{}: theta {}..{} ({} points)", s.model_id, s.index, s.theta_lo, s.theta_hi, s.len);
    }

    for cap in [5000.0, 7000.0, 10000.0] {
        let b = Budget::spikes(cap)?;
        let multi = select_multi(&front, &b)?;
        let single = select_single(&narrow, &b)?;
        println!("cap {cap}: switch -> {multi:?}\n           single -> {single:?}");
    }

    let em = EnergyModel::default();
    let b = Budget::energy(em.energy_per_window(6000.0), em)?;
    println!("energy cap at 6000 spikes: {:?}", select_multi(&front, &b)?);
    Ok(())
}
