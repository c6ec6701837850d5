//! One-dimensional reduction along an oblique direction: a longitudinal
//! pulse steepens for a genuinely nonlinear material and the time is
//! compared with the characteristics prediction.

use prestress::constitutive::unit_witness_material;
use prestress::sampling::Vec3;
use prestress::simulator::{oracle_for_pulse, run_planewave_1d, SimConfig};
use prestress::tensors::MaterialTensors;

fn main() -> prestress::Result<()> {
    let model = unit_witness_material();
    let t = MaterialTensors::compute(&model, 1.5)?;
    let c1 = t.c1_sq.sqrt();
    let xi = Vec3::new(2.0, -1.0, 2.0) / 3.0;
    let config = SimConfig {
        n: 2048,
        t_end: 40.0 / c1,
        diagnostics_every: 500,
        ..SimConfig::default()
    };
    let kappa = model.tau111(1.5)?;
    let predicted = oracle_for_pulse(c1, kappa, &config.initial, config.t_end)?;
    let report = run_planewave_1d(&config, &t, xi)?;
    println!("direction {:?}", xi.as_slice());
    println!("characteristics predict breaking at t = {predicted:.3}");
    println!("simulation: {:?}", report.verdict);
    for r in &report.records {
        println!(
            "  t = {:>8.3}  E = {:.6e}  max|∇u| = {:.4e}  max|∇²u| = {:.4e}",
            r.t, r.e1, r.max_grad, r.max_grad2
        );
    }
    Ok(())
}
