//! Matched longitudinal pulses in a null material and its `h ≡ 0` twin.

use prestress::constitutive::{unit_null_material, unit_witness_material};
use prestress::sampling::Vec3;
use prestress::simulator::{oracle_for_pulse, run_planewave_1d, InitialData, SimConfig};
use prestress::tensors::MaterialTensors;

fn main() -> prestress::Result<()> {
    let lambda = 1.5;
    for (name, model) in [("null", unit_null_material()), ("h = 0", unit_witness_material())] {
        let tensors = MaterialTensors::compute(&model, lambda)?;
        let c1 = tensors.c1_sq.sqrt();
        let kappa = model.tau111(lambda)?;
        for n in [2048, 4096] {
            let config = SimConfig {
                lambda,
                n,
                half_width: 10.0,
                t_end: 40.0 / c1,
                diagnostics_every: 200,
                initial: InitialData {
                    width: 4.0,
                    ..InitialData::default()
                },
                ..SimConfig::default()
            };
            let report = run_planewave_1d(&config, &tensors, Vec3::x())?;
            let oracle = oracle_for_pulse(c1, kappa, &config.initial, 1e3);
            println!(
                "{name:6} n = {n}: {:?}, gradient growth {:.3}, oracle {:?}",
                report.verdict,
                report.gradient_growth(),
                oracle.ok()
            );
        }
    }
    Ok(())
}
