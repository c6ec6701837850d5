//! Three-dimensional run of a dilational pulse in a periodic box, printing
//! the energy and gradient time series as CSV.

use prestress::constitutive::unit_witness_material;
use prestress::fields::Boundary;
use prestress::simulator::{run_box3d, stability_limit_3d, InitialData, InitialKind, SimConfig};
use prestress::tensors::MaterialTensors;

fn main() -> prestress::Result<()> {
    let t = MaterialTensors::compute(&unit_witness_material(), 1.5)?;
    let config = SimConfig {
        n: 32,
        half_width: 8.0,
        boundary: Boundary::Periodic,
        t_end: 6.0,
        diagnostics_every: 4,
        track_x2: true,
        initial: InitialData {
            kind: InitialKind::DilationPerturbation,
            amplitude: 0.02,
            width: 3.0,
            ..InitialData::default()
        },
        ..SimConfig::default()
    };
    println!("# stable step limit {:.4e}", stability_limit_3d(&config.grid()?, &t.a));
    let report = run_box3d(&config, &t)?;
    println!("# dt = {:.4e}, {} steps, {:?}", report.dt, report.steps, report.verdict);
    println!("# relative energy drift {:.2e}", report.energy_drift());
    print!("{}", report.to_csv());
    Ok(())
}
