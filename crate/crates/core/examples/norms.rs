//! Vector-field energies and weighted norms of a sampled solution state,
//! compared across two resolutions.

use prestress::constitutive::unit_null_material;
use prestress::fields::{energy, lambda_norm, max_abs_gradient, weighted_x, Boundary, Dynamics, Grid3};
use prestress::simulator::{make_initial_data, InitialData, InitialKind};
use prestress::tensors::MaterialTensors;

fn main() -> prestress::Result<()> {
    let t = MaterialTensors::compute(&unit_null_material(), 1.5)?;
    let dynamics = Dynamics::new(&t, true);
    let data = InitialData {
        kind: InitialKind::DilationPerturbation,
        amplitude: 0.01,
        width: 3.0,
        ..InitialData::default()
    };
    for n in [24, 32] {
        let grid = Grid3::new(n, 8.0, Boundary::ZeroPadded)?;
        let state = make_initial_data(grid, &data, dynamics.speeds)?;
        println!("n = {n}");
        println!("  max|∇u|  = {:.6e}", max_abs_gradient(&state.grid, &state.u));
        for kappa in 1..=3 {
            println!(
                "  κ = {kappa}: E = {:.6e}  X = {:.6e}  Λ-norm = {:.6e}",
                energy(&state, dynamics.speeds, kappa, Some(&dynamics))?,
                weighted_x(&state, dynamics.speeds, kappa, Some(&dynamics))?,
                lambda_norm(&state.grid, &state.u, kappa)?
            );
        }
    }
    Ok(())
}
