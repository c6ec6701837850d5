//! Coefficient tensors of the truncated system at one dilation: the
//! acoustic tensor along a direction, the quadratic tensor's null
//! contractions and the resonance brackets between plane waves.

use prestress::constitutive::{unit_null_material, unit_witness_material};
use prestress::sampling::{rng, Vec3};
use prestress::tensors::{null_contractions, resonance_bracket, MaterialTensors, PlaneWave};

fn main() -> prestress::Result<()> {
    let lambda = 1.5;
    for (name, model) in [("null", unit_null_material()), ("witness", unit_witness_material())] {
        let t = MaterialTensors::compute(&model, lambda)?;
        let xi = Vec3::new(1.0, 2.0, 2.0) / 3.0;
        let eig = nalgebra::SymmetricEigen::new(t.a.symbol(&xi)).eigenvalues;
        println!("{name}: c1² = {:.6}, c2² = {:.6}", t.c1_sq, t.c2_sq);
        println!("  acoustic tensor eigenvalues along ξ: {:.6?}", eig.as_slice());
        println!(
            "  A routes differ by {:.1e}, B asymmetry {:.1e}",
            t.a_route_diff, t.b_asymmetry
        );

        let nc = null_contractions(&t.b, 200, &mut rng(1));
        println!(
            "  max |B·ξ⁶| = {:.2e}, max transverse = {:.2e}",
            nc.max_longitudinal, nc.max_transverse
        );

        let (c1, c2) = (t.c1_sq.sqrt(), t.c2_sq.sqrt());
        let e1 = Vec3::x();
        let long = PlaneWave::longitudinal(e1, 1.0, 1.0, c1);
        let trans = PlaneWave::transverse(e1, Vec3::y(), 1.0, 1.0, c2)?;
        println!(
            "  brackets: longitudinal {:.4e}, transverse {:.4e}",
            resonance_bracket(&long, &long, &long, &t.b)?,
            resonance_bracket(&trans, &trans, &trans, &t.b)?
        );
    }
    Ok(())
}
