//! Builds null materials from a bulk modulus and a shear speed, then checks
//! the null condition and hyperbolicity over a range of dilations.

use prestress::constitutive::{check_material, unit_witness_material, MaterialSpec, DEFAULT_LAMBDA_RANGE};

fn main() -> prestress::Result<()> {
    for (bulk, c2sq) in [("1", "1"), ("2 + 0.5*x", "1"), ("exp(x - 1)", "sqrt(x)")] {
        let (_, model) = MaterialSpec::constructed(bulk, c2sq, DEFAULT_LAMBDA_RANGE)?;
        println!("bulk = {bulk}, c2² = {c2sq}");
        println!("  f(x) = {}", model.f);
        for lambda in [0.5, 1.0, 1.5, 2.0, 3.0] {
            let r = check_material(&model, lambda)?;
            println!(
                "  λ = {lambda:<4} c1² = {:<9.5} c2² = {:<9.5} τ111 = {:>10.2e} null = {} hyperbolic = {}",
                r.c1_sq, r.c2_sq, r.tau111, r.null, r.hyperbolic
            );
        }
    }

    let witness = unit_witness_material();
    let r = check_material(&witness, 1.5)?;
    println!("with h ≡ 0: τ111 = {:.6}, null = {}", r.tau111, r.null);
    Ok(())
}
