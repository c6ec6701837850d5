//! Cone identities and commutation relations checked on a smooth analytic
//! field at random points away from the origin.

use prestress::constitutive::unit_null_material;
use prestress::fields::analytic::{
    commutator_residual, decomposition_residual, random_points, verify_cone_identities, Commutator,
};
use prestress::fields::{Speeds, VectorField};
use prestress::sampling::rng;
use prestress::tensors::TensorA;
use prestress::verify::identity_fixture;

fn main() -> prestress::Result<()> {
    let model = unit_null_material();
    let lambda = 1.5;
    let (c1_sq, c2_sq) = model.speeds(lambda)?;
    let a = TensorA::closed_form(&model, lambda)?;
    let u = identity_fixture();
    let pts = random_points(&mut rng(5), 40, 2.0, 0.3, 2.5);

    for alpha in [1, 2] {
        let r = verify_cone_identities(&u, &a, Speeds { c1_sq, c2_sq }, alpha, &pts)?;
        println!("cone identities, family {alpha}: {:.2e} {:.2e}", r.a, r.b);
    }
    println!("gradient decomposition: {:.2e}", decomposition_residual(&u, &pts)?);

    let pairs = [
        (VectorField::ScalingTilde, VectorField::Partial(1)),
        (VectorField::RotationTilde(1), VectorField::RotationTilde(2)),
        (VectorField::RotationTilde(3), VectorField::Partial(2)),
    ];
    for (g1, g2) in pairs {
        let r = commutator_residual(Commutator::Fields(g1, g2), &u, &a, &pts)?;
        println!("[{g1:?}, {g2:?}]: {r:.2e}");
    }
    for l in 1..=3 {
        let r = commutator_residual(Commutator::RotationWithA(l), &u, &a, &pts)?;
        println!("rotation {l} commutes with A: {r:.2e}");
    }
    Ok(())
}
