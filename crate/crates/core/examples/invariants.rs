//! Strain and stretch invariants of a deformation gradient near a dilation,
//! and the round trips between the invariant systems.

use prestress::invariants::{
    distortional_vars, j_to_s, s_to_j, shifted_stretch_invariants, sqrt_spd, strain_invariants, strain_to_stretch_inv,
    stretch_invariants, stretch_to_strain_inv,
};
use prestress::Mat3;

fn main() -> prestress::Result<()> {
    let lambda = 1.5;
    let f = Mat3::new(1.52, 0.03, -0.01, 0.00, 1.47, 0.02, 0.04, -0.02, 1.55);

    let i = strain_invariants(&f);
    let r = stretch_invariants(&f)?;
    println!("strain invariants  I = {:?}", i.as_array());
    println!("stretch invariants R = {:?}", r.as_array());

    let i_back = stretch_to_strain_inv(&r)?;
    let r_back = strain_to_stretch_inv(&i, lambda)?;
    println!("R -> I residual {:.2e}", i_back.max_diff(&i));
    println!("I -> R residual {:.2e}", r_back.max_diff(&r));

    let v = sqrt_spd(&(f.transpose() * f))?;
    println!("stretch tensor sqrt(FᵀF) =\n{v:.6}");

    let s = shifted_stretch_invariants(&f, lambda)?;
    let j = s_to_j(&s, lambda)?;
    println!("shifted invariants S = {:?}", s.as_array());
    println!("dilational / distortional J = {:?}", j.as_array());
    println!("J -> S residual {:.2e}", j_to_s(&j, lambda)?.max_diff(&s));
    println!("{:?}", distortional_vars(&s, lambda)?);
    Ok(())
}
