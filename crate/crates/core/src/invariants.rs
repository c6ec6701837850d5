//! Principal invariants of 3×3 matrices and the changes of variables
//! between the strain systems `i`, `j` and the stretch systems `r`, `s`.
//!
//! For a deformation gradient `F` and a reference dilation `λ`:
//!
//! | system | matrix          |
//! |--------|-----------------|
//! | `i`    | `FᵀF`           |
//! | `j`    | `FᵀF − λ²I`     |
//! | `r`    | `√(FᵀF)`        |
//! | `s`    | `√(FᵀF) − λI`   |

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat3 = Matrix3<f64>;

/// Tag recording which matrix a triple was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvariantSystem {
    /// Invariants of an arbitrary matrix, not tied to a deformation.
    Principal,
    I,
    J,
    R,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantTriple {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub system: InvariantSystem,
}

impl InvariantTriple {
    pub fn new(system: InvariantSystem, k1: f64, k2: f64, k3: f64) -> Self {
        InvariantTriple { k1, k2, k3, system }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.k1, self.k2, self.k3]
    }

    /// Same numbers under a different tag.
    pub fn tagged(self, system: InvariantSystem) -> Self {
        InvariantTriple { system, ..self }
    }

    pub fn expect(&self, system: InvariantSystem) -> Result<()> {
        if self.system == system {
            Ok(())
        } else {
            Err(Error::SystemMismatch {
                expected: system,
                found: self.system,
            })
        }
    }

    /// Largest absolute difference from `other`, ignoring tags.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (self.k1 - other.k1)
            .abs()
            .max((self.k2 - other.k2).abs())
            .max((self.k3 - other.k3).abs())
    }

    /// Elementary symmetric functions of three numbers.
    pub fn from_eigenvalues(system: InvariantSystem, e: [f64; 3]) -> Self {
        InvariantTriple::new(
            system,
            e[0] + e[1] + e[2],
            e[0] * e[1] + e[1] * e[2] + e[0] * e[2],
            e[0] * e[1] * e[2],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionalVars {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
}

/// `(tr C, ½[(tr C)² − tr C²], det C)`.
pub fn invariants3(c: &Mat3) -> InvariantTriple {
    let tr = c.trace();
    let tr2 = (c * c).trace();
    InvariantTriple::new(InvariantSystem::Principal, tr, 0.5 * (tr * tr - tr2), c.determinant())
}

/// Invariants of `zI + C` from those of `C`. The tag is kept.
pub fn shift_invariants(z: f64, inv: &InvariantTriple) -> InvariantTriple {
    let [k1, k2, k3] = inv.as_array();
    InvariantTriple::new(
        inv.system,
        3.0 * z + k1,
        3.0 * z * z + 2.0 * z * k1 + k2,
        z * z * z + z * z * k1 + z * k2 + k3,
    )
}

/// Strain invariants of `FᵀF` from stretch invariants of `√(FᵀF)`.
pub fn stretch_to_strain_inv(r: &InvariantTriple) -> Result<InvariantTriple> {
    r.expect(InvariantSystem::R)?;
    Ok(strain_from_stretch_raw(r.as_array(), InvariantSystem::I))
}

fn strain_from_stretch_raw([r1, r2, r3]: [f64; 3], system: InvariantSystem) -> InvariantTriple {
    InvariantTriple::new(system, r1 * r1 - 2.0 * r2, r2 * r2 - 2.0 * r1 * r3, r3 * r3)
}

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;

fn newton3<Fr, Fj>(target: [f64; 3], seed: [f64; 3], scale: f64, residual: Fr, jacobian: Fj) -> Result<[f64; 3]>
where
    Fr: Fn(&Vector3<f64>) -> Vector3<f64>,
    Fj: Fn(&Vector3<f64>) -> Matrix3<f64>,
{
    let t = Vector3::from(target);
    let tol = NEWTON_TOL * scale;
    let mut x = Vector3::from(seed);
    let mut res = residual(&x) - t;
    for it in 0..NEWTON_MAX_ITER {
        if res.amax() <= tol {
            // one polishing step costs nothing and usually gains a digit
            if let Some(dx) = jacobian(&x).lu().solve(&res) {
                let y = x - dx;
                let ry = residual(&y) - t;
                if ry.amax() <= res.amax() {
                    return Ok(y.into());
                }
            }
            return Ok(x.into());
        }
        let jac = jacobian(&x);
        let det = jac.determinant();
        let jscale = jac.amax().max(f64::MIN_POSITIVE);
        if !det.is_finite() || det.abs() <= 1e-14 * jscale.powi(3) {
            return Err(Error::SingularJacobian(x.into()));
        }
        let dx = jac.lu().solve(&res).ok_or_else(|| Error::SingularJacobian(x.into()))?;
        x -= dx;
        res = residual(&x) - t;
        if !res.iter().all(|v| v.is_finite()) {
            return Err(Error::NoConvergence {
                iterations: it + 1,
                residual: f64::INFINITY,
            });
        }
    }
    if res.amax() <= tol {
        return Ok(x.into());
    }
    Err(Error::NoConvergence {
        iterations: NEWTON_MAX_ITER,
        residual: res.amax(),
    })
}

/// Inverts [`stretch_to_strain_inv`] by Newton iteration seeded at the
/// stretch invariants `(3λ, 3λ², λ³)` of `λI`.
pub fn strain_to_stretch_inv(i: &InvariantTriple, guess_lambda: f64) -> Result<InvariantTriple> {
    i.expect(InvariantSystem::I)?;
    let l = guess_lambda;
    let scale = i.k1.abs().max(i.k2.abs()).max(i.k3.abs()).max(1.0);
    let r = newton3(
        i.as_array(),
        [3.0 * l, 3.0 * l * l, l * l * l],
        scale,
        |r| Vector3::from(strain_from_stretch_raw([r[0], r[1], r[2]], InvariantSystem::I).as_array()),
        |r| {
            Matrix3::new(
                2.0 * r[0],
                -2.0,
                0.0,
                -2.0 * r[2],
                2.0 * r[1],
                -2.0 * r[0],
                0.0,
                0.0,
                2.0 * r[2],
            )
        },
    )?;
    Ok(InvariantTriple::new(InvariantSystem::R, r[0], r[1], r[2]))
}

fn s_to_j_raw([s1, s2, s3]: [f64; 3], l: f64) -> [f64; 3] {
    let l2 = l * l;
    [
        2.0 * l * s1 + s1 * s1 - 2.0 * s2,
        4.0 * l2 * s2 + 2.0 * l * s1 * s2 - 6.0 * l * s3 + s2 * s2 - 2.0 * s1 * s3,
        8.0 * l2 * l * s3 + 4.0 * l2 * s1 * s3 + 2.0 * l * s2 * s3 + s3 * s3,
    ]
}

/// Strain invariants of `FᵀF − λ²I` from stretch invariants of `√(FᵀF) − λI`.
pub fn s_to_j(s: &InvariantTriple, lambda: f64) -> Result<InvariantTriple> {
    s.expect(InvariantSystem::S)?;
    let [a, b, c] = s_to_j_raw(s.as_array(), lambda);
    Ok(InvariantTriple::new(InvariantSystem::J, a, b, c))
}

/// Local inverse of [`s_to_j`], Newton seeded at the equilibrium `s = 0`.
pub fn j_to_s(j: &InvariantTriple, lambda: f64) -> Result<InvariantTriple> {
    j.expect(InvariantSystem::J)?;
    let l = lambda;
    let scale = j.k1.abs().max(j.k2.abs()).max(j.k3.abs()).max(1.0);
    let s = newton3(
        j.as_array(),
        [0.0; 3],
        scale,
        |s| Vector3::from(s_to_j_raw([s[0], s[1], s[2]], l)),
        |s| {
            let (s1, s2, s3) = (s[0], s[1], s[2]);
            let l2 = l * l;
            Matrix3::new(
                2.0 * l + 2.0 * s1,
                -2.0,
                0.0,
                2.0 * l * s2 - 2.0 * s3,
                4.0 * l2 + 2.0 * l * s1 + 2.0 * s2,
                -6.0 * l - 2.0 * s1,
                4.0 * l2 * s3,
                2.0 * l * s3,
                8.0 * l2 * l + 4.0 * l2 * s1 + 2.0 * l * s2 + 2.0 * s3,
            )
        },
    )?;
    Ok(InvariantTriple::new(InvariantSystem::S, s[0], s[1], s[2]))
}

/// Dilational variable `z1` and invariants `z2`, `z3` of the trace-free
/// part of the stretch.
pub fn distortional_vars(s: &InvariantTriple, lambda: f64) -> Result<DistortionalVars> {
    s.expect(InvariantSystem::S)?;
    let [s1, s2, s3] = s.as_array();
    Ok(DistortionalVars {
        z1: lambda + s1 / 3.0,
        z2: s2 - s1 * s1 / 3.0,
        z3: s3 - s1 * s2 / 3.0 + 2.0 * s1 * s1 * s1 / 27.0,
    })
}

/// Symmetry tolerance used when a matrix is required to be SPD.
pub const SYMMETRY_TOL: f64 = 1e-12;

fn check_symmetric(m: &Mat3) -> Result<()> {
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::NotSpd("non-finite entries".into()));
    }
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * m.amax().max(1.0) {
        return Err(Error::NotSpd(format!("asymmetry {asym:e}")));
    }
    Ok(())
}

/// Symmetric positive definite square root via the symmetric eigensolver.
pub fn sqrt_spd(m: &Mat3) -> Result<Mat3> {
    check_symmetric(m)?;
    let sym = 0.5 * (m + m.transpose());
    let eig = SymmetricEigen::new(sym);
    if let Some(&min) = eig.eigenvalues.iter().min_by(|a, b| a.total_cmp(b)) {
        if min <= 0.0 {
            return Err(Error::NotSpd(format!("eigenvalue {min:e}")));
        }
    }
    let v = eig.eigenvectors;
    let d = Mat3::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = v * d * v.transpose();
    Ok(0.5 * (root + root.transpose()))
}

/// Strain invariants `i` of `FᵀF`.
pub fn strain_invariants(f: &Mat3) -> InvariantTriple {
    invariants3(&(f.transpose() * f)).tagged(InvariantSystem::I)
}

/// Stretch invariants `r` of `√(FᵀF)`.
pub fn stretch_invariants(f: &Mat3) -> Result<InvariantTriple> {
    Ok(invariants3(&sqrt_spd(&(f.transpose() * f))?).tagged(InvariantSystem::R))
}

/// Shifted stretch invariants `s` of `√(FᵀF) − λI`, computed without
/// forming the square root.
///
/// With `H = F − λI`, the matrix `FᵀF − λ²I = λ(H + Hᵀ) + HᵀH` is assembled
/// without cancellation; its eigenvalues `d` give the shifted stretches
/// `d / (√(λ² + d) + λ)`. This keeps `s` accurate to relative precision
/// when `F` is close to `λI`, which the finite-difference tensor
/// extraction depends on.
pub fn shifted_stretch_invariants(f: &Mat3, lambda: f64) -> Result<InvariantTriple> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("reference dilation {lambda} must be positive")));
    }
    let h = f - Mat3::identity() * lambda;
    let d = lambda * (h + h.transpose()) + h.transpose() * h;
    if !d.iter().all(|v| v.is_finite()) {
        return Err(Error::NotSpd("non-finite entries".into()));
    }
    let eig = SymmetricEigen::new(0.5 * (d + d.transpose()));
    let mut e = [0.0; 3];
    for (k, &dk) in eig.eigenvalues.iter().enumerate() {
        let sq = lambda * lambda + dk;
        if sq <= 0.0 {
            return Err(Error::NotSpd(format!("FᵀF has eigenvalue {sq:e}")));
        }
        e[k] = dk / (sq.sqrt() + lambda);
    }
    Ok(InvariantTriple::from_eigenvalues(InvariantSystem::S, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_rotation, rng, rotation_from_unit_cube};
    use proptest::prelude::*;
    use rand::Rng;

    fn triple(sys: InvariantSystem, a: f64, b: f64, c: f64) -> InvariantTriple {
        InvariantTriple::new(sys, a, b, c)
    }

    /// Coefficients of det(tI − C) = t³ − k1 t² + k2 t − k3 read off by
    /// evaluating the determinant at four points and solving for the cubic.
    fn char_poly_oracle(c: &Mat3) -> [f64; 3] {
        let p = |t: f64| (Mat3::identity() * t - c).determinant();
        let (p0, p1, pm1) = (p(0.0), p(1.0), p(-1.0));
        // p(t) = t³ + a t² + b t + d
        let d = p0;
        let a = 0.5 * (p1 + pm1) - d;
        let b = p1 - 1.0 - a - d;
        [-a, b, -d]
    }

    fn spd_from(rng: &mut impl Rng, center: f64, spread: f64) -> Mat3 {
        let q = random_rotation(rng);
        let d = Mat3::from_diagonal(&Vector3::from_fn(|_, _| {
            center + spread * (2.0 * rng.gen::<f64>() - 1.0)
        }));
        let m = q * d * q.transpose();
        0.5 * (m + m.transpose())
    }

    #[test]
    fn principal_invariants_examples() {
        let id = invariants3(&Mat3::identity());
        assert_eq!(id.as_array(), [3.0, 3.0, 1.0]);
        assert_eq!(invariants3(&Mat3::zeros()).as_array(), [0.0, 0.0, 0.0]);
        let d = Mat3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0));
        let got = invariants3(&d).as_array();
        let want = char_poly_oracle(&d);
        for k in 0..3 {
            assert!((got[k] - want[k]).abs() < 1e-12);
        }
        assert_eq!(got, [6.0, 11.0, 6.0]);
    }

    #[test]
    fn shift_examples() {
        let zero = invariants3(&Mat3::zeros());
        assert_eq!(shift_invariants(1.0, &zero).as_array(), [3.0, 3.0, 1.0]);
        let inv = triple(InvariantSystem::Principal, 6.0, 11.0, 6.0);
        let shifted = shift_invariants(1.0, &inv).as_array();
        let want = char_poly_oracle(&Mat3::from_diagonal(&Vector3::new(2.0, 3.0, 4.0)));
        assert_eq!(shifted, [9.0, 26.0, 24.0]);
        for k in 0..3 {
            assert!((shifted[k] - want[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn shift_gives_j_system() {
        let mut r = rng(11);
        for _ in 0..50 {
            let l = 0.5 + 2.0 * r.gen::<f64>();
            let ftf = spd_from(&mut r, l * l, 0.3);
            let via_shift = shift_invariants(-l * l, &invariants3(&ftf));
            let direct = invariants3(&(ftf - Mat3::identity() * (l * l)));
            assert!(via_shift.max_diff(&direct) < 1e-10);
        }
    }

    #[test]
    fn stretch_strain_examples() {
        let r = triple(InvariantSystem::R, 3.0, 3.0, 1.0);
        assert_eq!(stretch_to_strain_inv(&r).unwrap().as_array(), [3.0, 3.0, 1.0]);
        let r = triple(InvariantSystem::R, 4.0, 5.0, 2.0);
        let i = stretch_to_strain_inv(&r).unwrap();
        assert_eq!(
            i.as_array(),
            invariants3(&Mat3::from_diagonal(&Vector3::new(1.0, 1.0, 4.0))).as_array()
        );
        assert_eq!(i.as_array(), [6.0, 9.0, 4.0]);

        let back = strain_to_stretch_inv(&i, 1.0).unwrap();
        assert!(back.max_diff(&r) < 1e-12);
        let id = strain_to_stretch_inv(&triple(InvariantSystem::I, 3.0, 3.0, 1.0), 1.0).unwrap();
        assert!(id.max_diff(&triple(InvariantSystem::R, 3.0, 3.0, 1.0)) < 1e-14);
        let dil = strain_to_stretch_inv(&triple(InvariantSystem::I, 12.0, 48.0, 64.0), 2.0).unwrap();
        assert!(dil.max_diff(&triple(InvariantSystem::R, 6.0, 12.0, 8.0)) < 1e-12);
    }

    #[test]
    fn mixing_systems_is_rejected() {
        let r = triple(InvariantSystem::S, 3.0, 3.0, 1.0);
        assert!(matches!(stretch_to_strain_inv(&r), Err(Error::SystemMismatch { .. })));
        assert!(matches!(
            s_to_j(&r.tagged(InvariantSystem::J), 1.0),
            Err(Error::SystemMismatch { .. })
        ));
    }

    #[test]
    fn newton_failures_are_reported() {
        let far = triple(InvariantSystem::I, 1e9, -1e9, 1e-3);
        assert!(strain_to_stretch_inv(&far, 1.0).is_err());
        let degenerate = triple(InvariantSystem::I, 0.0, 0.0, 0.0);
        assert!(matches!(
            strain_to_stretch_inv(&degenerate, 1.0),
            Err(Error::SingularJacobian(_) | Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn s_to_j_examples() {
        let zero = triple(InvariantSystem::S, 0.0, 0.0, 0.0);
        assert_eq!(s_to_j(&zero, 1.7).unwrap().as_array(), [0.0, 0.0, 0.0]);
        let (l, e) = (1.3, 0.07);
        let j = s_to_j(&triple(InvariantSystem::S, e, 0.0, 0.0), l).unwrap();
        assert!((j.k1 - (2.0 * l * e + e * e)).abs() < 1e-15);
        assert_eq!((j.k2, j.k3), (0.0, 0.0));
    }

    #[test]
    fn s_to_j_matches_matrix_level_oracle() {
        let mut r = rng(5);
        let l = 1.5;
        for _ in 0..50 {
            let stretch = spd_from(&mut r, l, 0.1);
            let s = shift_invariants(-l, &invariants3(&stretch)).tagged(InvariantSystem::S);
            let j = s_to_j(&s, l).unwrap();
            let oracle = invariants3(&(stretch * stretch - Mat3::identity() * (l * l)));
            assert!(j.max_diff(&oracle) < 1e-12, "{j:?} vs {oracle:?}");
            let rr = invariants3(&stretch).tagged(InvariantSystem::R);
            let i = stretch_to_strain_inv(&rr).unwrap();
            assert!(shift_invariants(-l * l, &i).max_diff(&j) < 1e-12);
        }
    }

    #[test]
    fn distortional_examples() {
        let z = distortional_vars(&triple(InvariantSystem::S, 0.0, 0.0, 0.0), 2.0).unwrap();
        assert_eq!((z.z1, z.z2, z.z3), (2.0, 0.0, 0.0));
        let z = distortional_vars(&triple(InvariantSystem::S, 3.0, 0.0, 0.0), 1.0).unwrap();
        assert_eq!((z.z1, z.z2, z.z3), (2.0, -3.0, 2.0));
        // s = (3,0,0) is realised by the diagonal stretch with eigenvalues
        // the roots of t³ − 3t², i.e. shifted stretch diag(3,0,0) + λI.
        let stretch = Mat3::from_diagonal(&Vector3::new(4.0, 1.0, 1.0));
        let dev = stretch - Mat3::identity() * (stretch.trace() / 3.0);
        let inv = invariants3(&dev);
        assert!((inv.k2 - z.z2).abs() < 1e-14 && (inv.k3 - z.z3).abs() < 1e-14);
        for mu in [0.5, 1.0, 2.5] {
            let l = 1.2;
            let d = mu - l;
            let s = triple(InvariantSystem::S, 3.0 * d, 3.0 * d * d, d * d * d);
            let z = distortional_vars(&s, l).unwrap();
            assert!(z.z2.abs() < 1e-14 && z.z3.abs() < 1e-14);
            assert!((z.z1 - mu).abs() < 1e-14);
        }
    }

    #[test]
    fn sqrt_examples() {
        let r = sqrt_spd(&(Mat3::identity() * 4.0)).unwrap();
        assert!((r - Mat3::identity() * 2.0).amax() < 1e-15);
        let r = sqrt_spd(&Mat3::from_diagonal(&Vector3::new(1.0, 4.0, 9.0))).unwrap();
        assert!((r - Mat3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0))).amax() < 1e-14);
        assert!(matches!(sqrt_spd(&-Mat3::identity()), Err(Error::NotSpd(_))));
        let mut m = Mat3::identity();
        m[(0, 1)] = 0.5;
        assert!(matches!(sqrt_spd(&m), Err(Error::NotSpd(_))));
    }

    #[test]
    fn accurate_s_matches_direct_route() {
        let mut r = rng(9);
        for _ in 0..100 {
            let l = 0.5 + 2.5 * r.gen::<f64>();
            let f = Mat3::identity() * l + Mat3::from_fn(|_, _| 0.2 * (2.0 * r.gen::<f64>() - 1.0));
            if f.determinant() <= 0.0 {
                continue;
            }
            let fast = shifted_stretch_invariants(&f, l).unwrap();
            let root = sqrt_spd(&(f.transpose() * f)).unwrap();
            let direct = invariants3(&(root - Mat3::identity() * l));
            assert!(fast.max_diff(&direct) < 1e-12);
        }
        // tiny perturbations keep relative accuracy
        let l = 1.5;
        let e = 1e-9;
        let f = Mat3::identity() * l + Mat3::from_diagonal(&Vector3::new(e, 0.0, 0.0));
        let s = shifted_stretch_invariants(&f, l).unwrap();
        let h = f[(0, 0)] - l;
        assert!((s.k1 - h).abs() < 1e-22, "{:e}", s.k1 - h);
    }

    fn stretch_strategy() -> impl Strategy<Value = (f64, Mat3)> {
        (
            0.5f64..3.0,
            (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0),
            (-0.3f64..0.3, -0.3f64..0.3, -0.3f64..0.3),
        )
            .prop_map(|(l, (u1, u2, u3), (a, b, c))| {
                let q = rotation_from_unit_cube(u1, u2, u3);
                let d = Mat3::from_diagonal(&Vector3::new(l + a, l + b, l + c));
                let m = q * d * q.transpose();
                (l, 0.5 * (m + m.transpose()))
            })
    }

    proptest! {
        #[test]
        fn invariants_are_rotation_invariant(
            entries in prop::array::uniform9(-2.0f64..2.0),
            u in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0),
        ) {
            let c = Mat3::from_row_slice(&entries);
            let q = rotation_from_unit_cube(u.0, u.1, u.2);
            let a = invariants3(&c);
            let b = invariants3(&(q.transpose() * c * q));
            prop_assert!(a.max_diff(&b) < 1e-12);
        }

        #[test]
        fn shift_matches_matrix_shift(entries in prop::array::uniform9(-2.0f64..2.0), z in -3.0f64..3.0) {
            let c = Mat3::from_row_slice(&entries);
            let a = shift_invariants(z, &invariants3(&c));
            let b = invariants3(&(Mat3::identity() * z + c));
            prop_assert!(a.max_diff(&b) < 1e-11);
        }

        #[test]
        fn strain_stretch_round_trip((l, stretch) in stretch_strategy()) {
            let r = invariants3(&stretch).tagged(InvariantSystem::R);
            let i = stretch_to_strain_inv(&r).unwrap();
            let back = strain_to_stretch_inv(&i, l).unwrap();
            prop_assert!(back.max_diff(&r) < 1e-10, "{:?} vs {:?}", back, r);
            prop_assert!(r.k1 > 0.0 && r.k3 > 0.0 && r.k1 * r.k1 >= 3.0 * r.k2 - 1e-12);
        }

        #[test]
        fn j_s_round_trip(d in prop::array::uniform3(-0.0666f64..0.0666), l in 0.5f64..3.0) {
            // shifted stretches of an actual SPD stretch, so |s| ≤ 0.2
            let s = InvariantTriple::from_eigenvalues(InvariantSystem::S, d);
            let j = s_to_j(&s, l).unwrap();
            let back = j_to_s(&j, l).unwrap();
            prop_assert!(back.max_diff(&s) < 1e-10, "{:?} vs {:?}", back, s);
            prop_assert!(s_to_j(&back, l).unwrap().max_diff(&j) < 1e-12);
        }

        #[test]
        fn distortional_z2_nonpositive((l, stretch) in stretch_strategy()) {
            let s = shift_invariants(-l, &invariants3(&stretch)).tagged(InvariantSystem::S);
            let z = distortional_vars(&s, l).unwrap();
            prop_assert!(z.z2 <= 1e-14);
        }

        #[test]
        fn sqrt_squares_back((_, m) in stretch_strategy()) {
            let root = sqrt_spd(&m).unwrap();
            prop_assert!((root * root - m).amax() < 1e-10);
        }
    }
}
