//! Seeded random rotations, directions and frames.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::invariants::Mat3;

pub type Vec3 = Vector3<f64>;

/// Deterministic generator used by every randomized check.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rotation from three numbers in `[0, 1)`; uniform on SO(3) when they are.
pub fn rotation_from_unit_cube(u1: f64, u2: f64, u3: f64) -> Mat3 {
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = Quaternion::new(
        b * (tau * u3).cos(),
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
    );
    UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner()
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Mat3 {
    rotation_from_unit_cube(rng.gen(), rng.gen(), rng.gen())
}

/// Unit vector from two numbers in `[0, 1)`; uniform on the sphere when they are.
pub fn direction_from_unit_square(u1: f64, u2: f64) -> Vec3 {
    let z = 2.0 * u1 - 1.0;
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let phi = std::f64::consts::TAU * u2;
    Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
}

pub fn random_direction<R: Rng>(rng: &mut R) -> Vec3 {
    direction_from_unit_square(rng.gen(), rng.gen())
}

/// Two unit vectors completing `xi` to a right-handed orthonormal frame.
pub fn orthonormal_complement(xi: &Vec3) -> (Vec3, Vec3) {
    let xi = xi.normalize();
    let seed = if xi.x.abs() < 0.6 {
        Vec3::x()
    } else if xi.y.abs() < 0.6 {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = (seed - xi * xi.dot(&seed)).normalize();
    let e2 = xi.cross(&e1);
    (e1, e2)
}

/// Random orthonormal pair perpendicular to `xi`.
pub fn random_transverse_frame<R: Rng>(rng: &mut R, xi: &Vec3) -> (Vec3, Vec3) {
    let (e1, e2) = orthonormal_complement(xi);
    let phi = rng.gen::<f64>() * std::f64::consts::TAU;
    let (s, c) = phi.sin_cos();
    (e1 * c + e2 * s, -e1 * s + e2 * c)
}
