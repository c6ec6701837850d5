//! Plane waves of the linearized system and their quadratic interactions.

use rand::Rng;
use serde::Serialize;

use super::TensorB;
use crate::error::{Error, Result};
use crate::sampling::{random_direction, random_transverse_frame, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Longitudinal = 1,
    Transverse = 2,
}

/// `u = a·e^{iβ(⟨ξ,x⟩ − c t)}`, stored by its coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneWave {
    pub family: Family,
    pub direction: Vec3,
    pub amplitude: Vec3,
    pub frequency: f64,
    pub speed: f64,
}

/// Tolerance on `⟨a, ξ⟩` or `|a ∧ ξ|` for family membership.
pub const POLARIZATION_TOL: f64 = 1e-12;

impl PlaneWave {
    /// Longitudinal wave with amplitude `amp·ξ`.
    pub fn longitudinal(xi: Vec3, amp: f64, frequency: f64, c1: f64) -> Self {
        let xi = xi.normalize();
        PlaneWave {
            family: Family::Longitudinal,
            direction: xi,
            amplitude: xi * amp,
            frequency,
            speed: c1,
        }
    }

    /// Transverse wave with amplitude `amp·η`; `η` is projected off `ξ`.
    pub fn transverse(xi: Vec3, eta: Vec3, amp: f64, frequency: f64, c2: f64) -> Result<Self> {
        let xi = xi.normalize();
        let perp = eta - xi * xi.dot(&eta);
        if perp.norm() < 1e-8 {
            return Err(Error::Domain(
                "transverse polarization parallel to the direction".into(),
            ));
        }
        Ok(PlaneWave {
            family: Family::Transverse,
            direction: xi,
            amplitude: perp.normalize() * amp,
            frequency,
            speed: c2,
        })
    }

    /// Polarization error: `|a ∧ ξ|` for family 1, `|⟨a, ξ⟩|` for family 2.
    pub fn polarization_error(&self) -> f64 {
        match self.family {
            Family::Longitudinal => self.amplitude.cross(&self.direction).norm(),
            Family::Transverse => self.amplitude.dot(&self.direction).abs(),
        }
    }
}

/// Coefficient of `⟨u, N(v, w)⟩` for plane waves sharing a direction:
/// `β_v β_w (β_v + β_w)·B^{ijk}_{ℓmn} a_uⁱ a_vʲ a_wᵏ ξℓξₘξₙ`, the common
/// factor `−i·e^{i(β_v + β_w)(…)}` removed.
pub fn resonance_bracket(u: &PlaneWave, v: &PlaneWave, w: &PlaneWave, b: &TensorB) -> Result<f64> {
    let xi = u.direction;
    for other in [v, w] {
        if (other.direction - xi).norm() > 1e-12 {
            return Err(Error::DirectionMismatch);
        }
    }
    let (bv, bw) = (v.frequency, w.frequency);
    Ok(bv * bw * (bv + bw) * b.contract(&u.amplitude, &v.amplitude, &w.amplitude, &xi, &xi, &xi))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NullContractions {
    pub max_longitudinal: f64,
    pub max_transverse: f64,
}

/// Largest `|B·ξ⁶|` and `|B·η⁽¹⁾η⁽²⁾η⁽³⁾ξ³|` over random directions and
/// transverse frames; every slot assignment of the two frame vectors is
/// tried.
pub fn null_contractions<R: Rng>(b: &TensorB, trials: usize, rng: &mut R) -> NullContractions {
    let mut out = NullContractions {
        max_longitudinal: 0.0,
        max_transverse: 0.0,
    };
    for _ in 0..trials.max(1) {
        let xi = random_direction(rng);
        out.max_longitudinal = out.max_longitudinal.max(b.contract(&xi, &xi, &xi, &xi, &xi, &xi).abs());
        let (e1, e2) = random_transverse_frame(rng, &xi);
        let frame = [e1, e2];
        for mask in 0..8 {
            let pick = |bit: usize| &frame[(mask >> bit) & 1];
            let c = b.contract(pick(0), pick(1), pick(2), &xi, &xi, &xi).abs();
            out.max_transverse = out.max_transverse.max(c);
        }
    }
    out
}
