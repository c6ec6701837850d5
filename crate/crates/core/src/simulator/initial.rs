//! Initial data: compactly supported pulses and perturbations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldState, Grid3, Speeds};
use crate::sampling::{orthonormal_complement, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    LongitudinalPulse,
    TransversePulse,
    DilationPerturbation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub width: f64,
    pub direction: [f64; 3],
    /// Transverse polarization; defaults to a fixed unit vector normal to
    /// the direction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<[f64; 3]>,
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData {
            kind: InitialKind::LongitudinalPulse,
            amplitude: 0.05,
            width: 2.0,
            direction: [1.0, 0.0, 0.0],
            polarization: None,
        }
    }
}

/// `G(s) = exp(1 − 1/(1 − s²))` on `|s| < 1`, with `G′` and `G″`.
pub fn bump(s: f64) -> [f64; 3] {
    if s.abs() >= 1.0 {
        return [0.0; 3];
    }
    let q = 1.0 - s * s;
    let g = (1.0 - 1.0 / q).exp();
    [g, g * (-2.0 * s / (q * q)), g * (6.0 * s.powi(4) - 2.0) / q.powi(4)]
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Config(format!(
                "amplitude must be nonnegative, got {}",
                self.amplitude
            )));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::Config(format!("width must be positive, got {}", self.width)));
        }
        let xi = Vec3::from(self.direction);
        if (xi.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "direction must be a unit vector, |ξ| = {}",
                xi.norm()
            )));
        }
        Ok(())
    }

    pub fn xi(&self) -> Vec3 {
        Vec3::from(self.direction)
    }

    /// Polarization and speed of the pulse.
    pub fn polarization_and_speed(&self, speeds: Speeds) -> Result<(Vec3, f64)> {
        let xi = self.xi();
        match self.kind {
            InitialKind::LongitudinalPulse => Ok((xi, speeds.c(1))),
            InitialKind::TransversePulse => {
                let eta = match self.polarization {
                    Some(p) => {
                        let p = Vec3::from(p);
                        let perp = p - xi * xi.dot(&p);
                        if perp.norm() < 1e-8 {
                            return Err(Error::Config("polarization is parallel to the direction".into()));
                        }
                        perp.normalize()
                    }
                    None => orthonormal_complement(&xi).0,
                };
                Ok((eta, speeds.c(2)))
            }
            InitialKind::DilationPerturbation => {
                Err(Error::Config("a dilation perturbation has no plane profile".into()))
            }
        }
    }

    /// `(U, ∂ₜU)` of a right-moving plane pulse at the coordinate
    /// `s = ⟨x, ξ⟩`.
    pub fn plane_profile(&self, s: f64, polarization: &Vec3, speed: f64) -> ([f64; 3], [f64; 3]) {
        let [g, dg, _] = bump(s / self.width);
        let eps = self.amplitude;
        let u = polarization * (eps * g);
        let ut = polarization * (-speed * eps * dg / self.width);
        (u.into(), ut.into())
    }
}

/// Samples the initial state on `grid`.
pub fn make_initial_data(grid: Grid3, data: &InitialData, speeds: Speeds) -> Result<FieldState> {
    data.validate()?;
    if data.amplitude == 0.0 {
        return Ok(FieldState::zeros(grid));
    }
    let state = match data.kind {
        InitialKind::DilationPerturbation => FieldState::from_fn(grid, 0.0, |x| {
            let g = bump(x.norm() / data.width)[0];
            ((x * (data.amplitude * g)).into(), [0.0; 3])
        }),
        _ => {
            let (pol, speed) = data.polarization_and_speed(speeds)?;
            let xi = data.xi();
            FieldState::from_fn(grid, 0.0, |x| data.plane_profile(x.dot(&xi), &pol, speed))
        }
    };
    Ok(state)
}
