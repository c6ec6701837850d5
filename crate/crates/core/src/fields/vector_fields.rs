//! The commuting vector fields and their action on discrete time jets.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Dynamics, FieldState, Grid3, LocalDerivs, VecField};
use crate::error::{Error, Result};

/// Translations, rotations and scalings acting on vector fields.
///
/// `Partial(0)` is `∂ₜ`; `Partial(1..=3)` are spatial. Rotation indices
/// run over `1..=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VectorField {
    Partial(usize),
    /// `Ω̃ℓ = Ωℓ I + Uℓ`, with `(Uℓ)ₐᵦ = εℓₐᵦ`.
    RotationTilde(usize),
    /// `Ωℓ = εℓₐᵦ xₐ∂ᵦ`, componentwise.
    Rotation(usize),
    /// `S̃ = t∂ₜ + r∂ᵣ − 1`.
    ScalingTilde,
    /// `∂ᵣ = (x/r)·∇`.
    Radial,
    /// `r∂ᵣ − 1`, the time-independent part of `S̃`.
    SpatialScaling,
}

/// `Γ = (∂₀, ∂₁, ∂₂, ∂₃, Ω̃₁, Ω̃₂, Ω̃₃, S̃)`.
pub const GAMMA: [VectorField; 8] = [
    VectorField::Partial(0),
    VectorField::Partial(1),
    VectorField::Partial(2),
    VectorField::Partial(3),
    VectorField::RotationTilde(1),
    VectorField::RotationTilde(2),
    VectorField::RotationTilde(3),
    VectorField::ScalingTilde,
];

/// `Λ = (∇, Ω̃, r∂ᵣ − 1)`.
pub const LAMBDA: [VectorField; 7] = [
    VectorField::Partial(1),
    VectorField::Partial(2),
    VectorField::Partial(3),
    VectorField::RotationTilde(1),
    VectorField::RotationTilde(2),
    VectorField::RotationTilde(3),
    VectorField::SpatialScaling,
];

/// `εₐᵦ꜀` for 0-based indices.
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

impl VectorField {
    pub fn validate(self) -> Result<Self> {
        let ok = match self {
            VectorField::Partial(b) => b <= 3,
            VectorField::RotationTilde(l) | VectorField::Rotation(l) => (1..=3).contains(&l),
            _ => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Config(format!("no vector field {self:?}")))
        }
    }

    /// Number of time derivatives this field consumes.
    pub fn time_order(self) -> usize {
        match self {
            VectorField::Partial(0) | VectorField::ScalingTilde => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorField::Partial(b) => write!(f, "∂{b}"),
            VectorField::RotationTilde(l) => write!(f, "Ω̃{l}"),
            VectorField::Rotation(l) => write!(f, "Ω{l}"),
            VectorField::ScalingTilde => write!(f, "S̃"),
            VectorField::Radial => write!(f, "∂r"),
            VectorField::SpatialScaling => write!(f, "r∂r−1"),
        }
    }
}

/// `levels[k] = ∂ₜᵏu` at time `t`.
#[derive(Debug, Clone)]
pub struct Jet {
    pub grid: Grid3,
    pub t: f64,
    pub levels: Vec<VecField>,
}

impl Jet {
    /// A jet with `depth` levels. Levels past `∂ₜu` come from
    /// differentiating `u_tt = Au + N(u,u)` in time, which needs `dynamics`.
    pub fn from_state(state: &FieldState, depth: usize, dynamics: Option<&Dynamics>) -> Result<Self> {
        let mut levels = vec![state.u.clone(), state.ut.clone()];
        levels.truncate(depth);
        if depth > 2 {
            let dyn_ = dynamics.ok_or_else(|| {
                Error::NeedsTimeDerivative(format!("{depth} time levels requested, 2 stored, no material given"))
            })?;
            if depth > 5 {
                return Err(Error::NeedsTimeDerivative(format!(
                    "{depth} time levels exceeds the supported 5"
                )));
            }
            extend_levels(&state.grid, dyn_, &mut levels, depth);
        }
        Ok(Jet {
            grid: state.grid,
            t: state.t,
            levels,
        })
    }

    /// A time-independent field as a one-level jet.
    pub fn spatial(grid: Grid3, f: VecField) -> Self {
        Jet {
            grid,
            t: 0.0,
            levels: vec![f],
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `Γ` applied levelwise; `∂ₜ` and `S̃` shorten the jet by one.
    pub fn apply(&self, vf: VectorField) -> Result<Jet> {
        let vf = vf.validate()?;
        let need = 1 + vf.time_order();
        if self.depth() < need {
            return Err(Error::NeedsTimeDerivative(format!(
                "{vf} needs {need} time levels, jet has {}",
                self.depth()
            )));
        }
        let g = &self.grid;
        let levels = match vf {
            VectorField::Partial(0) => self.levels[1..].to_vec(),
            VectorField::Partial(a) => self.levels.iter().map(|f| g.partial(f, a - 1)).collect(),
            VectorField::Rotation(l) => self.levels.iter().map(|f| rotation(g, f, l - 1, false)).collect(),
            VectorField::RotationTilde(l) => self.levels.iter().map(|f| rotation(g, f, l - 1, true)).collect(),
            VectorField::Radial => self.levels.iter().map(|f| radial(g, f, false)).collect(),
            VectorField::SpatialScaling => self.levels.iter().map(|f| radial(g, f, true)).collect(),
            VectorField::ScalingTilde => {
                // ∂ₜᵏ(S̃u) = t·u_{k+1} + (k − 1)·u_k + r∂ᵣu_k
                (0..self.depth() - 1)
                    .map(|k| {
                        let rdr = radial_times_r(g, &self.levels[k]);
                        let (next, cur) = (&self.levels[k + 1], &self.levels[k]);
                        (0..g.len())
                            .map(|p| {
                                let mut v = [0.0; 3];
                                for c in 0..3 {
                                    v[c] = self.t * next[p][c] + (k as f64 - 1.0) * cur[p][c] + rdr[p][c];
                                }
                                v
                            })
                            .collect()
                    })
                    .collect()
            }
        };
        Ok(Jet {
            grid: self.grid,
            t: self.t,
            levels,
        })
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Appends `u_{k+2} = A u_k + 2 Σ_p C(k,p)·half(∂²u_p, ∂u_{k−p})`.
fn extend_levels(grid: &Grid3, dyn_: &Dynamics, levels: &mut Vec<VecField>, depth: usize) {
    let mut derivs: Vec<Vec<LocalDerivs>> = Vec::new();
    while levels.len() < depth {
        while derivs.len() < levels.len() - 1 {
            let f = &levels[derivs.len()];
            derivs.push(grid.map_nodes(|p| grid.derivs_at(f, p)));
        }
        let k = levels.len() - 2;
        let next = grid.map_nodes(|p| {
            let mut out = dyn_.apply_a(&derivs[k][p].hess);
            if let Some(b) = &dyn_.b {
                for q in 0..=k {
                    let nl = b.half(&derivs[q][p].hess, &derivs[k - q][p].grad);
                    let w = 2.0 * binomial(k, q);
                    for i in 0..3 {
                        out[i] += w * nl[i];
                    }
                }
            }
            out
        });
        levels.push(next);
    }
}

fn rotation(grid: &Grid3, f: &[[f64; 3]], l: usize, tilde: bool) -> VecField {
    grid.map_nodes(|p| {
        let x = grid.point(p);
        let grad = grid.gradient_at(f, p);
        let mut out = [0.0; 3];
        for a in 0..3 {
            for b in 0..3 {
                let e = levi_civita(l, a, b);
                if e == 0.0 {
                    continue;
                }
                for j in 0..3 {
                    out[j] += e * x[a] * grad[j * 3 + b];
                }
                if tilde {
                    out[a] += e * f[p][b];
                }
            }
        }
        out
    })
}

fn radial_times_r(grid: &Grid3, f: &[[f64; 3]]) -> VecField {
    grid.map_nodes(|p| {
        let x = grid.point(p);
        let grad = grid.gradient_at(f, p);
        let mut out = [0.0; 3];
        for j in 0..3 {
            out[j] = (0..3).map(|m| x[m] * grad[j * 3 + m]).sum();
        }
        out
    })
}

/// `∂ᵣf`, or `r∂ᵣf − f` when `scaling`.
fn radial(grid: &Grid3, f: &[[f64; 3]], scaling: bool) -> VecField {
    let rdr = radial_times_r(grid, f);
    (0..grid.len())
        .map(|p| {
            if scaling {
                [0, 1, 2].map(|j| rdr[p][j] - f[p][j])
            } else {
                let r = grid.point(p).norm();
                rdr[p].map(|v| v / r)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Boundary;

    fn grid() -> Grid3 {
        Grid3::new(16, 2.0, Boundary::ZeroPadded).unwrap()
    }

    #[test]
    fn constant_axis_field_is_annihilated() {
        let g = grid();
        let e3 = Jet::spatial(g, vec![[0.0, 0.0, 1.0]; g.len()]);
        let out = e3.apply(VectorField::RotationTilde(3)).unwrap();
        // interior nodes only: the zero padding makes the constant field jump at the edge
        let p = g.index(8, 8, 8);
        assert!(out.levels[0][p].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn linear_fields_are_exact() {
        let g = Grid3::new(16, 2.0, Boundary::Periodic).unwrap();
        let identity: VecField = (0..g.len()).map(|p| g.point(p).into()).collect();
        let jet = Jet::spatial(g, identity.clone());
        let inner = g.index(7, 9, 8);
        for l in 1..=3 {
            let r = jet.apply(VectorField::RotationTilde(l)).unwrap();
            assert!(r.levels[0][inner].iter().all(|v| v.abs() < 1e-12));
        }
        let s = jet.apply(VectorField::SpatialScaling).unwrap();
        assert!(s.levels[0][inner].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn time_levels_are_consumed() {
        let g = grid();
        let state = FieldState::zeros(g);
        let jet = Jet::from_state(&state, 2, None).unwrap();
        let d = jet.apply(VectorField::Partial(0)).unwrap();
        assert_eq!(d.depth(), 1);
        assert!(matches!(
            d.apply(VectorField::ScalingTilde),
            Err(Error::NeedsTimeDerivative(_))
        ));
        assert!(matches!(
            Jet::from_state(&state, 3, None),
            Err(Error::NeedsTimeDerivative(_))
        ));
        assert!(jet.apply(VectorField::Rotation(4)).is_err());
    }

    #[test]
    fn structure_constants() {
        assert_eq!(levi_civita(0, 1, 2), 1.0);
        assert_eq!(levi_civita(1, 0, 2), -1.0);
        assert_eq!(levi_civita(1, 1, 2), 0.0);
        assert_eq!(binomial(4, 2), 6.0);
    }
}
