//! Energies, weighted norms and projections of discrete fields.

use serde::{Deserialize, Serialize};

use super::{Dynamics, FieldState, Grid3, Jet, VecField, GAMMA, LAMBDA};
use crate::error::{Error, Result};

/// Squared propagation speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Speeds {
    pub c1_sq: f64,
    pub c2_sq: f64,
}

impl Speeds {
    /// `c_α` for `α ∈ {1, 2}`.
    pub fn c(&self, alpha: usize) -> f64 {
        if alpha == 1 {
            self.c1_sq.sqrt()
        } else {
            self.c2_sq.sqrt()
        }
    }
}

/// Largest order for which discrete vector-field powers are supported.
pub const MAX_DISCRETE_ORDER: usize = 3;

fn check_order(kappa: usize) -> Result<()> {
    if kappa > MAX_DISCRETE_ORDER {
        return Err(Error::Config(format!(
            "order {kappa} exceeds the discrete cap {MAX_DISCRETE_ORDER}"
        )));
    }
    Ok(())
}

fn check_alpha(alpha: usize) -> Result<()> {
    if alpha == 1 || alpha == 2 {
        Ok(())
    } else {
        Err(Error::Config(format!("projection index must be 1 or 2, got {alpha}")))
    }
}

/// `E₁ = ½∫ |uₜ|² + c₂²|∇u|² + (c₁² − c₂²)(∇·u)²`.
pub fn energy1(grid: &Grid3, u: &[[f64; 3]], ut: &[[f64; 3]], speeds: Speeds) -> f64 {
    let density = grid.sum_nodes(|p| {
        let g = grid.gradient_at(u, p);
        let kinetic: f64 = ut[p].iter().map(|v| v * v).sum();
        let grad_sq: f64 = g.iter().map(|v| v * v).sum();
        let div = g[0] + g[4] + g[8];
        kinetic + speeds.c2_sq * grad_sq + (speeds.c1_sq - speeds.c2_sq) * div * div
    });
    0.5 * density * grid.cell_volume()
}

/// Calls `visit` on `Γᵃ` of the jet for every ordered sequence with
/// `|a| ≤ max_len`.
fn for_each_power(
    jet: &Jet,
    fields: &[super::VectorField],
    max_len: usize,
    visit: &mut dyn FnMut(&Jet) -> Result<()>,
) -> Result<()> {
    visit(jet)?;
    if max_len > 0 {
        for &vf in fields {
            let next = jet.apply(vf)?;
            for_each_power(&next, fields, max_len - 1, visit)?;
        }
    }
    Ok(())
}

/// `E_κ = Σ_{|a| ≤ κ−1} E₁(Γᵃu)`. Orders above 1 need `dynamics` for the
/// extra time derivatives.
pub fn energy(state: &FieldState, speeds: Speeds, kappa: usize, dynamics: Option<&Dynamics>) -> Result<f64> {
    check_order(kappa)?;
    if kappa == 0 {
        return Ok(0.0);
    }
    let jet = Jet::from_state(state, kappa + 1, dynamics)?;
    let mut total = 0.0;
    for_each_power(&jet, &GAMMA, kappa - 1, &mut |j| {
        total += energy1(&state.grid, &j.levels[0], &j.levels[1], speeds);
        Ok(())
    })?;
    Ok(total)
}

/// `X_κ = Σ_{α,β,ℓ} Σ_{|a| ≤ κ−2} ‖⟨c_α t − r⟩ P_α ∂_β∂ℓ Γᵃu‖`, with the
/// nodes adjacent to the origin left out.
pub fn weighted_x(state: &FieldState, speeds: Speeds, kappa: usize, dynamics: Option<&Dynamics>) -> Result<f64> {
    check_order(kappa)?;
    if kappa < 2 {
        return Ok(0.0);
    }
    let grid = state.grid;
    let jet = Jet::from_state(state, kappa, dynamics)?;
    let t = state.t;
    let mut total = 0.0;
    for_each_power(&jet, &GAMMA, kappa - 2, &mut |j| {
        let (u, ut) = (&j.levels[0], &j.levels[1]);
        // sums[α][β][ℓ] of squared weighted projections
        let sums = grid.map_nodes(|p| {
            let mut acc = [[[0.0; 3]; 4]; 2];
            if grid.near_origin(p) {
                return acc;
            }
            let x = grid.point(p);
            let r = x.norm();
            let xh = x / r;
            let d = grid.derivs_at(u, p);
            let dt = grid.gradient_at(ut, p);
            for beta in 0..4 {
                for l in 0..3 {
                    let w: [f64; 3] = if beta == 0 {
                        [0, 1, 2].map(|jj| dt[jj * 3 + l])
                    } else {
                        [0, 1, 2].map(|jj| d.hess[(jj * 3 + beta - 1) * 3 + l])
                    };
                    let radial = xh[0] * w[0] + xh[1] * w[1] + xh[2] * w[2];
                    let total_sq: f64 = w.iter().map(|v| v * v).sum();
                    let parts = [radial * radial, (total_sq - radial * radial).max(0.0)];
                    for alpha in 0..2 {
                        let s = speeds.c(alpha + 1) * t - r;
                        acc[alpha][beta][l] = (1.0 + s * s) * parts[alpha];
                    }
                }
            }
            acc
        });
        let mut reduced = [[[0.0; 3]; 4]; 2];
        for acc in &sums {
            for a in 0..2 {
                for b in 0..4 {
                    for l in 0..3 {
                        reduced[a][b][l] += acc[a][b][l];
                    }
                }
            }
        }
        let dv = grid.cell_volume();
        total += reduced.iter().flatten().flatten().map(|s| (s * dv).sqrt()).sum::<f64>();
        Ok(())
    })?;
    Ok(total)
}

/// `(Σ_{|a| ≤ κ} ‖Λᵃf‖²)^{1/2}` with `Λ = (∇, Ω̃, r∂ᵣ − 1)`.
pub fn lambda_norm(grid: &Grid3, f: &[[f64; 3]], kappa: usize) -> Result<f64> {
    check_order(kappa)?;
    let jet = Jet::spatial(*grid, f.to_vec());
    let mut total = 0.0;
    for_each_power(&jet, &LAMBDA, kappa, &mut |j| {
        let v = &j.levels[0];
        total += grid.sum_nodes(|p| v[p].iter().map(|x| x * x).sum());
        Ok(())
    })?;
    Ok((total * grid.cell_volume()).sqrt())
}

/// `P₁f = (x/r)⟨x/r, f⟩` and `P₂ = I − P₁`.
pub fn project(grid: &Grid3, f: &[[f64; 3]], alpha: usize) -> Result<VecField> {
    check_alpha(alpha)?;
    Ok(grid.map_nodes(|p| {
        let x = grid.point(p);
        let xh = x / x.norm();
        let radial = xh[0] * f[p][0] + xh[1] * f[p][1] + xh[2] * f[p][2];
        let p1 = [0, 1, 2].map(|c| radial * xh[c]);
        if alpha == 1 {
            p1
        } else {
            [0, 1, 2].map(|c| f[p][c] - p1[c])
        }
    }))
}

/// `max |∇u|` over nodes, with `|·|` the Frobenius norm.
pub fn max_abs_gradient(grid: &Grid3, u: &[[f64; 3]]) -> f64 {
    grid.max_nodes(|p| grid.gradient_at(u, p).iter().map(|v| v * v).sum::<f64>().sqrt())
}
