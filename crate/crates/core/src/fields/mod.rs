//! Discrete vector fields on a uniform box grid.
//!
//! A [`Grid3`] with `n` points per axis covers `[−L, L]³`; node `i` sits at
//! `−L + (i + ½)h` with `h = 2L/n`, so for even `n` no node lands on the
//! origin. Fields are stored row-major with `x₁` slowest. Spatial
//! derivatives use 4th-order centered stencils; mixed second derivatives
//! are products of two first-derivative stencils.

pub mod analytic;
mod io;
mod norms;
mod vector_fields;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::Vec3;
use crate::tensors::{idx4, MaterialTensors, PackedB, TensorA};

pub use io::{read_snapshot, slice_csv, write_slice_csv, write_snapshot, SnapshotMeta};
pub use norms::{energy, energy1, lambda_norm, max_abs_gradient, project, weighted_x, Speeds};
pub use vector_fields::{levi_civita, Jet, VectorField, GAMMA, LAMBDA};

/// Samples of a 3-vector field, one per node.
pub type VecField = Vec<[f64; 3]>;

/// Width of the shell that must stay zero on a zero-padded grid.
pub const GUARD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    /// Values outside the box read as zero.
    ZeroPadded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    n: usize,
    half_width: f64,
    boundary: Boundary,
}

const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];

/// First and second derivatives of a field at one node.
#[derive(Debug, Clone, Copy)]
pub struct LocalDerivs {
    /// `grad[j·3 + m] = ∂ₘuʲ`.
    pub grad: [f64; 9],
    /// `hess[(j·3 + ℓ)·3 + m] = ∂ℓ∂ₘuʲ`.
    pub hess: [f64; 27],
}

impl Grid3 {
    pub fn new(n: usize, half_width: f64, boundary: Boundary) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!("grid needs an even n ≥ 8, got {n}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Config(format!("half-width must be positive, got {half_width}")));
        }
        Ok(Grid3 {
            n,
            half_width,
            boundary,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn unflatten(&self, p: usize) -> [usize; 3] {
        [p / (self.n * self.n), (p / self.n) % self.n, p % self.n]
    }

    pub fn point(&self, p: usize) -> Vec3 {
        let [i, j, k] = self.unflatten(p);
        Vec3::new(self.coord(i), self.coord(j), self.coord(k))
    }

    /// Whether node `p` lies in the outer guard shell.
    pub fn in_guard(&self, p: usize) -> bool {
        self.unflatten(p).iter().any(|&i| i < GUARD || i >= self.n - GUARD)
    }

    /// Nodes next to the origin, left out of integrals with `1/r` factors.
    pub fn near_origin(&self, p: usize) -> bool {
        self.point(p).norm() < self.spacing()
    }

    #[inline]
    fn shift(&self, i: usize, o: isize) -> Option<usize> {
        let j = i as isize + o;
        let n = self.n as isize;
        match self.boundary {
            Boundary::Periodic => Some(j.rem_euclid(n) as usize),
            Boundary::ZeroPadded => (0..n).contains(&j).then_some(j as usize),
        }
    }

    #[inline]
    fn value<const K: usize>(&self, f: &[[f64; K]], ijk: [usize; 3], d: [isize; 3]) -> [f64; K] {
        match (
            self.shift(ijk[0], d[0]),
            self.shift(ijk[1], d[1]),
            self.shift(ijk[2], d[2]),
        ) {
            (Some(i), Some(j), Some(k)) => f[self.index(i, j, k)],
            _ => [0.0; K],
        }
    }

    /// `∂_axis f` at node `p`, for fields with `K` components.
    #[inline]
    pub fn partial_at<const K: usize>(&self, f: &[[f64; K]], p: usize, axis: usize) -> [f64; K] {
        let ijk = self.unflatten(p);
        let inv_h = 1.0 / self.spacing();
        let mut out = [0.0; K];
        for (s, &w) in D1.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut d = [0isize; 3];
            d[axis] = s as isize - 2;
            let v = self.value(f, ijk, d);
            for c in 0..K {
                out[c] += w * v[c];
            }
        }
        out.map(|x| x * inv_h)
    }

    /// `∂_axis f` on the whole grid.
    pub fn partial<const K: usize>(&self, f: &[[f64; K]], axis: usize) -> Vec<[f64; K]> {
        self.map_nodes(|p| self.partial_at(f, p, axis))
    }

    /// Gradient at node `p`: `out[j·3 + m] = ∂ₘfʲ`.
    pub fn gradient_at(&self, f: &[[f64; 3]], p: usize) -> [f64; 9] {
        let mut out = [0.0; 9];
        for m in 0..3 {
            let d = self.partial_at(f, p, m);
            for j in 0..3 {
                out[j * 3 + m] = d[j];
            }
        }
        out
    }

    /// Gradient and Hessian at node `p`.
    pub fn derivs_at(&self, f: &[[f64; 3]], p: usize) -> LocalDerivs {
        let ijk = self.unflatten(p);
        let h = self.spacing();
        let (inv_h, inv_h2) = (1.0 / h, 1.0 / (h * h));
        let mut grad = [0.0; 9];
        let mut hess = [0.0; 27];
        for a in 0..3 {
            let mut g = [0.0; 3];
            let mut dd = [0.0; 3];
            for s in 0..5 {
                let mut d = [0isize; 3];
                d[a] = s as isize - 2;
                let v = self.value(f, ijk, d);
                for j in 0..3 {
                    g[j] += D1[s] * v[j];
                    dd[j] += D2[s] * v[j];
                }
            }
            for j in 0..3 {
                grad[j * 3 + a] = g[j] * inv_h;
                hess[(j * 3 + a) * 3 + a] = dd[j] * inv_h2;
            }
        }
        for a in 0..3 {
            for b in a + 1..3 {
                let mut m = [0.0; 3];
                for (sa, &wa) in D1.iter().enumerate() {
                    if wa == 0.0 {
                        continue;
                    }
                    for (sb, &wb) in D1.iter().enumerate() {
                        if wb == 0.0 {
                            continue;
                        }
                        let mut d = [0isize; 3];
                        d[a] = sa as isize - 2;
                        d[b] = sb as isize - 2;
                        let v = self.value(f, ijk, d);
                        for j in 0..3 {
                            m[j] += wa * wb * v[j];
                        }
                    }
                }
                for j in 0..3 {
                    hess[(j * 3 + a) * 3 + b] = m[j] * inv_h2;
                    hess[(j * 3 + b) * 3 + a] = m[j] * inv_h2;
                }
            }
        }
        LocalDerivs { grad, hess }
    }

    /// Evaluates `f` at every node in parallel, in node order.
    pub fn map_nodes<T: Send, F: Fn(usize) -> T + Sync>(&self, f: F) -> Vec<T> {
        (0..self.len()).into_par_iter().map(&f).collect()
    }

    /// Sum of `f` over nodes with a fixed reduction order, so results do
    /// not depend on thread scheduling.
    pub fn sum_nodes<F: Fn(usize) -> f64 + Sync>(&self, f: F) -> f64 {
        let slab = self.n * self.n;
        let partial: Vec<f64> = (0..self.n)
            .into_par_iter()
            .map(|i| (i * slab..(i + 1) * slab).map(&f).sum())
            .collect();
        partial.iter().sum()
    }

    /// Maximum of `f` over nodes.
    pub fn max_nodes<F: Fn(usize) -> f64 + Sync>(&self, f: F) -> f64 {
        (0..self.len()).into_par_iter().map(&f).reduce(|| 0.0, f64::max)
    }
}

/// Displacement samples and their time derivative at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: Grid3,
    pub u: VecField,
    pub ut: VecField,
    pub t: f64,
}

impl FieldState {
    pub fn zeros(grid: Grid3) -> Self {
        FieldState {
            grid,
            u: vec![[0.0; 3]; grid.len()],
            ut: vec![[0.0; 3]; grid.len()],
            t: 0.0,
        }
    }

    /// Samples `init(x) = (u, ∂ₜu)` at every node.
    pub fn from_fn<F: Fn(Vec3) -> ([f64; 3], [f64; 3]) + Sync>(grid: Grid3, t: f64, init: F) -> Self {
        let pairs = grid.map_nodes(|p| init(grid.point(p)));
        let (u, ut) = pairs.into_iter().unzip();
        FieldState { grid, u, ut, t }
    }

    /// Finite entries, and zero guard shell on zero-padded grids.
    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if self.u.len() != n || self.ut.len() != n {
            return Err(Error::Config(format!(
                "state has {} samples, grid has {n}",
                self.u.len()
            )));
        }
        let finite = |f: &VecField| f.iter().flatten().all(|x| x.is_finite());
        if !finite(&self.u) || !finite(&self.ut) {
            return Err(Error::NonFinite(self.t));
        }
        if self.grid.boundary() == Boundary::ZeroPadded {
            let dirty = (0..n).any(|p| self.grid.in_guard(p) && self.u[p] != [0.0; 3]);
            if dirty {
                return Err(Error::Domain("displacement does not vanish on the guard shell".into()));
            }
        }
        Ok(())
    }

    /// Whether any displacement in the guard shell exceeds `tol`.
    pub fn touches_guard(&self, tol: f64) -> bool {
        (0..self.grid.len()).any(|p| self.grid.in_guard(p) && self.u[p].iter().any(|x| x.abs() > tol))
    }

    pub fn scaled(&self, c: f64) -> Self {
        let s = |f: &VecField| f.iter().map(|v| v.map(|x| c * x)).collect();
        FieldState {
            grid: self.grid,
            u: s(&self.u),
            ut: s(&self.ut),
            t: self.t,
        }
    }
}

/// The right-hand side `Au + N(u,u)` of the truncated system.
#[derive(Debug, Clone)]
pub struct Dynamics {
    pub a: TensorA,
    pub b: Option<PackedB>,
    pub speeds: Speeds,
}

impl Dynamics {
    /// With `nonlinear = false` the quadratic term is dropped.
    pub fn new(tensors: &MaterialTensors, nonlinear: bool) -> Self {
        Dynamics {
            a: tensors.a.clone(),
            b: nonlinear.then(|| tensors.b.packed()),
            speeds: Speeds {
                c1_sq: tensors.c1_sq,
                c2_sq: tensors.c2_sq,
            },
        }
    }

    pub fn linear(&self) -> Self {
        Dynamics {
            b: None,
            ..self.clone()
        }
    }

    #[inline]
    pub fn apply_a(&self, hess: &[f64; 27]) -> [f64; 3] {
        let e = &self.a.entries;
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let base = idx4(i, 0, 0, 0);
            let mut s = 0.0;
            for q in 0..27 {
                s += e[base + q] * hess[q];
            }
            *o = s;
        }
        out
    }

    /// `u_tt` at every node.
    pub fn rhs(&self, grid: &Grid3, u: &[[f64; 3]]) -> VecField {
        grid.map_nodes(|p| {
            let d = grid.derivs_at(u, p);
            let mut out = self.apply_a(&d.hess);
            if let Some(b) = &self.b {
                let nl = b.half(&d.hess, &d.grad);
                for i in 0..3 {
                    out[i] += 2.0 * nl[i];
                }
            }
            out
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = Grid3::new(8, 2.0, Boundary::Periodic).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.coord(0), -1.75);
        assert!((0..g.len()).all(|p| g.point(p).norm() > 0.4));
        assert_eq!((0..g.len()).filter(|&p| g.near_origin(p)).count(), 8);
        assert!(Grid3::new(6, 1.0, Boundary::Periodic).is_err());
        assert!(Grid3::new(9, 1.0, Boundary::Periodic).is_err());
        assert!(Grid3::new(8, 0.0, Boundary::Periodic).is_err());
    }

    #[test]
    fn stencils_are_fourth_order() {
        let err = |n: usize| {
            let g = Grid3::new(n, std::f64::consts::PI, Boundary::Periodic).unwrap();
            let f: VecField = (0..g.len())
                .map(|p| {
                    let x = g.point(p);
                    [x[0].sin() * x[1].cos(), (x[2] + x[0]).sin(), 0.0]
                })
                .collect();
            let mut worst: f64 = 0.0;
            for p in 0..g.len() {
                let x = g.point(p);
                let d = g.derivs_at(&f, p);
                let exact_grad = [x[0].cos() * x[1].cos(), -x[0].sin() * x[1].sin(), 0.0];
                let exact_mixed = -x[0].cos() * x[1].sin();
                let exact_xx = -(x[2] + x[0]).sin();
                for m in 0..3 {
                    worst = worst.max((d.grad[m] - exact_grad[m]).abs());
                }
                worst = worst.max((d.hess[1] - exact_mixed).abs());
                worst = worst.max((d.hess[3] - exact_mixed).abs());
                worst = worst.max((d.hess[9] - exact_xx).abs());
            }
            worst
        };
        let (e16, e32) = (err(16), err(32));
        assert!(e16 / e32 > 14.0, "{e16} {e32}");
    }

    #[test]
    fn zero_padding_reads_zero() {
        let g = Grid3::new(8, 1.0, Boundary::ZeroPadded).unwrap();
        let f = vec![[1.0, 1.0, 1.0]; g.len()];
        let corner = g.partial_at(&f, 0, 0);
        assert!(corner[0] > 0.0);
        let inner = g.partial_at(&f, g.index(4, 4, 4), 0);
        assert!(inner.iter().all(|v| v.abs() < 1e-14));
        let mut s = FieldState::zeros(g);
        assert!(s.validate().is_ok());
        s.u[0] = [1.0, 0.0, 0.0];
        assert!(s.validate().is_err());
    }

    #[test]
    fn summation_is_deterministic() {
        let g = Grid3::new(16, 1.0, Boundary::Periodic).unwrap();
        let f = |p: usize| (p as f64 * 0.37).sin();
        let a = g.sum_nodes(f);
        for _ in 0..5 {
            assert_eq!(g.sum_nodes(f).to_bits(), a.to_bits());
        }
    }
}
