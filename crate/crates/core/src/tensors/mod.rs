//! The coefficient tensors of the truncated system
//! `∂²ₜuⁱ = A^{ij}_{ℓm}∂ℓ∂ₘuʲ + B^{ijk}_{ℓmn}∂ℓ(∂ₘuʲ∂ₙuᵏ)`.
//!
//! `A` and `B` are the second and third derivatives of the stored energy
//! `σ(F)` at `F = λI`, with `F^i_ℓ = ∂ℓφⁱ`. Indices are stored row-major:
//! `(i, j, ℓ, m)` for `A` and `(i, j, k, ℓ, m, n)` for `B`.

mod plane;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constitutive::StoredEnergyModel;
use crate::error::{Error, Result};
use crate::invariants::{shifted_stretch_invariants, Mat3};
use crate::sampling::{random_rotation, Vec3};

pub use plane::{null_contractions, resonance_bracket, Family, NullContractions, PlaneWave, POLARIZATION_TOL};

/// Relative step of the second-difference route for `A`.
pub const A_STEP_REL: f64 = 1e-4;
/// Relative step of the third-difference extraction of `B`.
pub const B_STEP_REL: f64 = 5e-3;
/// Largest tolerated disagreement between the two routes for `A`.
pub const A_ROUTE_TOL: f64 = 1e-4;
/// Largest tolerated symmetry violation of `B` before averaging.
pub const B_ASYMMETRY_TOL: f64 = 1e-4;

#[inline]
pub fn idx4(i: usize, j: usize, l: usize, m: usize) -> usize {
    ((i * 3 + j) * 3 + l) * 3 + m
}

#[inline]
pub fn idx6(i: usize, j: usize, k: usize, l: usize, m: usize, n: usize) -> usize {
    ((((i * 3 + j) * 3 + k) * 3 + l) * 3 + m) * 3 + n
}

/// Stored energy as a function of the deformation gradient,
/// `σ(F) = τ(λ, s(F))` with `s` the invariants of `√(FᵀF) − λI`.
pub fn sigma_of_f(model: &StoredEnergyModel, lambda_ref: f64, f: &Mat3) -> Result<f64> {
    let det = f.determinant();
    if !(det > 0.0) {
        return Err(Error::NotSpd(format!("det F = {det:e} is not positive")));
    }
    model.eval_tau(lambda_ref, &shifted_stretch_invariants(f, lambda_ref)?)
}

fn perturbed(lambda: f64, steps: &[(usize, f64)]) -> Mat3 {
    let mut f = Mat3::identity() * lambda;
    for &(p, h) in steps {
        f[(p / 3, p % 3)] += h;
    }
    f
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorA {
    pub lambda: f64,
    pub entries: Vec<f64>,
}

impl TensorA {
    pub fn zeros(lambda: f64) -> Self {
        TensorA {
            lambda,
            entries: vec![0.0; 81],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, l: usize, m: usize) -> f64 {
        self.entries[idx4(i, j, l, m)]
    }

    /// `A^{ij}_{ℓm} = c₂²δ_{ij}δ_{ℓm} + (c₁² + g)δ_{iℓ}δ_{jm} + (c₂² − f′/(3λ))δ_{im}δ_{jℓ}`.
    ///
    /// The last two coefficients differ from `c₁² − c₂²` and `0` by the
    /// prestress `f′/(3λ)`, which the symbol `A(ξ)` cannot see but the
    /// divergence form of the equations does.
    pub fn closed_form(model: &StoredEnergyModel, lambda: f64) -> Result<Self> {
        let (c1, c2) = model.speeds(lambda)?;
        let g = model.g.eval(lambda)?;
        let f1 = model.f.deriv(1, lambda)?;
        Ok(Self::from_coefficients(lambda, c2, c1 + g, c2 - f1 / (3.0 * lambda)))
    }

    /// Isotropic tensor `α δ_{ij}δ_{ℓm} + β δ_{iℓ}δ_{jm} + γ δ_{im}δ_{jℓ}`.
    pub fn from_coefficients(lambda: f64, alpha: f64, beta: f64, gamma: f64) -> Self {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut t = Self::zeros(lambda);
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        t.entries[idx4(i, j, l, m)] =
                            alpha * d(i, j) * d(l, m) + beta * d(i, l) * d(j, m) + gamma * d(i, m) * d(j, l);
                    }
                }
            }
        }
        t
    }

    /// Central second differences of `σ` in the nine entries of `F`.
    pub fn finite_difference(model: &StoredEnergyModel, lambda: f64, step_rel: f64) -> Result<Self> {
        let h = step_rel * (1.0 + lambda);
        let sigma = |steps: &[(usize, f64)]| sigma_of_f(model, lambda, &perturbed(lambda, steps));
        let pairs: Vec<(usize, usize)> = (0..9).flat_map(|p| (p..9).map(move |q| (p, q))).collect();
        let values: Vec<f64> = pairs
            .par_iter()
            .map(|&(p, q)| {
                let mut acc = 0.0;
                for (sp, sq) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    acc += sp * sq * sigma(&[(p, sp * h), (q, sq * h)])?;
                }
                Ok(acc / (4.0 * h * h))
            })
            .collect::<Result<_>>()?;
        let mut t = Self::zeros(lambda);
        for (&(p, q), v) in pairs.iter().zip(values) {
            let (i, l) = (p / 3, p % 3);
            let (j, m) = (q / 3, q % 3);
            t.entries[idx4(i, j, l, m)] = v;
            t.entries[idx4(j, i, m, l)] = v;
        }
        Ok(t)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `A(ξ)^{ij} = A^{ij}_{ℓm}ξℓξₘ`.
    pub fn symbol(&self, xi: &Vec3) -> Mat3 {
        Mat3::from_fn(|i, j| {
            let mut s = 0.0;
            for l in 0..3 {
                for m in 0..3 {
                    s += self.get(i, j, l, m) * xi[l] * xi[m];
                }
            }
            s
        })
    }

    /// `(Au)ⁱ = A^{ij}_{ℓm}∂ℓ∂ₘuʲ` from second derivatives `d2u[j][ℓ][m]`.
    pub fn apply(&self, d2u: &[[[f64; 3]; 3]; 3]) -> Vec3 {
        Vec3::from_fn(|i, _| {
            let mut s = 0.0;
            for j in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        s += self.get(i, j, l, m) * d2u[j][l][m];
                    }
                }
            }
            s
        })
    }

    /// `max |A^{ij}_{ℓm} − A^{ji}_{mℓ}|`.
    pub fn pair_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        worst = worst.max((self.get(i, j, l, m) - self.get(j, i, m, l)).abs());
                    }
                }
            }
        }
        worst
    }

    /// All four indices conjugated by `Q`.
    pub fn rotated(&self, q: &Mat3) -> Self {
        TensorA {
            lambda: self.lambda,
            entries: rotate_all(&self.entries, 4, q),
        }
    }
}

/// Applies `Q` to every index of a dense rank-`rank` tensor in dimension 3.
fn rotate_all(entries: &[f64], rank: u32, q: &Mat3) -> Vec<f64> {
    let mut cur = entries.to_vec();
    let total = 3usize.pow(rank);
    for axis in 0..rank {
        let stride = 3usize.pow(rank - 1 - axis);
        let mut next = vec![0.0; total];
        for (flat, out) in next.iter_mut().enumerate() {
            let a = (flat / stride) % 3;
            let base = flat - a * stride;
            *out = (0..3).map(|b| q[(a, b)] * cur[base + b * stride]).sum();
        }
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorB {
    pub lambda: f64,
    pub entries: Vec<f64>,
}

impl TensorB {
    pub fn zeros(lambda: f64) -> Self {
        TensorB {
            lambda,
            entries: vec![0.0; 729],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize, m: usize, n: usize) -> f64 {
        self.entries[idx6(i, j, k, l, m, n)]
    }

    /// `B^{ijk}_{ℓmn} aⁱ bʲ cᵏ pℓ qₘ rₙ`.
    pub fn contract(&self, a: &Vec3, b: &Vec3, c: &Vec3, p: &Vec3, q: &Vec3, r: &Vec3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let w = a[i] * b[j] * c[k];
                    if w == 0.0 {
                        continue;
                    }
                    for l in 0..3 {
                        for m in 0..3 {
                            for n in 0..3 {
                                s += w * p[l] * q[m] * r[n] * self.get(i, j, k, l, m, n);
                            }
                        }
                    }
                }
            }
        }
        s
    }

    /// `b̂^{ijk} = B^{ijk}_{ℓmn}ξℓξₘξₙ`, the coefficient of the reduction to
    /// plane waves in direction `ξ`.
    pub fn directional(&self, xi: &Vec3) -> [[[f64; 3]; 3]; 3] {
        let mut out = [[[0.0; 3]; 3]; 3];
        for (i, oi) in out.iter_mut().enumerate() {
            for (j, oij) in oi.iter_mut().enumerate() {
                for (k, o) in oij.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for l in 0..3 {
                        for m in 0..3 {
                            for n in 0..3 {
                                s += self.get(i, j, k, l, m, n) * xi[l] * xi[m] * xi[n];
                            }
                        }
                    }
                    *o = s;
                }
            }
        }
        out
    }

    /// Largest violation of the pair-permutation symmetries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for_each6(|[i, j, k, l, m, n]| {
            let v = self.get(i, j, k, l, m, n);
            worst = worst
                .max((v - self.get(j, i, k, m, l, n)).abs())
                .max((v - self.get(i, k, j, l, n, m)).abs());
        });
        worst
    }

    /// Average over the six permutations of the index pairs.
    pub fn symmetrized(&self) -> Self {
        let mut out = Self::zeros(self.lambda);
        for_each6(|[i, j, k, l, m, n]| {
            let pairs = [(i, l), (j, m), (k, n)];
            let mut s = 0.0;
            for [a, b, c] in PERMS3 {
                let (x, y, z) = (pairs[a], pairs[b], pairs[c]);
                s += self.get(x.0, y.0, z.0, x.1, y.1, z.1);
            }
            out.entries[idx6(i, j, k, l, m, n)] = s / 6.0;
        });
        out
    }

    pub fn rotated(&self, q: &Mat3) -> Self {
        TensorB {
            lambda: self.lambda,
            entries: rotate_all(&self.entries, 6, q),
        }
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Per-component coefficient matrices: `N(u,v)ⁱ = Σ M_i[(j,ℓ,m)][(k,n)]·∂ℓ∂ₘuʲ·∂ₙvᵏ`.
    pub fn packed(&self) -> PackedB {
        let mut m = [[[0.0; 9]; 27]; 3];
        for_each6(|[i, j, k, l, mm, n]| {
            m[i][(j * 3 + l) * 3 + mm][k * 3 + n] = self.get(i, j, k, l, mm, n);
        });
        PackedB { m }
    }
}

/// `B` laid out for the pointwise nonlinearity.
#[derive(Debug, Clone)]
pub struct PackedB {
    pub m: [[[f64; 9]; 27]; 3],
}

impl PackedB {
    /// `B^{ijk}_{ℓmn}∂ℓ∂ₘuʲ∂ₙvᵏ` with `d2u[(j·3+ℓ)·3+m]` and `dv[k·3+n]`.
    #[inline]
    pub fn half(&self, d2u: &[f64; 27], dv: &[f64; 9]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let mi = &self.m[i];
            let mut s = 0.0;
            for (a, &w) in d2u.iter().enumerate() {
                if w != 0.0 {
                    let row = &mi[a];
                    let mut t = 0.0;
                    for b in 0..9 {
                        t += row[b] * dv[b];
                    }
                    s += w * t;
                }
            }
            *o = s;
        }
        out
    }
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn for_each6(mut f: impl FnMut([usize; 6])) {
    for flat in 0..729 {
        let mut r = flat;
        let mut ix = [0usize; 6];
        for slot in ix.iter_mut().rev() {
            *slot = r % 3;
            r /= 3;
        }
        f(ix);
    }
}

/// Raw third differences of `σ` over all ordered triples of entries of `F`.
fn third_differences(model: &StoredEnergyModel, lambda: f64, h: f64) -> Result<Vec<f64>> {
    (0..729usize)
        .into_par_iter()
        .map(|flat| {
            let (p, q, r) = (flat / 81, (flat / 9) % 9, flat % 9);
            let mut acc = 0.0;
            for sp in [1.0, -1.0] {
                for sq in [1.0, -1.0] {
                    for sr in [1.0, -1.0] {
                        let f = perturbed(lambda, &[(p, sp * h), (q, sq * h), (r, sr * h)]);
                        acc += sp * sq * sr * sigma_of_f(model, lambda, &f)?;
                    }
                }
            }
            Ok(acc / (8.0 * h * h * h))
        })
        .collect()
}

/// Result of the finite-difference extraction of `B`.
#[derive(Debug, Clone)]
pub struct BExtraction {
    pub tensor: TensorB,
    /// Symmetry violation before orbit averaging.
    pub asymmetry: f64,
    /// Size of the Richardson correction, a proxy for truncation error.
    pub richardson_correction: f64,
}

/// Third differences at steps `h` and `h/2` with `h = step_rel·(1 + λ)`,
/// one Richardson extrapolation, then averaging over the symmetry orbit.
pub fn compute_b_with(model: &StoredEnergyModel, lambda: f64, step_rel: f64) -> Result<BExtraction> {
    let h = step_rel * (1.0 + lambda);
    let coarse = third_differences(model, lambda, h)?;
    let fine = third_differences(model, lambda, 0.5 * h)?;
    let mut raw = TensorB::zeros(lambda);
    let mut correction: f64 = 0.0;
    for flat in 0..729 {
        let (p, q, r) = (flat / 81, (flat / 9) % 9, flat % 9);
        let v = (4.0 * fine[flat] - coarse[flat]) / 3.0;
        correction = correction.max((v - fine[flat]).abs());
        let (i, l) = (p / 3, p % 3);
        let (j, m) = (q / 3, q % 3);
        let (k, n) = (r / 3, r % 3);
        raw.entries[idx6(i, j, k, l, m, n)] = v;
    }
    let asymmetry = raw.asymmetry();
    if asymmetry > B_ASYMMETRY_TOL {
        return Err(Error::AsymmetryTooLarge(asymmetry));
    }
    Ok(BExtraction {
        tensor: raw.symmetrized(),
        asymmetry,
        richardson_correction: correction,
    })
}

pub fn compute_b(model: &StoredEnergyModel, lambda: f64) -> Result<TensorB> {
    Ok(compute_b_with(model, lambda, B_STEP_REL)?.tensor)
}

/// Closed-form `A` after checking it against second differences of `σ`.
pub fn compute_a(model: &StoredEnergyModel, lambda: f64) -> Result<TensorA> {
    Ok(compute_a_checked(model, lambda)?.0)
}

/// Closed-form `A` and its largest entrywise distance from the
/// finite-difference route.
pub fn compute_a_checked(model: &StoredEnergyModel, lambda: f64) -> Result<(TensorA, f64)> {
    let closed = TensorA::closed_form(model, lambda)?;
    let fd = TensorA::finite_difference(model, lambda, A_STEP_REL)?;
    let diff = closed.max_diff(&fd);
    if !(diff <= A_ROUTE_TOL) {
        return Err(Error::RouteMismatch(diff));
    }
    Ok((closed, diff))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IsotropyResiduals {
    pub a: f64,
    pub b: f64,
}

/// Largest change of `A` and `B` under `trials` random rotations.
pub fn check_isotropy<R: Rng>(a: &TensorA, b: &TensorB, trials: usize, rng: &mut R) -> IsotropyResiduals {
    let mut res = IsotropyResiduals { a: 0.0, b: 0.0 };
    for _ in 0..trials {
        let q = random_rotation(rng);
        res.a = res.a.max(a.rotated(&q).max_diff(a));
        res.b = res.b.max(b.rotated(&q).max_diff(b));
    }
    res
}

/// Everything the simulator and the checks need at one dilation.
#[derive(Debug, Clone, Serialize)]
pub struct MaterialTensors {
    pub lambda: f64,
    pub c1_sq: f64,
    pub c2_sq: f64,
    pub a: TensorA,
    pub b: TensorB,
    pub a_route_diff: f64,
    pub b_asymmetry: f64,
}

impl MaterialTensors {
    pub fn compute(model: &StoredEnergyModel, lambda: f64) -> Result<Self> {
        let (c1_sq, c2_sq) = model.speeds(lambda)?;
        let (a, a_route_diff) = compute_a_checked(model, lambda)?;
        let ex = compute_b_with(model, lambda, B_STEP_REL)?;
        Ok(MaterialTensors {
            lambda,
            c1_sq,
            c2_sq,
            a,
            b: ex.tensor,
            a_route_diff,
            b_asymmetry: ex.asymmetry,
        })
    }

    /// Same `A`, no nonlinearity.
    pub fn linearized(&self) -> Self {
        MaterialTensors {
            b: TensorB::zeros(self.lambda),
            ..self.clone()
        }
    }

    /// JSON document with nested arrays and their index order.
    pub fn dump_json(&self) -> serde_json::Value {
        fn nest(v: &[f64]) -> serde_json::Value {
            if v.len() == 1 {
                return serde_json::json!(v[0]);
            }
            let k = v.len() / 3;
            serde_json::Value::Array((0..3).map(|c| nest(&v[c * k..(c + 1) * k])).collect())
        }
        serde_json::json!({
            "lambda": self.lambda,
            "c1_sq": self.c1_sq,
            "c2_sq": self.c2_sq,
            "A": { "index_order": ["i", "j", "l", "m"], "entries": nest(&self.a.entries) },
            "B": { "index_order": ["i", "j", "k", "l", "m", "n"], "entries": nest(&self.b.entries) },
            "a_route_diff": self.a_route_diff,
            "b_asymmetry": self.b_asymmetry,
        })
    }
}

/// `N(u,v)ⁱ = B^{ijk}_{ℓmn}(∂ℓ∂ₘuʲ∂ₙvᵏ + ∂ₘuʲ∂ℓ∂ₙvᵏ)`.
///
/// `du[(j, m)] = ∂ₘuʲ` and `d2u[j][ℓ][m] = ∂ℓ∂ₘuʲ`, likewise for `v`.
pub fn apply_n(b: &TensorB, du: &Mat3, d2v: &[[[f64; 3]; 3]; 3], dv: &Mat3, d2u: &[[[f64; 3]; 3]; 3]) -> Vec3 {
    Vec3::from_fn(|i, _| {
        let mut s = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        for n in 0..3 {
                            let c = b.get(i, j, k, l, m, n);
                            s += c * (d2u[j][l][m] * dv[(k, n)] + du[(j, m)] * d2v[k][l][n]);
                        }
                    }
                }
            }
        }
        s
    })
}
