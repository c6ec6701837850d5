//! Closed-form space-time vector fields and exact operator identities.
//!
//! Components are expressions in `(t, x1, x2, x3)`, variables 0..=3. Every
//! operator below acts symbolically, so identity residuals measure only
//! floating-point roundoff.

use rand::Rng;
use serde::Serialize;

use super::{levi_civita, FieldState, Grid3, Speeds, VectorField};
use crate::error::{Error, Result};
use crate::expr::{parse_with, Expr};
use crate::sampling::{random_direction, Vec3};
use crate::tensors::TensorA;

pub const VARIABLES: [&str; 4] = ["t", "x1", "x2", "x3"];

#[derive(Debug, Clone)]
pub struct AnalyticField {
    comps: [Expr; 3],
}

fn t() -> Expr {
    Expr::var(0)
}

fn coord(a: usize) -> Expr {
    Expr::var(a + 1)
}

fn r_squared() -> Expr {
    (0..3)
        .map(|a| Expr::powi(coord(a), 2))
        .reduce(|p, q| p + q)
        .expect("three terms")
}

fn radius() -> Expr {
    Expr::sqrt(r_squared())
}

impl AnalyticField {
    pub fn new(comps: [Expr; 3]) -> Self {
        AnalyticField { comps }
    }

    /// Parses three components written in `t, x1, x2, x3`.
    pub fn parse(src: [&str; 3]) -> Result<Self> {
        let [a, b, c] = src;
        Ok(AnalyticField::new([
            parse_with(a, &VARIABLES)?,
            parse_with(b, &VARIABLES)?,
            parse_with(c, &VARIABLES)?,
        ]))
    }

    /// `x ↦ x`, the identity field.
    pub fn position() -> Self {
        AnalyticField::new([coord(0), coord(1), coord(2)])
    }

    pub fn components(&self) -> &[Expr; 3] {
        &self.comps
    }

    fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        AnalyticField::new([f(&self.comps[0]), f(&self.comps[1]), f(&self.comps[2])])
    }

    fn zip(&self, other: &Self, f: impl Fn(&Expr, &Expr) -> Expr) -> Self {
        AnalyticField::new([0, 1, 2].map(|i| f(&self.comps[i], &other.comps[i])))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    /// Multiplies every component by the scalar expression `s`.
    pub fn times(&self, s: &Expr) -> Self {
        self.map(|c| s * c)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.times(&Expr::constant(c))
    }

    pub fn eval(&self, t: f64, x: &Vec3) -> Result<Vec3> {
        let vars = [t, x[0], x[1], x[2]];
        Ok(Vec3::new(
            self.comps[0].eval(&vars)?,
            self.comps[1].eval(&vars)?,
            self.comps[2].eval(&vars)?,
        ))
    }

    /// `∂_β` with `β = 0` for time.
    pub fn partial(&self, beta: usize) -> Self {
        self.map(|c| c.derivative(beta))
    }

    /// `Σ wₐ∂ₐ` over spatial axes.
    fn directional(&self, w: &[Expr; 3]) -> Self {
        AnalyticField::new([0, 1, 2].map(|j| {
            (0..3)
                .map(|a| &w[a] * &self.comps[j].derivative(a + 1))
                .reduce(|p, q| p + q)
                .expect("three terms")
        }))
    }

    fn rotation(&self, l: usize, tilde: bool) -> Self {
        let w = [0, 1, 2].map(|b| {
            (0..3)
                .filter(|&a| levi_civita(l, a, b) != 0.0)
                .map(|a| levi_civita(l, a, b) * coord(a))
                .fold(Expr::constant(0.0), |p, q| p + q)
        });
        let mut out = self.directional(&w);
        if tilde {
            for a in 0..3 {
                for b in 0..3 {
                    let e = levi_civita(l, a, b);
                    if e != 0.0 {
                        out.comps[a] = &out.comps[a] + &(e * self.comps[b].clone());
                    }
                }
            }
        }
        out
    }

    /// `r∂ᵣ = x·∇`, which stays polynomial.
    fn euler(&self) -> Self {
        self.directional(&[coord(0), coord(1), coord(2)])
    }

    pub fn apply(&self, vf: VectorField) -> Result<Self> {
        Ok(match vf.validate()? {
            VectorField::Partial(b) => self.partial(b),
            VectorField::Rotation(l) => self.rotation(l - 1, false),
            VectorField::RotationTilde(l) => self.rotation(l - 1, true),
            VectorField::ScalingTilde => self.partial(0).times(&t()).add(&self.euler()).sub(self),
            VectorField::SpatialScaling => self.euler().sub(self),
            VectorField::Radial => {
                let r = radius();
                self.directional(&[0, 1, 2].map(|a| coord(a) / r.clone()))
            }
        })
    }

    /// `P₁u = (x/r)⟨x/r, u⟩`, `P₂ = I − P₁`.
    pub fn project(&self, alpha: usize) -> Result<Self> {
        if alpha != 1 && alpha != 2 {
            return Err(Error::Config(format!("projection index must be 1 or 2, got {alpha}")));
        }
        let dot = (0..3)
            .map(|a| coord(a) * self.comps[a].clone())
            .reduce(|p, q| p + q)
            .expect("three terms");
        let s = dot / r_squared();
        let p1 = AnalyticField::new([0, 1, 2].map(|a| &s * &coord(a)));
        Ok(if alpha == 1 { p1 } else { self.sub(&p1) })
    }

    /// `(Au)ⁱ = A^{ij}_{ℓm}∂ℓ∂ₘuʲ`.
    pub fn apply_a(&self, a: &TensorA) -> Self {
        let second: Vec<Vec<Vec<Expr>>> = (0..3)
            .map(|j| {
                (0..3)
                    .map(|l| {
                        (0..3)
                            .map(|m| self.comps[j].derivative(l + 1).derivative(m + 1))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        AnalyticField::new([0, 1, 2].map(|i| {
            let mut acc = Expr::constant(0.0);
            for j in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        let c = a.get(i, j, l, m);
                        if c != 0.0 {
                            acc = acc + c * second[j][l][m].clone();
                        }
                    }
                }
            }
            acc
        }))
    }

    /// `Lu = ∂ₜ²u − Au`.
    pub fn wave_operator(&self, a: &TensorA) -> Self {
        self.partial(0).partial(0).sub(&self.apply_a(a))
    }

    /// Samples `u` and `∂ₜu` at time `t` on every node.
    pub fn sample(&self, grid: Grid3, t: f64) -> Result<FieldState> {
        let ut = self.partial(0);
        let state = FieldState::from_fn(grid, t, |x| {
            let vars = [t, x[0], x[1], x[2]];
            let u = self.comps.clone().map(|c| c.eval_f64(&vars));
            let v = ut.comps.clone().map(|c| c.eval_f64(&vars));
            (u, v)
        });
        if state.u.iter().chain(&state.ut).flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("field is not finite at some node".into()));
        }
        Ok(state)
    }
}

/// Space-time sample points with `t ∈ [0, t_max]` and `r ∈ [r_min, r_max]`.
pub fn random_points<R: Rng>(rng: &mut R, count: usize, t_max: f64, r_min: f64, r_max: f64) -> Vec<(f64, Vec3)> {
    (0..count)
        .map(|_| {
            let t = rng.gen::<f64>() * t_max;
            let r = r_min + (r_max - r_min) * rng.gen::<f64>();
            (t, random_direction(rng) * r)
        })
        .collect()
}

fn max_gap(a: &AnalyticField, b: &AnalyticField, points: &[(f64, Vec3)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (t, x) in points {
        if x.norm() == 0.0 {
            return Err(Error::SingularPoint);
        }
        worst = worst.max((a.eval(*t, x)? - b.eval(*t, x)?).amax());
    }
    Ok(worst)
}

/// Largest residuals of the two cone identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeIdentityResiduals {
    pub a: f64,
    pub b: f64,
}

/// Checks, with `c = c_α`,
///
/// ```text
/// (c²t² − r²)Au = c²(t∂ₜ − r∂ᵣ)S̃u − r²[Au − c²∂ᵣ²u] − c²t²Lu
/// (ct − r)∂ₜ∂ᵣu = −(∂ₜ − c∂ᵣ)S̃u + ((ct − r)/c)Au + (r/c)[Au − c²∂ᵣ²u] + tLu
/// ```
pub fn verify_cone_identities(
    u: &AnalyticField,
    a: &TensorA,
    speeds: Speeds,
    alpha: usize,
    points: &[(f64, Vec3)],
) -> Result<ConeIdentityResiduals> {
    if alpha != 1 && alpha != 2 {
        return Err(Error::Config(format!("family must be 1 or 2, got {alpha}")));
    }
    let c = speeds.c(alpha);
    cone_identity_residuals(u, a, c, c, points)
}

/// As [`verify_cone_identities`], with the speed on the left-hand sides set
/// separately from the one on the right.
pub fn cone_identity_residuals(
    u: &AnalyticField,
    a: &TensorA,
    c_lhs: f64,
    c: f64,
    points: &[(f64, Vec3)],
) -> Result<ConeIdentityResiduals> {
    let (tt, r) = (t(), radius());
    let au = u.apply_a(a);
    let lu = u.wave_operator(a);
    let su = u.apply(VectorField::ScalingTilde)?;
    let dr = |f: &AnalyticField| f.apply(VectorField::Radial);
    let drr = dr(&dr(u)?)?;
    let defect = au.sub(&drr.scale(c * c));

    let cone = |k: f64| Expr::powi(k * tt.clone(), 2) - r_squared();
    let lhs_a = au.times(&cone(c_lhs));
    let t_minus_euler = su.partial(0).times(&tt).sub(&su.euler());
    let rhs_a = t_minus_euler
        .scale(c * c)
        .sub(&defect.times(&r_squared()))
        .sub(&lu.times(&(c * c * Expr::powi(tt.clone(), 2))));

    let gap = |k: f64| k * tt.clone() - r.clone();
    let lhs_b = dr(&u.partial(0))?.times(&gap(c_lhs));
    let rhs_b = su
        .partial(0)
        .sub(&dr(&su)?.scale(c))
        .scale(-1.0)
        .add(&au.times(&(gap(c) / c)))
        .add(&defect.times(&(r / c)))
        .add(&lu.times(&tt));

    Ok(ConeIdentityResiduals {
        a: max_gap(&lhs_a, &rhs_a, points)?,
        b: max_gap(&lhs_b, &rhs_b, points)?,
    })
}

/// `[a, b]` as a combination of generators, for pairs drawn from
/// `∂, Ω̃, Ω, S̃` (rotations of one kind at a time). `None` when the
/// commutator is not a constant-coefficient combination.
pub fn bracket(a: VectorField, b: VectorField) -> Option<Vec<(f64, VectorField)>> {
    use VectorField::*;
    let rot = |l: usize, tilde: bool| if tilde { RotationTilde(l) } else { Rotation(l) };
    let direct = match (a, b) {
        (Partial(_), Partial(_)) | (ScalingTilde, ScalingTilde) => Some(vec![]),
        (Partial(0), RotationTilde(_) | Rotation(_)) => Some(vec![]),
        (Partial(k), RotationTilde(l) | Rotation(l)) => Some(
            (0..3)
                .filter(|&c| levi_civita(l - 1, k - 1, c) != 0.0)
                .map(|c| (levi_civita(l - 1, k - 1, c), Partial(c + 1)))
                .collect(),
        ),
        (Partial(k), ScalingTilde) => Some(vec![(1.0, Partial(k))]),
        (RotationTilde(p), RotationTilde(q)) | (Rotation(p), Rotation(q)) => {
            let tilde = matches!(a, RotationTilde(_));
            Some(
                (0..3)
                    .filter(|&c| levi_civita(p - 1, q - 1, c) != 0.0)
                    .map(|c| (-levi_civita(p - 1, q - 1, c), rot(c + 1, tilde)))
                    .collect(),
            )
        }
        (RotationTilde(_) | Rotation(_), ScalingTilde) => Some(vec![]),
        _ => None,
    };
    direct.or_else(|| {
        let flipped = match (b, a) {
            (Partial(_), _) | (RotationTilde(_) | Rotation(_), ScalingTilde) => bracket(b, a),
            _ => None,
        }?;
        Some(flipped.into_iter().map(|(c, v)| (-c, v)).collect())
    })
}

/// The commutation checks available on analytic fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Commutator {
    /// `[a, b]u` against [`bracket`].
    Fields(VectorField, VectorField),
    /// `Ω̃ℓ(Au) − A(Ω̃ℓu)`.
    RotationWithA(usize),
}

pub fn commutator_residual(check: Commutator, u: &AnalyticField, a: &TensorA, points: &[(f64, Vec3)]) -> Result<f64> {
    match check {
        Commutator::Fields(g1, g2) => {
            let table =
                bracket(g1, g2).ok_or_else(|| Error::Config(format!("no structure constants for [{g1}, {g2}]")))?;
            let lhs = u.apply(g2)?.apply(g1)?.sub(&u.apply(g1)?.apply(g2)?);
            let mut rhs = AnalyticField::new([0, 1, 2].map(|_| Expr::constant(0.0)));
            for (c, vf) in table {
                rhs = rhs.add(&u.apply(vf)?.scale(c));
            }
            max_gap(&lhs, &rhs, points)
        }
        Commutator::RotationWithA(l) => {
            let rot = VectorField::RotationTilde(l);
            let lhs = u.apply_a(a).apply(rot)?;
            let rhs = u.apply(rot)?.apply_a(a);
            max_gap(&lhs, &rhs, points)
        }
    }
}

/// `∇uʲ − [(x/r)∂ᵣuʲ − (x/r²) ∧ Ωuʲ]`, largest over components and points.
pub fn decomposition_residual(u: &AnalyticField, points: &[(f64, Vec3)]) -> Result<f64> {
    let grads: Vec<AnalyticField> = (1..=3).map(|k| u.partial(k)).collect();
    let radial = u.apply(VectorField::Radial)?;
    let omegas: Vec<AnalyticField> = (1..=3)
        .map(|l| u.apply(VectorField::Rotation(l)))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (t, x) in points {
        let r = x.norm();
        if r == 0.0 {
            return Err(Error::SingularPoint);
        }
        let g: Vec<Vec3> = grads.iter().map(|f| f.eval(*t, x)).collect::<Result<_>>()?;
        let w: Vec<Vec3> = omegas.iter().map(|f| f.eval(*t, x)).collect::<Result<_>>()?;
        let dr = radial.eval(*t, x)?;
        for j in 0..3 {
            let grad = Vec3::new(g[0][j], g[1][j], g[2][j]);
            let omega = Vec3::new(w[0][j], w[1][j], w[2][j]);
            let rebuilt = x * (dr[j] / r) - x.cross(&omega) / (r * r);
            worst = worst.max((grad - rebuilt).amax());
        }
    }
    Ok(worst)
}

/// `Γ(P_α u) − P_α(Γu)`, largest over points.
pub fn projection_commutator(u: &AnalyticField, vf: VectorField, alpha: usize, points: &[(f64, Vec3)]) -> Result<f64> {
    let lhs = u.project(alpha)?.apply(vf)?;
    let rhs = u.apply(vf)?.project(alpha)?;
    max_gap(&lhs, &rhs, points)
}
