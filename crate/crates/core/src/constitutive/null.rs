//! Null materials from a prescribed bulk modulus and shear speed.
//!
//! With `b(λ)` the bulk modulus, the dilational energy
//! `f(λ) = 3∫₁^λ (λ³ − y³)/y² b(y) dy` is the solution of
//! `f″ − (2/λ)f′ = 9b` with `f(1) = f′(1) = 0`. Splitting the kernel gives
//! `f = 3λ³·I₁ − 3·I₂` with `I₁ = ∫₁^λ b/y²` and `I₂ = ∫₁^λ y·b`.
//! `g` follows from the shear speed and `h` from `τ₁₁₁ = 0`.

use super::{ScalarFn, StoredEnergyModel};
use crate::error::{Error, Result};
use crate::expr::{Expr, Node};
use crate::tabulate::Antiderivative;

/// How `f` was realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FRoute {
    /// Closed-form antiderivatives of a sum of powers.
    Symbolic,
    /// Chebyshev-tabulated antiderivatives.
    Tabulated,
}

#[derive(Debug, Clone, Copy)]
pub struct ConstructOptions {
    /// Skip the closed-form attempt even when `b` is a sum of powers.
    pub force_tabulated: bool,
    /// Positivity samples per modulus on the working interval.
    pub positivity_samples: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            force_tabulated: false,
            positivity_samples: 401,
        }
    }
}

pub fn construct_null_material(b: &ScalarFn, c2sq: &ScalarFn, range: [f64; 2]) -> Result<StoredEnergyModel> {
    construct_null_material_with(b, c2sq, range, ConstructOptions::default()).map(|(m, _)| m)
}

pub fn construct_null_material_with(
    b: &ScalarFn,
    c2sq: &ScalarFn,
    range: [f64; 2],
    opts: ConstructOptions,
) -> Result<(StoredEnergyModel, FRoute)> {
    let [lo, hi] = range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Config(format!(
            "working interval [{lo}, {hi}] must satisfy 0 < lo < hi"
        )));
    }
    let n = opts.positivity_samples.max(2);
    for (name, func) in [("bulk", b), ("c2sq", c2sq)] {
        for k in 0..n {
            let at = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let value = func.eval(at)?;
            if !(value > 0.0) {
                return Err(Error::NonPositiveModulus {
                    name: name.into(),
                    at,
                    value,
                });
            }
        }
    }

    let x = Expr::x();
    let powers = if opts.force_tabulated {
        None
    } else {
        power_sum(b.expr())
    };
    let (i1, i2, route) = match powers {
        Some(terms) => {
            let i1 = antiderivative_of_powers(terms.iter().map(|&(c, p)| (c, p - 2.0)));
            let i2 = antiderivative_of_powers(terms.iter().map(|&(c, p)| (c, p + 1.0)));
            (i1, i2, FRoute::Symbolic)
        }
        None => {
            let q1 = b.expr().clone() / Expr::powi(x.clone(), 2);
            let q2 = x.clone() * b.expr().clone();
            let i1 = Expr::integral(Antiderivative::new(q1, 1.0, lo, hi)?);
            let i2 = Expr::integral(Antiderivative::new(q2, 1.0, lo, hi)?);
            (i1, i2, FRoute::Tabulated)
        }
    };
    let f = 3.0 * Expr::powi(x.clone(), 3) * i1 - 3.0 * i2;
    let f = ScalarFn::new(f);
    let g = ScalarFn::new((f.d[1].clone() / 3.0 - 2.0 * x.clone() * c2sq.expr().clone()) / x);
    let h = ScalarFn::new(1.5 * g.d[1].clone() - f.d[3].clone() / 12.0);
    Ok((StoredEnergyModel::new(f, g, h).with_range(range), route))
}

/// `Σ c_k·y^{p_k}` if `e` is a finite sum of constant multiples of powers of `x`.
fn power_sum(e: &Expr) -> Option<Vec<(f64, f64)>> {
    use Node::*;
    let terms = match e.node() {
        Const(c) => vec![(*c, 0.0)],
        Var(0) => vec![(1.0, 1.0)],
        Var(_) => return None,
        Add(a, b) => [power_sum(a)?, power_sum(b)?].concat(),
        Sub(a, b) => {
            let mut t = power_sum(a)?;
            t.extend(power_sum(b)?.into_iter().map(|(c, p)| (-c, p)));
            t
        }
        Neg(a) => power_sum(a)?.into_iter().map(|(c, p)| (-c, p)).collect(),
        Mul(a, b) => {
            let (ta, tb) = (power_sum(a)?, power_sum(b)?);
            let mut t = Vec::with_capacity(ta.len() * tb.len());
            for &(ca, pa) in &ta {
                for &(cb, pb) in &tb {
                    t.push((ca * cb, pa + pb));
                }
            }
            t
        }
        Div(a, b) => {
            let tb = power_sum(b)?;
            if tb.len() != 1 || tb[0].0 == 0.0 {
                return None;
            }
            let (cb, pb) = tb[0];
            power_sum(a)?.into_iter().map(|(c, p)| (c / cb, p - pb)).collect()
        }
        Pow(a, b) => {
            let ex = b.as_const()?;
            let ta = power_sum(a)?;
            match ta.as_slice() {
                [(c, p)] if *c > 0.0 || ex.fract() == 0.0 => vec![(c.powf(ex), p * ex)],
                _ => return None,
            }
        }
        Sqrt(a) => match power_sum(a)?.as_slice() {
            [(c, p)] if *c > 0.0 => vec![(c.sqrt(), 0.5 * p)],
            _ => return None,
        },
        Exp(_) | Ln(_) | Integral(_) => return None,
    };
    Some(terms)
}

/// `Σ c·∫₁^x y^q dy` in closed form.
fn antiderivative_of_powers(terms: impl Iterator<Item = (f64, f64)>) -> Expr {
    let x = Expr::x();
    terms.fold(Expr::constant(0.0), |acc, (c, q)| {
        let piece = if q == -1.0 {
            Expr::ln(x.clone())
        } else {
            (Expr::pow(x.clone(), Expr::constant(q + 1.0)) - 1.0) / (q + 1.0)
        };
        acc + c * piece
    })
}
