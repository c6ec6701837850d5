//! Numerical antiderivatives stored as Chebyshev interpolants.
//!
//! An [`Antiderivative`] represents `x ↦ ∫_{lower}^{x} q(y) dy` for a
//! symbolic integrand `q`. Values inside the tabulated interval come from a
//! Chebyshev series whose degree is doubled until it reproduces adaptive
//! quadrature at off-node check points; values outside fall back to direct
//! quadrature. The derivative of the node is `q` itself, so differentiating
//! a tabulated function never goes through finite differences.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expr::Expr;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let (k, err) = kronrod15(f, a, b);
    if !k.is_finite() {
        return Err(Error::Domain(format!("integrand not finite on [{a}, {b}]")));
    }
    if err <= tol.max(f64::EPSILON * k.abs()) || depth == 0 {
        if depth == 0 && err > tol * 1e3 {
            return Err(Error::Domain(format!(
                "quadrature failed to converge on [{a}, {b}] (error estimate {err:e})"
            )));
        }
        return Ok(k);
    }
    let m = 0.5 * (a + b);
    Ok(adapt(f, a, m, 0.5 * tol, depth - 1)? + adapt(f, m, b, 0.5 * tol, depth - 1)?)
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// Bisects until each panel's Kronrod–Gauss difference is below its share
/// of `max(abs_tol, rel_tol·|estimate|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (rough, _) = kronrod15(&f, a, b);
    let tol = abs_tol.max(rel_tol * rough.abs());
    adapt(&f, a, b, tol, 40)
}

/// Chebyshev series on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolates `f` at the `n` Chebyshev points of the first kind.
    pub fn fit<F: FnMut(f64) -> f64>(lo: f64, hi: f64, n: usize, mut f: F) -> Self {
        let values: Vec<f64> = (0..n)
            .map(|k| {
                let z = (PI * (k as f64 + 0.5) / n as f64).cos();
                f(0.5 * (hi + lo) + 0.5 * (hi - lo) * z)
            })
            .collect();
        Self::from_values(lo, hi, &values)
    }

    fn from_values(lo: f64, hi: f64, values: &[f64]) -> Self {
        let n = values.len();
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                    .sum();
                let c = 2.0 * s / n as f64;
                if j == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        Chebyshev { lo, hi, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let z = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * z * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        z * b1 - b2 + self.coeffs[0]
    }
}

/// Tabulated `∫_{lower}^{x} integrand(y) dy`.
#[derive(Debug)]
pub struct Antiderivative {
    integrand: Expr,
    lower: f64,
    table: Chebyshev,
    max_residual: f64,
}

/// Quadrature tolerance for tabulation samples.
pub const QUAD_REL_TOL: f64 = 1e-13;
/// Interpolant acceptance tolerance, relative to `max(1, max|I|)`.
pub const TABLE_TOL: f64 = 1e-10;

impl Antiderivative {
    pub fn new(integrand: Expr, lower: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Config(format!("empty tabulation interval [{lo}, {hi}]")));
        }
        let q = |y: f64| integrand.eval_f64(&[y]);
        let exact = |x: f64| integrate(q, lower, x, QUAD_REL_TOL, 1e-15);
        let mut n = 16;
        loop {
            let mut err = None;
            let table = Chebyshev::fit(lo, hi, n, |x| match exact(x) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            // Check at the Chebyshev extrema, which interleave the fit nodes.
            let mut worst: f64 = 0.0;
            let mut scale: f64 = 1.0;
            for k in 0..=n {
                let z = (PI * k as f64 / n as f64).cos();
                let x = 0.5 * (hi + lo) + 0.5 * (hi - lo) * z;
                let want = exact(x)?;
                scale = scale.max(want.abs());
                worst = worst.max((table.eval(x) - want).abs());
            }
            if worst <= TABLE_TOL * scale {
                return Ok(Antiderivative {
                    integrand,
                    lower,
                    table,
                    max_residual: worst,
                });
            }
            if n >= 1024 {
                return Err(Error::Domain(format!(
                    "Chebyshev tabulation did not reach {TABLE_TOL:e} (residual {worst:e} at degree {n})"
                )));
            }
            n *= 2;
        }
    }

    pub fn integrand(&self) -> &Expr {
        &self.integrand
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn table(&self) -> &Chebyshev {
        &self.table
    }

    /// Largest deviation from quadrature observed at the check points.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.table.interval();
        if (lo..=hi).contains(&x) {
            Ok(self.table.eval(x))
        } else {
            integrate(|y| self.integrand.eval_f64(&[y]), self.lower, x, QUAD_REL_TOL, 1e-15)
        }
    }
}
