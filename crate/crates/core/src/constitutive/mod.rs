//! Stored energies `τ = f(z1) + g(z1)·z2 + h(z1)·z3 (+ r)` in dilational
//! and distortional variables, their wave speeds, and the construction of
//! materials satisfying the null condition.

mod material;
mod null;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::invariants::{distortional_vars, InvariantSystem, InvariantTriple};

pub use material::{ConstructSpec, FSpec, MaterialSpec, DEFAULT_LAMBDA_RANGE};
pub use null::{construct_null_material, construct_null_material_with, ConstructOptions, FRoute};

/// Absolute tolerance on `τ₁₁₁` for the `null` flag.
pub const NULL_TOL: f64 = 1e-8;
/// Absolute tolerance on `f′(1)` for the `stress_free_at_1` flag.
pub const STRESS_FREE_TOL: f64 = 1e-8;

/// Scalar function of one variable with cached symbolic derivatives up to
/// order three.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarFn {
    d: [Expr; 4],
}

impl ScalarFn {
    pub fn new(e: Expr) -> Self {
        let d1 = e.derivative(0);
        let d2 = d1.derivative(0);
        let d3 = d2.derivative(0);
        ScalarFn { d: [e, d1, d2, d3] }
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(ScalarFn::new(expr::parse(src)?))
    }

    pub fn constant(c: f64) -> Self {
        ScalarFn::new(Expr::constant(c))
    }

    pub fn expr(&self) -> &Expr {
        &self.d[0]
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.d[0].eval(&[x])
    }

    /// `order`-th derivative at `x`, `order ≤ 3`.
    pub fn deriv(&self, order: usize, x: f64) -> Result<f64> {
        match self.d.get(order) {
            Some(e) => e.eval(&[x]),
            None => Err(Error::Config(format!("derivative order {order} exceeds 3"))),
        }
    }

    /// True when the function contains a tabulated antiderivative.
    pub fn is_tabulated(&self) -> bool {
        contains_integral(&self.d[0])
    }
}

fn contains_integral(e: &Expr) -> bool {
    use crate::expr::Node::*;
    match e.node() {
        Integral(_) => true,
        Const(_) | Var(_) => false,
        Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => contains_integral(a) || contains_integral(b),
        Neg(a) | Exp(a) | Ln(a) | Sqrt(a) => contains_integral(a),
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.d[0].fmt(f)
    }
}

/// Symbolic derivative of order 1, 2 or 3. Tabulated pieces differentiate
/// to their integrands, so no finite differences are involved.
pub fn diff_scalar(f: &ScalarFn, order: usize) -> Result<ScalarFn> {
    if !(1..=3).contains(&order) {
        return Err(Error::Config(format!(
            "derivative order must be 1, 2 or 3, got {order}"
        )));
    }
    Ok(ScalarFn::new(f.d[order].clone()))
}

/// Fourth-order central difference of order 1, 2 or 3 with step
/// `ε^(1/(order+2))·(|x| + 1)`.
pub fn fd_derivative<F: Fn(f64) -> f64>(f: F, x: f64, order: usize) -> Result<f64> {
    let h = f64::EPSILON.powf(1.0 / (order as f64 + 2.0)) * (x.abs() + 1.0);
    let at = |k: f64| f(x + k * h);
    let v = match order {
        1 => (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h),
        2 => (-at(2.0) + 16.0 * at(1.0) - 30.0 * at(0.0) + 16.0 * at(-1.0) - at(-2.0)) / (12.0 * h * h),
        3 => {
            (-at(3.0) + 8.0 * at(2.0) - 13.0 * at(1.0) + 13.0 * at(-1.0) - 8.0 * at(-2.0) + at(-3.0))
                / (8.0 * h * h * h)
        }
        _ => {
            return Err(Error::Config(format!(
                "derivative order must be 1, 2 or 3, got {order}"
            )))
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("non-finite difference quotient at {x}")))
    }
}

/// Higher-order remainder `r(z1, z2, z3)`.
pub type Remainder = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct StoredEnergyModel {
    pub f: ScalarFn,
    pub g: ScalarFn,
    pub h: ScalarFn,
    /// Interval of dilations on which the model is meant to be used.
    pub lambda_range: [f64; 2],
    remainder: Option<Remainder>,
}

impl fmt::Debug for StoredEnergyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StoredEnergyModel")
            .field("f", &self.f.to_string())
            .field("g", &self.g.to_string())
            .field("h", &self.h.to_string())
            .field("lambda_range", &self.lambda_range)
            .field("remainder", &self.remainder.is_some())
            .finish()
    }
}

impl StoredEnergyModel {
    pub fn new(f: ScalarFn, g: ScalarFn, h: ScalarFn) -> Self {
        StoredEnergyModel {
            f,
            g,
            h,
            lambda_range: DEFAULT_LAMBDA_RANGE,
            remainder: None,
        }
    }

    pub fn with_range(mut self, range: [f64; 2]) -> Self {
        self.lambda_range = range;
        self
    }

    /// Same `f` and `g` with a different `h`.
    pub fn with_h(&self, h: ScalarFn) -> Self {
        StoredEnergyModel { h, ..self.clone() }
    }

    pub fn has_remainder(&self) -> bool {
        self.remainder.is_some()
    }

    /// Attaches a remainder after checking that it vanishes together with
    /// its `z2` and `z3` derivatives along `z2 = z3 = 0`, sampled at 21
    /// points of the working interval.
    pub fn with_remainder(mut self, r: Remainder) -> Result<Self> {
        let [lo, hi] = self.lambda_range;
        let step = 1e-5;
        for k in 0..=20 {
            let z1 = lo + (hi - lo) * k as f64 / 20.0;
            let r0 = r(z1, 0.0, 0.0);
            let r2 = (r(z1, step, 0.0) - r(z1, -step, 0.0)) / (2.0 * step);
            let r3 = (r(z1, 0.0, step) - r(z1, 0.0, -step)) / (2.0 * step);
            let worst = r0.abs().max(r2.abs()).max(r3.abs());
            if !(worst <= 1e-6) {
                return Err(Error::Config(format!(
                    "remainder does not vanish to first order at z1 = {z1} (r = {r0:e}, r_z2 = {r2:e}, r_z3 = {r3:e})"
                )));
            }
        }
        self.remainder = Some(r);
        Ok(self)
    }

    /// `τ(λ, s)` for shifted stretch invariants `s`.
    pub fn eval_tau(&self, lambda: f64, s: &InvariantTriple) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("dilation {lambda} must be positive")));
        }
        let z = distortional_vars(s, lambda)?;
        let mut tau = self.f.eval(z.z1)? + self.g.eval(z.z1)? * z.z2 + self.h.eval(z.z1)? * z.z3;
        if let Some(r) = &self.remainder {
            tau += r(z.z1, z.z2, z.z3);
        }
        if tau.is_finite() {
            Ok(tau)
        } else {
            Err(Error::Domain(format!("stored energy not finite at lambda = {lambda}")))
        }
    }

    /// `τ` along `s = (ε, 0, 0)`, the longitudinal direction.
    pub fn tau_longitudinal(&self, lambda: f64, eps: f64) -> Result<f64> {
        self.eval_tau(lambda, &InvariantTriple::new(InvariantSystem::S, eps, 0.0, 0.0))
    }

    /// Squared longitudinal and transverse speeds at dilation `λ`.
    pub fn speeds(&self, lambda: f64) -> Result<(f64, f64)> {
        let f1 = self.f.deriv(1, lambda)?;
        let f2 = self.f.deriv(2, lambda)?;
        let g = self.g.eval(lambda)?;
        Ok((f2 / 9.0 - 2.0 / 3.0 * g, (f1 / 3.0 - lambda * g) / (2.0 * lambda)))
    }

    /// `τ₁₁₁(λ, 0) = f‴/27 − (2/3)g′ + (4/9)h`.
    pub fn tau111(&self, lambda: f64) -> Result<f64> {
        Ok(self.f.deriv(3, lambda)? / 27.0 - 2.0 / 3.0 * self.g.deriv(1, lambda)? + 4.0 / 9.0 * self.h.eval(lambda)?)
    }

    /// `−f′(λ)/λ²`.
    pub fn pressure(&self, lambda: f64) -> Result<f64> {
        Ok(-self.f.deriv(1, lambda)? / (lambda * lambda))
    }

    pub fn check(&self, lambda: f64) -> Result<MaterialReport> {
        check_material(self, lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaterialReport {
    pub lambda: f64,
    pub c1_sq: f64,
    pub c2_sq: f64,
    pub bulk_modulus: f64,
    pub hyperbolic: bool,
    pub stress_free_at_1: bool,
    pub null: bool,
    pub tau111: f64,
    pub null_tolerance: f64,
}

pub fn check_material(model: &StoredEnergyModel, lambda: f64) -> Result<MaterialReport> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("dilation {lambda} must be positive")));
    }
    let (c1_sq, c2_sq) = model.speeds(lambda)?;
    let bulk_modulus = c1_sq - 4.0 / 3.0 * c2_sq;
    let tau111 = model.tau111(lambda)?;
    Ok(MaterialReport {
        lambda,
        c1_sq,
        c2_sq,
        bulk_modulus,
        hyperbolic: bulk_modulus > 0.0 && c2_sq > 0.0,
        stress_free_at_1: model.f.deriv(1, 1.0)?.abs() <= STRESS_FREE_TOL,
        null: tau111.abs() <= NULL_TOL,
        tau111,
        null_tolerance: NULL_TOL,
    })
}

pub fn eval_tau(model: &StoredEnergyModel, lambda: f64, s: &InvariantTriple) -> Result<f64> {
    model.eval_tau(lambda, s)
}

pub fn speeds(model: &StoredEnergyModel, lambda: f64) -> Result<(f64, f64)> {
    model.speeds(lambda)
}

pub fn pressure(model: &StoredEnergyModel, lambda: f64) -> Result<f64> {
    model.pressure(lambda)
}

/// Null material for unit bulk modulus and unit shear speed.
pub fn unit_null_material() -> StoredEnergyModel {
    construct_null_material(&ScalarFn::constant(1.0), &ScalarFn::constant(1.0), DEFAULT_LAMBDA_RANGE)
        .expect("constant moduli are admissible")
}

/// Unit null material with `h ≡ 0`; genuinely nonlinear with `τ₁₁₁ = −4/3`.
pub fn unit_witness_material() -> StoredEnergyModel {
    unit_null_material().with_h(ScalarFn::constant(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(e1: f64, e2: f64, e3: f64) -> InvariantTriple {
        InvariantTriple::new(InvariantSystem::S, e1, e2, e3)
    }

    fn closed_f(l: f64) -> f64 {
        3.0 * (l * l * l - 1.5 * l * l + 0.5)
    }

    #[test]
    fn tau_at_equilibrium_is_f() {
        let m = unit_null_material();
        for l in [0.5, 1.0, 2.0] {
            assert!((m.eval_tau(l, &s(0.0, 0.0, 0.0)).unwrap() - closed_f(l)).abs() < 1e-13);
        }
        assert_eq!(m.eval_tau(1.0, &s(0.0, 0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn tau_longitudinal_substitution() {
        let m = unit_null_material();
        let (l, e) = (1.4, 0.03);
        let z1 = l + e / 3.0;
        let want = closed_f(z1) + (3.0 * z1 - 5.0) * (-e * e / 3.0) + 3.0 * (2.0 * e * e * e / 27.0);
        assert!((m.tau_longitudinal(l, e).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn speeds_match_tau_differences() {
        // τ₁₁ = c₁², (τ₁ − λτ₂)/(2λ) = c₂² at s = 0
        let m = unit_witness_material().with_h(ScalarFn::parse("x^2 - 1").unwrap());
        for l in [0.7, 1.5, 2.2] {
            let (c1, c2) = m.speeds(l).unwrap();
            let t11 = fd_derivative(|e| m.eval_tau(l, &s(e, 0.0, 0.0)).unwrap(), 0.0, 2).unwrap();
            let t1 = fd_derivative(|e| m.eval_tau(l, &s(e, 0.0, 0.0)).unwrap(), 0.0, 1).unwrap();
            let t2 = fd_derivative(|e| m.eval_tau(l, &s(0.0, e, 0.0)).unwrap(), 0.0, 1).unwrap();
            assert!((t11 - c1).abs() < 1e-6, "{t11} {c1}");
            assert!(((t1 - l * t2) / (2.0 * l) - c2).abs() < 1e-6);
        }
    }

    #[test]
    fn degenerate_model_is_not_hyperbolic() {
        let m = StoredEnergyModel::new(
            ScalarFn::constant(0.0),
            ScalarFn::constant(0.0),
            ScalarFn::parse("x").unwrap(),
        );
        let r = m.check(1.3).unwrap();
        assert_eq!((r.c1_sq, r.c2_sq), (0.0, 0.0));
        assert!(!r.hyperbolic);
    }

    #[test]
    fn unit_null_report() {
        let r = unit_null_material().check(2.0).unwrap();
        assert!(r.hyperbolic && r.null && r.stress_free_at_1);
        assert!(r.tau111.abs() < 1e-12);
        assert!((r.bulk_modulus - 1.0).abs() < 1e-12);
        assert!((r.c1_sq - 7.0 / 3.0).abs() < 1e-12 && (r.c2_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_tau111_is_negative_everywhere() {
        let m = unit_witness_material();
        for k in 0..20 {
            let l = 0.5 + 0.125 * k as f64;
            let r = m.check(l).unwrap();
            assert!((r.tau111 + 4.0 / 3.0).abs() < 1e-12);
            assert!(!r.null);
        }
    }

    #[test]
    fn tau111_matches_third_difference_of_tau() {
        for m in [unit_null_material(), unit_witness_material()] {
            for l in [0.8, 1.5, 2.5] {
                let t = |e: f64| m.tau_longitudinal(l, e).unwrap();
                let h = 1e-2;
                let fd = (-t(3.0 * h) + 8.0 * t(2.0 * h) - 13.0 * t(h) + 13.0 * t(-h) - 8.0 * t(-2.0 * h)
                    + t(-3.0 * h))
                    / (8.0 * h * h * h);
                assert!((fd - m.tau111(l).unwrap()).abs() < 1e-5, "{fd}");
            }
        }
    }

    #[test]
    fn stress_free_flag() {
        let m = StoredEnergyModel::new(
            ScalarFn::parse("x").unwrap(),
            ScalarFn::constant(0.0),
            ScalarFn::constant(0.0),
        );
        assert!(!m.check(1.0).unwrap().stress_free_at_1);
    }

    #[test]
    fn pressure_examples() {
        let m = unit_null_material();
        assert!(m.pressure(1.0).unwrap().abs() < 1e-14);
        assert!((m.pressure(2.0).unwrap() + 4.5).abs() < 1e-12);
        for k in 0..20 {
            let l = 0.3 + 0.15 * k as f64;
            let dp = fd_derivative(|x| m.pressure(x).unwrap(), l, 1).unwrap();
            assert!(dp < 0.0);
        }
    }

    #[test]
    fn diff_scalar_examples() {
        let cube = ScalarFn::parse("x^3").unwrap();
        let d = diff_scalar(&cube, 1).unwrap();
        assert!((d.eval(1.7).unwrap() - 3.0 * 1.7 * 1.7).abs() < 1e-14);
        assert_eq!(
            diff_scalar(&ScalarFn::constant(2.0), 1).unwrap().eval(3.0).unwrap(),
            0.0
        );
        assert!(diff_scalar(&cube, 4).is_err());
        assert!(diff_scalar(&cube, 0).is_err());
        let d2 = diff_scalar(&d, 1).unwrap();
        assert_eq!(d2.expr(), diff_scalar(&cube, 2).unwrap().expr());
    }

    #[test]
    fn fd_derivative_orders() {
        for order in 1..=3 {
            let v = fd_derivative(f64::exp, 0.4, order).unwrap();
            assert!((v - 0.4f64.exp()).abs() < 1e-6, "{order}: {v}");
        }
    }

    #[test]
    fn remainder_hook_checks_vanishing() {
        let m = unit_null_material();
        let ok: Remainder = Arc::new(|_, z2, z3| z2 * z2 + z2 * z3);
        let m2 = m.clone().with_remainder(ok).unwrap();
        let st = s(0.02, -0.01, 0.003);
        assert!(m2.eval_tau(1.2, &st).unwrap() != m.eval_tau(1.2, &st).unwrap());
        assert_eq!(m2.speeds(1.2).unwrap(), m.speeds(1.2).unwrap());
        let bad: Remainder = Arc::new(|_, z2, _| z2);
        assert!(m.with_remainder(bad).is_err());
    }

    #[test]
    fn domain_errors_surface() {
        let m = StoredEnergyModel::new(
            ScalarFn::parse("ln(x - 1)").unwrap(),
            ScalarFn::constant(0.0),
            ScalarFn::constant(0.0),
        );
        assert!(matches!(m.eval_tau(0.5, &s(0.0, 0.0, 0.0)), Err(Error::Domain(_))));
    }
}
