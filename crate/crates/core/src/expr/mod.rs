//! Expression trees over a small number of real variables.
//!
//! Nodes are reference counted and immutable, so derivatives share
//! subtrees with their source. Constructors apply a handful of local
//! simplifications (constant folding, additive and multiplicative
//! identities), which keeps repeated differentiation from growing
//! trees without bound.
//!
//! Univariate expressions use variable 0 and display it as `x`. The
//! space-time fixtures in [`crate::fields::analytic`] use variables
//! 0..=3 for `(t, x1, x2, x3)`.

mod diff;
mod parse;

use std::fmt;
use std::ops;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tabulate::Antiderivative;

pub use parse::{parse, parse_with};

#[derive(Debug)]
pub enum Node {
    Const(f64),
    Var(usize),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Expr),
    Neg(Expr),
    Exp(Expr),
    Ln(Expr),
    Sqrt(Expr),
    /// `∫_{lower}^{x} integrand(y) dy` as a function of variable 0.
    Integral(Arc<Antiderivative>),
}

#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        use Node::*;
        match (&*self.0, &*other.0) {
            (Const(a), Const(b)) => a.to_bits() == b.to_bits(),
            (Var(a), Var(b)) => a == b,
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (Div(a, b), Div(c, d))
            | (Pow(a, b), Pow(c, d)) => a == c && b == d,
            (Neg(a), Neg(b)) | (Exp(a), Exp(b)) | (Ln(a), Ln(b)) | (Sqrt(a), Sqrt(b)) => a == b,
            (Integral(a), Integral(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Expr {
        Expr(Arc::new(Node::Const(c)))
    }

    pub fn var(i: usize) -> Expr {
        Expr(Arc::new(Node::Var(i)))
    }

    /// The univariate variable `x`.
    pub fn x() -> Expr {
        Expr::var(0)
    }

    pub fn integral(a: Antiderivative) -> Expr {
        Expr(Arc::new(Node::Integral(Arc::new(a))))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => Expr(Arc::new(Node::Add(a, b))),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x - y),
            (_, Some(0.0)) => a,
            (Some(0.0), _) => Expr::neg(b),
            _ => Expr(Arc::new(Node::Sub(a, b))),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x * y),
            (Some(0.0), _) => Expr::constant(0.0),
            (_, Some(0.0)) => Expr::constant(0.0),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            _ => Expr(Arc::new(Node::Mul(a, b))),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::constant(x / y),
            (Some(0.0), _) => Expr::constant(0.0),
            (_, Some(1.0)) => a,
            _ => Expr(Arc::new(Node::Div(a, b))),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if x.powf(y).is_finite() && (x >= 0.0 || y.fract() == 0.0) => Expr::constant(x.powf(y)),
            (_, Some(1.0)) => a,
            (_, Some(0.0)) => Expr::constant(1.0),
            _ => Expr(Arc::new(Node::Pow(a, b))),
        }
    }

    pub fn powi(a: Expr, n: i32) -> Expr {
        Expr::pow(a, Expr::constant(n as f64))
    }

    pub fn neg(a: Expr) -> Expr {
        match &*a.0 {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr(Arc::new(Node::Neg(a))),
        }
    }

    pub fn exp(a: Expr) -> Expr {
        match a.as_const() {
            Some(c) if c.exp().is_finite() => Expr::constant(c.exp()),
            _ => Expr(Arc::new(Node::Exp(a))),
        }
    }

    pub fn ln(a: Expr) -> Expr {
        match a.as_const() {
            Some(c) if c > 0.0 => Expr::constant(c.ln()),
            _ => Expr(Arc::new(Node::Ln(a))),
        }
    }

    pub fn sqrt(a: Expr) -> Expr {
        match a.as_const() {
            Some(c) if c >= 0.0 => Expr::constant(c.sqrt()),
            _ => Expr(Arc::new(Node::Sqrt(a))),
        }
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Expr {
        diff::derivative(self, var)
    }

    /// `order`-th partial derivative with respect to variable `var`.
    pub fn nth_derivative(&self, var: usize, order: usize) -> Expr {
        (0..order).fold(self.clone(), |e, _| e.derivative(var))
    }

    /// Evaluates with domain checks at every node.
    pub fn eval(&self, vars: &[f64]) -> Result<f64> {
        use Node::*;
        let v = match &*self.0 {
            Const(c) => *c,
            Var(i) => *vars
                .get(*i)
                .ok_or_else(|| Error::Domain(format!("variable {i} not bound")))?,
            Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Div(a, b) => {
                let d = b.eval(vars)?;
                if d == 0.0 {
                    return Err(Error::Domain(format!("division by zero at {vars:?}")));
                }
                a.eval(vars)? / d
            }
            Pow(a, b) => {
                let base = a.eval(vars)?;
                let ex = b.eval(vars)?;
                if base < 0.0 && ex.fract() != 0.0 {
                    return Err(Error::Domain(format!(
                        "negative base {base} to non-integer power {ex} at {vars:?}"
                    )));
                }
                if base == 0.0 && ex < 0.0 {
                    return Err(Error::Domain(format!("zero to negative power at {vars:?}")));
                }
                pow_value(base, ex)
            }
            Neg(a) => -a.eval(vars)?,
            Exp(a) => a.eval(vars)?.exp(),
            Ln(a) => {
                let x = a.eval(vars)?;
                if x <= 0.0 {
                    return Err(Error::Domain(format!("log of nonpositive {x} at {vars:?}")));
                }
                x.ln()
            }
            Sqrt(a) => {
                let x = a.eval(vars)?;
                if x < 0.0 {
                    return Err(Error::Domain(format!("sqrt of negative {x} at {vars:?}")));
                }
                x.sqrt()
            }
            Integral(a) => {
                let x = *vars
                    .first()
                    .ok_or_else(|| Error::Domain("variable 0 not bound".into()))?;
                a.eval(x)?
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite value at {vars:?}")))
        }
    }

    /// Evaluates without domain checks; invalid operations yield NaN.
    pub fn eval_f64(&self, vars: &[f64]) -> f64 {
        use Node::*;
        match &*self.0 {
            Const(c) => *c,
            Var(i) => vars.get(*i).copied().unwrap_or(f64::NAN),
            Add(a, b) => a.eval_f64(vars) + b.eval_f64(vars),
            Sub(a, b) => a.eval_f64(vars) - b.eval_f64(vars),
            Mul(a, b) => a.eval_f64(vars) * b.eval_f64(vars),
            Div(a, b) => a.eval_f64(vars) / b.eval_f64(vars),
            Pow(a, b) => pow_value(a.eval_f64(vars), b.eval_f64(vars)),
            Neg(a) => -a.eval_f64(vars),
            Exp(a) => a.eval_f64(vars).exp(),
            Ln(a) => a.eval_f64(vars).ln(),
            Sqrt(a) => a.eval_f64(vars).sqrt(),
            Integral(a) => vars.first().and_then(|&x| a.eval(x).ok()).unwrap_or(f64::NAN),
        }
    }

    /// Number of nodes counted as a tree (shared subtrees counted once per use).
    pub fn tree_size(&self) -> usize {
        use Node::*;
        match &*self.0 {
            Const(_) | Var(_) | Integral(_) => 1,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => 1 + a.tree_size() + b.tree_size(),
            Neg(a) | Exp(a) | Ln(a) | Sqrt(a) => 1 + a.tree_size(),
        }
    }

    /// Displays with the given variable names instead of `x`.
    pub fn display_with<'a>(&'a self, names: &'a [&'a str]) -> impl fmt::Display + 'a {
        Named { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        use Node::*;
        match &*self.0 {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Const(c) if c.is_sign_negative() => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }
}

fn pow_value(base: f64, ex: f64) -> f64 {
    if ex.fract() == 0.0 && ex.abs() <= 64.0 {
        base.powi(ex as i32)
    } else {
        base.powf(ex)
    }
}

struct Named<'a> {
    expr: &'a Expr,
    names: &'a [&'a str],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self.expr, self.names, f)
    }
}

fn write_child(e: &Expr, min_prec: u8, names: &[&str], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "(")?;
        write_expr(e, names, f)?;
        write!(f, ")")
    } else {
        write_expr(e, names, f)
    }
}

fn write_const(c: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let a = c.abs();
    if a == 0.0 || (1e-5..1e15).contains(&a) {
        write!(f, "{c}")
    } else {
        write!(f, "{c:e}")
    }
}

fn write_expr(e: &Expr, names: &[&str], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    use Node::*;
    match &*e.0 {
        Const(c) => write_const(*c, f),
        Var(i) => match names.get(*i) {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "v{i}"),
        },
        Add(a, b) => {
            write_child(a, 1, names, f)?;
            write!(f, " + ")?;
            write_child(b, 2, names, f)
        }
        Sub(a, b) => {
            write_child(a, 1, names, f)?;
            write!(f, " - ")?;
            write_child(b, 2, names, f)
        }
        Mul(a, b) => {
            write_child(a, 2, names, f)?;
            write!(f, "*")?;
            write_child(b, 3, names, f)
        }
        Div(a, b) => {
            write_child(a, 2, names, f)?;
            write!(f, "/")?;
            write_child(b, 3, names, f)
        }
        Pow(a, b) => {
            write_child(a, 5, names, f)?;
            write!(f, "^")?;
            write_child(b, 3, names, f)
        }
        Neg(a) => {
            write!(f, "-")?;
            write_child(a, 3, names, f)
        }
        Exp(a) => {
            write!(f, "exp(")?;
            write_expr(a, names, f)?;
            write!(f, ")")
        }
        Ln(a) => {
            write!(f, "ln(")?;
            write_expr(a, names, f)?;
            write!(f, ")")
        }
        Sqrt(a) => {
            write!(f, "sqrt(")?;
            write_expr(a, names, f)?;
            write!(f, ")")
        }
        Integral(a) => {
            write!(f, "integral[{}](", a.lower())?;
            write_expr(a.integrand(), names, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, &["x"], f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $ctor:ident) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$ctor(self, rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$ctor(self.clone(), rhs.clone())
            }
        }
        impl ops::$tr<f64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: f64) -> Expr {
                Expr::$ctor(self, Expr::constant(rhs))
            }
        }
        impl ops::$tr<Expr> for f64 {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$ctor(Expr::constant(self), rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self.clone())
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::constant(c)
    }
}
