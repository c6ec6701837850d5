use super::{Expr, Node};

pub(super) fn derivative(e: &Expr, var: usize) -> Expr {
    use Node::*;
    match e.node() {
        Const(_) => Expr::constant(0.0),
        Var(i) => Expr::constant(if *i == var { 1.0 } else { 0.0 }),
        Add(a, b) => derivative(a, var) + derivative(b, var),
        Sub(a, b) => derivative(a, var) - derivative(b, var),
        Mul(a, b) => {
            let da = derivative(a, var);
            let db = derivative(b, var);
            Expr::add(Expr::mul(da, b.clone()), Expr::mul(a.clone(), db))
        }
        Div(a, b) => {
            let da = derivative(a, var);
            let db = derivative(b, var);
            if db.as_const() == Some(0.0) {
                return Expr::div(da, b.clone());
            }
            // (a' b - a b') / b^2
            Expr::div(
                Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a.clone(), db)),
                Expr::powi(b.clone(), 2),
            )
        }
        Pow(base, ex) => {
            let db = derivative(base, var);
            if let Some(c) = ex.as_const() {
                // c u^(c-1) u'
                return Expr::mul(
                    Expr::mul(Expr::constant(c), Expr::pow(base.clone(), Expr::constant(c - 1.0))),
                    db,
                );
            }
            let de = derivative(ex, var);
            // u^v (v' ln u + v u'/u)
            let t1 = Expr::mul(de, Expr::ln(base.clone()));
            let t2 = Expr::div(Expr::mul(ex.clone(), db), base.clone());
            Expr::mul(e.clone(), Expr::add(t1, t2))
        }
        Neg(a) => Expr::neg(derivative(a, var)),
        Exp(a) => Expr::mul(e.clone(), derivative(a, var)),
        Ln(a) => Expr::div(derivative(a, var), a.clone()),
        Sqrt(a) => Expr::div(derivative(a, var), Expr::mul(Expr::constant(2.0), e.clone())),
        Integral(a) => {
            if var == 0 {
                a.integrand().clone()
            } else {
                Expr::constant(0.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(e: &Expr, x: f64) -> f64 {
        let h = 1e-5;
        (e.eval_f64(&[x + h]) - e.eval_f64(&[x - h])) / (2.0 * h)
    }

    #[test]
    fn cube_rule() {
        let x = Expr::x();
        let d = Expr::powi(x, 3).derivative(0);
        for &p in &[0.3, 1.0, 2.5] {
            assert!((d.eval(&[p]).unwrap() - 3.0 * p * p).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_has_zero_derivative() {
        assert_eq!(Expr::constant(4.2).derivative(0).as_const(), Some(0.0));
        assert_eq!(Expr::var(1).derivative(0).as_const(), Some(0.0));
    }

    #[test]
    fn matches_finite_differences() {
        let x = Expr::x();
        let cases = vec![
            Expr::exp(x.clone() * x.clone()) / (x.clone() + 2.0),
            Expr::ln(x.clone() + 1.0) * Expr::sqrt(x.clone()),
            Expr::pow(x.clone(), x.clone()),
            Expr::pow(x.clone() + 1.0, Expr::constant(-2.5)),
        ];
        for e in cases {
            let d = e.derivative(0);
            for &p in &[0.4, 1.1, 2.3] {
                let want = fd(&e, p);
                let got = d.eval(&[p]).unwrap();
                assert!((got - want).abs() < 1e-7 * (1.0 + want.abs()), "{e}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn repeated_derivative_is_composition() {
        let x = Expr::x();
        let e = Expr::exp(-x.clone() * x.clone()) * Expr::powi(x, 3);
        let two = e.nth_derivative(0, 2);
        let step = e.derivative(0).derivative(0);
        assert_eq!(two, step);
    }
}
