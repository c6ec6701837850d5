//! Expressions and JSON material files: parsing, symbolic derivatives, and
//! the three ways of writing a material.

use prestress::constitutive::MaterialSpec;
use prestress::expr::parse;

fn main() -> prestress::Result<()> {
    let e = parse("x^3*ln(x) - sqrt(1 + x^2)/exp(x - 1)")?;
    println!("e(x)   = {e}");
    println!("e'(x)  = {}", e.derivative(0));
    println!("e''(2) = {:.12}", e.nth_derivative(0, 2).eval(&[2.0])?);
    for bad in ["sin(x)", "x^", "y + 1"] {
        println!("parse `{bad}`: {}", parse(bad).unwrap_err());
    }

    let files = [
        r#"{ "f": "3*(x^3 - 1.5*x^2 + 0.5)", "g": "3*x - 5", "h": "3" }"#,
        r#"{ "f": { "construct": { "bulk": "1 + 0.2*ln(x)", "c2sq": "1" } }, "lambda_range": [0.5, 3] }"#,
        r#"{ "f": { "construct": { "bulk": "1", "c2sq": "1" } }, "h": "0" }"#,
    ];
    for text in files {
        let model = MaterialSpec::from_json(text)?.build()?;
        let r = model.check(1.5)?;
        println!("{text}");
        println!(
            "  at λ = 1.5: c1² = {:.6}, c2² = {:.6}, τ111 = {:.3e}, null = {}",
            r.c1_sq, r.c2_sq, r.tau111, r.null
        );
    }
    Ok(())
}
