//! Discrete energies and norms against quadrature of closed forms.

use prestress::fields::{energy, lambda_norm, weighted_x, Boundary, FieldState, Grid3, Speeds};
use prestress::tabulate::integrate;

const SPEEDS: Speeds = Speeds {
    c1_sq: 7.0 / 3.0,
    c2_sq: 1.0,
};

fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    integrate(f, a, b, 1e-12, 1e-14).unwrap()
}

fn phi(s: f64) -> f64 {
    (3.0 * s).sin() * (-0.5 * s * s).exp()
}

fn dphi(s: f64) -> f64 {
    (3.0 * (3.0 * s).cos() - s * (3.0 * s).sin()) * (-0.5 * s * s).exp()
}

fn psi(s: f64) -> f64 {
    (-0.5 * s * s).exp()
}

fn dpsi(s: f64) -> f64 {
    -s * psi(s)
}

#[test]
fn windowed_wave_energy_converges() {
    let l = 6.0;
    let c1 = SPEEDS.c1_sq.sqrt();
    let i = |f: &dyn Fn(f64) -> f64| quad(|s| f(s) * f(s), -l, l);
    let (p, dp, q, dq) = (i(&phi), i(&dphi), i(&psi), i(&dpsi));
    let kinetic = SPEEDS.c1_sq * dp * q * q;
    let grad = dp * q * q + 2.0 * p * dq * q;
    let div = dp * q * q;
    let exact = 0.5 * (kinetic + SPEEDS.c2_sq * grad + (SPEEDS.c1_sq - SPEEDS.c2_sq) * div);

    let errors: Vec<f64> = [32, 48, 64]
        .iter()
        .map(|&n| {
            let g = Grid3::new(n, l, Boundary::Periodic).unwrap();
            let s = FieldState::from_fn(g, 0.0, |x| {
                let w = psi(x[1]) * psi(x[2]);
                ([phi(x[0]) * w, 0.0, 0.0], [-c1 * dphi(x[0]) * w, 0.0, 0.0])
            });
            (energy(&s, SPEEDS, 1, None).unwrap() - exact).abs() / exact
        })
        .collect();
    let order_a = (errors[0] / errors[1]).ln() / 1.5f64.ln();
    let order_b = (errors[1] / errors[2]).ln() / (4.0f64 / 3.0).ln();
    assert!(order_a >= 2.0 && order_b >= 2.0, "{errors:?} {order_a} {order_b}");
    assert!(errors[2] < 1e-2, "{errors:?}");
}

/// `u = x·e^{−r²}`, static.
fn radial_state(n: usize, l: f64) -> FieldState {
    let g = Grid3::new(n, l, Boundary::Periodic).unwrap();
    FieldState::from_fn(g, 0.0, |x| {
        let e = (-x.norm_squared()).exp();
        ([x[0] * e, x[1] * e, x[2] * e], [0.0; 3])
    })
}

#[test]
fn static_pulse_weighted_norm_matches_quadrature() {
    // ∂β∂ℓuʲ = g₁(δⱼᵦxℓ + δⱼℓxᵦ + δᵦℓxⱼ) + g₂xⱼxᵦxℓ with g₁ = −2e^{−r²}, g₂ = 4e^{−r²}
    let r_max = 5.0;
    let mut oracle = 0.0;
    for beta in 0..3 {
        for l in 0..3 {
            for alpha in 1..=2 {
                let integrand = |r: f64, ct: f64, ph: f64| {
                    let st = (1.0 - ct * ct).max(0.0).sqrt();
                    let n = [st * ph.cos(), st * ph.sin(), ct];
                    let x = n.map(|c| c * r);
                    let e = (-r * r).exp();
                    let (g1, g2) = (-2.0 * e, 4.0 * e);
                    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                    let w: [f64; 3] = [0, 1, 2].map(|j| {
                        g1 * (d(j, beta) * x[l] + d(j, l) * x[beta] + d(beta, l) * x[j]) + g2 * x[j] * x[beta] * x[l]
                    });
                    let radial = n[0] * w[0] + n[1] * w[1] + n[2] * w[2];
                    let total: f64 = w.iter().map(|v| v * v).sum();
                    let part = if alpha == 1 {
                        radial * radial
                    } else {
                        total - radial * radial
                    };
                    (1.0 + r * r) * part * r * r
                };
                let sq = quad(
                    |r| {
                        quad(
                            |ct| quad(|ph| integrand(r, ct, ph), 0.0, std::f64::consts::TAU),
                            -1.0,
                            1.0,
                        )
                    },
                    0.0,
                    r_max,
                );
                oracle += sq.sqrt();
            }
        }
    }
    let x2 = weighted_x(&radial_state(64, r_max), SPEEDS, 2, None).unwrap();
    assert!((x2 - oracle).abs() < 0.01 * oracle, "{x2} vs {oracle}");
}

#[test]
fn lambda_norm_matches_radial_quadrature() {
    // ‖u‖² + Σ‖∂ₐu‖² + ‖(r∂ᵣ − 1)u‖², with Ω̃u = 0 for a radial field
    let r_max = 5.0;
    let shell = |f: &dyn Fn(f64) -> f64| quad(|r| 4.0 * std::f64::consts::PI * r * r * f(r), 0.0, r_max);
    let g = |r: f64| (-r * r).exp();
    let dg = |r: f64| -2.0 * r * g(r);
    let plain = shell(&|r| r * r * g(r) * g(r));
    let grad = shell(&|r| 3.0 * g(r) * g(r) + 2.0 * r * g(r) * dg(r) + r * r * dg(r) * dg(r));
    let scaling = shell(&|r| r.powi(4) * dg(r) * dg(r));
    let exact = (plain + grad + scaling).sqrt();
    let s = radial_state(48, r_max);
    let value = lambda_norm(&s.grid, &s.u, 1).unwrap();
    assert!((value - exact).abs() < 0.01 * exact, "{value} vs {exact}");
    let l0 = lambda_norm(&s.grid, &s.u, 0).unwrap();
    assert!((l0 - plain.sqrt()).abs() < 1e-3 * l0);
}

#[test]
fn divergence_free_static_energy() {
    // u = (−x₂, x₁, 0)e^{−r²} has ∇·u = 0, so E₁ = ½c₂²∫|∇u|²
    let g = Grid3::new(64, 5.0, Boundary::Periodic).unwrap();
    let s = FieldState::from_fn(g, 0.0, |x| {
        let e = (-x.norm_squared()).exp();
        ([-x[1] * e, x[0] * e, 0.0], [0.0; 3])
    });
    let e1 = energy(&s, SPEEDS, 1, None).unwrap();
    let e_only_shear = energy(
        &s,
        Speeds {
            c1_sq: 50.0,
            c2_sq: SPEEDS.c2_sq,
        },
        1,
        None,
    )
    .unwrap();
    assert!((e1 - e_only_shear).abs() < 1e-3 * e1);
    // |∇u|² = e^{−2r²}(2 − 4ρ² + 4ρ²r²) with ρ² = x₁² + x₂²
    let integrand = |r: f64| {
        // the angular mean of ρ² is 2r²/3
        let e2 = (-2.0 * r * r).exp();
        let avg_rho2 = 2.0 * r * r / 3.0;
        e2 * (2.0 - 4.0 * avg_rho2 + 4.0 * avg_rho2 * r * r) * 4.0 * std::f64::consts::PI * r * r
    };
    let exact = 0.5 * SPEEDS.c2_sq * quad(integrand, 0.0, 5.0);
    assert!((e1 - exact).abs() < 5e-3 * exact, "{e1} vs {exact}");
}
