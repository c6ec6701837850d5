//! Shock-time prediction for the scalar longitudinal mode
//! `φ_tt − c₁²φ_ss = κ ∂_s(φ_s²)`.
//!
//! For a right-moving simple wave the strain `w = φ_s` is carried along
//! characteristics of speed `c(w) = √(c₁² + 2κw)` and `q = w_s` obeys
//! `q′ = −c′(w) q²`. Each sample is integrated with step-doubled RK4
//! until `q` leaves every reasonable bound.

use super::{bump, InitialData};
use crate::error::{Error, Result};

const TOL: f64 = 1e-8;
const DIVERGED: f64 = 1e6;

/// Integrates `q′ = −k q²` from `q0` until `|q| > limit` or `horizon`.
fn riccati_escape(k: f64, q0: f64, limit: f64, horizon: f64) -> Option<f64> {
    let f = |q: f64| -k * q * q;
    let rk4 = |q: f64, h: f64| {
        let k1 = f(q);
        let k2 = f(q + 0.5 * h * k1);
        let k3 = f(q + 0.5 * h * k2);
        let k4 = f(q + h * k3);
        q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let (mut t, mut q) = (0.0, q0);
    let mut h = horizon / 100.0;
    while t < horizon {
        h = h.min(horizon - t);
        let full = rk4(q, h);
        let halves = rk4(rk4(q, 0.5 * h), 0.5 * h);
        let err = (halves - full).abs() / 15.0;
        let scale = TOL * halves.abs().max(q.abs()).max(1e-300);
        if !halves.is_finite() || err > scale {
            h *= 0.5;
            if h < horizon * 1e-15 {
                return Some(t);
            }
            continue;
        }
        t += h;
        q = halves + (halves - full) / 15.0;
        if q.abs() > limit {
            return Some(t);
        }
        let grow = if err > 0.0 { 0.9 * (scale / err).powf(0.2) } else { 2.0 };
        h *= grow.clamp(0.2, 2.0);
    }
    None
}

/// Earliest time at which `w_s` diverges along any characteristic started
/// from the samples `(w, w_s)`.
pub fn characteristics_oracle(c1: f64, kappa: f64, samples: &[(f64, f64)], horizon: f64) -> Result<f64> {
    if !(c1 > 0.0 && horizon > 0.0) {
        return Err(Error::Config(format!(
            "need c1 > 0 and horizon > 0, got {c1}, {horizon}"
        )));
    }
    if kappa == 0.0 {
        return Err(Error::NoBlowup(horizon));
    }
    let q_max = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    let mut best: Option<f64> = None;
    for &(w, q0) in samples {
        let c_sq = c1 * c1 + 2.0 * kappa * w;
        if c_sq <= 0.0 {
            return Err(Error::Domain(format!("characteristic speed is imaginary at w = {w}")));
        }
        let k = kappa / c_sq.sqrt();
        if k * q0 >= 0.0 {
            continue;
        }
        let reach = best.unwrap_or(horizon);
        if let Some(t) = riccati_escape(k, q0, DIVERGED * q_max, reach) {
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
    }
    best.ok_or(Error::NoBlowup(horizon))
}

/// `(w, w_s)` of the longitudinal pulse `φ = ε G(s/width)` at `count`
/// evenly spaced points of its support.
pub fn pulse_samples(data: &InitialData, count: usize) -> Vec<(f64, f64)> {
    let (eps, w) = (data.amplitude, data.width);
    (0..count)
        .map(|i| {
            let s = -1.0 + 2.0 * (i as f64 + 0.5) / count as f64;
            let [_, d1, d2] = bump(s);
            (eps * d1 / w, eps * d2 / (w * w))
        })
        .collect()
}

/// Oracle prediction for a longitudinal pulse.
pub fn oracle_for_pulse(c1: f64, kappa: f64, data: &InitialData, horizon: f64) -> Result<f64> {
    characteristics_oracle(c1, kappa, &pulse_samples(data, 4001), horizon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riccati_matches_closed_form() {
        // q = q0/(1 + k q0 t) escapes when 1 + k q0 t = q0/limit
        for (k, q0) in [(0.3f64, -2.0f64), (-1.5, 0.4)] {
            let limit = 1e6 * q0.abs();
            let exact = (q0.abs() / limit - 1.0) / (k * q0);
            let t = riccati_escape(k, q0, limit, 100.0).unwrap();
            assert!((t - exact).abs() < 1e-6 * exact, "{t} {exact}");
        }
        assert!(riccati_escape(1.0, 1.0, 1e6, 50.0).is_none());
    }

    #[test]
    fn linear_mode_never_breaks() {
        assert_eq!(
            characteristics_oracle(1.0, 0.0, &[(0.1, 1.0)], 10.0),
            Err(Error::NoBlowup(10.0))
        );
    }

    #[test]
    fn inverse_amplitude_scaling() {
        let data = InitialData::default();
        let t1 = oracle_for_pulse(1.5, -4.0 / 3.0, &data, 1e3).unwrap();
        let double = InitialData {
            amplitude: 2.0 * data.amplitude,
            ..data
        };
        let t2 = oracle_for_pulse(1.5, -4.0 / 3.0, &double, 1e3).unwrap();
        assert!((t1 / t2 - 2.0).abs() < 0.1, "{t1} {t2}");
    }
}
