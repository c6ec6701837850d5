//! Explicit time integration of the truncated system `u_tt = Au + N(u,u)`.
//!
//! Both solvers use leapfrog in velocity form (kick, drift, kick), which
//! produces the same positions as the three-level scheme and keeps `uₜ`
//! at whole steps for the diagnostics. Blowup is a proxy: the run stops
//! when the largest second derivative of `u` reaches a multiple of its
//! initial value, or when `max|∇u|` crosses an optional absolute bound.

pub mod characteristics;
mod initial;
mod planewave;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{energy1, weighted_x, Boundary, Dynamics, FieldState, Grid3, VecField};
use crate::invariants::Mat3;
use crate::tensors::{MaterialTensors, TensorA};

pub use characteristics::{characteristics_oracle, oracle_for_pulse, pulse_samples};
pub use initial::{bump, make_initial_data, InitialData, InitialKind};
pub use planewave::{run_planewave_1d, run_planewave_1d_observed, stability_limit_1d, Line, PlaneWave1d};

/// Largest grid accepted by the 3D solver.
pub const MAX_BOX_N: usize = 96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub lambda: f64,
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub boundary: Boundary,
    /// Fraction of the step `h/c₁`.
    pub cfl: f64,
    pub t_end: f64,
    pub diagnostics_every: usize,
    /// Blowup when `max|∇²u|` reaches this multiple of its initial value.
    pub blowup_factor: f64,
    /// Optional absolute bound on `max|∇u|`.
    pub max_grad_threshold: Option<f64>,
    pub nonlinear: bool,
    pub track_x2: bool,
    pub initial: InitialData,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lambda: 1.5,
            n: 48,
            half_width: 10.0,
            boundary: Boundary::Periodic,
            cfl: 0.4,
            t_end: 10.0,
            diagnostics_every: 10,
            blowup_factor: 10.0,
            max_grad_threshold: None,
            nonlinear: true,
            track_x2: false,
            initial: InitialData::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if self.diagnostics_every == 0 {
            return bad("diagnostics_every must be at least 1".into());
        }
        if !(self.blowup_factor > 1.0) {
            return bad(format!("blowup_factor must exceed 1, got {}", self.blowup_factor));
        }
        self.initial.validate()
    }

    pub fn grid(&self) -> Result<Grid3> {
        Grid3::new(self.n, self.half_width, self.boundary)
    }

    /// [`Self::grid`], refusing sizes above [`MAX_BOX_N`].
    pub fn box_grid(&self) -> Result<Grid3> {
        if self.n > MAX_BOX_N {
            return Err(Error::Config(format!("n = {} exceeds the 3D cap {MAX_BOX_N}", self.n)));
        }
        self.grid()
    }
}

/// One row of diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Record {
    pub t: f64,
    pub e1: f64,
    pub max_grad: f64,
    pub x2: Option<f64>,
    pub max_grad2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Completed,
    Blowup {
        t: f64,
        location: [f64; 3],
    },
    NonFinite {
        t: f64,
    },
    /// The solution reached the guard shell of a zero-padded box.
    GuardReached {
        t: f64,
    },
}

impl Verdict {
    /// 0 for a finished run, 2 for blowup or non-finite values.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Completed | Verdict::GuardReached { .. } => 0,
            Verdict::Blowup { .. } | Verdict::NonFinite { .. } => 2,
        }
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, Verdict::Blowup { .. } | Verdict::NonFinite { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub dt: f64,
    pub steps: usize,
    pub records: Vec<Record>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl SimReport {
    /// Columns `t,E1,max_grad,X2,max_grad2`; `X2` is blank when not tracked.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,E1,max_grad,X2,max_grad2\n");
        for r in &self.records {
            let x2 = r.x2.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{}\n", r.t, r.e1, r.max_grad, x2, r.max_grad2));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn first(&self) -> Option<&Record> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    /// Largest `max|∇u|` over the run divided by its initial value.
    pub fn gradient_growth(&self) -> f64 {
        let first = self.first().map_or(0.0, |r| r.max_grad);
        let peak = self.records.iter().map(|r| r.max_grad).fold(0.0, f64::max);
        if first > 0.0 {
            peak / first
        } else {
            0.0
        }
    }

    /// `max_t |E₁(t) − E₁(0)| / E₁(0)`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.first().map_or(0.0, |r| r.e1);
        if e0 == 0.0 {
            return 0.0;
        }
        self.records.iter().map(|r| (r.e1 - e0).abs() / e0).fold(0.0, f64::max)
    }
}

/// Number of steps and the step itself, chosen so the steps land on `t_end`.
pub(crate) fn step_count(t_end: f64, dt_max: f64) -> (usize, f64) {
    let steps = (t_end / dt_max).ceil().max(1.0) as usize;
    (steps, t_end / steps as f64)
}

fn symbol_d1(theta: f64, h: f64) -> f64 {
    (4.0 / 3.0 * theta.sin() - theta.sin() * theta.cos() / 3.0) / h
}

fn symbol_d2(theta: f64, h: f64) -> f64 {
    (-(2.0 * theta).cos() / 6.0 + 8.0 / 3.0 * theta.cos() - 2.5) / (h * h)
}

/// Largest stable leapfrog step for the linear part on `grid`, from the
/// Fourier symbol of the stencils sampled over the Brillouin zone.
pub fn stability_limit_3d(grid: &Grid3, a: &TensorA) -> f64 {
    let h = grid.spacing();
    let k = 24usize;
    let thetas: Vec<f64> = (0..=2 * k)
        .map(|i| std::f64::consts::PI * (i as f64 / k as f64 - 1.0))
        .collect();
    let mut omega_sq: f64 = 0.0;
    for &t0 in &thetas {
        for &t1 in &thetas {
            for &t2 in &thetas[k..] {
                let th = [t0, t1, t2];
                let s = th.map(|t| symbol_d1(t, h));
                let d = th.map(|t| symbol_d2(t, h));
                let m = Mat3::from_fn(|i, j| {
                    let mut acc = 0.0;
                    for l in 0..3 {
                        for mm in 0..3 {
                            let kk = if l == mm { d[l] } else { -s[l] * s[mm] };
                            acc += a.get(i, j, l, mm) * kk;
                        }
                    }
                    -acc
                });
                let sym = (m + m.transpose()) * 0.5;
                let top = SymmetricEigen::new(sym).eigenvalues.max();
                omega_sq = omega_sq.max(top);
            }
        }
    }
    2.0 / omega_sq.sqrt()
}

/// Velocity-form leapfrog with the acceleration of the current state cached.
#[derive(Debug, Clone)]
pub struct Box3d {
    pub state: FieldState,
    accel: VecField,
    pub dynamics: Dynamics,
}

impl Box3d {
    pub fn new(state: FieldState, dynamics: Dynamics) -> Result<Self> {
        state.validate()?;
        let accel = dynamics.rhs(&state.grid, &state.u);
        Ok(Box3d { state, accel, dynamics })
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        let half = 0.5 * dt;
        let s = &mut self.state;
        for ((u, v), a) in s.u.iter_mut().zip(s.ut.iter_mut()).zip(&self.accel) {
            for c in 0..3 {
                v[c] += half * a[c];
                u[c] += dt * v[c];
            }
        }
        self.accel = self.dynamics.rhs(&s.grid, &s.u);
        for (v, a) in s.ut.iter_mut().zip(&self.accel) {
            for c in 0..3 {
                v[c] += half * a[c];
            }
        }
        s.t += dt;
        let finite = s.u.iter().chain(&s.ut).flatten().all(|x| x.is_finite());
        if finite {
            Ok(())
        } else {
            Err(Error::NonFinite(s.t))
        }
    }
}

/// One leapfrog step of `u_tt = Au + N(u,u)`.
pub fn step_box3d(state: &FieldState, dynamics: &Dynamics, dt: f64) -> Result<FieldState> {
    let mut b = Box3d::new(state.clone(), dynamics.clone())?;
    b.step(dt)?;
    Ok(b.state)
}

/// `max|∇u|`, `max|∇²u|` and the node where the latter is attained.
fn gradient_maxima(grid: &Grid3, u: &[[f64; 3]]) -> (f64, f64, usize) {
    let per_node = grid.map_nodes(|p| {
        let d = grid.derivs_at(u, p);
        let g: f64 = d.grad.iter().map(|v| v * v).sum();
        let h: f64 = d.hess.iter().map(|v| v * v).sum();
        (g.sqrt(), h.sqrt())
    });
    let mut out = (0.0, 0.0, 0);
    for (p, &(g, h)) in per_node.iter().enumerate() {
        out.0 = f64::max(out.0, g);
        if h > out.1 {
            out.1 = h;
            out.2 = p;
        }
    }
    out
}

fn record_3d(b: &Box3d, track_x2: bool) -> Result<(Record, usize)> {
    let s = &b.state;
    let speeds = b.dynamics.speeds;
    let (max_grad, max_grad2, at) = gradient_maxima(&s.grid, &s.u);
    let x2 = if track_x2 {
        Some(weighted_x(s, speeds, 2, None)?)
    } else {
        None
    };
    Ok((
        Record {
            t: s.t,
            e1: energy1(&s.grid, &s.u, &s.ut, speeds),
            max_grad,
            x2,
            max_grad2,
        },
        at,
    ))
}

/// Runs the 3D box from `config.initial`.
pub fn run_box3d(config: &SimConfig, tensors: &MaterialTensors) -> Result<SimReport> {
    config.validate()?;
    let grid = config.box_grid()?;
    let dynamics = Dynamics::new(tensors, config.nonlinear);
    let state = make_initial_data(grid, &config.initial, dynamics.speeds)?;
    run_box3d_from(state, dynamics, config)
}

/// Runs the 3D box from a given state.
pub fn run_box3d_from(state: FieldState, dynamics: Dynamics, config: &SimConfig) -> Result<SimReport> {
    run_box3d_observed(state, dynamics, config, |_| Ok(()))
}

/// As [`run_box3d_from`], calling `observe` on the state at every record.
pub fn run_box3d_observed(
    state: FieldState,
    dynamics: Dynamics,
    config: &SimConfig,
    mut observe: impl FnMut(&FieldState) -> Result<()>,
) -> Result<SimReport> {
    config.validate()?;
    let grid = state.grid;
    let c_max = dynamics.speeds.c1_sq.max(dynamics.speeds.c2_sq).sqrt();
    let dt_max = config.cfl * grid.spacing() / c_max;
    let limit = stability_limit_3d(&grid, &dynamics.a);
    if dt_max > limit {
        return Err(Error::Config(format!(
            "cfl {} gives dt = {dt_max:.4e}, above the stability limit {limit:.4e} of the 3D stencils",
            config.cfl
        )));
    }
    let (steps, dt) = step_count(config.t_end, dt_max);
    let mut b = Box3d::new(state, dynamics)?;
    let (first, _) = record_3d(&b, config.track_x2)?;
    let guard_tol = 1e-6 * b.state.u.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    observe(&b.state)?;
    let mut records = vec![first];
    let mut verdict = Verdict::Completed;
    for step in 1..=steps {
        if let Err(Error::NonFinite(t)) = b.step(dt) {
            verdict = Verdict::NonFinite { t };
            break;
        }
        if step % config.diagnostics_every != 0 && step != steps {
            continue;
        }
        let (rec, at) = record_3d(&b, config.track_x2)?;
        records.push(rec);
        observe(&b.state)?;
        let grad_hit = config.max_grad_threshold.is_some_and(|th| rec.max_grad >= th);
        if (first.max_grad2 > 0.0 && rec.max_grad2 >= config.blowup_factor * first.max_grad2) || grad_hit {
            verdict = Verdict::Blowup {
                t: rec.t,
                location: grid.point(at).into(),
            };
            break;
        }
        if grid.boundary() == Boundary::ZeroPadded && b.state.touches_guard(guard_tol) {
            verdict = Verdict::GuardReached { t: rec.t };
            break;
        }
    }
    Ok(SimReport {
        dt,
        steps,
        records,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::unit_null_material;

    fn tensors() -> MaterialTensors {
        MaterialTensors::compute(&unit_null_material(), 1.5).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        for cfl in [0.0, 1.0, 1.5] {
            let c = SimConfig {
                cfl,
                ..SimConfig::default()
            };
            assert!(matches!(c.validate(), Err(Error::Config(_))));
        }
        let c = SimConfig {
            t_end: -1.0,
            ..SimConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn steps_land_on_the_end_time() {
        let (n, dt) = step_count(1.0, 0.3);
        assert_eq!(n, 4);
        assert!((n as f64 * dt - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stability_limit_of_the_laplacian() {
        // c₂²Δ alone: ω²_max = 3·c²·16/(3h²) at θ = (π, π, π)
        let g = Grid3::new(16, 1.0, Boundary::Periodic).unwrap();
        let a = TensorA::from_coefficients(1.5, 1.0, 0.0, 0.0);
        let expected = 2.0 / (16.0f64 / (g.spacing() * g.spacing())).sqrt();
        assert!((stability_limit_3d(&g, &a) - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let g = Grid3::new(16, 4.0, Boundary::ZeroPadded).unwrap();
        let d = Dynamics::new(&tensors(), true);
        let s = step_box3d(&FieldState::zeros(g), &d, 0.01).unwrap();
        assert!(s.u.iter().chain(&s.ut).flatten().all(|&v| v == 0.0));
        assert_eq!(s.t, 0.01);
    }

    #[test]
    fn zero_data_completes_with_zero_diagnostics() {
        let config = SimConfig {
            n: 16,
            half_width: 4.0,
            t_end: 0.5,
            initial: InitialData {
                amplitude: 0.0,
                ..InitialData::default()
            },
            ..SimConfig::default()
        };
        let r = run_box3d(&config, &tensors()).unwrap();
        assert_eq!(r.verdict, Verdict::Completed);
        assert!(r
            .records
            .iter()
            .all(|r| r.e1 == 0.0 && r.max_grad == 0.0 && r.max_grad2 == 0.0));
        let csv = r.to_csv();
        assert!(csv.starts_with("t,E1,max_grad,X2,max_grad2\n0,0,0,,0\n"), "{csv}");
    }
}
