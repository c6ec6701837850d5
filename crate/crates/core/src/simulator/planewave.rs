//! Plane-wave reduction `u(t, x) = U(t, ⟨x, ξ⟩)` on a periodic line.
//!
//! Substitution gives `U_tt = A(ξ)U_ss + 2 b̂(U_ss, U_s)` where both
//! coefficients are read off the 3D operator, so the line and the box
//! share one set of tensors.

use rayon::prelude::*;

use super::{step_count, InitialData, InitialKind, Record, SimConfig, SimReport, Verdict};
use crate::error::{Error, Result};
use crate::fields::{Dynamics, Speeds};
use crate::sampling::Vec3;
use crate::tensors::MaterialTensors;

const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

/// Nodes `−L + (i + ½)h`, `h = 2L/n`, periodic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub n: usize,
    pub half_width: f64,
}

impl Line {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 || !(half_width > 0.0) {
            return Err(Error::Config(format!(
                "line needs n ≥ 8 and L > 0, got n = {n}, L = {half_width}"
            )));
        }
        Ok(Line { n, half_width })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }

    fn stencil(&self, f: &[[f64; 3]], i: usize, w: &[f64; 5], scale: f64) -> [f64; 3] {
        let n = self.n;
        let mut out = [0.0; 3];
        for (o, &c) in w.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let v = &f[(i + n + o - 2) % n];
            for k in 0..3 {
                out[k] += c * v[k];
            }
        }
        out.map(|x| x * scale)
    }

    /// `(∂ₛf, ∂ₛ²f)` at node `i`.
    pub fn derivs(&self, f: &[[f64; 3]], i: usize) -> ([f64; 3], [f64; 3]) {
        let h = self.spacing();
        (
            self.stencil(f, i, &D1, 1.0 / (12.0 * h)),
            self.stencil(f, i, &D2, 1.0 / (12.0 * h * h)),
        )
    }
}

/// Largest stable leapfrog step on the line for top speed `c_max`.
pub fn stability_limit_1d(line: &Line, c_max: f64) -> f64 {
    3f64.sqrt() / 2.0 * line.spacing() / c_max
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[derive(Debug, Clone)]
pub struct PlaneWave1d {
    pub line: Line,
    pub xi: Vec3,
    /// `A(ξ)` as `a_xi[i][j]`.
    pub a_xi: [[f64; 3]; 3],
    /// `b̂[i][j][k]`, contracted with `U_ss^j U_s^k`.
    pub bhat: [[[f64; 3]; 3]; 3],
    pub u: Vec<[f64; 3]>,
    pub ut: Vec<[f64; 3]>,
    pub t: f64,
    accel: Vec<[f64; 3]>,
}

impl PlaneWave1d {
    /// Zero state on `line` with coefficients reduced along the unit `xi`.
    pub fn new(line: Line, dynamics: &Dynamics, xi: Vec3) -> Result<Self> {
        if (xi.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "direction must be a unit vector, |ξ| = {}",
                xi.norm()
            )));
        }
        let hess = |j: usize| {
            let mut h = [0.0; 27];
            for l in 0..3 {
                for m in 0..3 {
                    h[(j * 3 + l) * 3 + m] = xi[l] * xi[m];
                }
            }
            h
        };
        let grad = |k: usize| {
            let mut g = [0.0; 9];
            for n in 0..3 {
                g[k * 3 + n] = xi[n];
            }
            g
        };
        let mut a_xi = [[0.0; 3]; 3];
        let mut bhat = [[[0.0; 3]; 3]; 3];
        for j in 0..3 {
            let col = dynamics.apply_a(&hess(j));
            for i in 0..3 {
                a_xi[i][j] = col[i];
            }
            if let Some(b) = &dynamics.b {
                for k in 0..3 {
                    let v = b.half(&hess(j), &grad(k));
                    for i in 0..3 {
                        bhat[i][j][k] = v[i];
                    }
                }
            }
        }
        let n = line.n;
        Ok(PlaneWave1d {
            line,
            xi,
            a_xi,
            bhat,
            u: vec![[0.0; 3]; n],
            ut: vec![[0.0; 3]; n],
            t: 0.0,
            accel: vec![[0.0; 3]; n],
        })
    }

    /// Sets the state from a profile `s ↦ (U, ∂ₜU)`.
    pub fn with_profile(mut self, profile: impl Fn(f64) -> ([f64; 3], [f64; 3])) -> Self {
        for i in 0..self.line.n {
            let (u, ut) = profile(self.line.coord(i));
            self.u[i] = u;
            self.ut[i] = ut;
        }
        self.accel = self.rhs();
        self
    }

    /// Largest eigenvalue square root of `A(ξ)`.
    pub fn max_speed(&self) -> f64 {
        let m = nalgebra::Matrix3::from_fn(|i, j| 0.5 * (self.a_xi[i][j] + self.a_xi[j][i]));
        nalgebra::SymmetricEigen::new(m).eigenvalues.max().max(0.0).sqrt()
    }

    fn rhs_at(&self, i: usize) -> [f64; 3] {
        let (d1, d2) = self.line.derivs(&self.u, i);
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for j in 0..3 {
                s += self.a_xi[k][j] * d2[j];
                for m in 0..3 {
                    s += 2.0 * self.bhat[k][j][m] * d2[j] * d1[m];
                }
            }
            *o = s;
        }
        out
    }

    /// `U_tt` at every node.
    pub fn rhs(&self) -> Vec<[f64; 3]> {
        (0..self.line.n).into_par_iter().map(|i| self.rhs_at(i)).collect()
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        let half = 0.5 * dt;
        for ((u, v), a) in self.u.iter_mut().zip(self.ut.iter_mut()).zip(&self.accel) {
            for c in 0..3 {
                v[c] += half * a[c];
                u[c] += dt * v[c];
            }
        }
        self.accel = self.rhs();
        for (v, a) in self.ut.iter_mut().zip(&self.accel) {
            for c in 0..3 {
                v[c] += half * a[c];
            }
        }
        self.t += dt;
        if self.u.iter().chain(&self.ut).flatten().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(self.t))
        }
    }

    /// `½(|U_t|² + U_s·A(ξ)U_s)` per node.
    pub fn energy_density(&self) -> Vec<f64> {
        (0..self.line.n)
            .map(|i| {
                let (d1, _) = self.line.derivs(&self.u, i);
                let mut e: f64 = self.ut[i].iter().map(|v| v * v).sum();
                for a in 0..3 {
                    for b in 0..3 {
                        e += d1[a] * self.a_xi[a][b] * d1[b];
                    }
                }
                0.5 * e
            })
            .collect()
    }

    /// Energy per unit transverse area.
    pub fn energy(&self) -> f64 {
        self.line.spacing() * self.energy_density().iter().sum::<f64>()
    }

    /// Columns `s,u1,u2,u3,ut1,ut2,ut3`.
    pub fn profile_csv(&self) -> String {
        let mut out = String::from("s,u1,u2,u3,ut1,ut2,ut3\n");
        for i in 0..self.line.n {
            let (u, v) = (self.u[i], self.ut[i]);
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.line.coord(i),
                u[0],
                u[1],
                u[2],
                v[0],
                v[1],
                v[2]
            ));
        }
        out
    }

    /// `max|U_s|`, `max|U_ss|` and the node of the latter.
    pub fn maxima(&self) -> (f64, f64, usize) {
        let mut out = (0.0, 0.0, 0);
        for i in 0..self.line.n {
            let (d1, d2) = self.line.derivs(&self.u, i);
            out.0 = f64::max(out.0, norm(&d1));
            let h = norm(&d2);
            if h > out.1 {
                out.1 = h;
                out.2 = i;
            }
        }
        out
    }

    fn record(&self) -> (Record, usize) {
        let (max_grad, max_grad2, at) = self.maxima();
        (
            Record {
                t: self.t,
                e1: self.energy(),
                max_grad,
                x2: None,
                max_grad2,
            },
            at,
        )
    }
}

/// Initial profile of `data` along its own direction.
fn profile(data: &InitialData, speeds: Speeds) -> Result<impl Fn(f64) -> ([f64; 3], [f64; 3]) + '_> {
    if data.kind == InitialKind::DilationPerturbation {
        return Err(Error::Config("the line supports plane pulses only".into()));
    }
    let (pol, speed) = data.polarization_and_speed(speeds)?;
    Ok(move |s| data.plane_profile(s, &pol, speed))
}

/// Runs the periodic line along `xi` with `config.n` nodes on `[−L, L]`.
///
/// Blowup is checked every step; records are kept every
/// `diagnostics_every` steps and at the stopping time.
pub fn run_planewave_1d(config: &SimConfig, tensors: &MaterialTensors, xi: Vec3) -> Result<SimReport> {
    run_planewave_1d_observed(config, tensors, xi, |_| Ok(()))
}

/// As [`run_planewave_1d`], calling `observe` at every record.
pub fn run_planewave_1d_observed(
    config: &SimConfig,
    tensors: &MaterialTensors,
    xi: Vec3,
    mut observe: impl FnMut(&PlaneWave1d) -> Result<()>,
) -> Result<SimReport> {
    config.validate()?;
    let line = Line::new(config.n, config.half_width)?;
    let dynamics = Dynamics::new(tensors, config.nonlinear);
    let data = InitialData {
        direction: xi.into(),
        ..config.initial.clone()
    };
    data.validate()?;
    let mut pw = PlaneWave1d::new(line, &dynamics, xi)?.with_profile(profile(&data, dynamics.speeds)?);
    let c_max = pw.max_speed();
    let (steps, dt) = step_count(config.t_end, config.cfl * line.spacing() / c_max);

    let (first, _) = pw.record();
    observe(&pw)?;
    let mut records = vec![first];
    let mut verdict = Verdict::Completed;
    for step in 1..=steps {
        if let Err(Error::NonFinite(t)) = pw.step(dt) {
            verdict = Verdict::NonFinite { t };
            break;
        }
        let (max_grad, max_grad2, at) = pw.maxima();
        let grad_hit = config.max_grad_threshold.is_some_and(|th| max_grad >= th);
        let blown = (first.max_grad2 > 0.0 && max_grad2 >= config.blowup_factor * first.max_grad2) || grad_hit;
        if blown || step % config.diagnostics_every == 0 || step == steps {
            records.push(pw.record().0);
            observe(&pw)?;
        }
        if blown {
            let s = line.coord(at);
            verdict = Verdict::Blowup {
                t: pw.t,
                location: (xi * s).into(),
            };
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

    #[test]
    fn line_stencils_are_fourth_order() {
        let err = |n: usize| {
            let line = Line::new(n, std::f64::consts::PI).unwrap();
            let f: Vec<[f64; 3]> = (0..n).map(|i| [line.coord(i).sin(), 0.0, 0.0]).collect();
            (0..n)
                .map(|i| {
                    let (d1, d2) = line.derivs(&f, i);
                    let x = line.coord(i);
                    (d1[0] - x.cos()).abs().max((d2[0] + x.sin()).abs())
                })
                .fold(0.0, f64::max)
        };
        assert!(err(16) / err(32) > 14.0);
    }

    #[test]
    fn reduced_coefficients_along_an_axis() {
        let t = MaterialTensors::compute(&unit_null_material(), 1.5).unwrap();
        let d = Dynamics::new(&t, true);
        let pw = PlaneWave1d::new(Line::new(8, 1.0).unwrap(), &d, Vec3::x()).unwrap();
        let expected = [t.c1_sq, t.c2_sq, t.c2_sq];
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { expected[i] } else { 0.0 };
                assert!((pw.a_xi[i][j] - e).abs() < 1e-8);
            }
        }
        // longitudinal self-interaction vanishes for a null material
        assert!(pw.bhat[0][0][0].abs() < 1e-5);
        assert!((pw.max_speed() - t.c1_sq.sqrt()).abs() < 1e-8);
    }
}
