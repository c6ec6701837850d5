//! Solver behaviour against translation, characteristics, symmetry and
//! scaling oracles.

use prestress::constitutive::{unit_null_material, unit_witness_material};
use prestress::fields::{Boundary, Dynamics, FieldState, Grid3};
use prestress::sampling::Vec3;
use prestress::simulator::{
    make_initial_data, oracle_for_pulse, run_box3d, run_planewave_1d, stability_limit_3d, Box3d, InitialData,
    InitialKind, Line, PlaneWave1d, SimConfig, Verdict,
};
use prestress::tensors::MaterialTensors;
use prestress::{Error, Mat3};

fn null() -> MaterialTensors {
    MaterialTensors::compute(&unit_null_material(), 1.5).unwrap()
}

fn witness() -> MaterialTensors {
    MaterialTensors::compute(&unit_witness_material(), 1.5).unwrap()
}

fn max_norm(f: &[[f64; 3]]) -> f64 {
    f.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

fn max_diff(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn dichotomy_config(n: usize, amplitude: f64, t_end: f64) -> SimConfig {
    SimConfig {
        n,
        half_width: 10.0,
        t_end,
        diagnostics_every: 500,
        initial: InitialData {
            amplitude,
            width: 4.0,
            ..InitialData::default()
        },
        ..SimConfig::default()
    }
}

#[test]
fn linear_pulse_translates_at_c1() {
    let t = null();
    let c1 = t.c1_sq.sqrt();
    let line = Line::new(2048, 10.0).unwrap();
    let d = Dynamics::new(&t, false);
    let data = InitialData::default();
    let (pol, speed) = data.polarization_and_speed(d.speeds).unwrap();
    let mut pw = PlaneWave1d::new(line, &d, Vec3::x())
        .unwrap()
        .with_profile(|s| data.plane_profile(s, &pol, speed));
    let center = |pw: &PlaneWave1d| {
        let e = pw.energy_density();
        let total: f64 = e.iter().sum();
        e.iter().enumerate().map(|(i, v)| v * line.coord(i)).sum::<f64>() / total
    };
    let x0 = center(&pw);
    let steps = 1500;
    let dt = 0.4 * line.spacing() / c1;
    for _ in 0..steps {
        pw.step(dt).unwrap();
    }
    let moved = center(&pw) - x0;
    let expected = c1 * dt * steps as f64;
    assert!(
        (moved - expected).abs() <= 2.0 * line.spacing(),
        "{moved} vs {expected}"
    );
}

#[test]
fn shock_time_follows_the_characteristics() {
    let t = witness();
    let c1 = t.c1_sq.sqrt();
    let kappa = unit_witness_material().tau111(1.5).unwrap();
    for eps in [0.02, 0.05] {
        let config = dichotomy_config(2048, eps, 80.0);
        let predicted = oracle_for_pulse(c1, kappa, &config.initial, 1e3).unwrap();
        let report = run_planewave_1d(&config, &t, Vec3::x()).unwrap();
        let Verdict::Blowup { t: hit, .. } = report.verdict else {
            panic!("ε = {eps}: {:?}", report.verdict)
        };
        assert!(
            (hit - predicted).abs() < 0.2 * predicted,
            "ε = {eps}: {hit} vs {predicted}"
        );
    }
}

#[test]
fn null_material_completes_at_two_resolutions() {
    let t = null();
    let t_end = 40.0 / t.c1_sq.sqrt();
    let growth: Vec<f64> = [2048, 4096]
        .iter()
        .map(|&n| {
            let r = run_planewave_1d(&dichotomy_config(n, 0.05, t_end), &t, Vec3::x()).unwrap();
            assert_eq!(r.verdict, Verdict::Completed);
            r.gradient_growth()
        })
        .collect();
    assert!(growth.iter().all(|&g| g <= 3.0), "{growth:?}");
    assert!((growth[0] - growth[1]).abs() < 0.05 * growth[1]);
}

#[test]
fn transverse_pulses_do_not_steepen() {
    for t in [null(), witness()] {
        for n in [1024, 2048] {
            let config = SimConfig {
                initial: InitialData {
                    kind: InitialKind::TransversePulse,
                    width: 4.0,
                    ..InitialData::default()
                },
                ..dichotomy_config(n, 0.05, 40.0)
            };
            let r = run_planewave_1d(&config, &t, Vec3::new(0.0, 0.6, 0.8)).unwrap();
            assert_eq!(r.verdict, Verdict::Completed);
            assert!(r.gradient_growth() <= 3.0, "{}", r.gradient_growth());
        }
    }
}

/// `U(s)` sampled at `s = c + h/2`, where `c` runs over the line nodes,
/// sits exactly on the diagonal projections of the box nodes.
#[test]
fn one_dimensional_reduction_matches_the_box() {
    let t = witness();
    let (n, l) = (64, 10.0);
    let grid = Grid3::new(n, l, Boundary::Periodic).unwrap();
    let xi = Vec3::new(1.0, 1.0, 0.0) / 2f64.sqrt();
    let period = 2f64.sqrt() * l;
    let line = Line::new(n, l / 2f64.sqrt()).unwrap();
    let shift = 0.5 * line.spacing();
    let d = Dynamics::new(&t, true);
    let data = InitialData {
        width: 4.0,
        direction: xi.into(),
        ..InitialData::default()
    };
    let (pol, speed) = data.polarization_and_speed(d.speeds).unwrap();
    let wrap = |s: f64| s - period * ((s + 0.5 * period) / period).floor();
    let state = FieldState::from_fn(grid, 0.0, |x| data.plane_profile(wrap(x.dot(&xi)), &pol, speed));
    let mut pw = PlaneWave1d::new(line, &d, xi)
        .unwrap()
        .with_profile(|c| data.plane_profile(wrap(c + shift), &pol, speed));

    let t_end = 2.0;
    let steps = 40;
    let mut bx = Box3d::new(state, d).unwrap();
    for _ in 0..steps {
        bx.step(t_end / steps as f64).unwrap();
        pw.step(t_end / steps as f64).unwrap();
    }
    let scale = max_norm(&pw.u);
    let mut worst: f64 = 0.0;
    for p in 0..grid.len() {
        let s = wrap(grid.point(p).dot(&xi));
        let m = ((s - shift + line.half_width) / line.spacing() - 0.5).round() as i64;
        let u1 = pw.u[m.rem_euclid(n as i64) as usize];
        let u3 = bx.state.u[p];
        worst = (0..3).fold(worst, |w, k| w.max((u1[k] - u3[k]).abs()));
    }
    assert!(worst < 0.01 * scale, "{worst} vs {scale}");
}

fn rotate_state(state: &FieldState, q: &Mat3) -> FieldState {
    let g = state.grid;
    let h = g.spacing();
    let node = |c: f64| ((c + g.half_width()) / h - 0.5).round() as usize;
    let mut out = FieldState::zeros(g);
    for p in 0..g.len() {
        let y = q.transpose() * g.point(p);
        let src = g.index(node(y[0]), node(y[1]), node(y[2]));
        out.u[p] = (q * Vec3::from(state.u[src])).into();
        out.ut[p] = (q * Vec3::from(state.ut[src])).into();
    }
    out.t = state.t;
    out
}

#[test]
fn evolution_commutes_with_grid_rotations() {
    let g = Grid3::new(24, 6.0, Boundary::Periodic).unwrap();
    let state = FieldState::from_fn(g, 0.0, |x| {
        let y = x - Vec3::new(0.7, -0.4, 0.3);
        let e = 0.05 * (-0.5 * y.norm_squared()).exp();
        (
            [y[1] * e, 0.3 * y[0] * y[0] * e, -0.5 * y[2] * e],
            [0.2 * e, 0.0, y[0] * e],
        )
    });
    let d = Dynamics::new(&witness(), true);
    let turns = [
        Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0),
        Mat3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0),
        Mat3::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0),
    ];
    let evolve = |s: FieldState| {
        let mut b = Box3d::new(s, d.clone()).unwrap();
        for _ in 0..10 {
            b.step(0.05).unwrap();
        }
        b.state
    };
    let plain = evolve(state.clone());
    for q in turns {
        let a = rotate_state(&plain, &q);
        let b = evolve(rotate_state(&state, &q));
        let err = max_diff(&a.u, &b.u).max(max_diff(&a.ut, &b.ut));
        assert!(err < 1e-6 * max_norm(&plain.u), "{err}");
    }
}

#[test]
fn steps_beyond_the_stability_limit_blow_up() {
    let g = Grid3::new(24, 8.0, Boundary::Periodic).unwrap();
    let d = Dynamics::new(&witness(), true);
    let limit = stability_limit_3d(&g, &d.a);
    let data = InitialData {
        kind: InitialKind::DilationPerturbation,
        width: 3.0,
        ..InitialData::default()
    };
    let mut b = Box3d::new(make_initial_data(g, &data, d.speeds).unwrap(), d.clone()).unwrap();
    let failed = (0..200).any(|_| matches!(b.step(1.2 * limit), Err(Error::NonFinite(_))));
    assert!(failed);

    // the same data is stable just below the limit
    let mut b = Box3d::new(make_initial_data(g, &data, d.speeds).unwrap(), d).unwrap();
    assert!((0..200).all(|_| b.step(0.9 * limit).is_ok()));
}

#[test]
fn unstable_or_oversized_configurations_are_rejected() {
    let t = null();
    let unstable = SimConfig {
        n: 16,
        half_width: 4.0,
        cfl: 0.9,
        ..SimConfig::default()
    };
    assert!(matches!(run_box3d(&unstable, &t), Err(Error::Config(_))));
    let huge = SimConfig {
        n: 128,
        ..SimConfig::default()
    };
    assert!(matches!(run_box3d(&huge, &t), Err(Error::Config(_))));
}

#[test]
fn dilation_gradient_decays_after_focusing() {
    let t = null();
    let c1 = t.c1_sq.sqrt();
    let finals: Vec<f64> = [48, 64]
        .iter()
        .map(|&n| {
            let config = SimConfig {
                n,
                half_width: 12.0,
                t_end: 12.0 / (2.0 * c1),
                diagnostics_every: 1,
                initial: InitialData {
                    kind: InitialKind::DilationPerturbation,
                    amplitude: 0.01,
                    width: 4.0,
                    ..InitialData::default()
                },
                ..SimConfig::default()
            };
            let r = run_box3d(&config, &t).unwrap();
            assert_eq!(r.verdict, Verdict::Completed);
            let tail: Vec<f64> = r
                .records
                .iter()
                .filter(|rec| rec.t >= 0.75 * config.t_end)
                .map(|rec| rec.max_grad)
                .collect();
            assert!(tail.len() > 3);
            assert!(tail.windows(2).all(|w| w[1] < w[0]), "{tail:?}");
            r.last().unwrap().max_grad
        })
        .collect();
    assert!((finals[0] - finals[1]).abs() < 0.1 * finals[1], "{finals:?}");
}

#[test]
fn nonlinear_remainder_scales_quadratically() {
    let g = Grid3::new(24, 8.0, Boundary::Periodic).unwrap();
    let d = Dynamics::new(&witness(), true);
    let gap = |eps: f64| {
        let data = InitialData {
            kind: InitialKind::DilationPerturbation,
            amplitude: eps,
            width: 3.0,
            ..InitialData::default()
        };
        let s = make_initial_data(g, &data, d.speeds).unwrap();
        let mut full = Box3d::new(s.clone(), d.clone()).unwrap();
        let mut lin = Box3d::new(s, d.linear()).unwrap();
        for _ in 0..20 {
            full.step(0.1).unwrap();
            lin.step(0.1).unwrap();
        }
        max_diff(&full.state.u, &lin.state.u)
    };
    let ratio = gap(1e-4) / gap(5e-5);
    assert!((ratio - 4.0).abs() < 0.3 * 4.0, "{ratio}");
}

#[test]
fn plane_wave_forcing_follows_the_null_structure() {
    let g = Grid3::new(32, 8.0, Boundary::Periodic).unwrap();
    let forcing = |t: &MaterialTensors, s: &FieldState| {
        let d = Dynamics::new(t, true);
        let full = d.rhs(&g, &s.u);
        let lin = d.linear().rhs(&g, &s.u);
        full.iter()
            .zip(&lin)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]])
            .collect::<Vec<_>>()
    };
    let pulse = |xi: [f64; 3]| InitialData {
        direction: xi,
        width: 3.0,
        ..InitialData::default()
    };
    let speeds = Dynamics::new(&null(), false).speeds;
    let single = make_initial_data(g, &pulse([1.0, 0.0, 0.0]), speeds).unwrap();
    let self_null = max_norm(&forcing(&null(), &single));
    let self_witness = max_norm(&forcing(&witness(), &single));
    assert!(self_witness > 1e-4);
    assert!(self_null < 1e-4 * self_witness, "{self_null} vs {self_witness}");

    // crossing longitudinal pulses still interact in a null material; the
    // comparison stays away from the faces, where oblique pulses wrap
    let other = make_initial_data(g, &pulse([0.6, 0.8, 0.0]), speeds).unwrap();
    let mut crossing = single.clone();
    for (u, v) in crossing.u.iter_mut().zip(&other.u) {
        for k in 0..3 {
            u[k] += v[k];
        }
    }
    let cross = forcing(&null(), &crossing);
    let inner = (0..g.len())
        .filter(|&p| g.point(p).norm() < 4.0)
        .map(|p| cross[p])
        .collect::<Vec<_>>();
    assert!(max_norm(&inner) > 1e-2 * self_witness);
}
