//! Command-line front end. JSON reports go to stdout, summaries to stderr.
//!
//! Exit codes: 0 success or completed run, 1 usage or configuration
//! error, 2 failed check or blowup.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use prestress::constitutive::{check_material, MaterialSpec, StoredEnergyModel};
use prestress::fields::{write_snapshot, Boundary, Dynamics};
use prestress::sampling::{random_direction, rng, Vec3};
use prestress::simulator::{
    make_initial_data, run_box3d_observed, run_planewave_1d_observed, InitialData, InitialKind, SimConfig, SimReport,
};
use prestress::tensors::MaterialTensors;
use prestress::verify::{parse_selector, run_suite, VerifyContext};
use prestress::Error;

#[derive(Parser)]
#[command(
    name = "prestress",
    version,
    about = "Prestressed hyperelasticity: materials, tensors, checks and simulations"
)]
struct Cli {
    /// Seed for randomized trials (directions, rotations).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Material specification files.
    Material {
        #[command(subcommand)]
        action: MaterialCmd,
    },
    /// Coefficient tensors.
    Tensor {
        #[command(subcommand)]
        action: TensorCmd,
    },
    /// Run property suites: a name, a comma-separated list, or `all`.
    Verify {
        suite: String,
        /// Material for the material-dependent suites; defaults to the unit null material.
        #[arg(long)]
        material: Option<PathBuf>,
        #[arg(long, default_value_t = 1.5)]
        lambda: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Time integration of the truncated system.
    Simulate(SimulateArgs),
}

#[derive(Subcommand)]
enum MaterialCmd {
    /// Speeds, hyperbolicity and the null condition at each dilation.
    Check {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0])]
        lambda: Vec<f64>,
    },
    /// Builds the null material with the given bulk modulus and shear speed squared.
    Construct {
        #[arg(long)]
        bulk: String,
        #[arg(long)]
        c2sq: String,
        #[arg(long, short)]
        out: PathBuf,
        /// Working dilation interval `lo,hi`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        range: Option<Vec<f64>>,
    },
}

#[derive(Subcommand)]
enum TensorCmd {
    /// Writes A and B at one dilation as JSON.
    Dump {
        spec: PathBuf,
        #[arg(long, default_value_t = 1.5)]
        lambda: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Planewave,
    Box3d,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Longitudinal,
    Transverse,
    Dilation,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    material: PathBuf,
    #[arg(long, default_value_t = 1.5)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = Mode::Planewave)]
    mode: Mode,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L")]
    half_width: Option<f64>,
    #[arg(long, default_value_t = 0.4)]
    cfl: f64,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 4.0)]
    width: f64,
    #[arg(long, value_enum, default_value_t = Kind::Longitudinal)]
    kind: Kind,
    /// `x,y,z` (normalized) or `random` (drawn from the seed).
    #[arg(long, default_value = "1,0,0")]
    direction: String,
    /// Defaults to 40/c₁.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    blowup_factor: f64,
    /// Linear flow only.
    #[arg(long)]
    linear: bool,
    /// Zero-padded instead of periodic box.
    #[arg(long)]
    zero_padded: bool,
    /// Track the weighted norm X₂ (box only).
    #[arg(long)]
    x2: bool,
    #[arg(long)]
    diagnostics_every: Option<usize>,
    /// CSV time series.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for state snapshots at every record.
    #[arg(long)]
    snapshots: Option<PathBuf>,
}

/// Failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(1, e.to_string())
    }
}

fn load_model(path: &Path) -> Result<StoredEnergyModel, Fail> {
    Ok(MaterialSpec::load(path)?.build()?)
}

fn print_json(v: &serde_json::Value) {
    use std::io::Write;
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(
        std::io::stdout().lock(),
        "{}",
        serde_json::to_string_pretty(v).expect("reports serialize")
    );
}

fn material_check(spec: &Path, lambdas: &[f64]) -> Result<u8, Fail> {
    let model = load_model(spec)?;
    let rows = lambdas
        .iter()
        .map(|&l| check_material(&model, l))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &rows {
        eprintln!(
            "λ = {:<6} c1² = {:<10.6} c2² = {:<10.6} hyperbolic = {:<5} null = {:<5} τ111 = {:.3e}",
            r.lambda, r.c1_sq, r.c2_sq, r.hyperbolic, r.null, r.tau111
        );
    }
    print_json(&json!({ "spec": spec, "reports": rows }));
    Ok(if rows.iter().all(|r| r.hyperbolic) { 0 } else { 2 })
}

fn material_construct(bulk: &str, c2sq: &str, out: &Path, range: Option<Vec<f64>>) -> Result<u8, Fail> {
    let range = range.map_or(prestress::constitutive::DEFAULT_LAMBDA_RANGE, |r| [r[0], r[1]]);
    let (spec, model) = MaterialSpec::constructed(bulk, c2sq, range)?;
    spec.save(out)?;
    let at_one = check_material(&model, 1.0)?;
    eprintln!("wrote {} (f = {})", out.display(), model.f);
    print_json(&json!({ "out": out, "spec": spec, "check_at_1": at_one }));
    Ok(0)
}

fn tensor_dump(spec: &Path, lambda: f64, out: Option<&Path>) -> Result<u8, Fail> {
    let t = MaterialTensors::compute(&load_model(spec)?, lambda)?;
    let doc = t.dump_json();
    match out {
        Some(p) => {
            std::fs::write(p, serde_json::to_string_pretty(&doc).expect("serializes"))
                .map_err(|e| Fail(1, format!("{}: {e}", p.display())))?;
            eprintln!("wrote {}", p.display());
            print_json(&json!({ "out": p, "lambda": lambda, "c1_sq": t.c1_sq, "c2_sq": t.c2_sq }));
        }
        None => print_json(&doc),
    }
    Ok(0)
}

fn verify(suite: &str, material: Option<&Path>, lambda: f64, trials: usize, seed: u64) -> Result<u8, Fail> {
    let suites = parse_selector(suite)?;
    let mut ctx = VerifyContext {
        lambda,
        seed,
        trials,
        ..VerifyContext::default()
    };
    if let Some(p) = material {
        ctx.model = load_model(p)?;
    }
    let reports = suites
        .iter()
        .map(|&s| run_suite(s, &ctx))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &reports {
        eprintln!(
            "{:<13} {} (max residual {:.2e})",
            r.suite.name(),
            if r.passed { "pass" } else { "FAIL" },
            r.max_residual
        );
        for c in r.checks.iter().filter(|c| !c.passed) {
            eprintln!(
                "    {}: {:.3e} > {:.1e} {}",
                c.name,
                c.residual,
                c.tolerance,
                c.error.as_deref().unwrap_or("")
            );
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    print_json(&json!({ "passed": passed, "suites": reports }));
    Ok(if passed { 0 } else { 2 })
}

fn parse_direction(s: &str, seed: u64) -> Result<Vec3, Fail> {
    if s == "random" {
        return Ok(random_direction(&mut rng(seed)));
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Fail(1, format!("direction `{s}`: {e}")))?;
    let v = match parts[..] {
        [x, y, z] => Vec3::new(x, y, z),
        _ => return Err(Fail(1, format!("direction `{s}` needs three components"))),
    };
    if !v.norm().is_normal() {
        return Err(Fail(1, "direction must be finite and nonzero".into()));
    }
    Ok(v.normalize())
}

fn simulate(args: &SimulateArgs, seed: u64) -> Result<u8, Fail> {
    let tensors = MaterialTensors::compute(&load_model(&args.material)?, args.lambda)?;
    let xi = parse_direction(&args.direction, seed)?;
    let planewave = matches!(args.mode, Mode::Planewave);
    let kind = match args.kind {
        Kind::Longitudinal => InitialKind::LongitudinalPulse,
        Kind::Transverse => InitialKind::TransversePulse,
        Kind::Dilation => InitialKind::DilationPerturbation,
    };
    let config = SimConfig {
        lambda: args.lambda,
        n: args.n.unwrap_or(if planewave { 2048 } else { 48 }),
        half_width: args.half_width.unwrap_or(10.0),
        boundary: if args.zero_padded {
            Boundary::ZeroPadded
        } else {
            Boundary::Periodic
        },
        cfl: args.cfl,
        t_end: args.t_end.unwrap_or(40.0 / tensors.c1_sq.sqrt()),
        diagnostics_every: args.diagnostics_every.unwrap_or(if planewave { 200 } else { 5 }),
        blowup_factor: args.blowup_factor,
        max_grad_threshold: None,
        nonlinear: !args.linear,
        track_x2: args.x2,
        initial: InitialData {
            kind,
            amplitude: args.eps,
            width: args.width,
            direction: xi.into(),
            polarization: None,
        },
    };
    config.validate()?;
    if let Some(dir) = &args.snapshots {
        std::fs::create_dir_all(dir).map_err(|e| Fail(1, format!("{}: {e}", dir.display())))?;
    }
    let mut index = 0usize;
    let report: SimReport = if planewave {
        run_planewave_1d_observed(&config, &tensors, xi, |pw| {
            if let Some(dir) = &args.snapshots {
                std::fs::write(dir.join(format!("line_{index:05}.csv")), pw.profile_csv())?;
                index += 1;
            }
            Ok(())
        })?
    } else {
        let dynamics = Dynamics::new(&tensors, config.nonlinear);
        let state = make_initial_data(config.box_grid()?, &config.initial, dynamics.speeds)?;
        run_box3d_observed(state, dynamics, &config, |s| {
            if let Some(dir) = &args.snapshots {
                write_snapshot(dir.join(format!("state_{index:05}.bin")), s)?;
                index += 1;
            }
            Ok(())
        })?
    };
    if let Some(p) = &args.out {
        report.write_csv(p)?;
    }
    let code = report.verdict.exit_code() as u8;
    eprintln!(
        "{} steps of dt = {:.4e}: {:?}, max|∇u| growth {:.3}",
        report.steps,
        report.dt,
        report.verdict,
        report.gradient_growth()
    );
    print_json(&json!({
        "config": config,
        "dt": report.dt,
        "steps": report.steps,
        "verdict": report.verdict,
        "records": report.records.len(),
        "gradient_growth": report.gradient_growth(),
        "energy_drift": report.energy_drift(),
        "csv": args.out,
    }));
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Material { action } => match action {
            MaterialCmd::Check { spec, lambda } => material_check(spec, lambda),
            MaterialCmd::Construct { bulk, c2sq, out, range } => material_construct(bulk, c2sq, out, range.clone()),
        },
        Command::Tensor {
            action: TensorCmd::Dump { spec, lambda, out },
        } => tensor_dump(spec, *lambda, out.as_deref()),
        Command::Verify {
            suite,
            material,
            lambda,
            trials,
        } => verify(suite, material.as_deref(), *lambda, *trials, cli.seed),
        Command::Simulate(args) => simulate(args, cli.seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
