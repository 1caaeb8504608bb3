//! Command-line front end: argument parsing, dispatch and report rendering.
//!
//! [`run`] takes the argument vector and two output streams so that the
//! binary and the tests share one code path.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bibo_core::io::{fmt_f64, load_signal_csv, read_spec, write_signal_csv, write_table};
use bibo_core::laplace::{
    halfplane_bound_probe, invert_laplace, GrowthFlag, InversionConfig, InversionMethod, ProbeConfig, ProbeResult,
};
use bibo_core::perturbation::{
    additive_decomposition_check, additive_decomposition_check_dense, assert_counterexample, verify_counterexample,
    CounterexampleConfig, DecompositionReport,
};
use bibo_core::quadrature::QuadratureConfig;
use bibo_core::simulate::{empirical_bibo_ratio, simulate_output, InputSuite, Probe, DEFAULT_SEED};
use bibo_core::spectral::{
    check_cond_riesz, check_finite_unstable, check_fractional_orders, check_impulse_l1, evaluate_transfer_batch,
    impulse_density,
};
use bibo_core::{
    BVMeasure, BiboReport, Complex64, Condition, Error, Exec, Provenance, Quantity, Signal, SpectralSystem, Verdict,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "bibo",
    version,
    about = "BIBO stability analysis for truncated spectral systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Bromwich,
    Talbot,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Primary artifact path (stdout when omitted).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct Grid {
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub tmax: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the stability checkers and the half-plane probe.
    Analyze {
        spec: PathBuf,
        /// Fractional orders `alpha,beta` of B and C.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        orders: Option<Vec<f64>>,
        /// Sector constant K in |Im λ| ≤ K·|Re λ|.
        #[arg(long, default_value_t = 10.0)]
        sector: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Sample the impulse density on a grid.
    Impulse {
        spec: PathBuf,
        #[command(flatten)]
        grid: Grid,
        /// Total-variation report (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Sample G(σ + iω) for ω in [−omega_max, omega_max].
    Transfer {
        spec: PathBuf,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 10.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Simulate the output for a given input (a unit step by default) and
    /// measure the empirical BIBO ratio.
    Simulate {
        spec: PathBuf,
        /// Input CSV (`t,re,im`).
        #[arg(long)]
        signal: Option<PathBuf>,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        n_inputs: usize,
        /// Ratio report (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Invert G − α numerically.
    Invlap {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Bromwich)]
        method: Method,
        #[arg(long, default_value_t = 32)]
        nodes: usize,
        /// Contour shift.
        #[arg(long)]
        sigma: Option<f64>,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        output: Output,
    },
    /// Perturbation demonstrations.
    Perturb {
        #[command(subcommand)]
        demo: Demo,
    },
    #[command(name = "perturb-demo-mult", hide = true)]
    PerturbDemoMult(MultArgs),
    #[command(name = "perturb-demo-add", hide = true)]
    PerturbDemoAdd(AddArgs),
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// Multiplicative counterexample: bounded G, unbounded perturbed G̃.
    DemoMult(MultArgs),
    /// Additive decomposition residual.
    DemoAdd(AddArgs),
}

#[derive(Debug, Args)]
pub struct MultArgs {
    /// Number of mode pairs.
    #[arg(long = "N", default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_tilde: f64,
    /// CSV of G̃ along the real axis.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AddArgs {
    #[arg(long = "N", default_value_t = 50)]
    pub n: usize,
    /// Use a full perturbation matrix instead of a diagonal one.
    #[arg(long)]
    pub dense: bool,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::from(e))
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Core(e) => e.kind(),
            Failure::Usage(_) => "Usage",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Usage(m) => m.clone(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::AssertionFailure { .. }) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct ErrorPayload<'a> {
    error: &'a str,
    message: String,
}

fn write_error(err: &mut dyn Write, kind: &str, message: String) {
    let payload = ErrorPayload { error: kind, message };
    let _ = writeln!(
        err,
        "{}",
        serde_json::to_string(&payload).expect("error payload serialises")
    );
}

/// Parses `args` (including the program name) and executes the command.
///
/// Returns the process exit code: 0 on success, 1 on parse or validation
/// errors, 2 when a demo's assertion fails. Errors are written to `err` as a
/// single JSON object.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            write_error(err, "Usage", e.render().to_string().trim_end().to_string());
            return 1;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            write_error(err, f.kind(), f.message());
            f.exit_code()
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Analyze {
            spec,
            orders,
            sector,
            output,
        } => analyze(&spec, orders.as_deref(), sector, &output, out),
        Command::Impulse {
            spec,
            grid,
            report,
            output,
        } => impulse(&spec, &grid, report.as_deref(), &output, out),
        Command::Transfer {
            spec,
            sigma,
            omega_max,
            points,
            output,
        } => transfer(&spec, sigma, omega_max, points, &output, out),
        Command::Simulate {
            spec,
            signal,
            grid,
            seed,
            n_inputs,
            report,
            output,
        } => simulate(
            &spec,
            signal.as_deref(),
            &grid,
            seed,
            n_inputs,
            report.as_deref(),
            &output,
            out,
        ),
        Command::Invlap {
            spec,
            method,
            nodes,
            sigma,
            grid,
            output,
        } => invlap(&spec, method, nodes, sigma, &grid, &output, out),
        Command::Perturb {
            demo: Demo::DemoMult(a),
        }
        | Command::PerturbDemoMult(a) => demo_mult(&a, out),
        Command::Perturb { demo: Demo::DemoAdd(a) } | Command::PerturbDemoAdd(a) => demo_add(&a, out),
    }
}

/// Writes to `path` when given, otherwise to `out`.
fn emit(path: Option<&Path>, out: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            body(&mut f)?;
            f.flush()?;
            Ok(())
        }
        None => body(out),
    }
}

fn emit_json<T: Serialize>(path: Option<&Path>, out: &mut dyn Write, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    emit(path, out, |w| {
        writeln!(w, "{text}")?;
        Ok(())
    })
}

/// A numeric table as CSV or as `{"columns": [...], "rows": [[...]]}`.
fn emit_table(output: &Output, out: &mut dyn Write, header: &[&str], rows: Vec<Vec<f64>>) -> CliResult<()> {
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(output.out.as_deref(), out, |w| Ok(write_table(w, header, rows)?)),
        Format::Json => {
            #[derive(Serialize)]
            struct Table<'a> {
                columns: &'a [&'a str],
                rows: Vec<Vec<f64>>,
            }
            emit_json(output.out.as_deref(), out, &Table { columns: header, rows })
        }
    }
}

fn check_grid(grid: &Grid) -> CliResult<usize> {
    if !(grid.dt.is_finite() && grid.dt > 0.0) {
        return Err(Failure::Usage(format!("--dt must be positive (got {})", grid.dt)));
    }
    if !(grid.tmax.is_finite() && grid.tmax > 0.0) {
        return Err(Failure::Usage(format!("--tmax must be positive (got {})", grid.tmax)));
    }
    Ok((grid.tmax / grid.dt + 1e-9).floor() as usize + 1)
}

#[derive(Serialize)]
struct Stage {
    condition: Condition,
    report: BiboReport,
}

#[derive(Serialize)]
struct ProbeSummary {
    sup_estimate: Quantity,
    growth: GrowthFlag,
    notes: Vec<String>,
}

impl From<ProbeResult> for ProbeSummary {
    fn from(p: ProbeResult) -> Self {
        ProbeSummary {
            sup_estimate: Quantity::new(p.sup_estimate, Provenance::Heuristic),
            growth: p.growth,
            notes: p.notes,
        }
    }
}

#[derive(Serialize)]
struct AnalyzeOutput {
    stages: Vec<Stage>,
    result: BiboReport,
    probe: ProbeSummary,
}

fn failed_stage(condition: Condition, e: &Error) -> BiboReport {
    BiboReport::new(Verdict::ConditionFailed, condition).note(e.to_string())
}

/// Runs the checker cascade.
///
/// A proof backed by a tail model certifies the modelled infinite system
/// and ends the cascade. Without a tail model a proof only covers the finite
/// truncation; the remaining stages still run and the smallest bound wins,
/// earlier stages winning ties.
fn run_cascade(sys: &SpectralSystem, orders: Option<&[f64]>, sector: f64) -> CliResult<(Vec<Stage>, BiboReport)> {
    let qcfg = QuadratureConfig::default();
    let mut stages: Vec<Stage> = Vec::new();
    let mut best: Option<BiboReport> = None;
    let mut push = |stages: &mut Vec<Stage>, report: BiboReport| -> bool {
        let proved = report.is_proved();
        if proved {
            let better = match &best {
                None => true,
                Some(b) => report.bound.map(|q| q.value) < b.bound.map(|q| q.value),
            };
            if better {
                best = Some(report.clone());
            }
        }
        stages.push(Stage {
            condition: report.condition_used,
            report,
        });
        proved && !sys.tail().is_none()
    };
    let mut done = push(&mut stages, check_cond_riesz(sys));
    if !done {
        done = push(&mut stages, check_finite_unstable(sys));
    }
    if !done {
        let r = match check_impulse_l1(sys, &qcfg) {
            Ok(r) => r,
            Err(e @ (Error::UnstableMode { .. } | Error::NonIntegrableDensity { .. })) => {
                failed_stage(Condition::ImpulseL1, &e)
            }
            Err(e) => return Err(e.into()),
        };
        done = push(&mut stages, r);
    }
    if let (false, Some(o)) = (done, orders) {
        let r = match check_fractional_orders(sys, o[0], o[1], sector, &qcfg) {
            Ok(r) => r,
            Err(e @ (Error::SectorViolation { .. } | Error::NotExponentiallyStable { .. })) => {
                failed_stage(Condition::FractionalOrders, &e)
            }
            Err(e) => return Err(e.into()),
        };
        push(&mut stages, r);
    }
    let result = match best {
        Some(b) => b,
        None => {
            // Prefer a definite failure over an inconclusive stage.
            let pick = stages
                .iter()
                .find(|s| s.report.verdict == Verdict::ConditionFailed)
                .unwrap_or_else(|| stages.last().expect("at least one stage"));
            pick.report.clone()
        }
    };
    Ok((stages, result))
}

fn analyze(spec: &Path, orders: Option<&[f64]>, sector: f64, output: &Output, out: &mut dyn Write) -> CliResult<()> {
    let sys = read_spec(spec)?;
    if let Some(o) = orders {
        if o.len() != 2 {
            return Err(Failure::Usage("--orders expects two values alpha,beta".into()));
        }
    }
    let (stages, mut result) = run_cascade(&sys, orders, sector)?;
    let probe = halfplane_bound_probe(&bibo_core::TransferFn::from_system(&sys), &ProbeConfig::default());
    if probe.growth == GrowthFlag::GrowsAlongReals {
        if result.is_proved() {
            result
                .notes
                .push("half-plane probe reports growth along the reals, which contradicts the certificate".into());
        } else {
            result.verdict = Verdict::ConditionFailed;
            result
                .notes
                .push("half-plane probe: |G| grows along the reals, so G is not bounded on the half-plane".into());
        }
    }
    let report = AnalyzeOutput {
        stages,
        result,
        probe: probe.into(),
    };
    match output.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(output.out.as_deref(), out, &report),
        Format::Csv => emit(output.out.as_deref(), out, |w| {
            writeln!(w, "condition,verdict,bound,truncated_sum")?;
            let num = |q: Option<Quantity>| q.map(|q| fmt_f64(q.value)).unwrap_or_default();
            for s in &report.stages {
                writeln!(
                    w,
                    "{:?},{:?},{},{}",
                    s.condition,
                    s.report.verdict,
                    num(s.report.bound),
                    num(s.report.truncated_sum)
                )?;
            }
            Ok(())
        }),
    }
}

#[derive(Serialize)]
struct TvReport {
    atoms: Quantity,
    density_integral: Quantity,
    density_tail: Quantity,
    total: Quantity,
    horizon: f64,
    converged: bool,
}

fn impulse(spec: &Path, grid: &Grid, report: Option<&Path>, output: &Output, out: &mut dyn Write) -> CliResult<()> {
    let sys = read_spec(spec)?;
    let len = check_grid(grid)?;
    let density = impulse_density(&sys)?;
    let rows = (0..len)
        .map(|k| {
            let t = k as f64 * grid.dt;
            let h = density.evaluate(t);
            vec![t, h.re, h.im]
        })
        .collect();
    emit_table(output, out, &["t", "re", "im"], rows)?;
    if let Some(path) = report {
        let tv = BVMeasure::from_system(&sys)?.total_variation(&QuadratureConfig::default())?;
        let r = TvReport {
            atoms: Quantity::new(tv.atoms, Provenance::ClosedForm),
            density_integral: Quantity::new(tv.density.integral, Provenance::Quadrature),
            density_tail: Quantity::new(tv.density.tail, Provenance::TailBound),
            total: Quantity::new(tv.total(), Provenance::Quadrature),
            horizon: tv.density.horizon,
            converged: tv.density.converged,
        };
        emit_json(Some(path), out, &r)?;
    }
    Ok(())
}

fn transfer(
    spec: &Path,
    sigma: Option<f64>,
    omega_max: f64,
    points: usize,
    output: &Output,
    out: &mut dyn Write,
) -> CliResult<()> {
    let sys = read_spec(spec)?;
    if points < 2 || !(omega_max.is_finite() && omega_max > 0.0) {
        return Err(Failure::Usage("--points must be ≥ 2 and --omega-max positive".into()));
    }
    let sigma = sigma.unwrap_or(if sys.abscissa() < 0.0 {
        0.0
    } else {
        sys.abscissa() + 1.0
    });
    let omegas: Vec<f64> = (0..points)
        .map(|i| -omega_max + 2.0 * omega_max * i as f64 / (points - 1) as f64)
        .collect();
    let s: Vec<Complex64> = omegas.iter().map(|&w| Complex64::new(sigma, w)).collect();
    let g = evaluate_transfer_batch(&sys, &s, Exec::default())?;
    let rows = omegas
        .iter()
        .zip(&g)
        .map(|(&w, v)| vec![sigma, w, v.re, v.im])
        .collect();
    emit_table(output, out, &["sigma", "omega", "re", "im"], rows)
}

#[derive(Serialize)]
struct RatioReport {
    max_ratio: Quantity,
    tv_bound: Option<Quantity>,
    n_inputs: usize,
    seed: u64,
    witness: Probe,
    ratios: Vec<(Probe, f64)>,
    input_sup: f64,
    output_sup: Quantity,
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    spec: &Path,
    signal: Option<&Path>,
    grid: &Grid,
    seed: u64,
    n_inputs: usize,
    report: Option<&Path>,
    output: &Output,
    out: &mut dyn Write,
) -> CliResult<()> {
    let sys = read_spec(spec)?;
    let u = match signal {
        Some(p) => load_signal_csv(p, Some(grid.dt))?,
        None => {
            let len = check_grid(grid)?;
            Signal::constant(grid.dt, len, Complex64::new(1.0, 0.0))?
        }
    };
    let y = simulate_output(&sys, &u, Exec::default())?;
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(output.out.as_deref(), out, |w| Ok(write_signal_csv(w, &y)?))?,
        Format::Json => {
            let rows = (0..y.len())
                .map(|k| vec![y.time(k), y.value(k).re, y.value(k).im])
                .collect();
            emit_table(output, out, &["t", "re", "im"], rows)?;
        }
    }
    if let Some(path) = report {
        let suite = InputSuite::new(u.dt(), u.len()).with_seed(seed);
        let ratio = empirical_bibo_ratio(&sys, &suite, n_inputs)?;
        let tv_bound = match BVMeasure::from_system(&sys) {
            Ok(h) => Some(Quantity::new(
                h.total_variation(&QuadratureConfig::default())?.total(),
                Provenance::Quadrature,
            )),
            Err(Error::UnstableMode { .. } | Error::NonIntegrableDensity { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let r = RatioReport {
            max_ratio: Quantity::new(ratio.max_ratio, Provenance::Simulation),
            tv_bound,
            n_inputs: ratio.n_inputs,
            seed: ratio.seed,
            witness: ratio.witness_probe,
            ratios: ratio.ratios,
            input_sup: u.sup_norm(),
            output_sup: Quantity::new(y.sup_norm(), Provenance::Simulation),
        };
        emit_json(Some(path), out, &r)?;
    }
    Ok(())
}

fn invlap(
    spec: &Path,
    method: Method,
    nodes: usize,
    sigma: Option<f64>,
    grid: &Grid,
    output: &Output,
    out: &mut dyn Write,
) -> CliResult<()> {
    let sys = read_spec(spec)?;
    let len = check_grid(grid)?;
    let method = match method {
        Method::Bromwich => InversionMethod::BromwichTrapezoid,
        Method::Talbot => InversionMethod::TalbotFixed,
    };
    let mut cfg = InversionConfig::new(method, grid.dt, len);
    cfg.contour_nodes = nodes;
    cfg.abscissa_shift = sigma;
    let h = invert_laplace(&bibo_core::TransferFn::strictly_proper(&sys), &cfg)?;
    let rows = (0..h.len())
        .map(|k| vec![h.time(k), h.value(k).re, h.value(k).im])
        .collect();
    emit_table(output, out, &["t", "re", "im"], rows)
}

fn demo_mult(a: &MultArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = CounterexampleConfig {
        alpha_tilde: Complex64::new(a.alpha_tilde, 0.0),
        ..CounterexampleConfig::default()
    };
    let report = verify_counterexample(a.n, &cfg)?;
    emit_json(a.output.out.as_deref(), out, &report)?;
    if let Some(path) = &a.csv {
        let rows = report.real_axis.iter().map(|&(s, g)| vec![s, g]);
        let mut f = BufWriter::new(File::create(path)?);
        write_table(&mut f, &["sigma", "g_tilde"], rows)?;
        f.flush()?;
    }
    assert_counterexample(&report)?;
    Ok(())
}

#[derive(Serialize)]
struct AddDemoOutput {
    n_modes: usize,
    dense: bool,
    dt: f64,
    tmax: f64,
    seed: u64,
    passed: bool,
    report: DecompositionReport,
}

/// `λₙ = −n`, `bₙ = cₙ = 1`, `pₙ = ½ sin n`; the dense variant adds seeded
/// off-diagonal couplings of size at most `0.05/N`.
fn demo_add(a: &AddArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.n == 0 {
        return Err(Failure::Usage("--N must be ≥ 1".into()));
    }
    let len = check_grid(&Grid { dt: a.dt, tmax: a.tmax })?;
    let lam: Vec<f64> = (1..=a.n).map(|n| -(n as f64)).collect();
    let ones = vec![1.0; a.n];
    let sys = SpectralSystem::from_real(&lam, &ones, &ones, 0.0).map_err(Error::Validation)?;
    let p: Vec<Complex64> = (1..=a.n).map(|n| Complex64::new(0.5 * (n as f64).sin(), 0.0)).collect();
    let u = Signal::constant(a.dt, len, Complex64::new(1.0, 0.0))?;
    let alpha_tilde = Complex64::new(0.0, 0.0);
    let report = if a.dense {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let scale = 0.05 / a.n as f64;
        let m = DMatrix::from_fn(a.n, a.n, |i, j| {
            if i == j {
                p[i]
            } else {
                Complex64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
            }
        });
        additive_decomposition_check_dense(&sys, &m, &u, None, alpha_tilde)?
    } else {
        additive_decomposition_check(&sys, &p, &u, None, alpha_tilde)?
    };
    let passed = report.passed();
    let (residual, tolerance) = (report.residual, report.tolerance);
    let body = AddDemoOutput {
        n_modes: a.n,
        dense: a.dense,
        dt: a.dt,
        tmax: a.tmax,
        seed: a.seed,
        passed,
        report,
    };
    emit_json(a.output.out.as_deref(), out, &body)?;
    if !passed {
        return Err(Error::AssertionFailure {
            check: "additive_decomposition".into(),
            detail: format!("residual {residual:e} exceeds tolerance {tolerance:e}"),
        }
        .into());
    }
    Ok(())
}
