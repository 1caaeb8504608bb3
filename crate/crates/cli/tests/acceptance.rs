//! Acceptance gate. Each test prints one `criterion N: PASS|FAIL` line to the
//! real stdout (bypassing the test harness capture) and then asserts.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::Command;

use bibo_core::corpus::{basel_system, random_stable_system, reference_corpus, stacked_system, RandomSystemConfig};
use bibo_core::io::write_spec;
use bibo_core::laplace::{
    invert_laplace, laplace_of_measure, laplace_of_measure_quadrature, InversionConfig, InversionMethod,
};
use bibo_core::perturbation::{
    additive_decomposition_check, additive_decomposition_check_dense, right_half_plane_points, verify_counterexample,
    CounterexampleConfig, DECOMPOSITION_TOL,
};
use bibo_core::quadrature::QuadratureConfig;
use bibo_core::simulate::{
    empirical_bibo_ratio, evaluate_output, laplace_consistency_check, simulate_output, simulate_state, InputSuite,
};
use bibo_core::special::{digamma, EULER_GAMMA};
use bibo_core::spectral::{check_cond_riesz, check_impulse_l1, evaluate_transfer, impulse_density};
use bibo_core::{BVMeasure, Complex64, Exec, Signal, SpectralSystem, TransferFn};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn verdict(n: u32, title: &str, pass: bool, detail: String) {
    let line = format!(
        "criterion {n:2}: {} {title}: {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn qcfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn criterion_01_bibo_inequality() {
    let cfg = RandomSystemConfig {
        max_modes: 100,
        re_range: (-50.0, -0.1),
        max_imag: 10.0,
        real_fraction: 0.5,
    };
    let suite = InputSuite::new(0.01, 2001);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_seed = 0;
    for seed in 0..200u64 {
        let sys = random_stable_system(1000 + seed, &cfg);
        let tv = BVMeasure::from_system(&sys)
            .unwrap()
            .total_variation(&qcfg())
            .unwrap()
            .total();
        let r = empirical_bibo_ratio(&sys, &suite.with_seed(seed), 10).unwrap();
        let excess = r.max_ratio - tv;
        if excess > worst {
            worst = excess;
            worst_seed = seed;
        }
    }
    verdict(
        1,
        "BIBO inequality, 200 systems × 10 inputs",
        worst <= 1e-6,
        format!("max(ratio − ‖h‖_M) = {worst:.3e} (seed index {worst_seed}), tolerance 1e-6"),
    );
}

#[test]
fn criterion_02_characterization_round_trip() {
    let mut inv_err: f64 = 0.0;
    let mut fwd_err: f64 = 0.0;
    let mut worst = String::new();
    let points = right_half_plane_points(20);
    for (name, sys) in reference_corpus() {
        let density = impulse_density(&sys).unwrap();
        let t_end = 10.0 / density.decay_rate();
        let n = 400;
        let dt = t_end / n as f64;
        let h = invert_laplace(
            &TransferFn::strictly_proper(&sys),
            &InversionConfig::new(InversionMethod::BromwichTrapezoid, dt, n + 1),
        )
        .unwrap();
        let e = (1..=n)
            .map(|k| (h.value(k) - density.evaluate(k as f64 * dt)).norm())
            .fold(0.0, f64::max);
        if e > inv_err {
            inv_err = e;
            worst = name.clone();
        }
        let measure = BVMeasure::from_system(&sys).unwrap();
        for &s in &points {
            let g = evaluate_transfer(&sys, s).unwrap();
            let closed = laplace_of_measure(&measure, s).unwrap();
            let quad = laplace_of_measure_quadrature(&measure, s, &qcfg()).unwrap();
            fwd_err = fwd_err.max((g - closed).norm()).max((g - quad).norm());
        }
    }
    verdict(
        2,
        "characterization round trip, 20 corpus systems",
        inv_err <= 1e-5 && fwd_err <= 1e-10,
        format!("inversion max error {inv_err:.2e} ({worst}) ≤ 1e-5, forward (closed form and quadrature) max error {fwd_err:.2e} ≤ 1e-10"),
    );
}

#[test]
fn criterion_03_simulation_vs_convolution() {
    let mut worst: f64 = 0.0;
    let suite = InputSuite::new(0.01, 1001).with_seed(3);
    for (_, sys) in reference_corpus() {
        let measure = BVMeasure::from_system(&sys).unwrap();
        let mut inputs = suite.random_inputs(3).unwrap();
        inputs.push(Signal::from_fn(0.01, 1001, |t| c(3.0 * (2.0 * t).sin(), -t.cos())).unwrap());
        for u in inputs {
            let traj = simulate_state(&sys, &u).unwrap();
            let y = evaluate_output(&sys, &traj, &u).unwrap();
            let conv = measure.convolve(&u).unwrap().output;
            let err = y.max_abs_diff(&conv).unwrap() / (1.0 + u.sup_norm());
            worst = worst.max(err);
        }
    }
    verdict(
        3,
        "simulation equals convolution",
        worst <= 1e-9,
        format!("max |y_sim − h∗u|/(1+‖u‖) = {worst:.2e} ≤ 1e-9"),
    );
}

#[test]
fn criterion_04_laplace_relation() {
    let points = [c(0.5, 0.0), c(1.0, 0.0), c(2.0, 1.0), c(1.0, -2.0), c(3.0, 0.5)];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (i, (_, sys)) in reference_corpus().into_iter().enumerate() {
        let suite = InputSuite::new(0.01, 501).with_seed(40 + i as u64);
        for mut u in suite.random_inputs(10).unwrap() {
            let len = u.len();
            // Compact support: the input vanishes from t = 4.
            let mut samples = u.into_samples();
            for x in samples.iter_mut().skip(401) {
                *x = c(0.0, 0.0);
            }
            u = Signal::new(0.01, samples).unwrap();
            assert_eq!(u.len(), len);
            worst = worst.max(laplace_consistency_check(&sys, &u, &points).unwrap());
            count += 1;
        }
    }
    verdict(
        4,
        "Laplace relation ŷ = G·û",
        worst <= 1e-6,
        format!("{count} inputs × 5 points, max residual {worst:.2e} ≤ 1e-6"),
    );
}

#[test]
fn criterion_05_basel() {
    let alpha = 0.25;
    let target = alpha + PI * PI / 6.0;
    let mut details = Vec::new();
    let mut pass = true;
    for n in [100, 1000] {
        let r = check_cond_riesz(&basel_system(n, alpha));
        let b = r.bound.map(|q| q.value).unwrap_or(f64::NAN);
        let ok = r.is_proved() && (b - target).abs() <= 1e-3;
        pass &= ok;
        details.push(format!("N={n}: bound {b:.8} vs {target:.8}"));
    }
    verdict(5, "condRiesz Basel bound", pass, details.join(", "));
}

#[test]
fn criterion_06_non_necessity() {
    let alpha = 0.7;
    let mut pass = true;
    let mut details = Vec::new();
    for m in [10usize, 100, 1000] {
        let sys = stacked_system(m, alpha);
        let raw = check_cond_riesz(&sys).truncated_sum.unwrap().value;
        let l1 = check_impulse_l1(&sys, &qcfg()).unwrap();
        let bound = l1.bound.unwrap().value;
        let ok = raw >= 2.0 * (m as f64).ln() - 1.0 && l1.is_proved() && (bound - alpha).abs() <= 1e-10;
        pass &= ok;
        details.push(format!(
            "M={m}: raw sum {raw:.4} ≥ {:.4}, L1 bound − |α| = {:.1e}",
            2.0 * (m as f64).ln() - 1.0,
            bound - alpha
        ));
    }
    let sys = stacked_system(1000, 0.0);
    let mut worst: f64 = 0.0;
    for u in InputSuite::new(0.01, 1001).with_seed(6).random_inputs(5).unwrap() {
        let y = simulate_output(&sys, &u, Exec::default()).unwrap();
        worst = worst.max(y.sup_norm() / (1.0 + u.sup_norm()));
    }
    pass &= worst <= 1e-10;
    details.push(format!("sup|y|/(1+‖u‖) = {worst:.1e}"));
    verdict(6, "stacked system: condRiesz not necessary", pass, details.join("; "));
}

#[test]
fn criterion_07_counterexample() {
    let report = verify_counterexample(1000, &CounterexampleConfig::default()).unwrap();
    let detail = report
        .checks
        .iter()
        .map(|s| {
            format!(
                "{} {} ({:.2e}/{:.2e})",
                s.name,
                if s.passed { "ok" } else { "FAILED" },
                s.residual,
                s.tolerance
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    verdict(
        7,
        "multiplicative counterexample",
        report.passed() && report.checks.len() == 4,
        format!("{detail}; observed order {:.3}", report.observed_order),
    );
}

#[test]
fn criterion_08_digamma() {
    let psi = |x: Complex64| digamma(x).unwrap();
    let at_one = (psi(c(1.0, 0.0)) + EULER_GAMMA).norm();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut rec: f64 = 0.0;
    let mut dup: f64 = 0.0;
    for i in 0..100 {
        let x = if i % 2 == 0 {
            c(rng.gen_range(0.5..50.0), 0.0)
        } else {
            c(rng.gen_range(0.5..50.0), rng.gen_range(-20.0..20.0))
        };
        rec = rec.max((psi(x + 1.0) - psi(x) - 1.0 / x).norm());
        dup = dup.max((psi(2.0 * x) - 0.5 * psi(x) - 0.5 * psi(x + 0.5) - 2f64.ln()).norm());
    }
    verdict(
        8,
        "digamma accuracy",
        at_one <= 1e-12 && rec <= 1e-10 && dup <= 1e-10,
        format!("|ψ(1)+γ| = {at_one:.1e}, recurrence {rec:.1e}, duplication {dup:.1e} over 100 points"),
    );
}

#[test]
fn criterion_09_additive_decomposition() {
    let zero = c(0.0, 0.0);
    let mut worst: f64 = 0.0;
    let scaled = |res: f64, u: &Signal| res / (1.0 + u.sup_norm());

    // Scalar: λ = −1, p = −½, step; LEFT also against its closed form.
    let scalar = SpectralSystem::from_real(&[-1.0], &[1.0], &[1.0], 0.0).unwrap();
    let step = Signal::constant(1e-3, 10_001, c(1.0, 0.0)).unwrap();
    let r = additive_decomposition_check(&scalar, &[c(-0.5, 0.0)], &step, None, zero).unwrap();
    worst = worst.max(scaled(r.residual, &step));
    let perturbed = SpectralSystem::from_real(&[-1.5], &[1.0], &[1.0], 0.0).unwrap();
    let y = simulate_output(&perturbed, &step, Exec::default()).unwrap();
    let closed = (0..y.len())
        .map(|k| (y.value(k).re - (1.0 - (-1.5 * y.time(k)).exp()) / 1.5).abs())
        .fold(0.0, f64::max);
    worst = worst.max(closed);

    let cfg = RandomSystemConfig {
        max_modes: 50,
        ..RandomSystemConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..20u64 {
        let sys = random_stable_system(900 + seed, &cfg);
        let p: Vec<Complex64> = sys
            .eigenvalues()
            .iter()
            .map(|l| Complex64::from_polar(rng.gen_range(0.0..0.5) * l.re.abs(), rng.gen_range(-PI..PI)))
            .collect();
        let u = &InputSuite::new(0.01, 1001).with_seed(seed).random_inputs(1).unwrap()[0];
        let r = additive_decomposition_check(&sys, &p, u, None, c(0.1, 0.0)).unwrap();
        worst = worst.max(scaled(r.residual, u));
    }
    for seed in 0..3u64 {
        let sys = random_stable_system(950 + seed, &cfg);
        let n = sys.len();
        let min_decay = sys
            .eigenvalues()
            .iter()
            .map(|l| l.re.abs())
            .fold(f64::INFINITY, f64::min);
        let scale = 0.4 * min_decay / n as f64;
        let p = DMatrix::from_fn(n, n, |_, _| {
            c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
        });
        let u = &InputSuite::new(0.01, 501)
            .with_seed(70 + seed)
            .random_inputs(1)
            .unwrap()[0];
        let r = additive_decomposition_check_dense(&sys, &p, u, None, zero).unwrap();
        worst = worst.max(scaled(r.residual, u));
    }
    verdict(
        9,
        "additive decomposition (scalar, 20 diagonal, 3 dense)",
        worst <= DECOMPOSITION_TOL,
        format!("max residual/(1+‖u‖) = {worst:.2e} ≤ {DECOMPOSITION_TOL:e}"),
    );
}

fn run_bibo(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_bibo"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("bibo runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_10_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(&basel_system(200, 0.5), d.join("basel.json")).unwrap();
    write_spec(&reference_corpus()[6].1, d.join("mix.json")).unwrap();
    let runs: [&[&str]; 6] = [
        &["analyze", "basel.json", "--out", "OUT"],
        &[
            "simulate",
            "mix.json",
            "--tmax",
            "5",
            "--out",
            "OUT",
            "--report",
            "OUT.ratio",
        ],
        &["transfer", "mix.json", "--out", "OUT"],
        &["invlap", "mix.json", "--tmax", "5", "--out", "OUT"],
        &["impulse", "mix.json", "--out", "OUT", "--report", "OUT.tv"],
        &["perturb", "demo-mult", "--N", "200", "--out", "OUT", "--csv", "OUT.csv"],
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let mut artifacts = Vec::new();
        for rep in 0..2 {
            let stem = format!("run{i}-{rep}");
            let a: Vec<String> = args.iter().map(|s| s.replace("OUT", &stem)).collect();
            let a: Vec<&str> = a.iter().map(String::as_str).collect();
            let (code, stdout) = run_bibo(&a, d);
            let mut files: Vec<Vec<u8>> = vec![stdout];
            for suffix in ["", ".ratio", ".tv", ".csv"] {
                if let Ok(bytes) = std::fs::read(d.join(format!("{stem}{suffix}"))) {
                    files.push(bytes);
                }
            }
            artifacts.push((code, files));
        }
        let same = artifacts[0] == artifacts[1] && artifacts[0].0 == 0 && artifacts[0].1.len() > 1;
        pass &= same;
        details.push(format!("{}: {}", args[0], if same { "identical" } else { "DIFFERENT" }));
    }
    verdict(10, "CLI determinism", pass, details.join(", "));
}
