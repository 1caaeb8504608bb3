use bibo_core::corpus::reference_corpus;
use bibo_core::laplace::{invert_laplace_with, InversionConfig, InversionMethod};
use bibo_core::perturbation::CounterexampleBundle;
use bibo_core::quadrature::QuadratureConfig;
use bibo_core::simulate::{empirical_bibo_ratio, laplace_consistency_check, simulate_output, InputSuite, Probe};
use bibo_core::spectral::{evaluate_transfer_batch, impulse_density};
use bibo_core::{BVMeasure, Complex64, Exec, Signal, SpectralSystem, TransferFn};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn sign_matched_ratio(sys: &SpectralSystem, dt: f64, len: usize) -> f64 {
    let r = empirical_bibo_ratio(sys, &InputSuite::new(dt, len), 1).unwrap();
    r.ratios
        .iter()
        .find(|(p, _)| *p == Probe::SignMatched)
        .map(|&(_, v)| v)
        .unwrap()
}

#[test]
fn sign_matched_ratio_grows_towards_total_variation() {
    let cases = [
        SpectralSystem::from_real(&[-1.0, -2.0], &[1.0, 1.0], &[1.0, -2.0], 0.0).unwrap(),
        SpectralSystem::new(vec![Complex64::new(-0.5, 2.0)], vec![c(1.0)], vec![c(1.0)], c(0.2)).unwrap(),
        SpectralSystem::from_real(&[-0.5, -3.0, -7.0], &[1.0, -1.0, 2.0], &[1.0, 1.0, 0.5], -0.3).unwrap(),
    ];
    for sys in &cases {
        let tv = BVMeasure::from_system(sys)
            .unwrap()
            .total_variation(&QuadratureConfig::default())
            .unwrap()
            .total();
        let decay = impulse_density(sys).unwrap().decay_rate();
        let dt = 0.005 / decay;
        let horizon = 20.0 / decay;
        let mut prev = 0.0;
        for frac in [0.05, 0.1, 0.25, 0.5, 0.75, 1.0] {
            let len = (frac * horizon / dt).round() as usize + 1;
            let r = sign_matched_ratio(sys, dt, len);
            assert!(r >= prev - 1e-12, "ratio decreased: {prev} → {r}");
            assert!(r <= tv + 1e-6);
            prev = r;
        }
        assert!(prev >= 0.98 * tv, "ratio {prev} vs ‖h‖ {tv}");
    }
}

#[test]
fn unperturbed_counterexample_output_is_feedthrough_times_input() {
    let alpha = c(0.3);
    let sys = CounterexampleBundle::new(200, alpha, c(0.0)).unwrap().unperturbed;
    let u = Signal::from_fn(0.01, 801, |t| if t < 7.0 { c((2.0 * t).sin() + 0.5) } else { c(0.0) }).unwrap();
    let y = simulate_output(&sys, &u, Exec::default()).unwrap();
    assert!(y.max_abs_diff(&u.scaled(alpha)).unwrap() <= 1e-12);
    let points = [c(1.0), c(2.0), c(5.0)];
    assert!(laplace_consistency_check(&sys, &u, &points).unwrap() <= 1e-10);
}

#[test]
fn execution_paths_agree_bitwise_on_corpus() {
    let points: Vec<Complex64> = (0..16)
        .map(|k| Complex64::new(0.1 + 0.3 * k as f64, 2.0 - 0.5 * k as f64))
        .collect();
    for (name, sys) in reference_corpus() {
        let u = InputSuite::new(0.01, 400).random_inputs(1).unwrap().remove(0);
        let a = simulate_output(&sys, &u, Exec::Sequential).unwrap();
        let b = simulate_output(&sys, &u, Exec::Parallel).unwrap();
        assert_eq!(a, b, "{name}: simulate_output");

        let h = BVMeasure::from_system(&sys).unwrap();
        assert_eq!(
            h.convolve_with(&u, Exec::Sequential).unwrap(),
            h.convolve_with(&u, Exec::Parallel).unwrap(),
            "{name}: convolve"
        );
        assert_eq!(
            evaluate_transfer_batch(&sys, &points, Exec::Sequential).unwrap(),
            evaluate_transfer_batch(&sys, &points, Exec::Parallel).unwrap(),
            "{name}: transfer"
        );
        let cfg = InversionConfig::new(InversionMethod::BromwichTrapezoid, 0.05, 60);
        let g = TransferFn::strictly_proper(&sys);
        assert_eq!(
            invert_laplace_with(&g, &cfg, Exec::Sequential).unwrap(),
            invert_laplace_with(&g, &cfg, Exec::Parallel).unwrap(),
            "{name}: inversion"
        );
    }
}
