//! Reference systems and seeded random stable systems used by tests,
//! benchmarks and the command-line demos.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::system::{SpectralSystem, TailModel};

/// `λₙ = −n²`, `bₙ = cₙ = 1`, with the matching power-law tail.
pub fn basel_system(n: usize, alpha: f64) -> SpectralSystem {
    let l: Vec<f64> = (1..=n).map(|k| -((k * k) as f64)).collect();
    SpectralSystem::from_real(&l, &vec![1.0; n], &vec![1.0; n], alpha)
        .and_then(|s| {
            s.set_tail(TailModel::PowerLaw {
                a: 1.0,
                p: 2.0,
                b_mag: 1.0,
                c_mag: 1.0,
            })
        })
        .expect("valid Basel system")
}

/// Two copies of `λ = (−1, …, −M)`, `b = 1`, observed with `c` and `−c`,
/// interleaved so that paired modes are adjacent. Its transfer function is
/// exactly `α` although `Σ |bₙcₙ*/Re λₙ| = 2 Σ 1/j` diverges.
pub fn stacked_system(m: usize, alpha: f64) -> SpectralSystem {
    let mut l = Vec::with_capacity(2 * m);
    let mut c = Vec::with_capacity(2 * m);
    for j in 1..=m {
        l.extend([-(j as f64); 2]);
        c.extend([1.0, -1.0]);
    }
    SpectralSystem::from_real(&l, &vec![1.0; 2 * m], &c, alpha).expect("valid stacked system")
}

/// Ranges for [`random_stable_system`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSystemConfig {
    pub max_modes: usize,
    pub re_range: (f64, f64),
    pub max_imag: f64,
    /// Probability that a mode is real.
    pub real_fraction: f64,
}

impl Default for RandomSystemConfig {
    fn default() -> Self {
        RandomSystemConfig {
            max_modes: 30,
            re_range: (-5.0, -0.5),
            max_imag: 3.0,
            real_fraction: 0.5,
        }
    }
}

/// Random stable system: eigenvalues uniform in the configured box,
/// coefficients with moduli in `[0.1, 1]` and uniform phases, feedthrough in
/// `[−1, 1]`.
pub fn random_stable_system(seed: u64, cfg: &RandomSystemConfig) -> SpectralSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=cfg.max_modes.max(1));
    let coef = |rng: &mut ChaCha8Rng| {
        Complex64::from_polar(
            rng.gen_range(0.1..=1.0),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        )
    };
    let (lo, hi) = cfg.re_range;
    let mut l = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    for _ in 0..n {
        let re = rng.gen_range(lo..=hi);
        let im = if rng.gen_bool(cfg.real_fraction) {
            0.0
        } else {
            rng.gen_range(-cfg.max_imag..=cfg.max_imag)
        };
        l.push(Complex64::new(re, im));
        b.push(coef(&mut rng));
        c.push(coef(&mut rng));
    }
    let alpha = Complex64::new(rng.gen_range(-1.0..=1.0), 0.0);
    SpectralSystem::new(l, b, c, alpha).expect("valid random system")
}

/// Named stable systems covering real, oscillatory, cancelling and stiff
/// cases: seven fixed constructions followed by seeded random systems, 20 in
/// total.
pub fn reference_corpus() -> Vec<(String, SpectralSystem)> {
    let c = Complex64::new;
    let mut out = vec![
        (
            "first-order".to_string(),
            SpectralSystem::from_real(&[-1.0], &[1.0], &[1.0], 0.0).unwrap(),
        ),
        (
            "difference-kernel".to_string(),
            SpectralSystem::from_real(&[-1.0, -2.0], &[1.0, 1.0], &[1.0, -1.0], 0.0).unwrap(),
        ),
        ("basel-40".to_string(), basel_system(40, 0.5)),
        ("stacked-25".to_string(), stacked_system(25, 0.0)),
        (
            "counterexample-unperturbed-10".to_string(),
            crate::perturbation::CounterexampleBundle::new(10, c(0.3, 0.0), c(0.0, 0.0))
                .unwrap()
                .unperturbed,
        ),
        (
            "damped-oscillator".to_string(),
            SpectralSystem::new(
                vec![c(-0.5, 2.0), c(-0.5, -2.0)],
                vec![c(1.0, 0.0), c(1.0, 0.0)],
                vec![c(0.5, 0.5), c(0.5, -0.5)],
                c(0.0, 0.0),
            )
            .unwrap(),
        ),
        (
            "complex-mix".to_string(),
            SpectralSystem::new(
                vec![c(-0.7, 3.0), c(-1.5, 0.0), c(-4.0, -1.0), c(-20.0, 0.5)],
                vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.3, 0.3), c(1.0, 0.0)],
                vec![c(0.5, -1.0), c(1.0, 0.0), c(2.0, 0.0), c(-1.0, 1.0)],
                c(0.1, 0.2),
            )
            .unwrap(),
        ),
    ];
    let cfg = RandomSystemConfig::default();
    let mut seed = 1;
    while out.len() < 20 {
        out.push((format!("random-{seed}"), random_stable_system(seed, &cfg)));
        seed += 1;
    }
    out
}
