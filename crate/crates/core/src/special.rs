//! Special functions: complex digamma and the exponential helpers used by the
//! exact exponential integrators.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

/// `B_{2k} / (2k)` for `k = 1..=7`.
const ASYMPTOTIC: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// Real part from which the asymptotic series is used.
const ASYMPTOTIC_FROM: f64 = 10.0;

/// Digamma `ψ(x) = d/dx ln Γ(x)` for `Re x > 0`.
///
/// Lifts `x` with `ψ(x) = ψ(x+1) − 1/x` until `Re x ≥ 10`, then applies
/// `ψ(x) ~ ln x − 1/(2x) − Σ_{k=1}^{7} B_{2k}/(2k x^{2k})`.
pub fn digamma(x: Complex64) -> Result<Complex64> {
    if !(x.re > 0.0) || !x.im.is_finite() {
        return Err(Error::DomainError { x });
    }
    let mut z = x;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < ASYMPTOTIC_FROM {
        shift -= z.inv();
        z += 1.0;
    }
    let w = (z * z).inv();
    // Horner in 1/z² over the Bernoulli terms.
    let mut series = Complex64::new(0.0, 0.0);
    for &coef in ASYMPTOTIC.iter().rev() {
        series = (series + coef) * w;
    }
    Ok(z.ln() - 0.5 * z.inv() - series + shift)
}

/// Real digamma for `x > 0`.
pub fn digamma_real(x: f64) -> Result<f64> {
    digamma(Complex64::new(x, 0.0)).map(|z| z.re)
}

/// `e^z − 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let s = (0.5 * y).sin();
    Complex64::new(x.exp_m1() * y.cos() - 2.0 * s * s, x.exp() * y.sin())
}

/// Magnitude below which [`phi1`] switches to its Taylor expansion.
pub const PHI1_SERIES_BELOW: f64 = 1e-8;

/// `φ₁(z) = (e^z − 1)/z`, with `φ₁(0) = 1`.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < PHI1_SERIES_BELOW {
        1.0 + z * (0.5 + z / 6.0)
    } else {
        expm1(z) / z
    }
}
