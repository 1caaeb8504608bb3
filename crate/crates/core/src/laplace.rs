//! Forward Laplace transform of measures, numerical inversion of transfer
//! functions, and a heuristic probe for boundedness on right half-planes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::measure::BVMeasure;
use crate::quadrature::{geometric_breaks, integrate_complex, QuadratureConfig};
use crate::signal::Signal;
use crate::spectral::{TransferFn, TAIL_TOL};
use crate::sum::ComplexNeumaier;

/// `∫ e^{−st} dh(t)`: atoms summed exactly, density in closed form per mode.
pub fn laplace_of_measure(h: &BVMeasure, s: Complex64) -> Result<Complex64> {
    let mut acc = ComplexNeumaier::new();
    if let Some(d) = h.density() {
        if !d.is_zero() && s.re <= -d.decay_rate() {
            return Err(Error::OutsideDomain {
                s,
                abscissa: -d.decay_rate(),
            });
        }
        acc.add(d.laplace(s));
    }
    for a in h.atoms() {
        acc.add(a.weight * (-s * a.location).exp());
    }
    Ok(acc.total())
}

/// Same as [`laplace_of_measure`] but integrates the density numerically.
/// Used as an independent check of the closed form.
pub fn laplace_of_measure_quadrature(h: &BVMeasure, s: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let mut acc = ComplexNeumaier::new();
    if let Some(d) = h.density().filter(|d| !d.is_zero()) {
        let rate = d.decay_rate() + s.re;
        if rate <= 0.0 {
            return Err(Error::OutsideDomain {
                s,
                abscissa: -d.decay_rate(),
            });
        }
        let horizon = ((d.coeff_l1() / (rate * TAIL_TOL)).ln() / rate).max(1.0);
        let fastest = d.modes().iter().map(|m| (m.eigenvalue - s).norm()).fold(0.0, f64::max);
        let breaks = geometric_breaks(horizon, 0.1 / fastest);
        let r = integrate_complex(|t| d.evaluate(t) * (-s * t).exp(), &breaks, cfg);
        acc.add(r.value);
    }
    for a in h.atoms() {
        acc.add(a.weight * (-s * a.location).exp());
    }
    Ok(acc.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InversionMethod {
    /// Trapezoid rule on a vertical Bromwich line with Euler summation of
    /// the alternating tail.
    BromwichTrapezoid,
    /// Fixed Talbot contour.
    TalbotFixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    pub method: InversionMethod,
    /// Quadrature nodes on the contour. For the Bromwich rule this is `2M`
    /// with `M` Euler terms and must be even.
    pub contour_nodes: usize,
    /// `σ₀` such that the inversion is applied to `G(s + σ₀)` and the result
    /// multiplied by `e^{σ₀ t}`. `None` picks 0 for stable transfer
    /// functions and `abscissa + 1` otherwise.
    pub abscissa_shift: Option<f64>,
    pub dt: f64,
    pub n_points: usize,
}

impl InversionConfig {
    pub fn new(method: InversionMethod, dt: f64, n_points: usize) -> Self {
        InversionConfig {
            method,
            contour_nodes: 32,
            abscissa_shift: None,
            dt,
            n_points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.contour_nodes < 16 {
            return Err(Error::InvalidConfig("contour_nodes must be at least 16".into()));
        }
        if self.method == InversionMethod::BromwichTrapezoid && !self.contour_nodes.is_multiple_of(2) {
            return Err(Error::InvalidConfig(
                "contour_nodes must be even for BromwichTrapezoid".into(),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig("dt must be positive".into()));
        }
        if let Some(s) = self.abscissa_shift {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::InvalidConfig(
                    "abscissa_shift must be finite and non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn shift_for(&self, g: &TransferFn) -> f64 {
        self.abscissa_shift.unwrap_or_else(|| {
            let a = g.domain().abscissa;
            if a < 0.0 {
                0.0
            } else {
                a + 1.0
            }
        })
    }
}

/// Largest Euler term count `M`; beyond it roundoff from the `10^{M/3}`
/// prefactor dominates in double precision.
pub const BROMWICH_MAX_TERMS: usize = 32;
/// Largest Talbot node count; the `e^{rt} = e^{0.4M}` factor limits it.
pub const TALBOT_MAX_NODES: usize = 60;

/// Terms used at time `t`: the configured count, raised to
/// `⌈per_radian·ω·t⌉` (capped) when the frequency hint `ω` is known, so that
/// the contour resolves oscillations `e^{iωt}`.
fn terms_at(base: usize, hint: Option<f64>, t: f64, per_radian: f64, cap: usize) -> usize {
    match hint {
        Some(w) if w > 0.0 => {
            let want = (per_radian * w * t).ceil();
            let want = if want.is_finite() {
                want.min(cap as f64) as usize
            } else {
                cap
            };
            base.max(want)
        }
        _ => base,
    }
}

fn eval_node(g: &TransferFn, s: Complex64) -> Result<Complex64> {
    match g.evaluate_continued(s) {
        Ok(v) if v.re.is_finite() && v.im.is_finite() => Ok(v),
        Ok(v) => Err(Error::ContourError {
            node: s,
            reason: format!("non-finite value {v}"),
        }),
        Err(e) => Err(Error::ContourError {
            node: s,
            reason: e.to_string(),
        }),
    }
}

/// Signed Euler summation weights `η_k = (−1)^k ξ_k`, `k = 0..=2M`, with
/// `ξ_0 = 1/2`, `ξ_k = 1` for `k ≤ M`, `ξ_{2M} = 2^{−M}` and
/// `ξ_{2M−k} = ξ_{2M−k+1} + 2^{−M} C(M, k)`.
fn euler_weights(m: usize) -> Vec<f64> {
    let mut xi = vec![1.0; 2 * m + 1];
    xi[0] = 0.5;
    let scale = 0.5f64.powi(m as i32);
    xi[2 * m] = scale;
    let mut binom = 1.0;
    for k in 1..m {
        binom *= (m - k + 1) as f64 / k as f64;
        xi[2 * m - k] = xi[2 * m - k + 1] + scale * binom;
    }
    xi.iter()
        .enumerate()
        .map(|(k, x)| if k % 2 == 0 { *x } else { -*x })
        .collect()
}

/// `f(t)` from `F` by the Euler-accelerated Bromwich trapezoid, `M` terms,
/// line `Re s = M ln10 / (3t)`.
fn bromwich_point(g: &TransferFn, t: f64, m: usize, shift: f64, eta: &[f64]) -> Result<Complex64> {
    let a = m as f64 * std::f64::consts::LN_10 / 3.0;
    let node = |k: f64| Complex64::new(a, std::f64::consts::PI * k) / t + shift;
    let mut acc = ComplexNeumaier::new();
    for (k, &e) in eta.iter().enumerate() {
        let term = if k == 0 {
            eval_node(g, node(0.0))?
        } else {
            let kf = k as f64;
            0.5 * (eval_node(g, node(kf))? + eval_node(g, node(-kf))?)
        };
        acc.add(e * term);
    }
    Ok(acc.total() * (a + shift * t).exp() / t)
}

/// `f(t)` by the fixed Talbot contour `s(θ) = σ₀ + rθ(cot θ + i)`,
/// `r = 2M/(5t)`, trapezoid in `θ` over `(−π, π)`.
fn talbot_point(g: &TransferFn, t: f64, m: usize, shift: f64) -> Result<Complex64> {
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut acc = ComplexNeumaier::new();
    acc.add(((r + shift) * t).exp() * eval_node(g, Complex64::new(r + shift, 0.0))?);
    for k in 1..m {
        let theta = k as f64 * std::f64::consts::PI / m as f64;
        let cot = 1.0 / theta.tan();
        let sigma = theta + (theta * cot - 1.0) * cot;
        for sign in [1.0, -1.0] {
            let s = Complex64::new(r * theta * cot + shift, sign * r * theta);
            let ds = Complex64::new(1.0, sign * sigma);
            acc.add((s * t).exp() * eval_node(g, s)? * ds);
        }
    }
    Ok(acc.total() * r / (2.0 * m as f64))
}

pub fn invert_laplace(g: &TransferFn, cfg: &InversionConfig) -> Result<Signal> {
    invert_laplace_with(g, cfg, Exec::default())
}

/// Samples of the density `h` with `𝓛h = G` at `t_k = k·dt`.
///
/// `contour_nodes` is the minimum; with a frequency hint on `G` the count
/// grows with `t` up to [`BROMWICH_MAX_TERMS`] / [`TALBOT_MAX_NODES`]. Past
/// those caps, densities oscillating over many periods lose accuracy.
///
/// Accuracy is targeted on `t ≥ dt` only; the `t = 0` sample is filled by
/// linear extrapolation `2h(dt) − h(2dt)`.
pub fn invert_laplace_with(g: &TransferFn, cfg: &InversionConfig, exec: Exec) -> Result<Signal> {
    cfg.validate()?;
    let shift = cfg.shift_for(g);
    if g.domain().abscissa >= shift {
        return Err(Error::InvalidConfig(format!(
            "abscissa_shift {shift} must exceed the abscissa {}",
            g.domain().abscissa
        )));
    }
    let n = cfg.n_points;
    let hint = g.frequency_hint();
    let point = |t: f64| match cfg.method {
        InversionMethod::BromwichTrapezoid => {
            let m = terms_at(cfg.contour_nodes / 2, hint, t, 0.6, BROMWICH_MAX_TERMS);
            bromwich_point(g, t, m, shift, &euler_weights(m))
        }
        InversionMethod::TalbotFixed => {
            let m = terms_at(cfg.contour_nodes, hint, t, 2.5, TALBOT_MAX_NODES);
            talbot_point(g, t, m, shift)
        }
    };
    // Sample k = 0 is extrapolated, so evaluate from t = dt, plus 2dt if needed.
    let m = n.max(3);
    let vals = exec.map_range(m - 1, |k| point((k + 1) as f64 * cfg.dt));
    let vals: Vec<Complex64> = vals.into_iter().collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(n);
    if n > 0 {
        out.push(2.0 * vals[0] - vals[1]);
        out.extend(vals.into_iter().take(n - 1));
    }
    Signal::new(cfg.dt, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthFlag {
    Bounded,
    GrowsAlongReals,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    /// Minimal ratio `|G(σ_end)| / |G(σ_start)|` over the top two decades
    /// for a monotone increase to count as growth.
    pub growth_factor: f64,
    pub sigma_max: f64,
    pub points_per_decade: usize,
    pub imag_offsets: Vec<f64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            growth_factor: 1.25,
            sigma_max: 1e6,
            points_per_decade: 10,
            imag_offsets: vec![0.0, 1.0, -1.0, 10.0, -10.0, 100.0, -100.0, 1000.0, -1000.0],
        }
    }
}

/// Relative increase over the top two decades still classified as bounded.
pub const BOUNDED_REL_CHANGE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub sup_estimate: f64,
    pub growth: GrowthFlag,
    /// `(σ, |G(σ)|)` along the real axis.
    pub real_axis: Vec<(f64, f64)>,
    pub notes: Vec<String>,
}

/// Samples `|G|` at `σ = σ_lo + d`, `d` log-spaced in `[1, σ_max]`, where
/// `σ_lo = max(abscissa, −1)`, times the configured imaginary offsets.
///
/// This is a heuristic: it can flag growth along the real axis but cannot
/// certify boundedness.
pub fn halfplane_bound_probe(g: &TransferFn, cfg: &ProbeConfig) -> ProbeResult {
    let lo = g.domain().abscissa.max(-1.0);
    let decades = cfg.sigma_max.log10().max(1.0);
    let n = (decades * cfg.points_per_decade as f64).round() as usize + 1;
    let sigmas: Vec<f64> = (0..n)
        .map(|j| lo + 10f64.powf(decades * j as f64 / (n - 1) as f64))
        .collect();
    let mut notes = vec!["heuristic probe: finite sampling cannot certify boundedness".to_string()];
    let mut failures = 0usize;
    let mut real_axis = Vec::with_capacity(n);
    let mut sup: f64 = 0.0;
    for &sigma in &sigmas {
        for &w in &cfg.imag_offsets {
            match g.evaluate(Complex64::new(sigma, w)) {
                Ok(v) if v.norm().is_finite() => {
                    sup = sup.max(v.norm());
                    if w == 0.0 {
                        real_axis.push((sigma, v.norm()));
                    }
                }
                _ => failures += 1,
            }
        }
    }
    if failures > 0 {
        notes.push(format!(
            "{failures} probe points could not be evaluated and were skipped"
        ));
    }
    let top_from = cfg.sigma_max / 100.0;
    let top: Vec<f64> = real_axis
        .iter()
        .filter(|(s, _)| *s - lo >= top_from * 0.999)
        .map(|p| p.1)
        .collect();
    let growth = if top.len() < 2 {
        notes.push("too few real-axis samples in the top two decades".into());
        GrowthFlag::Undetermined
    } else {
        let start = top[0];
        let end = top[top.len() - 1];
        let monotone = top.windows(2).all(|w| w[1] > w[0]);
        let max = top.iter().copied().fold(0.0, f64::max);
        if monotone && end > cfg.growth_factor * start {
            notes.push(format!(
                "|G(σ)| grows monotonically by a factor {:.4} over σ ∈ [{:.3e}, {:.3e}]",
                end / start,
                lo + top_from,
                lo + cfg.sigma_max
            ));
            GrowthFlag::GrowsAlongReals
        } else if max <= start * (1.0 + BOUNDED_REL_CHANGE) {
            GrowthFlag::Bounded
        } else {
            GrowthFlag::Undetermined
        }
    };
    ProbeResult {
        sup_estimate: sup,
        growth,
        real_axis,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::digamma;
    use crate::spectral::{impulse_density, TransferFn};
    use crate::system::{HalfPlane, SpectralSystem};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rational(f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static, abscissa: f64) -> TransferFn {
        TransferFn::new(move |s| Ok(f(s)), HalfPlane::new(abscissa), "test")
    }

    #[test]
    fn forward_examples() {
        assert_eq!(
            laplace_of_measure(&BVMeasure::dirac(c(1.0, 0.0)), c(3.0, 7.0)).unwrap(),
            c(1.0, 0.0)
        );
        let sys = SpectralSystem::from_real(&[-1.0], &[1.0], &[1.0], 0.0).unwrap();
        let h = BVMeasure::from_system(&sys).unwrap();
        assert!((laplace_of_measure(&h, c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        let sys = SpectralSystem::from_real(&[-1.0, -2.0], &[1.0, 1.0], &[1.0, 1.0], 0.0).unwrap();
        let h = BVMeasure::from_system(&sys).unwrap();
        assert!((laplace_of_measure(&h, c(1.0, 0.0)).unwrap() - 5.0 / 6.0).norm() < 1e-15);
        assert!(matches!(
            laplace_of_measure(&h, c(-1.5, 0.0)),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn forward_closed_form_matches_quadrature() {
        let sys = SpectralSystem::new(
            vec![c(-0.5, 3.0), c(-2.0, 0.0), c(-9.0, -1.0)],
            vec![c(1.0, 0.0), c(0.5, 0.5), c(-1.0, 2.0)],
            vec![c(1.0, -1.0), c(2.0, 0.0), c(0.3, 0.0)],
            c(0.7, 0.0),
        )
        .unwrap();
        let h = BVMeasure::from_system(&sys).unwrap();
        let cfg = QuadratureConfig::default();
        for s in [c(0.0, 0.0), c(1.0, 2.0), c(-0.2, -5.0), c(4.0, 0.5)] {
            let a = laplace_of_measure(&h, s).unwrap();
            let b = laplace_of_measure_quadrature(&h, s, &cfg).unwrap();
            assert!((a - b).norm() < 1e-9, "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn euler_weights_taper_to_binomial_tail() {
        let eta = euler_weights(4);
        let want = [
            0.5,
            -1.0,
            1.0,
            -1.0,
            1.0,
            -15.0 / 16.0,
            11.0 / 16.0,
            -5.0 / 16.0,
            1.0 / 16.0,
        ];
        assert_eq!(eta, want);
    }

    type KnownPair = (TransferFn, Box<dyn Fn(f64) -> f64>, f64);

    fn check_pairs(method: InversionMethod) {
        let pairs: Vec<KnownPair> = vec![
            (rational(|s| 1.0 / (s + 1.0), -1.0), Box::new(|t: f64| (-t).exp()), 1.0),
            (
                rational(|s| 1.0 / ((s + 1.0) * (s + 1.0)), -1.0),
                Box::new(|t: f64| t * (-t).exp()),
                1.0,
            ),
            (
                rational(|s| 1.0 / ((s + 1.0) * (s + 2.0)), -1.0),
                Box::new(|t: f64| (-t).exp() - (-2.0 * t).exp()),
                0.5,
            ),
            (rational(|s| 1.0 / (s * s + 1.0), 0.0), Box::new(|t: f64| t.sin()), 2.0),
        ];
        for (g, f, t) in pairs {
            let dt = t / 10.0;
            let h = invert_laplace(&g, &InversionConfig::new(method, dt, 21)).unwrap();
            for k in 1..21 {
                let want = f(k as f64 * dt);
                assert!(
                    (h.value(k) - want).norm() < 1e-6,
                    "{method:?} t={}: {} vs {want}",
                    k as f64 * dt,
                    h.value(k)
                );
            }
        }
    }

    #[test]
    fn bromwich_known_pairs() {
        check_pairs(InversionMethod::BromwichTrapezoid);
    }

    #[test]
    fn talbot_known_pairs() {
        check_pairs(InversionMethod::TalbotFixed);
    }

    #[test]
    fn spec_values() {
        let g = rational(|s| 1.0 / ((s + 1.0) * (s + 2.0)), -1.0);
        let h = invert_laplace(&g, &InversionConfig::new(InversionMethod::BromwichTrapezoid, 0.5, 2)).unwrap();
        assert!((h.value(1).re - 0.238651).abs() < 1e-6);
        let g = rational(|s| 1.0 / (s + 1.0), -1.0);
        let h = invert_laplace(&g, &InversionConfig::new(InversionMethod::TalbotFixed, 1.0, 2)).unwrap();
        assert!((h.value(1).re - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn complex_density_is_recovered() {
        let sys = SpectralSystem::new(
            vec![c(-0.5, 4.0), c(-1.0, -1.0)],
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(1.0, 0.5), c(2.0, 0.0)],
            c(3.0, 0.0),
        )
        .unwrap();
        let d = impulse_density(&sys).unwrap();
        let g = TransferFn::strictly_proper(&sys);
        // 10/decay_rate = 20, where ω·t reaches 80.
        let mut cfg = InversionConfig::new(InversionMethod::BromwichTrapezoid, 0.05, 401);
        let h = invert_laplace(&g, &cfg).unwrap();
        let err = (1..401)
            .map(|k| (h.value(k) - d.evaluate(k as f64 * 0.05)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");
        // Talbot applies while its contour still encloses the poles: ω·t ≲ 24.
        cfg.method = InversionMethod::TalbotFixed;
        cfg.n_points = 121;
        let h2 = invert_laplace(&g, &cfg).unwrap();
        let diff = (1..121).map(|k| (h.value(k) - h2.value(k)).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-5, "{diff}");
    }

    #[test]
    fn node_doubling_improves_accuracy() {
        let g = rational(|s| 1.0 / ((s + 1.0) * (s + 2.0)), -1.0);
        let f = |t: f64| (-t).exp() - (-2.0 * t).exp();
        let err = |nodes| {
            let mut cfg = InversionConfig::new(InversionMethod::BromwichTrapezoid, 0.25, 21);
            cfg.contour_nodes = nodes;
            let h = invert_laplace(&g, &cfg).unwrap();
            (1..21)
                .map(|k| (h.value(k).re - f(k as f64 * 0.25)).abs())
                .fold(0.0, f64::max)
        };
        let (e16, e32) = (err(16), err(32));
        assert!(e32 <= 2.0 * e16.max(1e-10) && e32 < e16.max(1e-10), "{e16} {e32}");
    }

    #[test]
    fn config_validation() {
        let g = rational(|s| 1.0 / (s + 1.0), -1.0);
        let mut cfg = InversionConfig::new(InversionMethod::BromwichTrapezoid, 0.1, 10);
        cfg.contour_nodes = 17;
        assert!(matches!(invert_laplace(&g, &cfg), Err(Error::InvalidConfig(_))));
        cfg.contour_nodes = 8;
        assert!(invert_laplace(&g, &cfg).is_err());
        cfg.method = InversionMethod::TalbotFixed;
        cfg.contour_nodes = 17;
        assert!(invert_laplace(&g, &cfg).is_ok());
    }

    #[test]
    fn failing_evaluator_reports_contour_error() {
        let g = TransferFn::new(
            |s: Complex64| {
                if s.im > 50.0 {
                    Err(Error::InvalidConfig("boom".into()))
                } else {
                    Ok(1.0 / (s + 1.0))
                }
            },
            HalfPlane::new(-1.0),
            "partial",
        );
        let cfg = InversionConfig::new(InversionMethod::BromwichTrapezoid, 0.1, 10);
        assert!(matches!(invert_laplace(&g, &cfg), Err(Error::ContourError { .. })));
    }

    #[test]
    fn unstable_pole_uses_shift() {
        let g = rational(|s| 1.0 / (s - 0.5), 0.5);
        let h = invert_laplace(&g, &InversionConfig::new(InversionMethod::BromwichTrapezoid, 0.5, 9)).unwrap();
        for k in 1..9 {
            let t = k as f64 * 0.5;
            assert!((h.value(k).re - (0.5 * t).exp()).abs() < 1e-6 * (0.5 * t).exp());
        }
    }

    #[test]
    fn probe_examples() {
        let r = halfplane_bound_probe(&rational(|s| 1.0 / (s + 1.0), -1.0), &ProbeConfig::default());
        assert_eq!(r.growth, GrowthFlag::Bounded);
        assert!((r.sup_estimate - 1.0).abs() < 1e-12);

        let r = halfplane_bound_probe(&TransferFn::constant(c(2.5, 0.0)), &ProbeConfig::default());
        assert_eq!(r.growth, GrowthFlag::Bounded);
        assert_eq!(r.sup_estimate, 2.5);

        let g = TransferFn::new(
            |s: Complex64| Ok(0.5 * digamma(1.0 + s / 2.0)? - digamma(1.0 + s)?),
            HalfPlane::new(-1.0),
            "digamma",
        );
        let r = halfplane_bound_probe(&g, &ProbeConfig::default());
        assert_eq!(r.growth, GrowthFlag::GrowsAlongReals);
        assert!(r.notes[0].contains("heuristic"));
    }

    #[test]
    fn probe_feedthrough_approached_from_below_is_bounded() {
        let r = halfplane_bound_probe(&rational(|s| 1.0 - 1.0 / (s + 1.0), -1.0), &ProbeConfig::default());
        assert_eq!(r.growth, GrowthFlag::Bounded);
    }
}
