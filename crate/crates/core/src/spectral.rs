//! Transfer functions, impulse densities and sufficient conditions for BIBO
//! stability of truncated Riesz-spectral systems.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::quadrature::{geometric_breaks, integrate, QuadratureConfig};
use crate::report::{BiboReport, Condition, Provenance, Quantity, Verdict};
use crate::sum::{ComplexNeumaier, Neumaier};
use crate::system::{HalfPlane, SpectralSystem, TailModel, EMPTY_ABSCISSA};

/// Relative distance `|s − λₙ| / |λₙ|` below which evaluation is refused.
pub const DEFAULT_POLE_EPS: f64 = 1e-12;

/// Reported decay rate of a density without contributing modes.
pub const NO_DECAY: f64 = f64::MAX;

/// Absolute tolerance for the analytic exponential tail of `∫|h|`.
pub const TAIL_TOL: f64 = 1e-12;

/// One diagonal mode: eigenvalue and weight `b·conj(c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub eigenvalue: Complex64,
    pub weight: Complex64,
}

pub type Evaluator = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// An analytic function on a right half-plane.
///
/// The evaluator may also be callable to the left of the half-plane when the
/// function has an analytic continuation there (rational transfer functions
/// do); [`TransferFn::evaluate`] checks the domain, while
/// [`TransferFn::evaluate_continued`] does not.
#[derive(Clone)]
pub struct TransferFn {
    evaluator: Evaluator,
    domain: HalfPlane,
    description: String,
    frequency_hint: Option<f64>,
}

impl fmt::Debug for TransferFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransferFn")
            .field("domain", &self.domain)
            .field("description", &self.description)
            .field("frequency_hint", &self.frequency_hint)
            .finish_non_exhaustive()
    }
}

impl TransferFn {
    pub fn new(
        evaluator: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
        domain: HalfPlane,
        description: impl Into<String>,
    ) -> Self {
        TransferFn {
            evaluator: Arc::new(evaluator),
            domain,
            description: description.into(),
            frequency_hint: None,
        }
    }

    /// Records the largest oscillation frequency `max |Im λ|` of the
    /// singularities, which numerical inversion uses to size its contour.
    pub fn with_frequency_hint(mut self, omega: f64) -> Self {
        self.frequency_hint = Some(omega.abs());
        self
    }

    pub fn frequency_hint(&self) -> Option<f64> {
        self.frequency_hint
    }

    /// `G(s) = α + Σ bₙ cₙ*/(s − λₙ)`.
    pub fn from_system(sys: &SpectralSystem) -> Self {
        let sys_ref = sys;
        let sys = sys.clone();
        let domain = sys.half_plane();
        TransferFn::new(
            move |s| transfer_continued(&sys, s),
            domain,
            "spectral transfer function",
        )
        .with_frequency_hint(max_frequency(sys_ref))
    }

    /// `G(s) − α`, the Laplace transform of the impulse density.
    pub fn strictly_proper(sys: &SpectralSystem) -> Self {
        let sys_ref = sys;
        let alpha = sys.feedthrough();
        let sys = sys.clone();
        let domain = sys.half_plane();
        TransferFn::new(
            move |s| transfer_continued(&sys, s).map(|g| g - alpha),
            domain,
            "spectral transfer function minus feedthrough",
        )
        .with_frequency_hint(max_frequency(sys_ref))
    }

    pub fn constant(value: Complex64) -> Self {
        TransferFn::new(
            move |_| Ok(value),
            HalfPlane::new(EMPTY_ABSCISSA),
            format!("constant {value}"),
        )
    }

    pub fn domain(&self) -> HalfPlane {
        self.domain
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn evaluate(&self, s: Complex64) -> Result<Complex64> {
        if !self.domain.contains(s) {
            return Err(Error::OutsideDomain {
                s,
                abscissa: self.domain.abscissa,
            });
        }
        (self.evaluator)(s)
    }

    pub fn evaluate_continued(&self, s: Complex64) -> Result<Complex64> {
        (self.evaluator)(s)
    }
}

fn max_frequency(sys: &SpectralSystem) -> f64 {
    sys.eigenvalues().iter().map(|l| l.im.abs()).fold(0.0, f64::max)
}

fn check_poles(sys: &SpectralSystem, s: Complex64, pole_eps: f64) -> Result<()> {
    for (index, &pole) in sys.eigenvalues().iter().enumerate() {
        let distance = (s - pole).norm();
        if distance == 0.0 || distance <= pole_eps * pole.norm() {
            return Err(Error::PoleHit {
                s,
                index,
                pole,
                distance,
            });
        }
    }
    Ok(())
}

/// Transfer function at `s` with `Re s > ω`, using compensated summation in
/// mode order.
pub fn evaluate_transfer(sys: &SpectralSystem, s: Complex64) -> Result<Complex64> {
    evaluate_transfer_with(sys, s, DEFAULT_POLE_EPS, Exec::default())
}

pub fn evaluate_transfer_with(sys: &SpectralSystem, s: Complex64, pole_eps: f64, exec: Exec) -> Result<Complex64> {
    if !sys.half_plane().contains(s) {
        return Err(Error::OutsideDomain {
            s,
            abscissa: sys.abscissa(),
        });
    }
    check_poles(sys, s, pole_eps)?;
    Ok(sys.feedthrough() + modal_resolvent_sum(sys, s, exec))
}

/// The rational expression for `G` anywhere off the poles (analytic
/// continuation to the left of the growth abscissa).
pub fn transfer_continued(sys: &SpectralSystem, s: Complex64) -> Result<Complex64> {
    check_poles(sys, s, DEFAULT_POLE_EPS)?;
    Ok(sys.feedthrough() + modal_resolvent_sum(sys, s, Exec::default()))
}

fn modal_resolvent_sum(sys: &SpectralSystem, s: Complex64, exec: Exec) -> Complex64 {
    let lam = sys.eigenvalues();
    let w = sys.weights();
    exec.sum_indexed(lam.len(), |n| w[n] / (s - lam[n]))
}

/// Evaluates `G` at many points; points are independent and run in parallel
/// under [`Exec::Parallel`].
pub fn evaluate_transfer_batch(sys: &SpectralSystem, points: &[Complex64], exec: Exec) -> Result<Vec<Complex64>> {
    exec.map_range(points.len(), |i| {
        evaluate_transfer_with(sys, points[i], DEFAULT_POLE_EPS, Exec::Sequential)
    })
    .into_iter()
    .collect()
}

fn order_by_modulus(sys: &SpectralSystem, descending: bool) -> Vec<usize> {
    let lam = sys.eigenvalues();
    let mut idx: Vec<usize> = (0..lam.len()).collect();
    idx.sort_by(|&i, &j| lam[i].norm().total_cmp(&lam[j].norm()));
    if descending {
        idx.reverse();
    }
    idx
}

/// Result of comparing `G(s₁) − G(s₂)` with the resolvent-difference sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferDifference {
    pub difference: Complex64,
    pub residual: f64,
    /// `1e-10·(1 + Σ|bₙ cₙ*|)`.
    pub tolerance: f64,
}

impl TransferDifference {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Checks `G(s₁) − G(s₂) = Σ bₙ cₙ* (1/(s₁−λₙ) − 1/(s₂−λₙ))`.
///
/// The left side sums point values in ascending `|λₙ|`; the right side sums
/// the combined form `bₙ cₙ* (s₂ − s₁)/((s₁−λₙ)(s₂−λₙ))` in descending `|λₙ|`.
pub fn transfer_difference_check(sys: &SpectralSystem, s1: Complex64, s2: Complex64) -> Result<TransferDifference> {
    for s in [s1, s2] {
        if !sys.half_plane().contains(s) {
            return Err(Error::OutsideDomain {
                s,
                abscissa: sys.abscissa(),
            });
        }
        check_poles(sys, s, DEFAULT_POLE_EPS)?;
    }
    let lam = sys.eigenvalues();
    let w = sys.weights();
    let ascending = order_by_modulus(sys, false);
    let g_at = |s: Complex64| {
        let mut acc = ComplexNeumaier::new();
        acc.add(sys.feedthrough());
        for &n in &ascending {
            acc.add(w[n] / (s - lam[n]));
        }
        acc.total()
    };
    let difference = g_at(s1) - g_at(s2);
    let mut resolvent = ComplexNeumaier::new();
    for n in order_by_modulus(sys, true) {
        resolvent.add(w[n] * (s2 - s1) / ((s1 - lam[n]) * (s2 - lam[n])));
    }
    let l1: f64 = w.iter().map(|z| z.norm()).collect::<Neumaier>().total();
    Ok(TransferDifference {
        difference,
        residual: (difference - resolvent.total()).norm(),
        tolerance: 1e-10 * (1.0 + l1),
    })
}

fn tail_note(tail: &TailModel, n: usize) -> String {
    match tail {
        TailModel::None => {
            format!("bound certifies the {n}-mode truncation only; no claim is made about modes beyond the truncation")
        }
        TailModel::PowerLaw { p, .. } => format!("power-law tail (p = {p}) bounded by Σ_{{n>N}} n^-p ≤ N^(1-p)/(p-1)"),
        TailModel::Bound { value } => format!("user-supplied tail bound {value}"),
    }
}

fn divergent_tail_note(tail: &TailModel) -> String {
    match tail {
        TailModel::PowerLaw { p, .. } => format!(
            "modelled tail Σ |bₙ cₙ*/Re λₙ| ~ Σ n^-{p} diverges (harmonic-type series for p ≤ 1); the condition is not satisfied by the infinite system"
        ),
        _ => "modelled tail sum diverges".into(),
    }
}

/// Sum of `|bₙ cₙ*/Re λₙ|` over `indices`.
fn weighted_sum(sys: &SpectralSystem, indices: impl Iterator<Item = usize>) -> f64 {
    let lam = sys.eigenvalues();
    let w = sys.weights();
    indices
        .filter(|&n| w[n] != Complex64::new(0.0, 0.0))
        .map(|n| w[n].norm() / lam[n].re.abs())
        .collect::<Neumaier>()
        .total()
}

fn finish_sum_report(sys: &SpectralSystem, condition: Condition, sum: f64, mut notes: Vec<String>) -> BiboReport {
    let alpha = sys.feedthrough().norm();
    let mut report;
    match sys.tail().weighted_sum_bound(sys.len()) {
        None => {
            report = BiboReport::new(Verdict::Inconclusive, condition);
            notes.push(divergent_tail_note(sys.tail()));
        }
        Some(tail) => {
            let prov = if sys.tail().is_none() {
                Provenance::TruncatedSum
            } else {
                Provenance::TailBound
            };
            report = BiboReport::proved(condition, Quantity::new(alpha + sum + tail, prov));
            if !sys.tail().is_none() {
                report.tail_bound = Some(Quantity::new(tail, Provenance::TailBound));
            }
            notes.push(tail_note(sys.tail(), sys.len()));
        }
    }
    report.truncated_sum = Some(Quantity::new(sum, Provenance::TruncatedSum));
    report.notes = notes;
    report
}

/// Checks `Σ |bₙ cₙ*/Re λₙ| < ∞` with the whole spectrum in `Re λ < 0`.
///
/// On success the bound `|α| + Σ|bₙ cₙ*/Re λₙ| (+ tail)` dominates the total
/// variation of the impulse response.
pub fn check_cond_riesz(sys: &SpectralSystem) -> BiboReport {
    let lam = sys.eigenvalues();
    let w = sys.weights();
    let zero = Complex64::new(0.0, 0.0);
    let closed: Vec<usize> = (0..sys.len()).filter(|&n| lam[n].re >= 0.0).collect();
    if !closed.is_empty() {
        let weighted = closed.iter().filter(|&&n| w[n] != zero).count();
        let mut r = BiboReport::new(Verdict::ConditionFailed, Condition::CondRiesz).note(format!(
            "{} eigenvalue(s) with Re λ ≥ 0 (first at index {}), {} of them with non-zero b·c*",
            closed.len(),
            closed[0],
            weighted
        ));
        if weighted == 0 {
            r = r.note("all of them have b·c* = 0: see FiniteUnstableExt");
        }
        return r;
    }
    let sum = weighted_sum(sys, 0..sys.len());
    finish_sum_report(sys, Condition::CondRiesz, sum, Vec::new())
}

/// Finitely many closed-right-half-plane eigenvalues are allowed provided
/// their modes carry `bₙ cₙ* = 0`; the bound uses the stable modes only.
pub fn check_finite_unstable(sys: &SpectralSystem) -> BiboReport {
    let lam = sys.eigenvalues();
    let w = sys.weights();
    let zero = Complex64::new(0.0, 0.0);
    let (stable, closed): (Vec<usize>, Vec<usize>) = (0..sys.len()).partition(|&n| lam[n].re < 0.0);
    if let Some(&n) = closed.iter().find(|&&n| w[n] != zero) {
        return BiboReport::new(Verdict::ConditionFailed, Condition::FiniteUnstableExt)
            .note(format!("mode {n} has Re λ = {} ≥ 0 and b·c* = {} ≠ 0", lam[n].re, w[n]));
    }
    let sum = weighted_sum(sys, stable.into_iter());
    let notes = vec![format!("{} mode(s) with Re λ ≥ 0, all with b·c* = 0", closed.len())];
    finish_sum_report(sys, Condition::FiniteUnstableExt, sum, notes)
}

/// The absolutely continuous part `h(t) = Σ bₙ cₙ* e^{λₙ t}` of the impulse
/// response (the feedthrough atom is handled by [`crate::measure`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseDensity {
    modes: Vec<Mode>,
    decay_rate: f64,
    coeff_l1: f64,
}

/// `∫₀^∞ |h|` split into its quadrature and analytic-tail parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Estimate {
    pub integral: f64,
    pub quadrature_error: f64,
    pub tail: f64,
    pub horizon: f64,
    pub converged: bool,
}

impl L1Estimate {
    pub fn total(&self) -> f64 {
        self.integral + self.quadrature_error + self.tail
    }
}

impl ImpulseDensity {
    /// Builds a density from modes; zero-weight modes are dropped, and any
    /// remaining mode with `Re λ ≥ 0` is rejected.
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let mut kept = Vec::with_capacity(modes.len());
        for (index, m) in modes.into_iter().enumerate() {
            let finite = [m.eigenvalue.re, m.eigenvalue.im, m.weight.re, m.weight.im]
                .iter()
                .all(|x| x.is_finite());
            if !finite {
                return Err(Error::NonFiniteEntry { what: "mode", index });
            }
            if m.weight == zero {
                continue;
            }
            if m.eigenvalue.re >= 0.0 {
                return Err(Error::UnstableMode {
                    index,
                    re: m.eigenvalue.re,
                });
            }
            kept.push(m);
        }
        let decay_rate = kept
            .iter()
            .map(|m| -m.eigenvalue.re)
            .fold(None, |a: Option<f64>, x| Some(a.map_or(x, |a| a.min(x))))
            .unwrap_or(NO_DECAY);
        let coeff_l1 = kept.iter().map(|m| m.weight.norm()).collect::<Neumaier>().total();
        Ok(ImpulseDensity {
            modes: kept,
            decay_rate,
            coeff_l1,
        })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// `−max Re λₙ` over contributing modes ([`NO_DECAY`] when there are none).
    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    /// `Σ |bₙ cₙ*|`.
    pub fn coeff_l1(&self) -> f64 {
        self.coeff_l1
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// `h(t)` for `t ≥ 0`; 0 for `t < 0`.
    pub fn evaluate(&self, t: f64) -> Complex64 {
        if t < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let m = &self.modes;
        Exec::Sequential.sum_indexed(m.len(), |n| m[n].weight * (m[n].eigenvalue * t).exp())
    }

    /// `coeff_l1 · e^{−decay_rate·t}`, which dominates `|h(t)|`.
    pub fn envelope(&self, t: f64) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.coeff_l1 * (-self.decay_rate * t).exp()
        }
    }

    /// `Σ bₙ cₙ*/(s − λₙ)`, valid for `Re s > −decay_rate`.
    pub fn laplace(&self, s: Complex64) -> Complex64 {
        let m = &self.modes;
        Exec::default().sum_indexed(m.len(), |n| m[n].weight / (s - m[n].eigenvalue))
    }

    /// Smallest `T*` with `coeff_l1·e^{−decay·T*}/decay < tol`.
    pub fn tail_horizon(&self, tol: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let d = self.decay_rate;
        ((self.coeff_l1 / (d * tol)).ln() / d).max(0.0)
    }

    /// `∫_{T}^∞ |h| ≤ coeff_l1·e^{−decay·T}/decay`.
    pub fn tail_bound(&self, horizon: f64) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.envelope(horizon) / self.decay_rate
        }
    }

    fn fastest_rate(&self) -> f64 {
        self.modes.iter().map(|m| -m.eigenvalue.re).fold(0.0, f64::max)
    }

    /// `∫₀^∞ |h(t)| dt`: adaptive quadrature on `[0, T*]` plus the analytic
    /// exponential tail beyond `T*`.
    pub fn l1_norm(&self, cfg: &QuadratureConfig) -> L1Estimate {
        if self.is_zero() {
            return L1Estimate {
                integral: 0.0,
                quadrature_error: 0.0,
                tail: 0.0,
                horizon: 0.0,
                converged: true,
            };
        }
        let horizon = self.tail_horizon(TAIL_TOL);
        let breaks = geometric_breaks(horizon, 0.1 / self.fastest_rate());
        let r = integrate(|t| self.evaluate(t).norm(), &breaks, cfg);
        L1Estimate {
            integral: r.value,
            quadrature_error: r.error,
            tail: self.tail_bound(horizon),
            horizon,
            converged: r.converged,
        }
    }
}

/// Modes of `sys` packed as an [`ImpulseDensity`].
pub fn impulse_density(sys: &SpectralSystem) -> Result<ImpulseDensity> {
    ImpulseDensity::new(
        sys.eigenvalues()
            .iter()
            .zip(sys.weights())
            .map(|(&eigenvalue, &weight)| Mode { eigenvalue, weight })
            .collect(),
    )
}

/// `|α| + ∫|h|` for the truncation, without any tail-model contribution.
fn impulse_l1_bound(sys: &SpectralSystem, cfg: &QuadratureConfig) -> Result<(f64, L1Estimate)> {
    let density = impulse_density(sys)?;
    let est = density.l1_norm(cfg);
    Ok((sys.feedthrough().norm() + est.total(), est))
}

/// Checks that the impulse density is integrable and reports
/// `|α| + ∫₀^∞|h|` as the bound.
///
/// Sharper than [`check_cond_riesz`] when modal contributions cancel.
pub fn check_impulse_l1(sys: &SpectralSystem, cfg: &QuadratureConfig) -> Result<BiboReport> {
    let (truncated, est) = impulse_l1_bound(sys, cfg)?;
    let mut notes = vec![format!(
        "∫|h| on [0, {:.6}] = {:e} (quadrature error {:e}), analytic tail {:e}",
        est.horizon, est.integral, est.quadrature_error, est.tail
    )];
    let tail_model = sys.tail().weighted_sum_bound(sys.len());
    let mut report = match tail_model {
        None => {
            notes.push(divergent_tail_note(sys.tail()));
            BiboReport::new(Verdict::Inconclusive, Condition::ImpulseL1)
        }
        Some(_) if !est.converged => {
            notes.push("adaptive quadrature did not reach its tolerance".into());
            BiboReport::new(Verdict::Inconclusive, Condition::ImpulseL1)
        }
        Some(t) => {
            let prov = if sys.tail().is_none() {
                Provenance::Quadrature
            } else {
                Provenance::TailBound
            };
            let mut r = BiboReport::proved(Condition::ImpulseL1, Quantity::new(truncated + t, prov));
            if !sys.tail().is_none() {
                r.tail_bound = Some(Quantity::new(t, Provenance::TailBound));
            }
            notes.push(tail_note(sys.tail(), sys.len()));
            r
        }
    };
    report.truncated_sum = Some(Quantity::new(est.integral, Provenance::Quadrature));
    report.notes = notes;
    Ok(report)
}

/// Classification of a positive sequence extrapolated beyond the truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
struct SequenceClass {
    bounded: bool,
    square_summable: bool,
    slope: Option<f64>,
}

/// Log-log slope tolerance for calling a ratio sequence bounded.
const BOUNDED_SLOPE_TOL: f64 = 0.05;
/// Fewest modes for which the log-log extrapolation is attempted.
const MIN_EXTRAPOLATION_MODES: usize = 8;

/// Least-squares slope of `ln r_n` against `ln n` over the upper half of the
/// (1-based) indices, ignoring zero terms.
fn loglog_slope(ratios: &[f64]) -> Option<f64> {
    let n = ratios.len();
    let pts: Vec<(f64, f64)> = (n / 2..n)
        .filter(|&i| ratios[i] > 0.0)
        .map(|i| (((i + 1) as f64).ln(), ratios[i].ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Classifies `|coef_n| / |λ_n|^order`, using the power-law tail when given
/// and log-log extrapolation otherwise.
fn classify_ratios(ratios: &[f64], tail: &TailModel, tail_mag: Option<f64>, order: f64) -> SequenceClass {
    if let (TailModel::PowerLaw { p, .. }, Some(mag)) = (tail, tail_mag) {
        // Tail ratios mag/(a n^p)^order decay like n^{-p·order}.
        return SequenceClass {
            bounded: true,
            square_summable: mag == 0.0 || 2.0 * p * order > 1.0,
            slope: Some(-p * order),
        };
    }
    if ratios.iter().all(|&r| r == 0.0) {
        return SequenceClass {
            bounded: true,
            square_summable: true,
            slope: None,
        };
    }
    if ratios.len() < MIN_EXTRAPOLATION_MODES {
        return SequenceClass {
            bounded: true,
            square_summable: true,
            slope: None,
        };
    }
    match loglog_slope(ratios) {
        Some(slope) => SequenceClass {
            bounded: slope <= BOUNDED_SLOPE_TOL,
            square_summable: 2.0 * slope < -1.0 - 2.0 * BOUNDED_SLOPE_TOL,
            slope: Some(slope),
        },
        // Only zeros in the upper half: treat as eventually vanishing.
        None => SequenceClass {
            bounded: true,
            square_summable: true,
            slope: None,
        },
    }
}

/// Sufficient condition for analytic, exponentially stable diagonal
/// semigroups with `B`, `C` of fractional orders `alpha`, `beta`
/// (encoded as `sup |bₙ|/|λₙ|^alpha < ∞`, `sup |cₙ|/|λₙ|^beta < ∞`).
///
/// `alpha + beta < 1` suffices; `alpha + beta = 1` additionally needs both
/// ratio sequences in ℓ². Analyticity is tested through the sector
/// `|Im λₙ| ≤ sector·|Re λₙ|`. The bound comes from [`check_impulse_l1`].
pub fn check_fractional_orders(
    sys: &SpectralSystem,
    alpha: f64,
    beta: f64,
    sector: f64,
    cfg: &QuadratureConfig,
) -> Result<BiboReport> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("sector", sector)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidConfig(format!("{name} must be finite and ≥ 0 (got {v})")));
        }
    }
    let lam = sys.eigenvalues();
    if !sys.is_empty() && sys.abscissa() >= 0.0 {
        return Err(Error::NotExponentiallyStable {
            abscissa: sys.abscissa(),
        });
    }
    for (index, l) in lam.iter().enumerate() {
        if l.im.abs() > sector * l.re.abs() * (1.0 + 1e-12) {
            return Err(Error::SectorViolation {
                index,
                ratio: l.im.abs() / l.re.abs(),
                sector,
            });
        }
    }
    let ratio_seq = |coef: &[Complex64], order: f64| -> Vec<f64> {
        coef.iter()
            .zip(lam)
            .map(|(c, l)| c.norm() / l.norm().powf(order))
            .collect()
    };
    let rb = ratio_seq(sys.b(), alpha);
    let rc = ratio_seq(sys.c(), beta);
    let (tb, tc) = match sys.tail() {
        TailModel::PowerLaw { b_mag, c_mag, .. } => (Some(*b_mag), Some(*c_mag)),
        _ => (None, None),
    };
    let cb = classify_ratios(&rb, sys.tail(), tb, alpha);
    let cc = classify_ratios(&rc, sys.tail(), tc, beta);
    let sup = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let mut notes = vec![
        format!(
            "sup |bₙ|/|λₙ|^{alpha} = {:e} over the truncation (log-log slope {:?})",
            sup(&rb),
            cb.slope
        ),
        format!(
            "sup |cₙ|/|λₙ|^{beta} = {:e} over the truncation (log-log slope {:?})",
            sup(&rc),
            cc.slope
        ),
        format!("eigenvalues lie in the sector |Im λ| ≤ {sector}·|Re λ|, used as the analyticity test"),
    ];
    if sys.len() < MIN_EXTRAPOLATION_MODES && sys.tail().is_none() {
        notes.push("truncation too short to extrapolate; sequences judged on the truncation alone".into());
    }
    let order_sum = alpha + beta;
    let inconclusive = |mut notes: Vec<String>, why: String| {
        notes.push(why);
        let mut r = BiboReport::new(Verdict::Inconclusive, Condition::FractionalOrders);
        r.notes = notes;
        r
    };
    if !cb.bounded || !cc.bounded {
        return Ok(inconclusive(
            notes,
            "coefficient ratios appear unbounded: B or C is not admissible of the given order".into(),
        ));
    }
    const ORDER_TOL: f64 = 1e-12;
    if order_sum < 1.0 - ORDER_TOL {
        notes.push(format!("alpha + beta = {order_sum} < 1"));
    } else if (order_sum - 1.0).abs() <= ORDER_TOL {
        if !(cb.square_summable && cc.square_summable) {
            return Ok(inconclusive(
                notes,
                format!(
                    "alpha + beta = 1 but the scaled sequences are not square-summable (b: {}, c: {})",
                    cb.square_summable, cc.square_summable
                ),
            ));
        }
        notes.push("alpha + beta = 1 with square-summable scaled coefficients".into());
        notes.push(
            "assumes the semigroup is similar to a contraction semigroup (automatic for a Riesz basis; constant not quantified)"
                .into(),
        );
    } else {
        return Ok(inconclusive(notes, format!("alpha + beta = {order_sum} > 1")));
    }
    let (bound, est) = impulse_l1_bound(sys, cfg)?;
    notes.push(format!(
        "bound delegated to the impulse L¹ estimate (∫|h| = {:e})",
        est.integral
    ));
    if !sys.tail().is_none() {
        notes.push("bound covers the truncated modes; the verdict extends to the modelled tail".into());
    }
    let mut r = BiboReport::proved(
        Condition::FractionalOrders,
        Quantity::new(bound, Provenance::Quadrature),
    );
    r.notes = notes;
    Ok(r)
}
