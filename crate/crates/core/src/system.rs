//! System data: the serialisable spec, its validated form, and half-planes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ValidationErrors};

/// Abscissa reported for a system without modes. Large and negative rather
/// than `-inf` so that every public number stays finite.
pub const EMPTY_ABSCISSA: f64 = -1e300;

/// A complex number as it appears in JSON: `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexScalar {
    pub re: f64,
    pub im: f64,
}

/// Serialises a [`Complex64`] as `{"re": …, "im": …}`.
pub fn serialize_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    ComplexScalar::from(*z).serialize(s)
}

impl From<ComplexScalar> for Complex64 {
    fn from(z: ComplexScalar) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for ComplexScalar {
    fn from(z: Complex64) -> Self {
        ComplexScalar { re: z.re, im: z.im }
    }
}

/// Closed-form description of the modes beyond the truncation order `N`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailModel {
    #[default]
    None,
    /// `λₙ = −a·n^p` for `n > N` with `|bₙ| = b_mag`, `|cₙ| = c_mag`.
    PowerLaw { a: f64, p: f64, b_mag: f64, c_mag: f64 },
    /// A user-certified bound on `Σ_{n>N} |bₙ cₙ* / Re λₙ|`.
    Bound { value: f64 },
}

impl TailModel {
    /// Upper bound on `Σ_{n>N} |bₙ cₙ*/Re λₙ|` for truncation order `n_truncated`.
    ///
    /// `Some(0.0)` when no tail is modelled, `None` when the modelled tail sum
    /// diverges.
    pub fn weighted_sum_bound(&self, n_truncated: usize) -> Option<f64> {
        match *self {
            TailModel::None => Some(0.0),
            TailModel::Bound { value } => Some(value),
            TailModel::PowerLaw { a, p, b_mag, c_mag } => {
                let w = b_mag * c_mag;
                if w == 0.0 {
                    return Some(0.0);
                }
                if p <= 1.0 {
                    return None;
                }
                // Σ_{n>N} n^{-p} ≤ ∫_N^∞ x^{-p} dx; for N = 0 the first term is kept apart.
                let zeta_tail = if n_truncated == 0 {
                    1.0 + 1.0 / (p - 1.0)
                } else {
                    (n_truncated as f64).powf(1.0 - p) / (p - 1.0)
                };
                Some(w / a * zeta_tail)
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, TailModel::None)
    }

    fn validate(&self, errors: &mut Vec<Error>) {
        match *self {
            TailModel::None => {}
            TailModel::PowerLaw { a, p, b_mag, c_mag } => {
                for (name, v) in [("a", a), ("p", p), ("b_mag", b_mag), ("c_mag", c_mag)] {
                    if !v.is_finite() {
                        errors.push(Error::InvalidTail(format!("power-law `{name}` is not finite")));
                    }
                }
                if !(a > 0.0) || !(p > 0.0) {
                    errors.push(Error::InvalidTail(format!(
                        "power-law tail needs a > 0 and p > 0 (got a = {a}, p = {p})"
                    )));
                }
                if b_mag < 0.0 || c_mag < 0.0 {
                    errors.push(Error::InvalidTail("coefficient magnitudes must be ≥ 0".into()));
                }
            }
            TailModel::Bound { value } => {
                if !value.is_finite() || value < 0.0 {
                    errors.push(Error::InvalidTail(format!(
                        "tail bound must be finite and ≥ 0 (got {value})"
                    )));
                }
            }
        }
    }
}

/// Serialisable (unvalidated) truncated Riesz-spectral system.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectralSystemSpec {
    pub eigenvalues: Vec<ComplexScalar>,
    pub b: Vec<ComplexScalar>,
    pub c: Vec<ComplexScalar>,
    #[serde(default)]
    pub feedthrough: ComplexScalar,
    #[serde(default)]
    pub tail: TailModel,
}

/// Open right half-plane `{Re s > abscissa}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub abscissa: f64,
}

impl HalfPlane {
    pub fn new(abscissa: f64) -> Self {
        HalfPlane { abscissa }
    }

    pub fn contains(&self, s: Complex64) -> bool {
        s.re > self.abscissa
    }
}

/// A validated truncated Riesz-spectral system.
///
/// Immutable once built; the growth abscissa `max Re λₙ` and the modal
/// weights `bₙ·conj(cₙ)` are cached.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSystem {
    eigenvalues: Vec<Complex64>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
    feedthrough: Complex64,
    tail: TailModel,
    abscissa: f64,
    weights: Vec<Complex64>,
}

fn check_finite(what: &'static str, zs: &[Complex64], errors: &mut Vec<Error>) {
    for (index, z) in zs.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            errors.push(Error::NonFiniteEntry { what, index });
        }
    }
}

impl SpectralSystem {
    pub fn new(
        eigenvalues: Vec<Complex64>,
        b: Vec<Complex64>,
        c: Vec<Complex64>,
        feedthrough: Complex64,
    ) -> Result<Self, ValidationErrors> {
        Self::with_tail(eigenvalues, b, c, feedthrough, TailModel::None)
    }

    pub fn with_tail(
        eigenvalues: Vec<Complex64>,
        b: Vec<Complex64>,
        c: Vec<Complex64>,
        feedthrough: Complex64,
        tail: TailModel,
    ) -> Result<Self, ValidationErrors> {
        let mut errors = Vec::new();
        let n = eigenvalues.len();
        for (what, len) in [("b", b.len()), ("c", c.len())] {
            if len != n {
                errors.push(Error::LengthMismatch {
                    what,
                    expected: n,
                    found: len,
                });
            }
        }
        check_finite("eigenvalues", &eigenvalues, &mut errors);
        check_finite("b", &b, &mut errors);
        check_finite("c", &c, &mut errors);
        check_finite("feedthrough", &[feedthrough], &mut errors);
        tail.validate(&mut errors);
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        let abscissa = eigenvalues
            .iter()
            .map(|l| l.re)
            .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
            .unwrap_or(EMPTY_ABSCISSA);
        let weights = b.iter().zip(&c).map(|(b, c)| b * c.conj()).collect();
        Ok(SpectralSystem {
            eigenvalues,
            b,
            c,
            feedthrough,
            tail,
            abscissa,
            weights,
        })
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(eigenvalues: &[f64], b: &[f64], c: &[f64], feedthrough: f64) -> Result<Self, ValidationErrors> {
        let z = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        Self::new(z(eigenvalues), z(b), z(c), Complex64::new(feedthrough, 0.0))
    }

    pub fn set_tail(self, tail: TailModel) -> Result<Self, ValidationErrors> {
        Self::with_tail(self.eigenvalues, self.b, self.c, self.feedthrough, tail)
    }

    pub fn set_feedthrough(mut self, feedthrough: Complex64) -> Result<Self, ValidationErrors> {
        let mut errors = Vec::new();
        check_finite("feedthrough", &[feedthrough], &mut errors);
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        self.feedthrough = feedthrough;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn c(&self) -> &[Complex64] {
        &self.c
    }

    pub fn feedthrough(&self) -> Complex64 {
        self.feedthrough
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    /// Growth abscissa `ω = max Re λₙ` ([`EMPTY_ABSCISSA`] without modes).
    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }

    pub fn half_plane(&self) -> HalfPlane {
        HalfPlane::new(self.abscissa)
    }

    /// Modal weights `bₙ·conj(cₙ)`.
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn to_spec(&self) -> SpectralSystemSpec {
        let conv = |v: &[Complex64]| v.iter().map(|&z| z.into()).collect();
        SpectralSystemSpec {
            eigenvalues: conv(&self.eigenvalues),
            b: conv(&self.b),
            c: conv(&self.c),
            feedthrough: self.feedthrough.into(),
            tail: self.tail,
        }
    }
}

/// Checks a raw spec and returns the validated system, or every problem found.
pub fn validate_spec(spec: &SpectralSystemSpec) -> Result<SpectralSystem, ValidationErrors> {
    let conv = |v: &[ComplexScalar]| v.iter().map(|&z| z.into()).collect::<Vec<Complex64>>();
    SpectralSystem::with_tail(
        conv(&spec.eigenvalues),
        conv(&spec.b),
        conv(&spec.c),
        spec.feedthrough.into(),
        spec.tail,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(re: f64) -> ComplexScalar {
        ComplexScalar { re, im: 0.0 }
    }

    #[test]
    fn single_mode_abscissa() {
        let spec = SpectralSystemSpec {
            eigenvalues: vec![cs(-1.0)],
            b: vec![cs(1.0)],
            c: vec![cs(1.0)],
            ..Default::default()
        };
        let sys = validate_spec(&spec).unwrap();
        assert_eq!(sys.abscissa(), -1.0);
    }

    #[test]
    fn empty_system_uses_sentinel() {
        let spec = SpectralSystemSpec {
            feedthrough: cs(2.0),
            ..Default::default()
        };
        let sys = validate_spec(&spec).unwrap();
        assert_eq!(sys.abscissa(), EMPTY_ABSCISSA);
        assert!(sys.abscissa().is_finite());
        assert_eq!(sys.feedthrough(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn length_mismatch_is_reported() {
        let spec = SpectralSystemSpec {
            eigenvalues: vec![cs(-1.0), cs(-2.0), cs(-3.0)],
            b: vec![cs(1.0), cs(1.0)],
            c: vec![cs(1.0), cs(1.0), cs(1.0)],
            ..Default::default()
        };
        let err = validate_spec(&spec).unwrap_err();
        assert_eq!(
            err.errors(),
            &[Error::LengthMismatch {
                what: "b",
                expected: 3,
                found: 2
            }]
        );
    }

    #[test]
    fn non_finite_entries_are_all_collected() {
        let spec = SpectralSystemSpec {
            eigenvalues: vec![cs(f64::NAN), cs(-1.0)],
            b: vec![cs(1.0), cs(f64::INFINITY)],
            c: vec![cs(1.0), cs(1.0)],
            ..Default::default()
        };
        let err = validate_spec(&spec).unwrap_err();
        assert_eq!(err.errors().len(), 2);
        assert!(err.errors().contains(&Error::NonFiniteEntry {
            what: "eigenvalues",
            index: 0
        }));
    }

    #[test]
    fn power_law_tail_parameters_are_checked() {
        let spec = SpectralSystemSpec {
            tail: TailModel::PowerLaw {
                a: 0.0,
                p: 2.0,
                b_mag: 1.0,
                c_mag: 1.0,
            },
            ..Default::default()
        };
        assert!(matches!(
            validate_spec(&spec).unwrap_err().errors()[0],
            Error::InvalidTail(_)
        ));
    }

    #[test]
    fn validation_is_idempotent() {
        let spec = SpectralSystemSpec {
            eigenvalues: vec![cs(-1.0), ComplexScalar { re: -2.0, im: 3.0 }],
            b: vec![cs(1.0), cs(0.5)],
            c: vec![cs(2.0), ComplexScalar { re: 0.0, im: 1.0 }],
            feedthrough: cs(0.25),
            tail: TailModel::Bound { value: 0.1 },
        };
        let once = validate_spec(&spec).unwrap();
        let twice = validate_spec(&once.to_spec()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn power_law_tail_bound() {
        let t = TailModel::PowerLaw {
            a: 1.0,
            p: 2.0,
            b_mag: 1.0,
            c_mag: 1.0,
        };
        assert!((t.weighted_sum_bound(1000).unwrap() - 1e-3).abs() < 1e-15);
        let harmonic = TailModel::PowerLaw {
            a: 1.0,
            p: 1.0,
            b_mag: 1.0,
            c_mag: 1.0,
        };
        assert_eq!(harmonic.weighted_sum_bound(10), None);
    }

    #[test]
    fn json_schema_roundtrip() {
        let json = r#"{"eigenvalues":[{"re":-1.0,"im":0.0}],"b":[{"re":1.0,"im":0.0}],"c":[{"re":1.0,"im":0.0}],"feedthrough":{"re":0.0,"im":0.0},"tail":{"kind":"none"}}"#;
        let spec: SpectralSystemSpec = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);
        let pl = r#"{"kind":"power-law","a":1.0,"p":2.0,"b_mag":1.0,"c_mag":1.0}"#;
        let t: TailModel = serde_json::from_str(pl).unwrap();
        assert!(matches!(t, TailModel::PowerLaw { .. }));
    }
}
