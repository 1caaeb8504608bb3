//! Sampled signals on a uniform grid `t_k = k·dt`, `k = 0..len`.
//!
//! Samples are read piecewise-constant from the left: the value `u_k` holds on
//! `[t_k, t_{k+1})`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    dt: f64,
    width: usize,
    samples: Vec<Complex64>,
}

impl Signal {
    /// Scalar signal.
    pub fn new(dt: f64, samples: Vec<Complex64>) -> Result<Self> {
        Self::new_vector(dt, 1, samples)
    }

    /// Vector-valued signal with `width` channels; `flat` is row-major
    /// (all channels of `t_0`, then all of `t_1`, ...).
    pub fn new_vector(dt: f64, width: usize, flat: Vec<Complex64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidSignal(format!("dt must be finite and > 0 (got {dt})")));
        }
        if width == 0 || !flat.len().is_multiple_of(width) {
            return Err(Error::InvalidSignal(format!(
                "{} samples do not split into rows of width {width}",
                flat.len()
            )));
        }
        if let Some(k) = flat.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidSignal(format!("non-finite sample at flat index {k}")));
        }
        Ok(Signal {
            dt,
            width,
            samples: flat,
        })
    }

    pub fn from_real(dt: f64, samples: &[f64]) -> Result<Self> {
        Self::new(dt, samples.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Samples `f(t_k)` at `len` grid points.
    pub fn from_fn(dt: f64, len: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(dt, (0..len).map(|k| f(k as f64 * dt)).collect())
    }

    pub fn constant(dt: f64, len: usize, value: Complex64) -> Result<Self> {
        Self::new(dt, vec![value; len])
    }

    /// Zero signal on the same grid.
    pub fn zeros_like(&self) -> Signal {
        Signal {
            dt: self.dt,
            width: self.width,
            samples: vec![Complex64::new(0.0, 0.0); self.samples.len()],
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.samples.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `T = dt·(len − 1)`, or 0 for an empty signal.
    pub fn duration(&self) -> f64 {
        self.dt * self.len().saturating_sub(1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Flat sample storage.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// All channels at grid point `k`.
    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.samples[k * self.width..(k + 1) * self.width]
    }

    /// Scalar sample `u_k`; panics on vector signals.
    pub fn value(&self, k: usize) -> Complex64 {
        assert_eq!(self.width, 1, "value() on a vector signal");
        self.samples[k]
    }

    pub fn ensure_scalar(&self) -> Result<()> {
        if self.width == 1 {
            Ok(())
        } else {
            Err(Error::InvalidSignal(format!(
                "expected a scalar signal, got width {}",
                self.width
            )))
        }
    }

    /// Largest channel modulus over all samples; 0 when empty.
    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, k: Complex64) -> Signal {
        Signal {
            dt: self.dt,
            width: self.width,
            samples: self.samples.iter().map(|z| z * k).collect(),
        }
    }

    pub fn same_grid(&self, other: &Signal) -> bool {
        self.width == other.width && self.len() == other.len() && self.dt == other.dt
    }

    /// `a·self + b·other` on a shared grid.
    pub fn linear_combination(&self, a: Complex64, other: &Signal, b: Complex64) -> Result<Signal> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch(format!(
                "({}, {} pts, dt {}) vs ({}, {} pts, dt {})",
                self.width,
                self.len(),
                self.dt,
                other.width,
                other.len(),
                other.dt
            )));
        }
        Signal::new_vector(
            self.dt,
            self.width,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    /// Delays the signal by `steps` grid points, padding with zeros and keeping
    /// the length.
    pub fn delayed(&self, steps: usize) -> Signal {
        let n = self.samples.len();
        let shift = (steps * self.width).min(n);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[shift..].copy_from_slice(&self.samples[..n - shift]);
        Signal {
            dt: self.dt,
            width: self.width,
            samples: out,
        }
    }

    /// Max modulus of the pointwise difference.
    pub fn max_abs_diff(&self, other: &Signal) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch("signals live on different grids".into()));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(Signal::from_real(1.0, &[1.0, -2.0, 0.5]).unwrap().sup_norm(), 2.0);
        assert_eq!(Signal::from_real(1.0, &[0.0, 0.0]).unwrap().sup_norm(), 0.0);
        assert_eq!(Signal::new(1.0, vec![c(3.0, 4.0)]).unwrap().sup_norm(), 5.0);
        assert_eq!(Signal::new(1.0, vec![]).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn vector_signal_sup_norm_takes_channel_max() {
        let s = Signal::new_vector(0.5, 2, vec![c(1.0, 0.0), c(0.0, -3.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.sup_norm(), 3.0);
        assert_eq!(s.duration(), 0.5);
        assert!(s.ensure_scalar().is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Signal::from_real(0.0, &[1.0]).is_err());
        assert!(Signal::from_real(f64::NAN, &[1.0]).is_err());
        assert!(Signal::new(1.0, vec![c(f64::INFINITY, 0.0)]).is_err());
        assert!(Signal::new_vector(1.0, 2, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn delay_pads_with_zeros() {
        let s = Signal::from_real(1.0, &[1.0, 2.0, 3.0]).unwrap();
        let d = s.delayed(1);
        assert_eq!(d.samples(), &[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(s.delayed(7).sup_norm(), 0.0);
    }

    proptest! {
        #[test]
        fn sup_norm_is_absolutely_homogeneous(
            xs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 0..50),
            kr in -10f64..10.0, ki in -10f64..10.0,
        ) {
            let s = Signal::new(0.1, xs.iter().map(|&(a, b)| c(a, b)).collect()).unwrap();
            let k = c(kr, ki);
            let lhs = s.scaled(k).sup_norm();
            let rhs = k.norm() * s.sup_norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }
}
