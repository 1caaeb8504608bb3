//! Measures of bounded total variation on `[0, ∞)`: Dirac atoms plus a modal
//! density. Provides the total-variation norm, convolution with sampled
//! signals and the BIBO inequality check.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{stepping_chunk, Exec};
use crate::quadrature::QuadratureConfig;
use crate::signal::Signal;
use crate::special::phi1;
use crate::spectral::{impulse_density, ImpulseDensity, L1Estimate, Mode};
use crate::sum::{ComplexNeumaier, Neumaier};
use crate::system::SpectralSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalVariation {
    pub atoms: f64,
    pub density: L1Estimate,
}

impl TotalVariation {
    pub fn total(&self) -> f64 {
        self.atoms + self.density.total()
    }
}

/// `h = Σ wⱼ δ(t − τⱼ) + density(t) dt`.
#[derive(Debug, Clone)]
pub struct BVMeasure {
    atoms: Vec<Atom>,
    density: Option<ImpulseDensity>,
    tv_cache: OnceLock<(QuadratureConfig, TotalVariation)>,
}

impl BVMeasure {
    pub fn new(atoms: Vec<Atom>, density: Option<ImpulseDensity>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            let finite = a.location.is_finite() && a.weight.re.is_finite() && a.weight.im.is_finite();
            if !finite || a.location < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i} must have a finite location ≥ 0 and a finite weight"
                )));
            }
            if i > 0 && atoms[i - 1].location >= a.location {
                return Err(Error::InvalidMeasure(
                    "atom locations must be strictly increasing".into(),
                ));
            }
        }
        Ok(BVMeasure {
            atoms,
            density,
            tv_cache: OnceLock::new(),
        })
    }

    pub fn dirac(weight: Complex64) -> Self {
        Self::new(vec![Atom { location: 0.0, weight }], None).expect("valid atom")
    }

    pub fn from_density(density: ImpulseDensity) -> Self {
        Self::new(Vec::new(), Some(density)).expect("no atoms")
    }

    /// Impulse response of a system: `α δ + Σ bₙ cₙ* e^{λₙ t}`.
    pub fn from_system(sys: &SpectralSystem) -> Result<Self> {
        let alpha = sys.feedthrough();
        let atoms = if alpha == Complex64::new(0.0, 0.0) {
            Vec::new()
        } else {
            vec![Atom {
                location: 0.0,
                weight: alpha,
            }]
        };
        let density = impulse_density(sys)?;
        Self::new(atoms, (!density.is_zero()).then_some(density))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&ImpulseDensity> {
        self.density.as_ref()
    }

    /// `‖h‖_M = Σ|wⱼ| + ∫₀^∞ |density|`. Cached per quadrature configuration.
    pub fn total_variation(&self, cfg: &QuadratureConfig) -> Result<TotalVariation> {
        if let Some((cached_cfg, tv)) = self.tv_cache.get() {
            if cached_cfg == cfg {
                return Ok(*tv);
            }
        }
        if let Some(d) = &self.density {
            if !d.is_zero() && d.decay_rate() <= 0.0 {
                return Err(Error::NonIntegrableDensity {
                    decay_rate: d.decay_rate(),
                });
            }
        }
        let atoms = self.atoms.iter().map(|a| a.weight.norm()).collect::<Neumaier>().total();
        let density = match &self.density {
            Some(d) => d.l1_norm(cfg),
            None => ImpulseDensity::new(Vec::new())?.l1_norm(cfg),
        };
        let tv = TotalVariation { atoms, density };
        let _ = self.tv_cache.set((*cfg, tv));
        Ok(tv)
    }

    pub fn convolve(&self, u: &Signal) -> Result<Convolution> {
        self.convolve_with(u, Exec::default())
    }

    /// `y = h ∗ u` on the grid of `u`.
    ///
    /// Atoms are snapped to the nearest grid point. The density part is exact
    /// for piecewise-constant `u`: per mode, the segment `[t_k, t_{k+1})`
    /// contributes `w·u_k·(e^{λΔ} − 1)/λ`, propagated by `e^{λΔ}`.
    pub fn convolve_with(&self, u: &Signal, exec: Exec) -> Result<Convolution> {
        u.ensure_scalar()?;
        let k_len = u.len();
        let dt = u.dt();
        let samples = u.samples();
        let mut acc = vec![ComplexNeumaier::new(); k_len];
        let mut snap_error: f64 = 0.0;
        for atom in &self.atoms {
            let steps = (atom.location / dt).round();
            snap_error = snap_error.max((atom.location - steps * dt).abs());
            let steps = steps as usize;
            for k in steps..k_len {
                acc[k].add(atom.weight * samples[k - steps]);
            }
        }
        if let Some(d) = &self.density {
            let modal = modal_convolution(d.modes(), samples, dt, exec);
            for (a, v) in acc.iter_mut().zip(modal) {
                a.add(v);
            }
        }
        Ok(Convolution {
            output: Signal::new(dt, acc.iter().map(|a| a.total()).collect())?,
            snap_error,
        })
    }
}

/// Convolution output with the largest atom snap distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Convolution {
    pub output: Signal,
    pub snap_error: f64,
}

/// `Σₙ wₙ ∫₀^{t_k} e^{λₙ(t_k − s)} u(s) ds` for every grid point, computed per
/// mode chunk and reduced across chunks in order.
fn modal_convolution(modes: &[Mode], u: &[Complex64], dt: f64, exec: Exec) -> Vec<Complex64> {
    let k_len = u.len();
    let parts = exec.map_chunks(modes, stepping_chunk(modes.len()), |_, chunk| {
        let mut acc = vec![ComplexNeumaier::new(); k_len];
        for m in chunk {
            let z = m.eigenvalue * dt;
            let decay = z.exp();
            let gain = m.weight * dt * phi1(z);
            let mut state = Complex64::new(0.0, 0.0);
            for (a, &uk) in acc.iter_mut().zip(u) {
                a.add(state);
                state = decay * state + gain * uk;
            }
        }
        acc.into_iter().map(|a| a.total()).collect::<Vec<_>>()
    });
    (0..k_len)
        .map(|k| parts.iter().map(|p| p[k]).collect::<ComplexNeumaier>().total())
        .collect()
}

/// Outcome of comparing `‖h ∗ u‖∞ / ‖u‖∞` with `‖h‖_M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiboCheck {
    pub ratio: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Relative slack allowed on the BIBO inequality.
pub const BIBO_REL_SLACK: f64 = 1e-6;

pub fn bibo_bound_check(h: &BVMeasure, u: &Signal, cfg: &QuadratureConfig) -> Result<BiboCheck> {
    let unorm = u.sup_norm();
    if unorm == 0.0 {
        return Err(Error::ZeroInput);
    }
    let y = h.convolve(u)?.output;
    let ratio = y.sup_norm() / unorm;
    let bound = h.total_variation(cfg)?.total();
    Ok(BiboCheck {
        ratio,
        bound,
        ok: ratio <= bound * (1.0 + BIBO_REL_SLACK),
    })
}
