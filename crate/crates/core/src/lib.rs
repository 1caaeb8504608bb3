//! Numerical toolkit for bounded-input bounded-output (BIBO) stability of
//! infinite-dimensional linear systems given in truncated Riesz-spectral
//! (diagonal) form.
//!
//! A system is described by eigenvalues `λₙ`, input coefficients `bₙ`, output
//! coefficients `cₙ` and a feedthrough constant `α`, so that its transfer
//! function is `G(s) = α + Σ bₙ·conj(cₙ)/(s − λₙ)` and its impulse response is
//! the measure `α·δ + Σ bₙ·conj(cₙ)·e^{λₙ t} dt`.
//!
//! The crate provides
//! - sufficient-condition checkers producing [`BiboReport`]s ([`spectral`]),
//! - bounded-variation measures, their total variation and convolution
//!   with piecewise-constant signals ([`measure`]),
//! - forward and inverse numerical Laplace transforms ([`laplace`]),
//! - exact exponential-integrator simulation and empirical BIBO ratios
//!   ([`simulate`]),
//! - the multiplicative counterexample with its digamma transfer function
//!   and the additive-perturbation decomposition harness ([`perturbation`]).
//!
//! Mode sums are parallelised with rayon when the `parallel` feature is on
//! (the default); results do not depend on the number of worker threads.

// NaN-rejecting `!(x > 0.0)` guards and full-precision quadrature tables are
// intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod corpus;
pub mod error;
pub mod exec;
pub mod io;
pub mod laplace;
pub mod measure;
pub mod perturbation;
pub mod quadrature;
pub mod report;
pub mod signal;
pub mod simulate;
pub mod special;
pub mod spectral;
pub mod sum;
pub mod system;

pub use error::{Error, Result, ValidationErrors};
pub use exec::Exec;
pub use measure::{Atom, BVMeasure};
pub use report::{BiboReport, Condition, Provenance, Quantity, Verdict};
pub use signal::Signal;
pub use spectral::{ImpulseDensity, Mode, TransferFn};
pub use system::{validate_spec, HalfPlane, SpectralSystem, SpectralSystemSpec, TailModel};

pub use num_complex::Complex64;
