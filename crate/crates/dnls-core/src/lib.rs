//! Spectral toolbox for the periodic derivative nonlinear Schrödinger (DNLS)
//! equation, its one-parameter gauge group and its Galerkin truncations.
//!
//! The crate is organised around a single value type, [`SpectralState`]: a
//! band-limited complex function on the torus stored as Fourier coefficients
//! `f(n)`, `|n| <= N`, with the convention `f(x) = Σ f(n) e^{inx}`. On top of
//! it sit
//!
//! * [`spectral`] — projections, spectral derivatives, Sobolev norms and
//!   alias-free quadrature of polynomial integrands;
//! * [`gauge`] — the gauge maps `G_α f = e^{iα I[f]} f`, their
//!   finite-dimensional flow on `E_N`, and the divergence/Jacobian of that
//!   flow;
//! * [`flows`] — the gauged DNLS right-hand side, an integrating-factor RK4
//!   evolver for the truncated system, and Liouville (volume preservation)
//!   probes;
//! * [`invariants`] — the conserved functionals `E_0 .. E_2` of DNLS, their
//!   gauged counterparts, and the Leibniz operator measuring their time
//!   derivative along the truncated flow;
//! * [`measures`] — Gaussian ensembles with covariance `(I + (-Δ)^k)^{-1}`,
//!   Wick-theorem moments, smooth cutoffs, Gibbs weights and weighted Monte
//!   Carlo estimators.
//!
//! Everything is a pure function of immutable values; all samplers are
//! counter-based and deterministic in `(seed, index, mode)` so ensembles are
//! reproducible at any worker count.

pub mod error;
pub mod fft;
pub mod fit;
pub mod flows;
pub mod gauge;
pub mod invariants;
pub mod linalg;
pub mod measures;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod states;

pub use error::Error;
pub use flows::{GdnlsCoeffs, JacobianProbe, ModelParams, RhsTerm};
pub use gauge::{GaugeFlowConfig, GaugeImage};
pub use invariants::{DerivativeMode, EnergyIndex};
pub use measures::{Ensemble, EnsembleMember, McEstimate, MeasureSpec, SampleDomain, VarianceConvention};
pub use report::{ExperimentReport, ReportRow, Verdict};
pub use spectral::{NormConvention, ProductFactor, SpectralState};

/// Convenience alias used throughout the crate.
pub type Complex = num_complex::Complex64;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
