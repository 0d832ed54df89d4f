//! Gaussian ensembles, Wick moments, Gibbs weights and weighted Monte Carlo.
//!
//! The reference measure has independent complex Fourier modes with
//! `E[f(n) conj(f(m))] = δ_{nm} v_n`. Two per-mode variance conventions are
//! exposed because both appear in the formal objects being verified:
//!
//! * [`VarianceConvention::Wick`]: `v_n = 1/(1+n^{2k})`, matching the
//!   permutation-sum moment formula used by the stationarity experiments;
//! * [`VarianceConvention::Physical`]: `v_n = 1/(π(1+n^{2k}))`, under which
//!   the Gaussian density against Lebesgue is exactly
//!   `exp(-π Σ (1+n^{2k})|f(n)|²) = exp(-½‖f‖²_{H^k,phys})`, so the
//!   quadratic part of the k-th functional cancels in the Gibbs weight —
//!   mandatory for the measure-invariance experiment.
//!
//! Sampling is counter-based: mode `n` of sample `index` depends only on
//! `(seed, index, n)`, so enlarging the band extends an ensemble instead of
//! reshuffling it, and any parallel schedule reproduces the same members.

use crate::error::Error;
use crate::invariants::{energy, gauged_energy, qk, tilde_qk, EnergyIndex};
use crate::rng::gauss_pair;
use crate::spectral::{mass, project, SpectralState};
use crate::{Complex, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceConvention {
    Wick,
    Physical,
}

/// Specification of the Gaussian measure, its mass restriction and the
/// cutoff radii of the associated Gibbs weights.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub k: u32,
    pub n_modes: usize,
    pub convention: VarianceConvention,
    /// Cutoff radii `R_0 .. R_{k-1}` applied to the functionals of index
    /// `0 .. k-1` inside the Gibbs weight.
    pub radii: Vec<f64>,
    /// Mass bound of the restricted measure (rejection on `μ[f] <= R0`).
    pub r0_restrict: f64,
}

impl MeasureSpec {
    pub fn new(k: u32, n_modes: usize, convention: VarianceConvention) -> Self {
        // Default radii keep the whole restricted support on the cutoff
        // plateau for the k = 2 weights.
        let radii = (0..k).map(|m| if m == 0 { 1.0 } else { 20.0 }).collect();
        Self { k, n_modes, convention, radii, r0_restrict: 0.1 }
    }

    pub fn with_restriction(mut self, r0: f64) -> Self {
        self.r0_restrict = r0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("measure index k must be >= 2, got {}", self.k)));
        }
        if self.radii.len() != self.k as usize {
            return Err(Error::InvalidArgument(format!(
                "need {} cutoff radii, got {}",
                self.k,
                self.radii.len()
            )));
        }
        if self.radii.iter().any(|r| *r <= 0.0) || self.r0_restrict <= 0.0 {
            return Err(Error::InvalidArgument("cutoff radii must be positive".into()));
        }
        Ok(())
    }

    /// Per-mode variance `v_n = E|f(n)|²`.
    pub fn variance(&self, n: i64) -> f64 {
        let base = 1.0 + (n as f64).powi(2 * self.k as i32);
        match self.convention {
            VarianceConvention::Wick => 1.0 / base,
            VarianceConvention::Physical => 1.0 / (PI * base),
        }
    }
}

/// One draw from the Gaussian measure: `f(n) = σ_n (a + ib)` with
/// independent standard normals and `σ_n² = v_n / 2`.
pub fn sample_gamma(spec: &MeasureSpec, index: u64, seed: u64) -> SpectralState {
    let band = spec.n_modes as i64;
    let mut s = SpectralState::zero(spec.n_modes);
    for n in -band..=band {
        let (a, b) = gauss_pair(seed, index, n);
        let sigma = (spec.variance(n) / 2.0).sqrt();
        s.set_coeff(n, Complex::new(a, b) * sigma);
    }
    s
}

const MAX_REJECTION_ATTEMPTS: u64 = 4096;

/// One draw from the restricted measure (exact rejection on
/// `μ[f] <= r0_restrict`). Returns the accepted state and the number of
/// attempts consumed.
pub fn sample_gamma_restricted(
    spec: &MeasureSpec,
    index: u64,
    seed: u64,
) -> Result<(SpectralState, u64)> {
    for attempt in 0..MAX_REJECTION_ATTEMPTS {
        let raw = index * MAX_REJECTION_ATTEMPTS + attempt;
        let s = sample_gamma(spec, raw, seed);
        if mass(&s) <= spec.r0_restrict {
            return Ok((s, attempt + 1));
        }
    }
    Err(Error::RejectionStarvation { acceptance: 1.0 / MAX_REJECTION_ATTEMPTS as f64 })
}

/// Exact Gaussian moment `E[∏_j f(n_j) conj(f(m_j))]` by explicit
/// enumeration of the permutation sum. Guarded at `ℓ <= 8`.
pub fn wick_moment(ns: &[i64], ms: &[i64], spec: &MeasureSpec) -> Result<f64> {
    if ns.len() != ms.len() {
        return Err(Error::InvalidArgument("wick_moment needs as many n's as m's".into()));
    }
    let ell = ns.len();
    if ell == 0 || ell > 8 {
        return Err(Error::InvalidArgument(format!(
            "wick_moment supports 1 <= ℓ <= 8 pairs, got {ell}"
        )));
    }
    let mut perm: Vec<usize> = (0..ell).collect();
    let mut total = 0.0;
    // Heap's algorithm, iterative.
    let mut counters = vec![0usize; ell];
    let mut contribution = |perm: &[usize]| {
        let mut prod = 1.0;
        for (j, &pj) in perm.iter().enumerate() {
            if ms[j] != ns[pj] {
                return;
            }
            prod *= spec.variance(ns[pj]);
        }
        total += prod;
    };
    contribution(&perm);
    let mut i = 0;
    while i < ell {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            contribution(&perm);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(total)
}

/// Smooth cutoff `χ_R(x) = χ(x/R)`: identically 1 for `|x| <= R/2`, zero for
/// `|x| >= R`, C^∞ in between (`χ(y) = h(2(1-|y|))` with
/// `h(t) = s(t)/(s(t)+s(1-t))`, `s(t) = e^{-1/t}`).
pub fn cutoff_chi(x: f64, r: f64) -> f64 {
    assert!(r > 0.0, "cutoff radius must be positive");
    let y = (x / r).abs();
    if y <= 0.5 {
        1.0
    } else if y >= 1.0 {
        0.0
    } else {
        let s = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
        let t = 2.0 * (1.0 - y);
        s(t) / (s(t) + s(1.0 - t))
    }
}

/// Gibbs weight `∏_{m<k} χ_{R_m}(E_m[P_N f]) · e^{-Q_k[P_N f]}`
/// (only `k = 2` has explicit formulas).
pub fn gibbs_weight(state: &SpectralState, spec: &MeasureSpec, beta: f64) -> Result<f64> {
    spec.validate()?;
    let p = project(state, spec.n_modes);
    let q = qk(&p, spec.k, beta)?;
    let e0 = energy(&p, EnergyIndex::Zero, beta)?;
    let e1 = energy(&p, EnergyIndex::One, beta)?;
    Ok(cutoff_chi(e0, spec.radii[0]) * cutoff_chi(e1, spec.radii[1]) * (-q).exp())
}

/// Gauged Gibbs weight: same shape with the gauged functionals.
pub fn gauged_gibbs_weight(
    state: &SpectralState,
    spec: &MeasureSpec,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    spec.validate()?;
    let p = project(state, spec.n_modes);
    let q = tilde_qk(&p, spec.k, alpha, beta)?;
    let e0 = gauged_energy(&p, EnergyIndex::Zero, alpha, beta)?;
    let e1 = gauged_energy(&p, EnergyIndex::One, alpha, beta)?;
    Ok(cutoff_chi(e0, spec.radii[0]) * cutoff_chi(e1, spec.radii[1]) * (-q).exp())
}

#[derive(Clone, Copy, Debug)]
pub enum SampleDomain {
    /// The full Gaussian measure.
    Full,
    /// The mass-restricted measure (rejection on `μ <= R0`).
    MassRestricted,
}

#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    /// `sqrt( mean |F|² )`.
    pub estimate: f64,
    /// Delta-method standard error of the estimate.
    pub stderr: f64,
    /// Rejection acceptance rate (1 for the full measure).
    pub acceptance: f64,
}

/// Monte Carlo estimate of `‖F‖_{L²}` under the (possibly restricted)
/// Gaussian measure: the square root of the empirical mean of `|F(f)|²`
/// over `m_samples` independent draws. Deterministic given `(seed, m)`.
pub fn mc_functional_l2<F>(
    functional: F,
    spec: &MeasureSpec,
    domain: SampleDomain,
    m_samples: usize,
    seed: u64,
) -> Result<McEstimate>
where
    F: Fn(&SpectralState) -> Result<f64> + Sync,
{
    spec.validate()?;
    if m_samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "statistical estimates need at least 100 samples, got {m_samples}"
        )));
    }
    let results: Vec<(f64, u64)> = (0..m_samples as u64)
        .into_par_iter()
        .map(|i| -> Result<(f64, u64)> {
            let (state, attempts) = match domain {
                SampleDomain::Full => (sample_gamma(spec, i, seed), 1),
                SampleDomain::MassRestricted => sample_gamma_restricted(spec, i, seed)?,
            };
            let v = functional(&state)?;
            Ok((v * v, attempts))
        })
        .collect::<Result<Vec<_>>>()?;
    let attempts: u64 = results.iter().map(|r| r.1).sum();
    let acceptance = m_samples as f64 / attempts as f64;
    if acceptance < 0.01 {
        return Err(Error::RejectionStarvation { acceptance });
    }
    let mean: f64 = results.iter().map(|r| r.0).sum::<f64>() / m_samples as f64;
    let var: f64 = results.iter().map(|r| (r.0 - mean).powi(2)).sum::<f64>()
        / (m_samples.max(2) - 1) as f64;
    let se_mean = (var / m_samples as f64).sqrt();
    let estimate = mean.max(0.0).sqrt();
    let stderr = if estimate > 0.0 { se_mean / (2.0 * estimate) } else { 0.0 };
    Ok(McEstimate { estimate, stderr, acceptance })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub index: u64,
    pub weight: f64,
    pub state: SpectralState,
}

/// A weighted sample set with its RNG provenance.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub members: Vec<EnsembleMember>,
    pub seed: u64,
    pub spec: MeasureSpec,
}

impl Ensemble {
    /// Effective sample size `(Σw)² / Σw²`.
    pub fn effective_sample_size(&self) -> f64 {
        let sw: f64 = self.members.iter().map(|m| m.weight).sum();
        let sw2: f64 = self.members.iter().map(|m| m.weight * m.weight).sum();
        if sw2 > 0.0 {
            sw * sw / sw2
        } else {
            0.0
        }
    }

    /// Weighted mean of an observable over the members.
    pub fn weighted_mean(&self, mut obs: impl FnMut(&EnsembleMember) -> f64) -> f64 {
        let sw: f64 = self.members.iter().map(|m| m.weight).sum();
        self.members.iter().map(|m| m.weight * obs(m)).sum::<f64>() / sw
    }

    /// One member per line: `{"index":…,"weight":…,"state":{…}}`.
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        for member in &self.members {
            let line = serde_json::to_string(member)
                .map_err(|e| Error::Serialization(e.to_string()))?;
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_jsonl(r: impl BufRead, seed: u64, spec: MeasureSpec) -> Result<Self> {
        let mut members = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            members.push(
                serde_json::from_str::<EnsembleMember>(&line)
                    .map_err(|e| Error::Serialization(e.to_string()))?,
            );
        }
        Ok(Self { members, seed, spec })
    }
}

/// Weighted ensemble for the gauged Gibbs measure: restricted Gaussian draws
/// carrying `gauged_gibbs_weight` as importance weights.
pub fn sample_rho_tilde(
    spec: &MeasureSpec,
    alpha: f64,
    beta: f64,
    m_samples: usize,
    seed: u64,
) -> Result<Ensemble> {
    spec.validate()?;
    let members: Vec<EnsembleMember> = (0..m_samples as u64)
        .into_par_iter()
        .map(|i| -> Result<EnsembleMember> {
            let (state, _) = sample_gamma_restricted(spec, i, seed)?;
            let weight = gauged_gibbs_weight(&state, spec, alpha, beta)?;
            Ok(EnsembleMember { index: i, weight, state })
        })
        .collect::<Result<Vec<_>>>()?;
    if !members.iter().any(|m| m.weight > 0.0) {
        return Err(Error::EssCollapse { ess: 0.0, m: m_samples });
    }
    Ok(Ensemble { members, seed, spec: spec.clone() })
}

/// The pushforward ensemble: the same members sent through the inverse gauge
/// (`f -> G_{-α} f`, retained at band `N`), weights unchanged. Gauging a
/// member back by `G_α` recovers the corresponding `ρ̃` sample up to the
/// band truncation.
pub fn sample_rho_hat(
    spec: &MeasureSpec,
    alpha: f64,
    beta: f64,
    m_samples: usize,
    seed: u64,
) -> Result<Ensemble> {
    let tilde = sample_rho_tilde(spec, alpha, beta, m_samples, seed)?;
    let members = tilde
        .members
        .into_par_iter()
        .map(|mut member| {
            member.state =
                crate::gauge::gauge_apply(&member.state, -alpha, spec.n_modes).state;
            member
        })
        .collect();
    Ok(Ensemble { members, seed, spec: spec.clone() })
}
