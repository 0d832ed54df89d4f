//! The conserved functionals of DNLS and of its gauged form, plus the
//! operator measuring their time derivative along the truncated flow.
//!
//! Each functional is held as a registry of printed terms
//! `coeff · μ^p · Σ ± ∫ ∏ u^(a)` (with `u` the state or its conjugate), so a
//! term can be evaluated, differentiated along the flow, and unit-tested in
//! isolation. All integrals use the physical convention (`∫ |f'|²` etc.);
//! the relative coefficients of the hierarchy are only conservation laws in
//! that convention.
//!
//! Every registered term is real-valued as printed (pairs like
//! `i∫(X - conj X)` are kept together); evaluation asserts the imaginary
//! residue of each term and reports a quadrature bug instead of truncating
//! it away.

use crate::error::Error;
use crate::flows::{evolve, ModelParams};
use crate::spectral::{
    homogeneous_sobolev_norm_sq, integral_product, mass, project, NormConvention, ProductFactor,
    SpectralState,
};
use crate::{fft, gauge, Complex, Result};
use std::f64::consts::PI;

/// Index of a conserved functional in the explicit hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnergyIndex {
    Zero,
    Half,
    One,
    ThreeHalves,
    Two,
}

impl EnergyIndex {
    pub const ALL: [EnergyIndex; 5] = [
        EnergyIndex::Zero,
        EnergyIndex::Half,
        EnergyIndex::One,
        EnergyIndex::ThreeHalves,
        EnergyIndex::Two,
    ];

    pub fn ell(self) -> f64 {
        match self {
            EnergyIndex::Zero => 0.0,
            EnergyIndex::Half => 0.5,
            EnergyIndex::One => 1.0,
            EnergyIndex::ThreeHalves => 1.5,
            EnergyIndex::Two => 2.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EnergyIndex::Zero => "E0",
            EnergyIndex::Half => "E1/2",
            EnergyIndex::One => "E1",
            EnergyIndex::ThreeHalves => "E3/2",
            EnergyIndex::Two => "E2",
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Factor {
    conj: bool,
    deriv: u32,
}

#[derive(Clone, Debug)]
struct Monomial {
    scale: f64,
    factors: Vec<Factor>,
}

#[derive(Clone, Debug)]
struct EnergyTerm {
    coeff: Complex,
    mu_power: u32,
    monomials: Vec<Monomial>,
}

fn f(deriv: u32) -> Factor {
    Factor { conj: false, deriv }
}

fn fb(deriv: u32) -> Factor {
    Factor { conj: true, deriv }
}

fn m(scale: f64, factors: &[Factor]) -> Monomial {
    Monomial { scale, factors: factors.to_vec() }
}

/// A pure scalar term (`μ^p` only).
fn scalar() -> Vec<Monomial> {
    vec![Monomial { scale: 1.0, factors: Vec::new() }]
}

fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

fn im(x: f64) -> Complex {
    Complex::new(0.0, x)
}

fn t(coeff: Complex, mu_power: u32, monomials: Vec<Monomial>) -> EnergyTerm {
    EnergyTerm { coeff, mu_power, monomials }
}

/// The explicit integrals of motion of the ungauged equation.
fn direct_terms(ell: EnergyIndex, b: f64) -> Vec<EnergyTerm> {
    match ell {
        EnergyIndex::Zero => vec![t(re(0.5), 0, vec![m(1.0, &[f(0), fb(0)])])],
        EnergyIndex::Half => vec![
            t(im(0.5), 0, vec![m(1.0, &[f(1), fb(0)])]),
            t(re(b / 4.0), 0, vec![m(1.0, &[f(0), f(0), fb(0), fb(0)])]),
        ],
        EnergyIndex::One => vec![
            t(re(0.5), 0, vec![m(1.0, &[f(1), fb(1)])]),
            t(im(0.75 * b), 0, vec![m(1.0, &[f(0), fb(0), f(1), fb(0)])]),
            t(re(b * b / 4.0), 0, vec![m(1.0, &[f(0), f(0), f(0), fb(0), fb(0), fb(0)])]),
        ],
        EnergyIndex::ThreeHalves => vec![
            t(im(0.5), 0, vec![m(1.0, &[f(2), fb(1)])]),
            t(
                re(b / 4.0),
                0,
                vec![
                    m(1.0, &[f(1), f(1), fb(0), fb(0)]),
                    m(8.0, &[f(0), fb(0), f(1), fb(1)]),
                    m(1.0, &[f(0), f(0), fb(1), fb(1)]),
                ],
            ),
            t(im(1.25 * b * b), 0, vec![m(1.0, &[f(0), f(0), fb(0), fb(0), f(1), fb(0)])]),
            t(
                re(5.0 / 16.0 * b.powi(3)),
                0,
                vec![m(1.0, &[f(0), f(0), f(0), f(0), fb(0), fb(0), fb(0), fb(0)])],
            ),
        ],
        EnergyIndex::Two => vec![
            t(re(0.5), 0, vec![m(1.0, &[f(2), fb(2)])]),
            t(
                im(1.25 * b),
                0,
                vec![
                    m(1.0, &[f(0), fb(0), f(2), fb(1)]),
                    m(-1.0, &[f(0), fb(0), f(1), fb(2)]),
                ],
            ),
            t(
                re(1.25 * b * b),
                0,
                vec![
                    m(1.0, &[f(0), fb(0), f(1), f(1), fb(0), fb(0)]),
                    m(1.0, &[f(0), fb(0), f(0), f(0), fb(1), fb(1)]),
                ],
            ),
            t(re(6.25 * b * b), 0, vec![m(1.0, &[f(0), f(0), fb(0), fb(0), f(1), fb(1)])]),
            t(
                im(35.0 / 16.0 * b.powi(3)),
                0,
                vec![m(1.0, &[f(0), f(0), f(0), fb(0), fb(0), fb(0), f(1), fb(0)])],
            ),
            t(
                re(7.0 / 16.0 * b.powi(4)),
                0,
                vec![m(
                    1.0,
                    &[f(0), f(0), f(0), f(0), f(0), fb(0), fb(0), fb(0), fb(0), fb(0)],
                )],
            ),
        ],
    }
}

/// The same functionals rewritten in the gauged variable; at `α = 0` both
/// registries must evaluate identically.
fn gauged_terms(ell: EnergyIndex, a: f64, b: f64) -> Vec<EnergyTerm> {
    match ell {
        EnergyIndex::Zero => vec![t(re(0.5), 0, vec![m(1.0, &[f(0), fb(0)])])],
        EnergyIndex::Half => vec![
            t(im(0.5), 0, vec![m(1.0, &[f(1), fb(0)])]),
            t(re((2.0 * a + b) / 4.0), 0, vec![m(1.0, &[f(0), f(0), fb(0), fb(0)])]),
            t(re(-PI * a), 2, scalar()),
        ],
        EnergyIndex::One => vec![
            t(re(0.5), 0, vec![m(1.0, &[f(1), fb(1)])]),
            t(im(a), 1, vec![m(1.0, &[f(0), fb(1)])]),
            t(im((4.0 * a + 3.0 * b) / 4.0), 0, vec![m(1.0, &[f(0), fb(0), f(1), fb(0)])]),
            t(re(PI * a * a), 3, scalar()),
            t(
                re(-a * (4.0 * a + 3.0 * b) / 4.0),
                1,
                vec![m(1.0, &[f(0), f(0), fb(0), fb(0)])],
            ),
            t(
                re((a + b) * (2.0 * a + b) / 4.0),
                0,
                vec![m(1.0, &[f(0), f(0), f(0), fb(0), fb(0), fb(0)])],
            ),
        ],
        EnergyIndex::ThreeHalves => vec![
            t(im(0.5), 0, vec![m(1.0, &[f(2), fb(1)])]),
            t(re(-1.5 * a), 1, vec![m(1.0, &[f(1), fb(1)])]),
            t(
                re((2.0 * a + b) / 4.0),
                0,
                vec![
                    m(1.0, &[f(1), f(1), fb(0), fb(0)]),
                    m(1.0, &[f(0), f(0), fb(1), fb(1)]),
                ],
            ),
            t(re((5.0 * a + 4.0 * b) / 2.0), 0, vec![m(1.0, &[f(0), fb(0), f(1), fb(1)])]),
            t(im(1.5 * a * a), 2, vec![m(1.0, &[f(1), fb(0)])]),
            t(im(-3.0 * a * (a + b)), 1, vec![m(1.0, &[f(0), fb(0), f(1), fb(0)])]),
            t(
                im((6.0 * a * a + 12.0 * a * b + 5.0 * b * b) / 4.0),
                0,
                vec![m(1.0, &[f(0), f(0), fb(0), fb(0), f(1), fb(0)])],
            ),
            t(re(-PI * a.powi(3)), 4, scalar()),
            t(re(1.5 * a * a * (a + b)), 2, vec![m(1.0, &[f(0), f(0), fb(0), fb(0)])]),
            t(
                re(-a * (6.0 * a * a + 12.0 * a * b + 5.0 * b * b) / 4.0),
                1,
                vec![m(1.0, &[f(0), f(0), f(0), fb(0), fb(0), fb(0)])],
            ),
            t(
                re((2.0 * a + b) * (4.0 * a * a + 10.0 * a * b + 5.0 * b * b) / 16.0),
                0,
                vec![m(1.0, &[f(0), f(0), f(0), f(0), fb(0), fb(0), fb(0), fb(0)])],
            ),
        ],
        EnergyIndex::Two => {
            let label3 = 32.0 * a.powi(3)
                + 120.0 * a * a * b
                + 120.0 * a * b * b
                + 35.0 * b.powi(3);
            vec![
                t(re(0.5), 0, vec![m(1.0, &[f(2), fb(2)])]),
                t(im(-2.0 * a), 1, vec![m(1.0, &[f(2), fb(1)])]),
                t(
                    im((6.0 * a + 5.0 * b) / 4.0),
                    0,
                    vec![
                        m(1.0, &[f(0), fb(0), f(2), fb(1)]),
                        m(-1.0, &[f(0), fb(0), f(1), fb(2)]),
                    ],
                ),
                t(
                    im(-0.5 * a),
                    0,
                    vec![
                        m(1.0, &[f(1), f(1), fb(0), fb(1)]),
                        m(-1.0, &[f(0), f(1), fb(1), fb(1)]),
                    ],
                ),
                t(re(3.0 * a * a), 2, vec![m(1.0, &[f(1), fb(1)])]),
                t(re(-10.0 * a * (a + b)), 1, vec![m(1.0, &[f(0), fb(0), f(1), fb(1)])]),
                t(
                    re(-a * (8.0 * a + 5.0 * b) / 4.0),
                    1,
                    vec![
                        m(1.0, &[f(1), f(1), fb(0), fb(0)]),
                        m(1.0, &[f(0), f(0), fb(1), fb(1)]),
                    ],
                ),
                t(
                    re((4.0 * a + 5.0 * b) * (8.0 * a + 5.0 * b) / 4.0),
                    0,
                    vec![m(1.0, &[f(0), f(0), fb(0), fb(0), f(1), fb(1)])],
                ),
                t(
                    re(5.0 * (a + b) * (2.0 * a + b) / 4.0),
                    0,
                    vec![
                        m(1.0, &[f(0), fb(0), f(0), f(0), fb(1), fb(1)]),
                        m(1.0, &[f(0), fb(0), fb(0), fb(0), f(1), f(1)]),
                    ],
                ),
                t(im(-2.0 * a.powi(3)), 3, vec![m(1.0, &[f(1), fb(0)])]),
                t(
                    im(0.75 * a * a * (4.0 * a + 5.0 * b)),
                    2,
                    vec![m(1.0, &[f(0), fb(0), f(1), fb(0)]), m(-1.0, &[f(0), fb(0), f(0), fb(1)])],
                ),
                t(
                    im(-0.75 * a * (4.0 * a * a + 10.0 * a * b + 5.0 * b * b)),
                    1,
                    vec![
                        m(1.0, &[f(0), f(0), fb(0), fb(0), f(1), fb(0)]),
                        m(-1.0, &[f(0), f(0), fb(0), fb(0), f(0), fb(1)]),
                    ],
                ),
                t(
                    im(label3 / 16.0),
                    0,
                    vec![m(1.0, &[f(0), f(0), f(0), fb(0), fb(0), fb(0), f(1), fb(0)])],
                ),
                t(re(PI * a.powi(4)), 5, scalar()),
                t(
                    re(-0.5 * a.powi(3) * (4.0 * a + 5.0 * b)),
                    3,
                    vec![m(1.0, &[f(0), f(0), fb(0), fb(0)])],
                ),
                t(
                    re(0.75 * a * a * (4.0 * a * a + 10.0 * a * b + 5.0 * b * b)),
                    2,
                    vec![m(1.0, &[f(0), f(0), f(0), fb(0), fb(0), fb(0)])],
                ),
                t(
                    re(-a * label3 / 16.0),
                    1,
                    vec![m(1.0, &[f(0), f(0), f(0), f(0), fb(0), fb(0), fb(0), fb(0)])],
                ),
                t(
                    re((a + b) * (2.0 * a + b)
                        * (4.0 * a * a + 14.0 * a * b + 7.0 * b * b)
                        / 16.0),
                    0,
                    vec![m(
                        1.0,
                        &[f(0), f(0), f(0), f(0), f(0), fb(0), fb(0), fb(0), fb(0), fb(0)],
                    )],
                ),
            ]
        }
    }
}

fn eval_monomial(state: &SpectralState, mono: &Monomial) -> Result<Complex> {
    if mono.factors.is_empty() {
        return Ok(Complex::new(mono.scale, 0.0));
    }
    let factors: Vec<ProductFactor> = mono
        .factors
        .iter()
        .map(|fac| ProductFactor::new(state, fac.conj, fac.deriv))
        .collect();
    Ok(integral_product(&factors)? * mono.scale)
}

fn eval_terms(state: &SpectralState, terms: &[EnergyTerm]) -> Result<f64> {
    let mu = mass(state);
    let mut total = 0.0;
    for term in terms {
        if term.coeff.norm_sqr() == 0.0 {
            continue;
        }
        let mut inner = Complex::default();
        for mono in &term.monomials {
            inner += eval_monomial(state, mono)?;
        }
        let value = term.coeff * mu.powi(term.mu_power as i32) * inner;
        let tol = 1e-9 * (1.0 + value.re.abs());
        if value.im.abs() > tol {
            return Err(Error::ImaginaryResidue {
                residue: value.im.abs(),
                tolerance: tol,
                context: "conserved-functional term",
            });
        }
        total += value.re;
    }
    Ok(total)
}

/// The conserved functional `E_ℓ[ψ; β]` of the ungauged equation.
pub fn energy(state: &SpectralState, ell: EnergyIndex, beta: f64) -> Result<f64> {
    eval_terms(state, &direct_terms(ell, beta))
}

/// The gauged functional `ℰ_ℓ[φ; α, β]`; equal to [`energy`] at `α = 0`.
pub fn gauged_energy(state: &SpectralState, ell: EnergyIndex, alpha: f64, beta: f64) -> Result<f64> {
    eval_terms(state, &gauged_terms(ell, alpha, beta))
}

/// `Q_k = E_k - ½‖·‖²_{Ḣ^k}` (only `k = 2` has an explicit formula).
pub fn qk(state: &SpectralState, k: u32, beta: f64) -> Result<f64> {
    if k != 2 {
        return Err(Error::FormulaUnavailable { k });
    }
    Ok(energy(state, EnergyIndex::Two, beta)?
        - 0.5 * homogeneous_sobolev_norm_sq(state, 2.0, NormConvention::Physical))
}

/// `Q̃_k = ℰ_k - ½‖·‖²_{Ḣ^k}` (only `k = 2`).
pub fn tilde_qk(state: &SpectralState, k: u32, alpha: f64, beta: f64) -> Result<f64> {
    if k != 2 {
        return Err(Error::FormulaUnavailable { k });
    }
    Ok(gauged_energy(state, EnergyIndex::Two, alpha, beta)?
        - 0.5 * homogeneous_sobolev_norm_sq(state, 2.0, NormConvention::Physical))
}

/// `|ℰ_ℓ[G_α ψ] - E_ℓ[ψ]|` with the gauge image retained at `out_band`.
/// One number that exercises the whole printed formula block against the
/// gauge implementation.
pub fn gauge_energy_identity_residual(
    state: &SpectralState,
    ell: EnergyIndex,
    alpha: f64,
    beta: f64,
    out_band: usize,
) -> Result<f64> {
    let image = gauge::gauge_apply(state, alpha, out_band);
    let gauged = gauged_energy(&image.state, ell, alpha, beta)?;
    let direct = energy(state, ell, beta)?;
    Ok((gauged - direct).abs())
}

/// How the time derivative along the truncated flow is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    /// Leibniz rule on each registered monomial, with the slot replaced by
    /// the projection defect of the vector field. Exact (no time stepping);
    /// vanishes identically when every nonlinear image stays in band.
    Leibniz,
    /// Centred difference of `ℰ_ℓ` along the flow with one Richardson
    /// extrapolation step, `O(h⁴)`.
    FiniteDifference,
}

/// The part of the truncated vector field lost to the Galerkin projection:
/// `Δ = -P_{>N}( c1 |φ|²φ' + c2 φ² conj(φ)' - i c3 |φ|⁴φ - i c4 μ |φ|²φ )`,
/// a band-`5N` state vanishing on `|n| <= N`. The time derivative of any
/// conserved functional along the truncated flow is its Leibniz pairing with
/// `Δ`.
pub fn truncation_defect(state: &SpectralState, params: &ModelParams) -> SpectralState {
    let n = params.n_modes;
    let s = project(state, n);
    let mu = mass(&s);
    let c = params.coeffs();
    let out_band = 5 * n;
    // The quintic products of a state of band b live exactly in band 5b;
    // everything beyond is structurally zero and must stay exactly zero so
    // in-band data yields an identically vanishing defect.
    let prod_band = 5 * effective_band(&s).min(n);
    let mut out = SpectralState::zero(out_band);
    if prod_band <= n {
        return out;
    }
    let m = fft::next_smooth(2 * prod_band + 1);
    let v = s.grid_values(m);
    let dv = crate::spectral::derivative(&s, 1).grid_values(m);
    let mut q = vec![Complex::default(); m];
    for j in 0..m {
        let a = v[j].norm_sqr();
        q[j] = c.c1 * a * dv[j]
            + c.c2 * v[j] * v[j] * dv[j].conj()
            + Complex::new(0.0, -(c.c3 * a + c.c4 * mu) * a) * v[j];
    }
    let spectrum = fft::spectrum_from_values(&q);
    let coeffs = fft::band_from_spectrum(&spectrum, prod_band);
    for (i, &co) in coeffs.iter().enumerate() {
        let mode = i as i64 - prod_band as i64;
        if mode.unsigned_abs() as usize > n {
            out.set_coeff(mode, -co);
        }
    }
    out
}

/// Largest `|n|` carrying a nonzero coefficient.
fn effective_band(state: &SpectralState) -> usize {
    state
        .modes()
        .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
        .map(|(n, _)| n.unsigned_abs() as usize)
        .max()
        .unwrap_or(0)
}

/// `d/dt ℰ_ℓ[Φ^N_t(φ)] |_{t=0}` for the truncated flow with the given
/// parameters. `h` is only used by the finite-difference mode.
pub fn dn_energy(
    state: &SpectralState,
    ell: EnergyIndex,
    params: &ModelParams,
    mode: DerivativeMode,
    h: f64,
) -> Result<f64> {
    match mode {
        DerivativeMode::Leibniz => dn_energy_leibniz(state, ell, params),
        DerivativeMode::FiniteDifference => {
            if h.is_nan() || h <= 0.0 {
                return Err(Error::InvalidArgument("finite differences need h > 0".into()));
            }
            let quotient = |hh: f64| -> Result<f64> {
                let plus = evolve(state, params, hh, hh)?;
                let minus = evolve(state, params, -hh, hh)?;
                Ok((gauged_energy(&plus, ell, params.alpha, params.beta)?
                    - gauged_energy(&minus, ell, params.alpha, params.beta)?)
                    / (2.0 * hh))
            };
            let d1 = quotient(h)?;
            let d2 = quotient(h / 2.0)?;
            Ok((4.0 * d2 - d1) / 3.0)
        }
    }
}

fn dn_energy_leibniz(state: &SpectralState, ell: EnergyIndex, params: &ModelParams) -> Result<f64> {
    let n = params.n_modes;
    let s = project(state, n);
    let defect = truncation_defect(&s, params);
    if defect.coeffs().iter().all(|c| c.re == 0.0 && c.im == 0.0) {
        return Ok(0.0);
    }
    let mu = mass(&s);
    let terms = gauged_terms(ell, params.alpha, params.beta);
    let mut total = Complex::default();
    for term in &terms {
        if term.coeff.norm_sqr() == 0.0 {
            continue;
        }
        let mut inner = Complex::default();
        for mono in &term.monomials {
            inner += leibniz_monomial(&s, &defect, mono)? * mono.scale;
        }
        total += term.coeff * mu.powi(term.mu_power as i32) * inner;
    }
    debug_assert!(
        total.im.abs() <= 1e-8 * (1.0 + total.re.abs()),
        "imaginary leak {} in Leibniz derivative",
        total.im
    );
    Ok(total.re)
}

/// Σ over slots of `∫ (∏_{i != j} u^(a_i)) Δ^(a_j)` for one monomial.
fn leibniz_monomial(
    state: &SpectralState,
    defect: &SpectralState,
    mono: &Monomial,
) -> Result<Complex> {
    let len = mono.factors.len();
    if len == 0 {
        return Ok(Complex::default());
    }
    if len == 2 {
        let mut acc = Complex::default();
        for j in 0..2 {
            let factors: Vec<ProductFactor> = mono
                .factors
                .iter()
                .enumerate()
                .map(|(i, fac)| {
                    ProductFactor::new(if i == j { defect } else { state }, fac.conj, fac.deriv)
                })
                .collect();
            acc += integral_product(&factors)?;
        }
        return Ok(acc);
    }

    // Shared grid: every slot replacement has the same total band.
    let total_band = (len - 1) * state.band() + defect.band();
    let grid = fft::next_smooth(total_band + 1);
    let state_values: Vec<Vec<Complex>> = mono
        .factors
        .iter()
        .map(|fac| factor_values(state, fac, grid))
        .collect();
    let defect_values: Vec<Vec<Complex>> = mono
        .factors
        .iter()
        .map(|fac| factor_values(defect, fac, grid))
        .collect();

    // prefix[j] = ∏_{i<j} v_i, suffix accumulated in reverse.
    let mut prefix = vec![Complex::new(1.0, 0.0); grid];
    let mut suffixes: Vec<Vec<Complex>> = Vec::with_capacity(len);
    let mut suffix = vec![Complex::new(1.0, 0.0); grid];
    suffixes.push(suffix.clone());
    for values in state_values.iter().skip(1).rev() {
        for (sfx, v) in suffix.iter_mut().zip(values.iter()) {
            *sfx *= v;
        }
        suffixes.push(suffix.clone());
    }
    suffixes.reverse();

    let mut acc = Complex::default();
    for j in 0..len {
        let sfx = &suffixes[j];
        let dvals = &defect_values[j];
        let mut slot_sum = Complex::default();
        for x in 0..grid {
            slot_sum += prefix[x] * sfx[x] * dvals[x];
        }
        acc += slot_sum;
        if j + 1 < len {
            for (p, v) in prefix.iter_mut().zip(state_values[j].iter()) {
                *p *= v;
            }
        }
    }
    Ok(acc * (crate::spectral::TAU / grid as f64))
}

fn factor_values(state: &SpectralState, fac: &Factor, grid: usize) -> Vec<Complex> {
    let pf = ProductFactor::new(state, fac.conj, fac.deriv);
    let coeffs = pf.effective_coeffs();
    fft::values_from_coeffs(&coeffs, state.band(), grid)
}
