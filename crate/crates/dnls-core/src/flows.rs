//! Right-hand sides and time integration for the (gauged) DNLS Galerkin
//! truncations.
//!
//! The truncated gauged equation on `E_N` reads
//!
//! ```text
//! ∂_t φ = i φ'' - 2αμ φ' + c1 P_N(|φ|²φ') + c2 P_N(φ²conj(φ)')
//!         - i c3 P_N(|φ|⁴φ) - i c4 μ P_N(|φ|²φ) - i Γ[φ] φ
//! ```
//!
//! with real constants `c1 = 2(α+β)`, `c2 = 2α+β`, `c3 = -α² - αβ/2`,
//! `c4 = -αβ` and the real potential
//! `Γ[f] = (3αβ/4π + α²/π) ∫|f|⁴ - α² μ[f]² + Re[(iα/π) ∫ f' conj(f)]`.
//! At `α = 0` this is the truncated DNLS equation itself.
//!
//! Time stepping is an integrating-factor RK4: the linear symbol
//! `λ_n = -i n² - 2iαμn` (with the exactly conserved mass `μ` frozen per
//! trajectory) is absorbed into unimodular exponentials, so the stiff phase
//! never limits the step.

use crate::error::Error;
use crate::spectral::{mass, project, SpectralState, TAU};
use crate::{fft, Complex, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Model parameters: nonlinearity strength `β`, gauge parameter `α`, measure
/// index `k` and truncation band `N`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    pub alpha: f64,
    pub k: u32,
    pub n_modes: usize,
}

/// The distinguished gauge `α_k = -(2k+1)/(2k+2) β` that cancels the leading
/// cross term of the k-th conserved functional.
pub fn canonical_alpha(k: u32, beta: f64) -> f64 {
    -((2 * k + 1) as f64) / ((2 * k + 2) as f64) * beta
}

impl ModelParams {
    pub fn new(beta: f64, alpha: f64, k: u32, n_modes: usize) -> Self {
        Self { beta, alpha, k, n_modes }
    }

    /// Parameters with the canonical gauge choice for index `k`.
    pub fn canonical(beta: f64, k: u32, n_modes: usize) -> Self {
        Self { beta, alpha: canonical_alpha(k, beta), k, n_modes }
    }

    pub fn is_canonical_gauge(&self) -> bool {
        (self.alpha - canonical_alpha(self.k, self.beta)).abs()
            <= 1e-15 * (1.0 + self.alpha.abs())
    }

    pub fn coeffs(&self) -> GdnlsCoeffs {
        gdnls_coeffs(self)
    }
}

/// Coefficients of the gauged DNLS right-hand side and of the potential `Γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GdnlsCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Coefficient of `∫ |f|⁴` in `Γ`.
    pub gamma_l4: f64,
    /// Coefficient of `μ²` in `Γ`.
    pub gamma_mu2: f64,
    /// Coefficient of `Σ n |f(n)|²` in `Γ` (the momentum term
    /// `(iα/π) ∫ f' conj(f)` reduced to coefficient space).
    pub gamma_momentum: f64,
}

pub fn gdnls_coeffs(params: &ModelParams) -> GdnlsCoeffs {
    let (a, b) = (params.alpha, params.beta);
    GdnlsCoeffs {
        c1: 2.0 * (a + b),
        c2: 2.0 * a + b,
        c3: -a * a - 0.5 * a * b,
        c4: -a * b,
        gamma_l4: 3.0 * a * b / (4.0 * PI) + a * a / PI,
        gamma_mu2: -a * a,
        gamma_momentum: -2.0 * a,
    }
}

/// The real potential `Γ[f]`. The momentum term is evaluated by alias-free
/// quadrature and must come out purely imaginary before multiplication by
/// `iα/π`; a residue above `1e-10` signals a quadrature bug and is reported
/// as an error rather than silently truncated.
pub fn gamma_functional(state: &SpectralState, params: &ModelParams) -> Result<f64> {
    let coeffs = params.coeffs();
    let mu = mass(state);
    let l4 = integral_l4(state);
    let momentum = crate::spectral::integral_product(&[
        crate::spectral::ProductFactor::new(state, false, 1),
        crate::spectral::ProductFactor::new(state, true, 0),
    ])?;
    // Γ's last term is (iα/π) ∫ f' conj(f); ∫ f' conj(f) is purely imaginary.
    let term = Complex::new(0.0, params.alpha / PI) * momentum;
    let scale = coeffs.gamma_l4.abs() * l4 + coeffs.gamma_mu2.abs() * mu * mu + term.re.abs();
    if term.im.abs() > 1e-10 * (1.0 + scale) {
        return Err(Error::ImaginaryResidue {
            residue: term.im.abs(),
            tolerance: 1e-10 * (1.0 + scale),
            context: "momentum term of the gauge potential",
        });
    }
    Ok(coeffs.gamma_l4 * l4 + coeffs.gamma_mu2 * mu * mu + term.re)
}

fn integral_l4(state: &SpectralState) -> f64 {
    let m = fft::next_smooth(4 * state.band() + 1);
    let v = state.grid_values(m);
    let sum: f64 = v.iter().map(|x| {
        let a = x.norm_sqr();
        a * a
    }).sum();
    sum * TAU / m as f64
}

/// Which group of terms of the right-hand side to evaluate; the groups map
/// onto the divergence cancellations checked by the Liouville probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhsTerm {
    /// `iφ'' - 2αμφ'`
    Linear,
    /// `c1 P_N(|φ|²φ') + c2 P_N(φ² conj(φ)')`
    CubicDerivative,
    /// `-i c3 P_N(|φ|⁴φ)`
    Quintic,
    /// `-i c4 μ P_N(|φ|²φ)`
    CubicMass,
    /// `-i Γ[φ] φ`
    Potential,
}

impl RhsTerm {
    pub const ALL: [RhsTerm; 5] = [
        RhsTerm::Linear,
        RhsTerm::CubicDerivative,
        RhsTerm::Quintic,
        RhsTerm::CubicMass,
        RhsTerm::Potential,
    ];
}

struct NlParams {
    coeffs: GdnlsCoeffs,
    mu: f64,
    alpha: f64,
}

/// Nonlinear part of the RHS (everything except `iφ'' - 2αμφ'`),
/// dealiased on a grid of at least `6N+1` points and projected to `E_N`.
fn nonlinear_rhs(coeffs_in: &[Complex], n_modes: usize, p: &NlParams) -> Vec<Complex> {
    let m = fft::next_smooth(6 * n_modes.max(1) + 1);
    let band = n_modes as i64;
    let v = fft::values_from_coeffs(coeffs_in, n_modes, m);
    let dcoeffs: Vec<Complex> = coeffs_in
        .iter()
        .enumerate()
        .map(|(i, &c)| c * Complex::new(0.0, (i as i64 - band) as f64))
        .collect();
    let dv = fft::values_from_coeffs(&dcoeffs, n_modes, m);

    let c = &p.coeffs;
    let mut q = vec![Complex::default(); m];
    let mut l4_sum = 0.0;
    for j in 0..m {
        let a = v[j].norm_sqr();
        l4_sum += a * a;
        q[j] = c.c1 * a * dv[j]
            + c.c2 * v[j] * v[j] * dv[j].conj()
            + Complex::new(0.0, -(c.c3 * a + c.c4 * p.mu) * a) * v[j];
    }
    let l4 = l4_sum * TAU / m as f64;
    let momentum: f64 = coeffs_in
        .iter()
        .enumerate()
        .map(|(i, c)| (i as i64 - band) as f64 * c.norm_sqr())
        .sum();
    let gamma = c.gamma_l4 * l4 + c.gamma_mu2 * p.mu * p.mu + c.gamma_momentum * momentum;
    let _ = p.alpha;

    let spectrum = fft::spectrum_from_values(&q);
    let mut out = fft::band_from_spectrum(&spectrum, n_modes);
    for (o, f) in out.iter_mut().zip(coeffs_in.iter()) {
        *o += Complex::new(0.0, -gamma) * f;
    }
    out
}

fn linear_symbol(n: i64, alpha: f64, mu: f64) -> Complex {
    let n = n as f64;
    Complex::new(0.0, -(n * n + 2.0 * alpha * mu * n))
}

/// Full right-hand side `∂_t φ` of the truncated gauged equation, with the
/// mass taken from the state itself. Accepts any `state.band() <= N`.
pub fn gdnls_rhs(state: &SpectralState, params: &ModelParams) -> SpectralState {
    let n = params.n_modes;
    let s = project(state, n);
    let mu = mass(&s);
    let nl = NlParams { coeffs: params.coeffs(), mu, alpha: params.alpha };
    let mut out = nonlinear_rhs(s.coeffs(), n, &nl);
    for (i, o) in out.iter_mut().enumerate() {
        let mode = i as i64 - n as i64;
        *o += linear_symbol(mode, params.alpha, mu) * s.coeff(mode);
    }
    SpectralState::from_coeffs(n, out).expect("band arithmetic")
}

/// A single term group of the right-hand side (see [`RhsTerm`]).
pub fn gdnls_rhs_component(
    state: &SpectralState,
    params: &ModelParams,
    term: RhsTerm,
) -> Result<SpectralState> {
    let n = params.n_modes;
    let s = project(state, n);
    let mu = mass(&s);
    let c = params.coeffs();
    let out = match term {
        RhsTerm::Linear => {
            let mut o = SpectralState::zero(n);
            for (mode, v) in s.modes() {
                o.set_coeff(mode, linear_symbol(mode, params.alpha, mu) * v);
            }
            o
        }
        RhsTerm::Potential => {
            let gamma = gamma_functional(&s, params)?;
            s.scale(Complex::new(0.0, -gamma))
        }
        RhsTerm::CubicDerivative | RhsTerm::Quintic | RhsTerm::CubicMass => {
            let m = fft::next_smooth(6 * n.max(1) + 1);
            let v = fft::values_from_coeffs(s.coeffs(), n, m);
            let dv = {
                let d = crate::spectral::derivative(&s, 1);
                fft::values_from_coeffs(d.coeffs(), n, m)
            };
            let mut q = vec![Complex::default(); m];
            for j in 0..m {
                let a = v[j].norm_sqr();
                q[j] = match term {
                    RhsTerm::CubicDerivative => {
                        c.c1 * a * dv[j] + c.c2 * v[j] * v[j] * dv[j].conj()
                    }
                    RhsTerm::Quintic => Complex::new(0.0, -c.c3 * a * a) * v[j],
                    RhsTerm::CubicMass => Complex::new(0.0, -c.c4 * mu * a) * v[j],
                    _ => unreachable!(),
                };
            }
            let spectrum = fft::spectrum_from_values(&q);
            SpectralState::from_coeffs(n, fft::band_from_spectrum(&spectrum, n))
                .expect("band arithmetic")
        }
    };
    Ok(out)
}

/// Time step recommended for band `N`: `min(0.5/N², 1e-3)`.
pub fn default_dt(n_modes: usize) -> f64 {
    let n = n_modes.max(1) as f64;
    (0.5 / (n * n)).min(1e-3)
}

/// Integrating-factor RK4 evolution of the truncated flow over `[0, T]`
/// (negative `T` runs the flow backwards). `dt` is an upper bound on the
/// step; the actual step is `T/ceil(|T|/dt)` so the horizon is hit exactly.
pub fn evolve(
    state: &SpectralState,
    params: &ModelParams,
    t_final: f64,
    dt: f64,
) -> Result<SpectralState> {
    evolve_observed(state, params, t_final, dt, |_, _| {})
}

/// As [`evolve`], invoking `observer(t, state)` at `t = 0` and after every
/// accepted step.
pub fn evolve_observed(
    state: &SpectralState,
    params: &ModelParams,
    t_final: f64,
    dt: f64,
    mut observer: impl FnMut(f64, &SpectralState),
) -> Result<SpectralState> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if t_final.abs() / dt > 1e8 {
        return Err(Error::InvalidArgument(format!(
            "{} steps exceed the 1e8 budget",
            t_final.abs() / dt
        )));
    }
    let n = params.n_modes;
    let mut phi = project(state, n);
    observer(0.0, &phi);
    if t_final == 0.0 {
        return Ok(phi);
    }
    let steps = (t_final.abs() / dt).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let mu = mass(&phi);
    let nl = NlParams { coeffs: params.coeffs(), mu, alpha: params.alpha };

    // Unimodular integrating factors for the half and full step.
    let band = n as i64;
    let mut e_half = Vec::with_capacity(2 * n + 1);
    let mut e_full = Vec::with_capacity(2 * n + 1);
    for mode in -band..=band {
        let lam = linear_symbol(mode, params.alpha, mu);
        e_half.push(Complex::from_polar(1.0, lam.im * h / 2.0));
        e_full.push(Complex::from_polar(1.0, lam.im * h));
    }

    let dim = 2 * n + 1;
    let mut y = phi.coeffs().to_vec();
    let mut stage = vec![Complex::default(); dim];
    for step in 0..steps {
        let k1 = nonlinear_rhs(&y, n, &nl);
        for i in 0..dim {
            stage[i] = e_half[i] * (y[i] + 0.5 * h * k1[i]);
        }
        let mut k2 = nonlinear_rhs(&stage, n, &nl);
        for v in k2.iter_mut().zip(e_half.iter()) {
            *v.0 *= v.1.conj();
        }
        for i in 0..dim {
            stage[i] = e_half[i] * (y[i] + 0.5 * h * k2[i]);
        }
        let mut k3 = nonlinear_rhs(&stage, n, &nl);
        for v in k3.iter_mut().zip(e_half.iter()) {
            *v.0 *= v.1.conj();
        }
        for i in 0..dim {
            stage[i] = e_full[i] * (y[i] + h * k3[i]);
        }
        let mut k4 = nonlinear_rhs(&stage, n, &nl);
        for v in k4.iter_mut().zip(e_full.iter()) {
            *v.0 *= v.1.conj();
        }
        for i in 0..dim {
            y[i] = e_full[i]
                * (y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        }
        if !y.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::BlowUp {
                t: h * (step + 1) as f64,
                last_state: Box::new(phi),
            });
        }
        phi = SpectralState::from_coeffs(n, y.clone()).expect("band arithmetic");
        observer(h * (step + 1) as f64, &phi);
    }
    Ok(phi)
}

/// The DNLS evolution realised through the gauged flow:
/// `G_{-α}( Φ^N_{T,α}( G_α f ) )`, with the gauge images retained at band
/// `N`. At `α = 0` this coincides with [`evolve`].
pub fn dnls_evolve_conjugated(
    state: &SpectralState,
    params: &ModelParams,
    t_final: f64,
    dt: f64,
) -> Result<SpectralState> {
    let n = params.n_modes;
    let gauged = crate::gauge::gauge_apply(state, params.alpha, n.max(state.band()));
    let evolved = evolve(&project(&gauged.state, n), params, t_final, dt)?;
    let back = crate::gauge::gauge_apply(&evolved, -params.alpha, n);
    Ok(back.state)
}

/// Trace of the real Jacobian of the truncated RHS at `state`, by central
/// finite differences with step `h` in each of the `2(2N+1)` real
/// coordinates. Identically zero fields have divergence-free flows.
pub fn liouville_trace(state: &SpectralState, params: &ModelParams, h: f64) -> f64 {
    jacobian_diag_sum(state, params, h, gdnls_rhs)
}

/// As [`liouville_trace`] but for a single term group of the RHS.
pub fn liouville_trace_component(
    state: &SpectralState,
    params: &ModelParams,
    h: f64,
    term: RhsTerm,
) -> f64 {
    jacobian_diag_sum(state, params, h, move |s, p| {
        gdnls_rhs_component(s, p, term).expect("component evaluation")
    })
}

fn jacobian_diag_sum(
    state: &SpectralState,
    params: &ModelParams,
    h: f64,
    rhs: impl Fn(&SpectralState, &ModelParams) -> SpectralState,
) -> f64 {
    let base = project(state, params.n_modes);
    let dim = 2 * (2 * params.n_modes + 1);
    let mut trace = 0.0;
    for coord in 0..dim {
        let mut plus = base.clone();
        let mut minus = base.clone();
        crate::spectral::perturb_real_coord(&mut plus, coord, h);
        crate::spectral::perturb_real_coord(&mut minus, coord, -h);
        let fp = rhs(&plus, params);
        let fm = rhs(&minus, params);
        trace += (crate::spectral::real_coord(&fp, coord)
            - crate::spectral::real_coord(&fm, coord))
            / (2.0 * h);
    }
    trace
}

/// Full finite-difference Jacobian probe: trace plus the Frobenius norm used
/// to scale it.
#[derive(Clone, Copy, Debug)]
pub struct JacobianProbe {
    pub trace: f64,
    pub frobenius: f64,
}

pub fn liouville_probe(state: &SpectralState, params: &ModelParams, h: f64) -> JacobianProbe {
    let base = project(state, params.n_modes);
    let dim = 2 * (2 * params.n_modes + 1);
    let mut trace = 0.0;
    let mut fro = 0.0;
    for col in 0..dim {
        let mut plus = base.clone();
        let mut minus = base.clone();
        crate::spectral::perturb_real_coord(&mut plus, col, h);
        crate::spectral::perturb_real_coord(&mut minus, col, -h);
        let fp = gdnls_rhs(&plus, params);
        let fm = gdnls_rhs(&minus, params);
        for row in 0..dim {
            let entry = (crate::spectral::real_coord(&fp, row)
                - crate::spectral::real_coord(&fm, row))
                / (2.0 * h);
            fro += entry * entry;
            if row == col {
                trace += entry;
            }
        }
    }
    JacobianProbe { trace, frobenius: fro.sqrt() }
}
