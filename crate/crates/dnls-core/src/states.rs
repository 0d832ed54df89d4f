//! Deterministic generators for the random initial data used by tests and
//! experiment drivers.

use crate::rng::gauss_pair;
use crate::spectral::{mass, sobolev_norm_sq, NormConvention, SpectralState};
use crate::Complex;

/// A random state with exponentially decaying spectrum,
/// `f(n) ∝ g_n e^{-decay |n|}`, rescaled to the exact target mass
/// `Σ |f(n)|^2 = target_mass`.
pub fn random_smooth_state(
    band: usize,
    target_mass: f64,
    decay: f64,
    seed: u64,
    index: u64,
) -> SpectralState {
    let mut s = SpectralState::zero(band);
    for n in -(band as i64)..=band as i64 {
        let (a, b) = gauss_pair(seed, index, n);
        let amp = (-decay * n.abs() as f64).exp();
        s.set_coeff(n, Complex::new(a, b) * amp);
    }
    rescale_mass(&mut s, target_mass);
    s
}

/// A random state with polynomially decaying spectrum,
/// `f(n) ∝ g_n (1+|n|)^{-p}`, rescaled so the sequence H¹ norm equals
/// `h1_radius` (a sample from a fixed H¹ ball when `p > 3/2`).
pub fn random_sobolev_state(
    band: usize,
    h1_radius: f64,
    p: f64,
    seed: u64,
    index: u64,
) -> SpectralState {
    let mut s = SpectralState::zero(band);
    for n in -(band as i64)..=band as i64 {
        let (a, b) = gauss_pair(seed, index, n);
        let amp = (1.0 + n.abs() as f64).powf(-p);
        s.set_coeff(n, Complex::new(a, b) * amp);
    }
    let h1 = sobolev_norm_sq(&s, 1.0, NormConvention::Sequence).sqrt();
    if h1 > 0.0 {
        let scale = h1_radius / h1;
        for c in s.coeffs_mut() {
            *c *= scale;
        }
    }
    s
}

fn rescale_mass(s: &mut SpectralState, target_mass: f64) {
    let m = mass(s);
    if m > 0.0 {
        let scale = (target_mass / m).sqrt();
        for c in s.coeffs_mut() {
            *c *= scale;
        }
    }
}
