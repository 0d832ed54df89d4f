//! Band-limited states on the torus and alias-free polynomial quadrature.
//!
//! Convention: `f(x) = Σ_{|n|<=N} f(n) e^{inx}` with
//! `f(n) = (1/2π) ∫ f e^{-inx}`, so `∫ |f|^2 = 2π Σ |f(n)|^2`. Sequence-side
//! quantities (plain coefficient sums) and physical integrals differ by that
//! factor of `2π`; every norm helper takes an explicit [`NormConvention`].

use crate::error::Error;
use crate::{fft, Complex, Result};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

/// Which normalisation a norm or inner product is reported in.
///
/// `Sequence` is the bare coefficient sum `Σ (1+n^{2s}) |f(n)|^2`;
/// `Physical` multiplies by `2π` so that the `s = 0` case equals `∫ |f|^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormConvention {
    Sequence,
    Physical,
}

impl NormConvention {
    fn factor(self) -> f64 {
        match self {
            NormConvention::Sequence => 1.0,
            NormConvention::Physical => TAU,
        }
    }
}

/// A band-limited complex function on the torus, stored as Fourier
/// coefficients `f(n)` for `|n| <= N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState {
    band: usize,
    coeffs: Vec<Complex>,
}

impl SpectralState {
    /// The zero state of band `N`.
    pub fn zero(band: usize) -> Self {
        Self { band, coeffs: vec![Complex::default(); 2 * band + 1] }
    }

    /// Build from a coefficient vector ordered `n = -N..=N`.
    pub fn from_coeffs(band: usize, coeffs: Vec<Complex>) -> Result<Self> {
        let want = 2 * band + 1;
        if coeffs.len() != want {
            return Err(Error::BadCoefficientCount { band, got: coeffs.len(), want });
        }
        Ok(Self { band, coeffs })
    }

    /// `amp · e^{inx}` embedded in band `N` (requires `|n| <= N`).
    pub fn single_mode(band: usize, n: i64, amp: Complex) -> Self {
        assert!(n.unsigned_abs() as usize <= band, "mode outside band");
        let mut s = Self::zero(band);
        s.set_coeff(n, amp);
        s
    }

    pub fn band(&self) -> usize {
        self.band
    }

    /// Coefficient `f(n)`; zero outside the stored band.
    #[inline]
    pub fn coeff(&self, n: i64) -> Complex {
        if n.unsigned_abs() as usize > self.band {
            Complex::default()
        } else {
            self.coeffs[(n + self.band as i64) as usize]
        }
    }

    #[inline]
    pub fn set_coeff(&mut self, n: i64, value: Complex) {
        assert!(n.unsigned_abs() as usize <= self.band, "mode outside band");
        self.coeffs[(n + self.band as i64) as usize] = value;
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex] {
        &mut self.coeffs
    }

    /// Iterator over `(n, f(n))`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex)> + '_ {
        let band = self.band as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - band, c))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(&self, a: Complex) -> Self {
        Self { band: self.band, coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    /// Values on the uniform grid `x_j = 2π j / M`; exact for `M >= 2N+1`.
    pub fn grid_values(&self, grid_len: usize) -> Vec<Complex> {
        fft::values_from_coeffs(&self.coeffs, self.band, grid_len)
    }

    /// Recover a band-`N` state from grid samples (`M >= 2N+1`); exact when
    /// the sampled function is band-limited to `N`.
    pub fn from_grid_values(band: usize, values: &[Complex]) -> Self {
        let spectrum = fft::spectrum_from_values(values);
        Self { band, coeffs: fft::band_from_spectrum(&spectrum, band) }
    }

    /// Physical L² distance `(∫ |f-g|^2)^{1/2}`, tolerating different bands.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let band = self.band.max(other.band) as i64;
        let mut acc = 0.0;
        for n in -band..=band {
            acc += (self.coeff(n) - other.coeff(n)).norm_sqr();
        }
        (TAU * acc).sqrt()
    }

    /// Serialize to the packed binary form: 8-byte little-endian header with
    /// `N`, followed by interleaved little-endian f64 `re, im` pairs for
    /// `n = -N..=N`.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 16 * self.coeffs.len());
        out.extend_from_slice(&(self.band as u64).to_le_bytes());
        for c in &self.coeffs {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
        out
    }

    /// Inverse of [`Self::to_packed_bytes`].
    pub fn from_packed_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::Serialization("packed state shorter than header".into()));
        }
        let band = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
        let want = 2 * band + 1;
        if bytes.len() != 8 + 16 * want {
            return Err(Error::Serialization(format!(
                "packed state for N = {band} should occupy {} bytes, got {}",
                8 + 16 * want,
                bytes.len()
            )));
        }
        let coeffs = bytes[8..]
            .chunks_exact(16)
            .map(|ch| {
                Complex::new(
                    f64::from_le_bytes(ch[..8].try_into().unwrap()),
                    f64::from_le_bytes(ch[8..].try_into().unwrap()),
                )
            })
            .collect();
        Self::from_coeffs(band, coeffs)
    }
}

impl Serialize for SpectralState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("N", &self.band)?;
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        map.serialize_entry("coeffs", &pairs)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for SpectralState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct StateVisitor;
        impl<'de> Visitor<'de> for StateVisitor {
            type Value = SpectralState;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a map with keys \"N\" and \"coeffs\"")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut band: Option<usize> = None;
                let mut pairs: Option<Vec<[f64; 2]>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "N" => band = Some(map.next_value()?),
                        "coeffs" => pairs = Some(map.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["N", "coeffs"])),
                    }
                }
                let band = band.ok_or_else(|| de::Error::missing_field("N"))?;
                let pairs = pairs.ok_or_else(|| de::Error::missing_field("coeffs"))?;
                let coeffs = pairs.into_iter().map(|[re, im]| Complex::new(re, im)).collect();
                SpectralState::from_coeffs(band, coeffs).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_map(StateVisitor)
    }
}

/// Projection `P_M`: zero the coefficients with `|n| > M`. The result has
/// band `M` regardless of the input band.
pub fn project(state: &SpectralState, new_band: usize) -> SpectralState {
    let mut out = SpectralState::zero(new_band);
    let keep = new_band.min(state.band) as i64;
    for n in -keep..=keep {
        out.set_coeff(n, state.coeff(n));
    }
    out
}

/// Spectral derivative of order `j`: coefficient `n` becomes `(in)^j f(n)`.
pub fn derivative(state: &SpectralState, j: u32) -> SpectralState {
    let mut out = state.clone();
    apply_derivative_in_place(&mut out, j);
    out
}

pub(crate) fn apply_derivative_in_place(state: &mut SpectralState, j: u32) {
    if j == 0 {
        return;
    }
    let band = state.band as i64;
    for (i, c) in state.coeffs.iter_mut().enumerate() {
        let n = (i as i64 - band) as f64;
        *c *= Complex::new(0.0, n).powu(j);
    }
}

/// Inhomogeneous Sobolev norm squared `Σ (1 + n^{2s}) |f(n)|^2`
/// (times `2π` in the physical convention). At `s = 0` this is the L² norm.
pub fn sobolev_norm_sq(state: &SpectralState, s: f64, convention: NormConvention) -> f64 {
    if s == 0.0 {
        return convention.factor() * mass(state);
    }
    let sum: f64 = state
        .modes()
        .map(|(n, c)| (1.0 + (n as f64).abs().powf(2.0 * s)) * c.norm_sqr())
        .sum();
    convention.factor() * sum
}

/// Homogeneous Sobolev norm squared `Σ n^{2s} |f(n)|^2`
/// (times `2π` in the physical convention).
pub fn homogeneous_sobolev_norm_sq(
    state: &SpectralState,
    s: f64,
    convention: NormConvention,
) -> f64 {
    let sum: f64 = state
        .modes()
        .map(|(n, c)| (n as f64).abs().powf(2.0 * s) * c.norm_sqr())
        .sum();
    convention.factor() * sum
}

/// Mass `μ[f] = (1/2π) ∫ |f|^2 = Σ |f(n)|^2`.
pub fn mass(state: &SpectralState) -> f64 {
    state.coeffs.iter().map(|c| c.norm_sqr()).sum()
}

// Real-coordinate view used by the finite-difference Jacobian probes:
// coordinate 2i is Re coeffs[i], coordinate 2i+1 is Im coeffs[i].
pub(crate) fn perturb_real_coord(state: &mut SpectralState, coord: usize, delta: f64) {
    let idx = coord / 2;
    let c = &mut state.coeffs[idx];
    if coord.is_multiple_of(2) {
        c.re += delta;
    } else {
        c.im += delta;
    }
}

pub(crate) fn real_coord(state: &SpectralState, coord: usize) -> f64 {
    let c = state.coeffs[coord / 2];
    if coord.is_multiple_of(2) {
        c.re
    } else {
        c.im
    }
}

/// One factor of a polynomial integrand: a state, an optional complex
/// conjugation, and a spectral derivative order applied after conjugation
/// (the two operations commute).
#[derive(Clone, Copy)]
pub struct ProductFactor<'a> {
    pub state: &'a SpectralState,
    pub conjugate: bool,
    pub derivative: u32,
}

impl<'a> ProductFactor<'a> {
    pub fn new(state: &'a SpectralState, conjugate: bool, derivative: u32) -> Self {
        Self { state, conjugate, derivative }
    }

    /// Coefficients of the factor as a function, ordered `n = -band..=band`.
    pub(crate) fn effective_coeffs(&self) -> Vec<Complex> {
        let band = self.state.band as i64;
        (-band..=band)
            .map(|n| {
                let base = if self.conjugate {
                    self.state.coeff(-n).conj()
                } else {
                    self.state.coeff(n)
                };
                base * Complex::new(0.0, n as f64).powu(self.derivative)
            })
            .collect()
    }
}

/// `∫_T ∏ factors dx`, computed alias-free.
///
/// Two factors are contracted directly in coefficient space (exact, and
/// exactly zero when the frequency supports cannot meet). Longer products are
/// evaluated on a grid of `M >= Σ bands + 1` points where the trapezoid rule
/// is exact for the band-limited integrand.
pub fn integral_product(factors: &[ProductFactor]) -> Result<Complex> {
    if factors.is_empty() {
        return Err(Error::EmptyFactorList);
    }
    if factors.len() == 2 {
        let a = factors[0].effective_coeffs();
        let b = factors[1].effective_coeffs();
        let ba = factors[0].state.band as i64;
        let bb = factors[1].state.band as i64;
        let mut acc = Complex::default();
        // ∫ A B = 2π Σ_n A(n) B(-n)
        for (i, &av) in a.iter().enumerate() {
            let n = i as i64 - ba;
            if n.abs() <= bb {
                acc += av * b[(-n + bb) as usize];
            }
        }
        return Ok(TAU * acc);
    }

    let total_band: usize = factors.iter().map(|f| f.state.band).sum();
    let m = fft::next_smooth(total_band + 1);
    let mut product: Vec<Complex> = vec![Complex::new(1.0, 0.0); m];
    for factor in factors {
        // All-zero factors short-circuit the whole integral.
        if factor.state.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
            return Ok(Complex::default());
        }
        let coeffs = factor.effective_coeffs();
        let values = fft::values_from_coeffs(&coeffs, factor.state.band, m);
        for (p, v) in product.iter_mut().zip(values.iter()) {
            *p *= v;
        }
    }
    let sum: Complex = product.iter().sum();
    Ok(sum * (TAU / m as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn projection_masks_coefficients() {
        // project(e^{2ix}, 1) is the zero state
        let s = SpectralState::single_mode(2, 2, c(1.0, 0.0));
        let p = project(&s, 1);
        assert_eq!(p.band(), 1);
        assert!(mass(&p) == 0.0);

        // project(f, f.N) = f
        let p2 = project(&s, 2);
        assert_eq!(p2, s);

        // project(1 + e^{ix} + e^{3ix}, 2) = 1 + e^{ix}
        let mut f = SpectralState::zero(3);
        f.set_coeff(0, c(1.0, 0.0));
        f.set_coeff(1, c(1.0, 0.0));
        f.set_coeff(3, c(1.0, 0.0));
        let p3 = project(&f, 2);
        assert_eq!(p3.coeff(0), c(1.0, 0.0));
        assert_eq!(p3.coeff(1), c(1.0, 0.0));
        assert_eq!(p3.coeff(2), c(0.0, 0.0));
        assert_eq!(p3.coeff(3), c(0.0, 0.0));
    }

    #[test]
    fn derivative_single_modes() {
        let s = SpectralState::single_mode(1, 1, c(1.0, 0.0));
        assert_eq!(derivative(&s, 1).coeff(1), c(0.0, 1.0));

        let k = SpectralState::single_mode(0, 0, c(3.0, -1.0));
        assert_eq!(mass(&derivative(&k, 1)), 0.0);

        let s2 = SpectralState::single_mode(2, 2, c(1.0, 0.0));
        assert_eq!(derivative(&s2, 2).coeff(2), c(-4.0, 0.0));
    }

    #[test]
    fn sobolev_examples() {
        let e1 = SpectralState::single_mode(1, 1, c(1.0, 0.0));
        assert!((sobolev_norm_sq(&e1, 1.0, NormConvention::Sequence) - 2.0).abs() < 1e-15);
        assert!((sobolev_norm_sq(&e1, 0.0, NormConvention::Physical) - TAU).abs() < 1e-12);

        let mut f = SpectralState::zero(2);
        f.set_coeff(0, c(1.0, 0.0));
        f.set_coeff(2, c(1.0, 0.0));
        assert!((homogeneous_sobolev_norm_sq(&f, 2.0, NormConvention::Sequence) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn mass_examples() {
        assert_eq!(mass(&SpectralState::zero(4)), 0.0);
        let e1 = SpectralState::single_mode(1, 1, c(1.0, 0.0));
        assert!((mass(&e1) - 1.0).abs() < 1e-15);
        let a = c(0.3, -0.8);
        assert!((mass(&e1.scale(a)) - a.norm_sqr() * mass(&e1)).abs() < 1e-15);
    }

    #[test]
    fn integral_product_examples() {
        let e1 = SpectralState::single_mode(1, 1, c(1.0, 0.0));
        // ∫ e^{ix} conj(e^{ix}) = 2π
        let v = integral_product(&[
            ProductFactor::new(&e1, false, 0),
            ProductFactor::new(&e1, true, 0),
        ])
        .unwrap();
        assert!((v - c(TAU, 0.0)).norm() < 1e-12);

        // ∫ |e^{ix}|^2 (e^{ix})' conj(e^{ix}) = 2πi
        let v = integral_product(&[
            ProductFactor::new(&e1, false, 0),
            ProductFactor::new(&e1, true, 0),
            ProductFactor::new(&e1, false, 1),
            ProductFactor::new(&e1, true, 0),
        ])
        .unwrap();
        assert!((v - c(0.0, TAU)).norm() < 1e-12);

        // ∫ e^{ix} e^{ix} = 0
        let v = integral_product(&[
            ProductFactor::new(&e1, false, 0),
            ProductFactor::new(&e1, false, 0),
        ])
        .unwrap();
        assert!(v.norm() < 1e-14);

        assert!(integral_product(&[]).is_err());
    }

    #[test]
    fn json_round_trip_matches_schema() {
        let mut f = SpectralState::zero(1);
        f.set_coeff(-1, c(0.5, -0.25));
        f.set_coeff(1, c(1.0, 2.0));
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.starts_with("{\"N\":1,\"coeffs\":[[0.5,-0.25],"));
        let back: SpectralState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn packed_round_trip() {
        let mut f = SpectralState::zero(3);
        f.set_coeff(2, c(1.25, -0.5));
        let bytes = f.to_packed_bytes();
        assert_eq!(bytes.len(), 8 + 16 * 7);
        assert_eq!(SpectralState::from_packed_bytes(&bytes).unwrap(), f);
        assert!(SpectralState::from_packed_bytes(&bytes[..20]).is_err());
    }
}
