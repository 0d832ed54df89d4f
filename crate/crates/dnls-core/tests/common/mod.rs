//! Shared helpers for the integration suites.

use dnls_core::spectral::ProductFactor;
use dnls_core::Complex;

/// Independent quadrature oracle: the integral `∫ ∏ factors` as a bare
/// convolution sum `2π Σ_{n_1+…+n_m=0} ∏ c_i(n_i)` over all mode tuples.
/// Exponential in the factor count; only for small test states.
pub fn convolution_oracle(factors: &[ProductFactor]) -> Complex {
    fn coeff(factor: &ProductFactor, n: i64) -> Complex {
        let base = if factor.conjugate {
            factor.state.coeff(-n).conj()
        } else {
            factor.state.coeff(n)
        };
        base * Complex::new(0.0, n as f64).powu(factor.derivative)
    }
    fn recurse(factors: &[ProductFactor], freq_sum: i64, acc: Complex, total: &mut Complex) {
        if factors.len() == 1 {
            *total += acc * coeff(&factors[0], -freq_sum);
            return;
        }
        let band = factors[0].state.band() as i64;
        for n in -band..=band {
            let c = coeff(&factors[0], n);
            if c.re != 0.0 || c.im != 0.0 {
                recurse(&factors[1..], freq_sum + n, acc * c, total);
            }
        }
    }
    let mut total = Complex::default();
    recurse(factors, 0, Complex::new(1.0, 0.0), &mut total);
    total * (2.0 * std::f64::consts::PI)
}
