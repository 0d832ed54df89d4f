//! Thin wrapper over rustfft with per-thread plan caching and the
//! coefficient/grid layout used by the rest of the crate.
//!
//! Layout: a band-`B` function is stored as coefficients `f(n)`, `n = -B..=B`.
//! On a grid of `M >= 2B+1` points `x_j = 2π j / M` the values are
//! `f(x_j) = Σ_n f(n) e^{i n x_j}`, i.e. an unnormalised inverse DFT of the
//! coefficient array spread into wrapped (mod `M`) bins. The forward map
//! divides by `M`.

use crate::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

type PlanCache = HashMap<(usize, bool), (Arc<dyn Fft<f64>>, Vec<Complex>)>;

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(HashMap::new());
}

fn process(len: usize, forward: bool, buf: &mut [Complex]) {
    debug_assert_eq!(buf.len(), len);
    PLANS.with(|cell| {
        let mut map = cell.borrow_mut();
        let entry = map.entry((len, forward)).or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let plan = if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            };
            let scratch = vec![Complex::default(); plan.get_inplace_scratch_len()];
            (plan, scratch)
        });
        let (plan, scratch) = entry;
        plan.process_with_scratch(buf, scratch);
    });
}

/// Smallest integer `m >= n` whose prime factors are all in {2, 3, 5}.
pub fn next_smooth(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2usize, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Grid values of a band-limited function given its coefficients
/// (`coeffs[i]` is `f(i - band)`). The values are exact for any `grid_len`
/// (frequencies wrap mod `M` and accumulate), though recovering the
/// coefficients back needs `grid_len >= 2*band + 1`.
pub fn values_from_coeffs(coeffs: &[Complex], band: usize, grid_len: usize) -> Vec<Complex> {
    debug_assert_eq!(coeffs.len(), 2 * band + 1);
    let mut buf = vec![Complex::default(); grid_len];
    for (i, &c) in coeffs.iter().enumerate() {
        let n = i as i64 - band as i64;
        let idx = n.rem_euclid(grid_len as i64) as usize;
        buf[idx] += c;
    }
    process(grid_len, false, &mut buf);
    buf
}

/// Forward transform of grid values into the wrapped spectrum
/// (`out[j] = (1/M) Σ v e^{-i j x}` with `j` a wrapped frequency bin).
pub fn spectrum_from_values(values: &[Complex]) -> Vec<Complex> {
    let m = values.len();
    let mut buf = values.to_vec();
    process(m, true, &mut buf);
    let scale = 1.0 / m as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Extract the coefficients of band `band` from a wrapped spectrum of length
/// `M >= 2*band + 1`.
pub fn band_from_spectrum(spectrum: &[Complex], band: usize) -> Vec<Complex> {
    let m = spectrum.len() as i64;
    debug_assert!(m > 2 * band as i64);
    (-(band as i64)..=band as i64)
        .map(|n| spectrum[n.rem_euclid(m) as usize])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_sizes() {
        assert_eq!(next_smooth(1), 1);
        assert_eq!(next_smooth(17), 18);
        assert_eq!(next_smooth(241), 243);
        assert_eq!(next_smooth(640), 640);
        assert_eq!(next_smooth(641), 648);
    }

    #[test]
    fn grid_round_trip() {
        let band = 5;
        let coeffs: Vec<Complex> = (0..11)
            .map(|i| Complex::new(0.3 * i as f64 - 1.0, (i * i) as f64 * 0.01))
            .collect();
        let m = next_smooth(2 * band + 1);
        let values = values_from_coeffs(&coeffs, band, m);
        let spec = spectrum_from_values(&values);
        let back = band_from_spectrum(&spec, band);
        for (a, b) in coeffs.iter().zip(back.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
