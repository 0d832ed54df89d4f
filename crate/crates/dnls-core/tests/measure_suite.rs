//! Integration checks of the Gaussian/Gibbs machinery: Monte Carlo moments
//! against the permutation-sum oracle, sample regularity trends, and the
//! closed-form variance of the truncation statistic.

use dnls_core::measures::{
    mc_functional_l2, sample_gamma, wick_moment, MeasureSpec, SampleDomain, VarianceConvention,
};
use dnls_core::rng::uniform;
use dnls_core::spectral::{integral_product, project, sobolev_norm_sq, NormConvention, ProductFactor};
use dnls_core::Complex;

#[test]
fn mc_moments_match_wick_oracle() {
    // E[∏ f(n_j) conj(f(m_j))] for random monomials with ℓ <= 3, against
    // 40k-sample Monte Carlo, within 4 standard errors.
    let spec = MeasureSpec::new(2, 6, VarianceConvention::Wick);
    let m_samples = 40_000u64;
    for case in 0..8u64 {
        let ell = 1 + (case % 3) as usize;
        let pick = |lane: u64, c: u64| -> i64 {
            (uniform(905, case, lane, c) * 7.0).floor() as i64 - 3
        };
        let ns: Vec<i64> = (0..ell).map(|j| pick(j as u64, 0)).collect();
        // Half the cases use a permutation of ns (nonzero moment), half are
        // independent picks (usually zero).
        let ms: Vec<i64> = if case % 2 == 0 {
            let mut v = ns.clone();
            v.rotate_right(1);
            v
        } else {
            (0..ell).map(|j| pick(j as u64, 1)).collect()
        };
        let exact = wick_moment(&ns, &ms, &spec).unwrap();
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for i in 0..m_samples {
            let f = sample_gamma(&spec, i, 906);
            let mut prod = Complex::new(1.0, 0.0);
            for j in 0..ell {
                prod *= f.coeff(ns[j]) * f.coeff(ms[j]).conj();
            }
            acc += prod.re;
            acc2 += prod.re * prod.re;
        }
        let mean = acc / m_samples as f64;
        let var = (acc2 / m_samples as f64 - mean * mean).max(0.0);
        let se = (var / m_samples as f64).sqrt();
        assert!(
            (mean - exact).abs() <= 4.0 * se.max(1e-9),
            "case {case}: ns {ns:?} ms {ms:?}: mc {mean} vs wick {exact} (se {se})"
        );
    }
}

#[test]
fn sample_regularity_trend() {
    // γ_k charges H^s for s < k - 1/2 (stable norm in N) and not for
    // s >= k - 1/2 (norm grows with N). Checked as a trend on means.
    let seed = 907;
    let m = 400u64;
    let mut stable = Vec::new();
    let mut growing = Vec::new();
    for n in [16usize, 32, 64, 128] {
        let spec = MeasureSpec::new(2, n, VarianceConvention::Wick);
        let mut s_low = 0.0;
        let mut s_high = 0.0;
        for i in 0..m {
            let f = sample_gamma(&spec, i, seed);
            s_low += sobolev_norm_sq(&f, 1.0, NormConvention::Sequence);
            s_high += sobolev_norm_sq(&f, 2.0, NormConvention::Sequence);
        }
        stable.push(s_low / m as f64);
        growing.push(s_high / m as f64);
    }
    let rel_increase = (stable.last().unwrap() - stable[0]) / stable[0];
    assert!(rel_increase.abs() < 0.05, "H¹ mean should saturate: {stable:?}");
    assert!(
        growing.windows(2).all(|w| w[1] > w[0] * 1.5),
        "H² mean should keep growing: {growing:?}"
    );
}

/// The statistic of the truncation-difference experiment:
/// `∫ P_N f^{(k-1)} P_N conj(f)^{(k)} - ∫ P_{2N} f^{(k-1)} P_{2N} conj(f)^{(k)}`.
fn bilinear_difference(f: &dnls_core::SpectralState, n: usize) -> f64 {
    let near = project(f, n);
    let far = project(f, 2 * n);
    let v1 = integral_product(&[
        ProductFactor::new(&near, false, 1),
        ProductFactor::new(&near, true, 2),
    ])
    .unwrap();
    let v2 = integral_product(&[
        ProductFactor::new(&far, false, 1),
        ProductFactor::new(&far, true, 2),
    ])
    .unwrap();
    (v1 - v2).norm()
}

#[test]
fn bilinear_difference_matches_closed_form() {
    // The L²(γ₂) norm of the statistic has the exact value
    // 2π sqrt(Σ_{N<|n|<=2N} n^{4k-2} v_n²); Monte Carlo must reproduce it.
    let n = 8usize;
    let spec = MeasureSpec::new(2, 2 * n, VarianceConvention::Wick);
    let est = mc_functional_l2(
        |f| Ok(bilinear_difference(f, n)),
        &spec,
        SampleDomain::Full,
        20_000,
        909,
    )
    .unwrap();
    let exact_sq: f64 = (n as i64 + 1..=2 * n as i64)
        .map(|m| {
            let v = spec.variance(m);
            2.0 * (m as f64).powi(6) * v * v
        })
        .sum();
    let exact = (2.0 * std::f64::consts::PI) * exact_sq.sqrt();
    assert!(
        (est.estimate - exact).abs() < 4.0 * est.stderr.max(1e-3),
        "mc {} vs closed form {exact} (se {})",
        est.estimate,
        est.stderr
    );
}
