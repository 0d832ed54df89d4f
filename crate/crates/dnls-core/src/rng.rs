//! Counter-based random number generation.
//!
//! Every draw is a pure function of `(seed, index, lane, counter)`, so
//! ensembles can be produced in parallel, in any order, and still be
//! bit-identical. `index` is the sample index, `lane` the Fourier mode (or
//! any other per-sample coordinate).

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One 64-bit word from the counter stream.
#[inline]
pub fn counter_u64(seed: u64, index: u64, lane: u64, counter: u64) -> u64 {
    let mut h = mix(seed ^ GOLDEN);
    h = mix(h ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    h = mix(h ^ lane.wrapping_mul(0xA076_1D64_78BD_642F));
    mix(h ^ counter.wrapping_mul(0xE703_7ED1_A0B4_28DB))
}

/// Uniform deviate in `[0, 1)`.
#[inline]
pub fn uniform(seed: u64, index: u64, lane: u64, counter: u64) -> f64 {
    // 53 bits of mantissa.
    (counter_u64(seed, index, lane, counter) >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Pair of independent standard normal deviates for a given lane (Box–Muller).
#[inline]
pub fn gauss_pair(seed: u64, index: u64, lane: i64) -> (f64, f64) {
    let lane = lane as u64;
    // u1 in (0, 1] keeps the logarithm finite.
    let u1 = 1.0 - uniform(seed, index, lane, 0);
    let u2 = uniform(seed, index, lane, 1);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}
