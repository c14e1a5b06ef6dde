//! Standard normal distribution helpers.
//!
//! The CDF is routed through `erfc` so that both tails keep full relative
//! precision; `1 - erfc` style cancellation only appears for the upper tail,
//! where the result rounds to 1 anyway.

use std::f64::consts::FRAC_1_SQRT_2;

/// `1 / sqrt(2 pi)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal cumulative distribution function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Ratio `Psi(z) / psi(z)` for the lower tail, where both factors may
/// underflow individually. Uses the asymptotic Mills-ratio expansion below
/// `z = -30` (relative error well under 1e-10 there).
pub(crate) fn lower_tail_ratio(z: f64) -> f64 {
    if z > -30.0 {
        return std_normal_cdf(z) / std_normal_pdf(z);
    }
    let inv2 = 1.0 / (z * z);
    let series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2)));
    series / -z
}
