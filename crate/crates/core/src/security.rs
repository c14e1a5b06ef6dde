//! Attack probability and perceived safety.
//!
//! The attacker observes `gP - kH` plus Gaussian noise and attacks when the
//! signal exceeds `s_star`, so safety is `Psi((s_star - gP + kH) / sigma)`.

use serde::Serialize;

use crate::model::SecurityParams;
use crate::normal::{std_normal_cdf, std_normal_pdf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SafetyPoint {
    pub pi_attack: f64,
    pub safety: f64,
    pub z: f64,
    #[serde(rename = "d_safety_dP")]
    pub d_safety_dp: f64,
    #[serde(rename = "d_safety_dH")]
    pub d_safety_dh: f64,
}

/// Standardized signal argument `(s_star - (gP - kH)) / sigma_eps`.
pub fn signal_z(sec: &SecurityParams, p: f64, h: f64) -> f64 {
    (sec.s_star - (sec.g * p - sec.k * h)) / sec.sigma_eps
}

pub fn attack_probability(sec: &SecurityParams, p: f64, h: f64) -> f64 {
    std_normal_cdf(-signal_z(sec, p, h))
}

pub fn safety(sec: &SecurityParams, p: f64, h: f64) -> SafetyPoint {
    let z = signal_z(sec, p, h);
    let density = std_normal_pdf(z);
    SafetyPoint {
        pi_attack: std_normal_cdf(-z),
        safety: std_normal_cdf(z),
        z,
        // an underflowed density gives exact zeros, never NaN
        d_safety_dp: -(sec.g / sec.sigma_eps) * density,
        d_safety_dh: (sec.k / sec.sigma_eps) * density,
    }
}
