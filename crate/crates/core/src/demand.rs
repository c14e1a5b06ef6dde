//! User and speculator demand for the asset.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DemandParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemandPoint {
    pub d_user: f64,
    pub d_spec: f64,
    pub d_total: f64,
    #[serde(rename = "dD_dP")]
    pub dd_dp: f64,
    #[serde(rename = "dD_dSigma")]
    pub dd_dsigma: f64,
    pub spec_floored: bool,
}

fn check_domain(p: f64, sigma: f64) -> Result<()> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("price must be > 0, got {p}")));
    }
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::Domain(format!("safety must lie in [0, 1], got {sigma}")));
    }
    Ok(())
}

/// `theta_U * sigma * P^-eps`.
pub fn user_demand(dem: &DemandParams, p: f64, sigma: f64) -> Result<f64> {
    check_domain(p, sigma)?;
    Ok(dem.theta_u * sigma * p.powf(-dem.eps))
}

/// `max(0, theta_S * sigma - delta) / P`. The flag reports whether the floor
/// was active.
pub fn speculator_demand(dem: &DemandParams, p: f64, sigma: f64) -> Result<(f64, bool)> {
    check_domain(p, sigma)?;
    let net = dem.theta_s * sigma - dem.delta;
    if net < 0.0 {
        Ok((0.0, true))
    } else {
        Ok((net / p, false))
    }
}

pub fn total_demand(dem: &DemandParams, p: f64, sigma: f64) -> Result<DemandPoint> {
    let d_user = user_demand(dem, p, sigma)?;
    let (d_spec, spec_floored) = speculator_demand(dem, p, sigma)?;
    let p_pow = p.powf(-dem.eps);
    let dd_dp = -dem.eps * d_user / p - d_spec / p;
    // at exact equality the unfloored side's slope is used
    let spec_slope = if spec_floored { 0.0 } else { dem.theta_s / p };
    Ok(DemandPoint {
        d_user,
        d_spec,
        d_total: d_user + d_spec,
        dd_dp,
        dd_dsigma: dem.theta_u * p_pow + spec_slope,
        spec_floored,
    })
}
