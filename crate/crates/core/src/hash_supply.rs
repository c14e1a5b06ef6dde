//! Free-entry hash-rate supply.
//!
//! Each potential miner contributes one unit of hash at its own constant
//! cost. Under free entry the marginal active miner earns exactly its cost,
//! so the aggregate hash rate `H` solves `H * F^{-1}(H) = P * (B + Phi)`,
//! capped at the total miner mass `M` (the corner where everyone mines).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CostFamily, Economy, MinerCostModel, ProtocolParams};
use crate::root::MAX_ITERS;

/// Relative residual required of an interior hash-supply solution.
pub const SUPPLY_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HashSupplyPoint {
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub c_marginal: f64,
    pub at_corner: bool,
}

impl MinerCostModel {
    /// Mass of miners with cost at most `c`, clamped to `[0, M]`.
    pub fn cdf(&self, c: f64) -> f64 {
        let (lo, hi) = self.support();
        if c <= lo {
            return 0.0;
        }
        if c >= hi {
            return self.mass;
        }
        let unit = match &self.family {
            CostFamily::Uniform { c_min, c_max } => (c - c_min) / (c_max - c_min),
            CostFamily::Power { c_min, c_max, shape } => ((c - c_min) / (c_max - c_min)).powf(*shape),
            CostFamily::PiecewiseLinear { knots } => {
                let i = knots.partition_point(|k| k[0] < c).max(1);
                let (a, b) = (knots[i - 1], knots[i]);
                a[1] + (c - a[0]) / (b[0] - a[0]) * (b[1] - a[1])
            }
        };
        (self.mass * unit).clamp(0.0, self.mass)
    }

    /// Cost of the `h`-th miner; `h` must lie in `(0, M]`.
    pub fn inv_cdf(&self, h: f64) -> Result<f64> {
        if !(h > 0.0 && h <= self.mass) {
            return Err(Error::Domain(format!(
                "inv_cdf argument {h} outside (0, {}]",
                self.mass
            )));
        }
        Ok(self.inv_cdf_unchecked(h))
    }

    pub(crate) fn inv_cdf_unchecked(&self, h: f64) -> f64 {
        let (lo, hi) = self.support();
        if h >= self.mass {
            return hi;
        }
        let u = h / self.mass;
        match &self.family {
            CostFamily::Uniform { .. } => lo + u * (hi - lo),
            CostFamily::Power { shape, .. } => lo + (hi - lo) * u.powf(1.0 / shape),
            CostFamily::PiecewiseLinear { knots } => {
                let i = knots.partition_point(|k| k[1] < u).clamp(1, knots.len() - 1);
                let (a, b) = (knots[i - 1], knots[i]);
                a[0] + (u - a[1]) / (b[1] - a[1]) * (b[0] - a[0])
            }
        }
    }

    /// `dCDF/dc`, defined on the open support.
    pub fn density(&self, c: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if !(c > lo && c < hi) {
            return Err(Error::Domain(format!(
                "density argument {c} outside ({lo}, {hi})"
            )));
        }
        Ok(self.density_unchecked(c))
    }

    pub(crate) fn density_unchecked(&self, c: f64) -> f64 {
        let unit = match &self.family {
            CostFamily::Uniform { c_min, c_max } => 1.0 / (c_max - c_min),
            CostFamily::Power { c_min, c_max, shape } => {
                let w = c_max - c_min;
                shape / w * ((c - c_min) / w).powf(shape - 1.0)
            }
            CostFamily::PiecewiseLinear { knots } => {
                // at a knot the left segment wins
                let i = knots.partition_point(|k| k[0] < c).clamp(1, knots.len() - 1);
                let (a, b) = (knots[i - 1], knots[i]);
                (b[1] - a[1]) / (b[0] - a[0])
            }
        };
        self.mass * unit
    }
}

/// Revenue per unit of hash, `P (B + Phi) / H`.
pub fn revenue_per_hash(protocol: &ProtocolParams, p: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("hash rate must be > 0, got {h}")));
    }
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("price must be >= 0, got {p}")));
    }
    Ok(p * protocol.reward() / h)
}

/// Solves the free-entry condition at price `p`.
pub fn solve_hash_supply(economy: &Economy, p: f64) -> Result<HashSupplyPoint> {
    solve_with_reward(economy.costs(), economy.protocol().reward(), p)
}

pub(crate) fn solve_with_reward(costs: &MinerCostModel, reward: f64, p: f64) -> Result<HashSupplyPoint> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("price must be finite and > 0, got {p}")));
    }
    let mass = costs.mass;
    let (_, c_max) = costs.support();
    let target = p * reward;
    if target >= mass * c_max {
        return Ok(HashSupplyPoint { p, h: mass, c_marginal: c_max, at_corner: true });
    }

    let g = |h: f64| h * costs.inv_cdf_unchecked(h);

    let mut lo = mass * 1e-15;
    while g(lo) > target {
        lo *= 1e-15;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::Solver { lo: 0.0, hi: mass, residual: target, iterations: 0 });
        }
    }
    let mut hi = mass;

    // geometric bisection down to a tight bracket
    let mut iters = 0;
    while hi / lo > 1.0 + 1e-3 && iters < MAX_ITERS {
        let mid = (lo * hi).sqrt();
        if g(mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }

    // safeguarded Newton polish
    let mut h = 0.5 * (lo + hi);
    while iters < MAX_ITERS {
        iters += 1;
        let c = costs.inv_cdf_unchecked(h);
        let resid = h * c - target;
        if resid.abs() <= 4.0 * f64::EPSILON * target {
            break;
        }
        if resid > 0.0 {
            hi = h;
        } else {
            lo = h;
        }
        let slope = c + h / costs.density_unchecked(c);
        let mut next = h - resid / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - h).abs() <= f64::EPSILON * h {
            h = next;
            break;
        }
        h = next;
    }

    let c = costs.inv_cdf_unchecked(h);
    let residual = (h * c - target).abs() / target;
    if !(residual <= SUPPLY_RESIDUAL_TOL) {
        return Err(Error::Solver { lo, hi, residual, iterations: iters });
    }
    Ok(HashSupplyPoint { p, h, c_marginal: c, at_corner: false })
}

/// `dH/dP` by implicit differentiation of the free-entry condition; zero at
/// the corner.
pub fn hash_supply_derivative(economy: &Economy, p: f64) -> Result<f64> {
    let point = solve_hash_supply(economy, p)?;
    Ok(derivative_at(economy.costs(), economy.protocol().reward(), &point))
}

pub(crate) fn derivative_at(costs: &MinerCostModel, reward: f64, point: &HashSupplyPoint) -> f64 {
    if point.at_corner {
        return 0.0;
    }
    let c = point.c_marginal;
    reward / (c + point.h / costs.density_unchecked(c))
}
