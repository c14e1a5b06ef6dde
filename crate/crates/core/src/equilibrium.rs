//! Excess demand, equilibrium search, slope decomposition and stability.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::demand::{total_demand, DemandPoint};
use crate::error::{Error, Result};
use crate::hash_supply::{derivative_at, solve_hash_supply, HashSupplyPoint};
use crate::model::Economy;
use crate::normal::{lower_tail_ratio, std_normal_pdf};
use crate::root::brent;
use crate::security::{safety, SafetyPoint};

/// Below this signal argument the uniqueness margin is evaluated with the
/// Gaussian density factored out, since demand and its partials underflow.
const TAIL_Z: f64 = -30.0;

/// Every model quantity at one price on the supply curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelPoint {
    pub supply: HashSupplyPoint,
    pub safety: SafetyPoint,
    pub demand: DemandPoint,
    #[serde(rename = "dH_dP")]
    pub dh_dp: f64,
}

pub fn evaluate(economy: &Economy, p: f64) -> Result<ModelPoint> {
    let supply = solve_hash_supply(economy, p)?;
    let safety = safety(economy.security(), p, supply.h);
    let demand = total_demand(economy.demand(), p, safety.safety)?;
    let dh_dp = derivative_at(economy.costs(), economy.protocol().reward(), &supply);
    Ok(ModelPoint { supply, safety, demand, dh_dp })
}

/// `Z(P) = D(P, safety(P, H(P))) - Q`.
pub fn excess_demand(economy: &Economy, p: f64) -> Result<f64> {
    Ok(evaluate(economy, p)?.demand.d_total - economy.protocol().q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeDecomposition {
    /// `dD/dP + dD/dsigma * dsigma/dP`; stabilizing.
    pub direct: f64,
    /// `dD/dsigma * dsigma/dH * dH/dP`; the security feedback.
    pub indirect: f64,
    pub total: f64,
}

impl SlopeDecomposition {
    fn at(point: &ModelPoint) -> Self {
        let d = &point.demand;
        let s = &point.safety;
        let direct = d.dd_dp + d.dd_dsigma * s.d_safety_dp;
        let indirect = d.dd_dsigma * s.d_safety_dh * point.dh_dp;
        Self { direct, indirect, total: direct + indirect }
    }
}

pub fn aggregate_demand_slope(economy: &Economy, p: f64) -> Result<SlopeDecomposition> {
    Ok(SlopeDecomposition::at(&evaluate(economy, p)?))
}

/// `(|direct| - indirect) / |direct|` at a point. Deep in the attack tail
/// both terms underflow together, so the common density factor is divided
/// out before comparing.
fn relative_margin(economy: &Economy, point: &ModelPoint) -> f64 {
    let z = point.safety.z;
    let (direct, indirect) = if z < TAIL_Z {
        let sec = economy.security();
        let dem = economy.demand();
        let p = point.supply.p;
        let d = &point.demand;
        let ratio = lower_tail_ratio(z);
        let user = -dem.eps * dem.theta_u * ratio * p.powf(-dem.eps - 1.0);
        let spec = if d.spec_floored {
            0.0
        } else if dem.delta == 0.0 {
            -dem.theta_s * ratio / (p * p)
        } else {
            (-d.d_spec / p / std_normal_pdf(z)).max(-f64::MAX)
        };
        let direct = user + spec - d.dd_dsigma * sec.g / sec.sigma_eps;
        let indirect = d.dd_dsigma * sec.k / sec.sigma_eps * point.dh_dp;
        (direct, indirect)
    } else {
        let s = SlopeDecomposition::at(point);
        (s.direct, s.indirect)
    };
    if direct == 0.0 {
        return if indirect > 0.0 { f64::NEG_INFINITY } else { 0.0 };
    }
    (direct.abs() - indirect) / direct.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn classify(total_slope: f64, q: f64, p: f64) -> Self {
        let tol = 1e-12 * q / p;
        if total_slope < -tol {
            Stability::Stable
        } else if total_slope > tol {
            Stability::Unstable
        } else {
            Stability::Marginal
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    #[serde(rename = "P_star")]
    pub p_star: f64,
    #[serde(rename = "H_star")]
    pub h_star: f64,
    pub sigma_star: f64,
    pub excess_residual: f64,
    pub slope: SlopeDecomposition,
    pub stability: Stability,
}

impl Equilibrium {
    pub fn at(economy: &Economy, p: f64) -> Result<Self> {
        let point = evaluate(economy, p)?;
        let q = economy.protocol().q;
        let slope = SlopeDecomposition::at(&point);
        Ok(Self {
            p_star: p,
            h_star: point.supply.h,
            sigma_star: point.safety.safety,
            excess_residual: (point.demand.d_total - q).abs(),
            slope,
            stability: Stability::classify(slope.total, q, p),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub p_min: f64,
    pub p_max: f64,
    pub n_grid: usize,
    pub log_spaced: bool,
    pub refine_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            p_min: 1e-6,
            p_max: 1e9,
            n_grid: 4096,
            log_spaced: true,
            refine_tol: 1e-13,
        }
    }
}

impl ScanConfig {
    pub fn window(p_min: f64, p_max: f64, n_grid: usize) -> Self {
        Self { p_min, p_max, n_grid, ..Self::default() }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.p_min > 0.0 && self.p_min < self.p_max && self.p_max.is_finite()) {
            return Err(Error::Domain(format!(
                "scan window requires 0 < p_min < p_max, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        if self.n_grid < 16 {
            return Err(Error::Domain(format!("n_grid must be >= 16, got {}", self.n_grid)));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::Domain("refine_tol must be > 0".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.n_grid;
        let last = (n - 1) as f64;
        let mut grid: Vec<f64> = if self.log_spaced {
            let (a, b) = (self.p_min.ln(), self.p_max.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / last).exp()).collect()
        } else {
            (0..n)
                .map(|i| self.p_min + (self.p_max - self.p_min) * i as f64 / last)
                .collect()
        };
        grid[0] = self.p_min;
        grid[n - 1] = self.p_max;
        grid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryDiagnostics {
    pub z_at_p_min: f64,
    pub z_at_p_max: f64,
    /// `Z(p_min) > 0`.
    pub lower_ok: bool,
    /// `Z(p_max) < 0`.
    pub upper_ok: bool,
}

impl BoundaryDiagnostics {
    pub fn passed(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSet {
    pub equilibria: Vec<Equilibrium>,
    pub boundary: BoundaryDiagnostics,
    pub warnings: Vec<String>,
}

fn excess_on_grid(economy: &Economy, grid: &[f64]) -> Result<Vec<f64>> {
    grid.par_iter().map(|&p| excess_demand(economy, p)).collect()
}

/// Scans `Z` over the grid and refines every sign change.
pub fn find_equilibria(economy: &Economy, scan: &ScanConfig) -> Result<EquilibriumSet> {
    scan.check()?;
    let grid = scan.grid();
    let z = excess_on_grid(economy, &grid)?;
    let n = grid.len();

    let boundary = BoundaryDiagnostics {
        z_at_p_min: z[0],
        z_at_p_max: z[n - 1],
        lower_ok: z[0] > 0.0,
        upper_ok: z[n - 1] < 0.0,
    };
    let mut warnings = Vec::new();
    if !boundary.lower_ok {
        warnings.push(format!(
            "Z(p_min = {}) = {} is not positive; existence not guaranteed on this window",
            scan.p_min, z[0]
        ));
    }
    if !boundary.upper_ok {
        warnings.push(format!(
            "Z(p_max = {}) = {} is not negative; existence not guaranteed on this window",
            scan.p_max,
            z[n - 1]
        ));
    }

    let mut roots = Vec::new();
    for i in 0..n {
        if z[i] == 0.0 {
            roots.push(grid[i]);
        } else if i + 1 < n && z[i + 1] != 0.0 && (z[i] > 0.0) != (z[i + 1] > 0.0) {
            let p = brent(|p| excess_demand(economy, p), grid[i], grid[i + 1], scan.refine_tol)?;
            roots.push(p);
        }
    }

    let equilibria = roots
        .into_iter()
        .map(|p| Equilibrium::at(economy, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquilibriumSet { equilibria, boundary, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub holds_everywhere: bool,
    /// Price intervals `[lo, hi]` bounding each run of violating grid points.
    pub violation_intervals: Vec<[f64; 2]>,
    /// Smallest `|direct| - indirect` over the grid.
    pub margin: f64,
    /// Smallest `(|direct| - indirect) / |direct|` over the grid.
    pub relative_margin: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_grid: usize,
}

/// Checks `|direct| > indirect` at every grid point of the scan window.
pub fn check_uniqueness_condition(economy: &Economy, scan: &ScanConfig) -> Result<UniquenessReport> {
    scan.check()?;
    let grid = scan.grid();
    let margins: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&p| {
            let point = evaluate(economy, p)?;
            let s = SlopeDecomposition::at(&point);
            Ok((s.direct.abs() - s.indirect, relative_margin(economy, &point)))
        })
        .collect::<Result<_>>()?;

    let mut intervals = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, &(_, rel)) in margins.iter().enumerate() {
        let violated = !(rel > 0.0);
        match (violated, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                intervals.push([grid[s.saturating_sub(1)], grid[i]]);
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        intervals.push([grid[s.saturating_sub(1)], grid[grid.len() - 1]]);
    }

    let margin = margins.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
    let relative_margin = margins.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    Ok(UniquenessReport {
        holds_everywhere: intervals.is_empty(),
        violation_intervals: intervals,
        margin,
        relative_margin,
        p_min: scan.p_min,
        p_max: scan.p_max,
        n_grid: scan.n_grid,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TatonnementConfig {
    pub p0: f64,
    pub kappa: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iters() -> usize {
    10_000
}

/// Lower bound on the multiplicative price step, keeping prices positive.
pub const FLOOR_FACTOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TatonnementStep {
    pub iteration: usize,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "Z")]
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TatonnementOutcome {
    Converged { p_limit: f64 },
    Diverged,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TatonnementResult {
    pub trajectory: Vec<TatonnementStep>,
    pub outcome: TatonnementOutcome,
    pub iterations: usize,
}

/// Iterates `P <- max(P * FLOOR_FACTOR, P + kappa * Z(P))`. Leaving the scan
/// window by a factor of 10 on either side counts as divergence.
pub fn tatonnement(economy: &Economy, cfg: &TatonnementConfig, scan: &ScanConfig) -> Result<TatonnementResult> {
    if !(cfg.p0 > 0.0 && cfg.p0.is_finite()) {
        return Err(Error::Domain(format!("p0 must be > 0, got {}", cfg.p0)));
    }
    if !(cfg.kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be > 0, got {}", cfg.kappa)));
    }
    let (lo, hi) = (scan.p_min / 10.0, scan.p_max * 10.0);
    let mut trajectory = Vec::new();
    let mut p = cfg.p0;
    let mut iteration = 0;
    let outcome = loop {
        let z = excess_demand(economy, p)?;
        trajectory.push(TatonnementStep { iteration, p, z });
        if z.abs() <= cfg.tol {
            break TatonnementOutcome::Converged { p_limit: p };
        }
        if iteration >= cfg.max_iters {
            break TatonnementOutcome::MaxIters;
        }
        iteration += 1;
        p = (p * FLOOR_FACTOR).max(p + cfg.kappa * z);
        if !(p >= lo && p <= hi) {
            break TatonnementOutcome::Diverged;
        }
    };
    Ok(TatonnementResult { trajectory, outcome, iterations: iteration })
}
