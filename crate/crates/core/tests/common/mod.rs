#![allow(dead_code)]

use resune::model::{
    validate, CostFamily, DemandParams, Economy, EconomyParams, MinerCostModel, ProtocolParams, SecurityParams,
};
use resune::var_lab::{Ar1Spec, DynamicsSpec, FeeProcess};

pub fn params(
    (b, phi, q): (f64, f64, f64),
    (g, k, sigma_eps, s_star): (f64, f64, f64, f64),
    (theta_u, eps, theta_s, delta): (f64, f64, f64, f64),
) -> EconomyParams {
    EconomyParams {
        protocol: ProtocolParams { b, phi, q },
        security: SecurityParams { g, k, sigma_eps, s_star },
        demand: DemandParams { theta_u, eps, theta_s, delta },
        costs: MinerCostModel::uniform(0.0, 1.0, 1.0),
    }
}

/// Security feedback switched off: `sigma_eps` so large that safety is 1/2
/// everywhere, no speculators. `Z(P) = 10 / P - 10`, so `P* = 1`.
pub fn limiting_params() -> EconomyParams {
    params((0.2, 0.05, 10.0), (1.0, 1.0, 1e9, 0.0), (20.0, 1.0, 0.0, 0.0))
}

/// Unique stable equilibrium with strong security feedback.
pub fn baseline_params() -> EconomyParams {
    params((0.2, 0.05, 10.0), (1.0, 4.0, 1.0, 0.0), (10.0, 1.0, 5.0, 0.5))
}

/// Three equilibria: stable, unstable, stable.
pub fn multiplicity_params() -> EconomyParams {
    params((0.2, 0.05, 8.0), (1.0, 5.0, 0.3, -1.0), (1.0, 1.0, 10.0, 0.0))
}

/// Further unique economies with active feedback.
pub fn feedback_params() -> Vec<EconomyParams> {
    vec![
        baseline_params(),
        params((0.2, 0.05, 10.0), (1.0, 1.0, 10.0, 0.0), (20.0, 1.0, 0.0, 0.0)),
        params((0.2, 0.05, 5.0), (1.0, 3.0, 0.5, 0.0), (10.0, 1.5, 2.0, 0.2)),
        params((0.2, 0.05, 6.0), (0.5, 4.0, 1.0, 0.5), (8.0, 0.8, 4.0, 1.0)),
    ]
}

pub fn economy(p: EconomyParams) -> Economy {
    validate(p).expect("valid test economy")
}

pub fn power_costs() -> MinerCostModel {
    MinerCostModel { family: CostFamily::Power { c_min: 0.1, c_max: 2.0, shape: 2.5 }, mass: 3.0 }
}

pub fn piecewise_costs() -> MinerCostModel {
    MinerCostModel {
        family: CostFamily::PiecewiseLinear { knots: vec![[0.0, 0.0], [0.5, 0.6], [1.5, 0.9], [3.0, 1.0]] },
        mass: 2.0,
    }
}

/// Weekly dynamics used for the sign and lead-lag ensembles.
pub fn ensemble_dynamics() -> DynamicsSpec {
    DynamicsSpec {
        weeks: 400,
        lambda_adj: 0.3,
        theta_u_shock: Ar1Spec { persistence: 0.5, sd: 0.02 },
        fee_process: FeeProcess { mean: None, persistence: 0.8, sd: 0.05 },
        halving_week: Some(200),
        seed: 0,
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
