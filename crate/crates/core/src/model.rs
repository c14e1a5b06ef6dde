//! Parameter bundle for one economy and its validation.

use serde::{Deserialize, Serialize};

use crate::error::{ValidationError, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    /// Block subsidy, asset units per block.
    #[serde(rename = "B")]
    pub b: f64,
    /// Mean transaction fees per block, asset units.
    #[serde(rename = "Phi")]
    pub phi: f64,
    /// Total asset supply.
    #[serde(rename = "Q")]
    pub q: f64,
}

impl ProtocolParams {
    /// Total reward per block, `B + Phi`.
    pub fn reward(&self) -> f64 {
        self.b + self.phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecurityParams {
    /// Attacker gross payoff per unit price.
    pub g: f64,
    /// Attack cost per unit hash rate.
    pub k: f64,
    pub sigma_eps: f64,
    #[serde(default)]
    pub s_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandParams {
    #[serde(rename = "theta_U")]
    pub theta_u: f64,
    pub eps: f64,
    #[serde(rename = "theta_S")]
    pub theta_s: f64,
    pub delta: f64,
}

/// Unit-mass cost distribution family over `[c_min, c_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CostFamily {
    Uniform { c_min: f64, c_max: f64 },
    /// `F(c) = ((c - c_min) / (c_max - c_min))^shape`.
    Power { c_min: f64, c_max: f64, shape: f64 },
    /// Knots `(cost, cumulative share)`, linear in between. The first share
    /// must be 0 and the last 1.
    PiecewiseLinear { knots: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinerCostModel {
    pub family: CostFamily,
    /// Total measure of potential miners.
    pub mass: f64,
}

impl MinerCostModel {
    pub fn uniform(c_min: f64, c_max: f64, mass: f64) -> Self {
        Self {
            family: CostFamily::Uniform { c_min, c_max },
            mass,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match &self.family {
            CostFamily::Uniform { c_min, c_max } | CostFamily::Power { c_min, c_max, .. } => {
                (*c_min, *c_max)
            }
            CostFamily::PiecewiseLinear { knots } => match (knots.first(), knots.last()) {
                (Some(a), Some(b)) => (a[0], b[0]),
                _ => (f64::NAN, f64::NAN),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyParams {
    pub protocol: ProtocolParams,
    pub security: SecurityParams,
    pub demand: DemandParams,
    pub costs: MinerCostModel,
}

/// Parameters that passed [`validate`]. Every model computation takes this
/// wrapper, never raw [`EconomyParams`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Economy(EconomyParams);

impl Economy {
    pub fn params(&self) -> &EconomyParams {
        &self.0
    }

    pub fn protocol(&self) -> &ProtocolParams {
        &self.0.protocol
    }

    pub fn security(&self) -> &SecurityParams {
        &self.0.security
    }

    pub fn demand(&self) -> &DemandParams {
        &self.0.demand
    }

    pub fn costs(&self) -> &MinerCostModel {
        &self.0.costs
    }

    pub fn into_params(self) -> EconomyParams {
        self.0
    }
}

impl TryFrom<EconomyParams> for Economy {
    type Error = ValidationError;

    fn try_from(params: EconomyParams) -> Result<Self, Self::Error> {
        validate(params)
    }
}

impl EconomyParams {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    /// Reads a scalar by dotted path, e.g. `security.sigma_eps`.
    pub fn get(&self, path: &str) -> Option<f64> {
        let v = match path {
            "protocol.B" => self.protocol.b,
            "protocol.Phi" => self.protocol.phi,
            "protocol.Q" => self.protocol.q,
            "security.g" => self.security.g,
            "security.k" => self.security.k,
            "security.sigma_eps" => self.security.sigma_eps,
            "security.s_star" => self.security.s_star,
            "demand.theta_U" => self.demand.theta_u,
            "demand.eps" => self.demand.eps,
            "demand.theta_S" => self.demand.theta_s,
            "demand.delta" => self.demand.delta,
            "costs.mass" => self.costs.mass,
            "costs.c_min" => self.costs.support().0,
            "costs.c_max" => self.costs.support().1,
            "costs.shape" => match self.costs.family {
                CostFamily::Power { shape, .. } => shape,
                _ => return None,
            },
            _ => return None,
        };
        Some(v)
    }

    /// Overwrites a scalar by dotted path. Returns `false` if the path does not
    /// name a scalar of this economy.
    pub fn set(&mut self, path: &str, value: f64) -> bool {
        let slot = match path {
            "protocol.B" => &mut self.protocol.b,
            "protocol.Phi" => &mut self.protocol.phi,
            "protocol.Q" => &mut self.protocol.q,
            "security.g" => &mut self.security.g,
            "security.k" => &mut self.security.k,
            "security.sigma_eps" => &mut self.security.sigma_eps,
            "security.s_star" => &mut self.security.s_star,
            "demand.theta_U" => &mut self.demand.theta_u,
            "demand.eps" => &mut self.demand.eps,
            "demand.theta_S" => &mut self.demand.theta_s,
            "demand.delta" => &mut self.demand.delta,
            "costs.mass" => &mut self.costs.mass,
            "costs.c_min" | "costs.c_max" | "costs.shape" => {
                return set_cost_field(&mut self.costs.family, path, value)
            }
            _ => return false,
        };
        *slot = value;
        true
    }
}

fn set_cost_field(family: &mut CostFamily, path: &str, value: f64) -> bool {
    match (family, path) {
        (CostFamily::Uniform { c_min, .. } | CostFamily::Power { c_min, .. }, "costs.c_min") => {
            *c_min = value
        }
        (CostFamily::Uniform { c_max, .. } | CostFamily::Power { c_max, .. }, "costs.c_max") => {
            *c_max = value
        }
        (CostFamily::Power { shape, .. }, "costs.shape") => *shape = value,
        _ => return false,
    }
    true
}

#[derive(Default)]
struct Violations(Vec<Violation>);

impl Violations {
    fn check(&mut self, ok: bool, field: &str, message: impl Into<String>) {
        if !ok {
            self.0.push(Violation {
                field: field.to_string(),
                message: message.into(),
            });
        }
    }
}

/// Checks every parameter invariant and collects one violation per failure.
pub fn validate(params: EconomyParams) -> Result<Economy, ValidationError> {
    let mut v = Violations::default();
    let p = &params.protocol;
    v.check(p.b >= 0.0 && p.b.is_finite(), "protocol.B", "B must be >= 0");
    v.check(p.phi >= 0.0 && p.phi.is_finite(), "protocol.Phi", "Phi must be >= 0");
    v.check(p.b + p.phi > 0.0, "protocol.B", "B + Phi must be > 0");
    v.check(p.q > 0.0 && p.q.is_finite(), "protocol.Q", "Q must be > 0");

    let s = &params.security;
    v.check(s.g > 0.0 && s.g.is_finite(), "security.g", "g must be > 0");
    v.check(s.k > 0.0 && s.k.is_finite(), "security.k", "k must be > 0");
    v.check(s.sigma_eps > 0.0 && s.sigma_eps.is_finite(), "security.sigma_eps", "sigma_eps must be > 0");
    v.check(s.s_star.is_finite(), "security.s_star", "s_star must be finite");

    let d = &params.demand;
    v.check(d.theta_u > 0.0 && d.theta_u.is_finite(), "demand.theta_U", "theta_U must be > 0");
    v.check(d.eps > 0.0 && d.eps.is_finite(), "demand.eps", "eps must be > 0");
    v.check(d.theta_s >= 0.0 && d.theta_s.is_finite(), "demand.theta_S", "theta_S must be >= 0");
    v.check(d.delta >= 0.0 && d.delta.is_finite(), "demand.delta", "delta must be >= 0");

    let c = &params.costs;
    v.check(c.mass > 0.0 && c.mass.is_finite(), "costs.mass", "mass must be > 0");
    match &c.family {
        CostFamily::Uniform { c_min, c_max } => check_support(&mut v, *c_min, *c_max),
        CostFamily::Power { c_min, c_max, shape } => {
            check_support(&mut v, *c_min, *c_max);
            v.check(*shape > 0.0 && shape.is_finite(), "costs.shape", "shape must be > 0");
        }
        CostFamily::PiecewiseLinear { knots } => check_knots(&mut v, knots),
    }

    if v.0.is_empty() {
        Ok(Economy(params))
    } else {
        Err(ValidationError { violations: v.0 })
    }
}

fn check_support(v: &mut Violations, c_min: f64, c_max: f64) {
    v.check(c_min >= 0.0, "costs.c_min", "c_min must be >= 0");
    v.check(c_max.is_finite(), "costs.c_max", "c_max must be finite");
    v.check(c_min < c_max, "costs.c_max", "c_min must be < c_max");
}

fn check_knots(v: &mut Violations, knots: &[[f64; 2]]) {
    if knots.len() < 2 {
        v.check(false, "costs.knots", "knots must have at least 2 points");
        return;
    }
    let first = knots[0];
    let last = knots[knots.len() - 1];
    check_support(v, first[0], last[0]);
    v.check(first[1] == 0.0, "costs.knots", "first knot share must be 0");
    v.check(last[1] == 1.0, "costs.knots", "last knot share must be 1");
    let increasing = knots
        .windows(2)
        .all(|w| w[1][0] > w[0][0] && w[1][1] > w[0][1]);
    v.check(
        increasing,
        "costs.knots",
        "knot costs and shares must be strictly increasing",
    );
}
