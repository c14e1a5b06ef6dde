//! Weekly stochastic law of motion around the static equilibrium.
//!
//! Each week the user demand scale and log fees move as AR(1) processes and
//! the price clears the market against the hash rate currently deployed.
//! Miners then move a fraction `lambda_adj` of the way toward the free-entry
//! supply at that price; the adjusted hash rate is what is deployed (and
//! recorded) the following week, so recorded hash responds to lagged price.
//!
//! Random numbers come from ChaCha8 seeded with `seed` (through
//! `seed_from_u64`), stream 0 for demand innovations and stream 1 for fee
//! innovations. Each standard normal draw consumes two `f64` uniforms
//! `u1, u2` (53-bit, `[0, 1)`) and returns `sqrt(-2 ln(1 - u1)) cos(2 pi u2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::demand::total_demand;
use crate::equilibrium::{find_equilibria, ScanConfig, Stability};
use crate::error::{Error, Result};
use crate::hash_supply::solve_with_reward;
use crate::model::Economy;
use crate::root::{brent, bracket_decreasing};
use crate::security::safety;
use crate::var_lab::VarDataset;

const PRICE_FLOOR: f64 = 1e-12;
const PRICE_CEIL: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ar1Spec {
    pub persistence: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeeProcess {
    /// Long-run mean of `log Phi`; defaults to `ln(Phi)` of the economy.
    #[serde(default)]
    pub mean: Option<f64>,
    pub persistence: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub weeks: usize,
    pub lambda_adj: f64,
    pub theta_u_shock: Ar1Spec,
    pub fee_process: FeeProcess,
    #[serde(default)]
    pub halving_week: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl DynamicsSpec {
    pub fn check(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Domain(m));
        if self.weeks < 50 {
            return fail(format!("weeks must be >= 50, got {}", self.weeks));
        }
        if !(self.lambda_adj > 0.0 && self.lambda_adj <= 1.0) {
            return fail(format!("lambda_adj must lie in (0, 1], got {}", self.lambda_adj));
        }
        for (name, rho, sd) in [
            ("theta_u_shock", self.theta_u_shock.persistence, self.theta_u_shock.sd),
            ("fee_process", self.fee_process.persistence, self.fee_process.sd),
        ] {
            if !(0.0..1.0).contains(&rho) {
                return fail(format!("{name}.persistence must lie in [0, 1), got {rho}"));
            }
            if !(sd >= 0.0 && sd.is_finite()) {
                return fail(format!("{name}.sd must be >= 0, got {sd}"));
            }
        }
        if let Some(m) = self.fee_process.mean {
            if !m.is_finite() {
                return fail("fee_process.mean must be finite".into());
            }
        }
        Ok(())
    }
}

pub(crate) struct NormalStream(ChaCha8Rng);

impl NormalStream {
    pub(crate) fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    pub(crate) fn next(&mut self) -> f64 {
        let u1: f64 = self.0.gen();
        let u2: f64 = self.0.gen();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Runs the weekly law of motion from the economy's unique stable equilibrium.
pub fn simulate_economy(economy: &Economy, spec: &DynamicsSpec) -> Result<VarDataset> {
    spec.check()?;
    let set = find_equilibria(economy, &ScanConfig::default())?;
    let start = match set.equilibria.as_slice() {
        [e] if e.stability == Stability::Stable => *e,
        other => {
            return Err(Error::Scenario(format!(
                "simulation needs a unique stable equilibrium, found {}",
                other.len()
            )))
        }
    };

    let params = economy.params();
    let fee_mean = match spec.fee_process.mean {
        Some(m) => m,
        None if params.protocol.phi > 0.0 => params.protocol.phi.ln(),
        None => return Err(Error::Domain("fee_process.mean is required when Phi = 0".into())),
    };

    let mut demand_noise = NormalStream::new(spec.seed, 0);
    let mut fee_noise = NormalStream::new(spec.seed, 1);
    let mut dem = params.demand;
    let mut subsidy = params.protocol.b;
    let q = params.protocol.q;

    let mut u = 0.0;
    let mut log_fee = fee_mean;
    let mut dummy = 0u8;
    let mut p_prev = start.p_star;
    let mut h = start.h_star;
    let mut h_target = start.h_star;

    let n = spec.weeks;
    let mut data = VarDataset {
        log_p: Vec::with_capacity(n),
        log_h: Vec::with_capacity(n),
        log_phi: Vec::with_capacity(n),
        halving_dummy: Vec::with_capacity(n),
        meta: format!("synthetic:seed={}", spec.seed),
    };

    for week in 0..n {
        u = spec.theta_u_shock.persistence * u + spec.theta_u_shock.sd * demand_noise.next();
        log_fee = fee_mean
            + spec.fee_process.persistence * (log_fee - fee_mean)
            + spec.fee_process.sd * fee_noise.next();
        dem.theta_u = params.demand.theta_u * u.exp();
        if spec.halving_week == Some(week) {
            subsidy *= 0.5;
            dummy = 1;
        }
        h += spec.lambda_adj * (h_target - h);

        let sim_err = |e: Error| Error::Simulation { week, reason: format!("{e} (H = {h}, P_prev = {p_prev})") };
        let excess = |p: f64| -> Result<f64> {
            let s = safety(economy.security(), p, h).safety;
            Ok(total_demand(&dem, p, s)?.d_total - q)
        };
        let (lo, hi) = bracket_decreasing(excess, p_prev, PRICE_FLOOR, PRICE_CEIL).map_err(sim_err)?;
        let p = brent(excess, lo, hi, 1e-14).map_err(sim_err)?;

        data.log_p.push(p.ln());
        data.log_h.push(h.ln());
        data.log_phi.push(log_fee);
        data.halving_dummy.push(dummy);

        h_target = solve_with_reward(economy.costs(), subsidy + log_fee.exp(), p).map_err(sim_err)?.h;
        p_prev = p;
    }
    Ok(data)
}
