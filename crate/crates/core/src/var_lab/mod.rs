//! Synthetic weekly data, VAR estimation, impulse responses and lead-lag
//! diagnostics.

mod dataset;
mod granger;
mod ols;
mod simulate;
mod var;

use rayon::prelude::*;
use serde::Serialize;

pub use dataset::{load_dataset, VarDataset, DATASET_COLUMNS};
pub use granger::{granger_lead_lag, GrangerStat, LeadLagReport};
pub use ols::RANK_TOL;
pub use simulate::{simulate_economy, Ar1Spec, DynamicsSpec, FeeProcess};
pub use var::{
    estimate_var, impulse_response, required_observations, spectral_radius, ImpulseResponse, Sign, SignSummary,
    VarModel, VARIABLES,
};

use crate::error::Result;
use crate::model::Economy;

/// One seeded replication of simulate, estimate, respond and lead-lag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replication {
    pub seed: u64,
    pub irf: ImpulseResponse,
    pub lead_lag: LeadLagReport,
}

/// Runs one replication per seed, concurrently; results are sorted by seed.
pub fn run_ensemble(
    economy: &Economy,
    spec: &DynamicsSpec,
    seeds: &[u64],
    lag_order: usize,
    horizon: usize,
    max_lag: usize,
) -> Result<Vec<Replication>> {
    let mut runs: Vec<Replication> = seeds
        .par_iter()
        .map(|&seed| {
            let spec = DynamicsSpec { seed, ..*spec };
            let data = simulate_economy(economy, &spec)?;
            let model = estimate_var(&data, lag_order)?;
            Ok(Replication {
                seed,
                irf: impulse_response(&model, horizon)?,
                lead_lag: granger_lead_lag(&data, max_lag)?,
            })
        })
        .collect::<Result<_>>()?;
    runs.sort_by_key(|r| r.seed);
    Ok(runs)
}
