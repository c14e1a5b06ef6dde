//! Halving comparative statics and one-dimensional parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{check_uniqueness_condition, find_equilibria, Equilibrium, ScanConfig, Stability};
use crate::error::{Error, Result};
use crate::model::{validate, Economy, EconomyParams};

/// Returns the economy with its block subsidy scaled by `factor`.
pub fn apply_subsidy_cut(economy: &Economy, factor: f64) -> Result<Economy> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(Error::Domain(format!("subsidy factor must lie in (0, 1], got {factor}")));
    }
    let mut params = economy.params().clone();
    if !(params.protocol.b > 0.0) {
        return Err(Error::Domain("block subsidy is zero; nothing to halve".into()));
    }
    params.protocol.b *= factor;
    Ok(validate(params)?)
}

/// `B -> B / 2`, everything else untouched.
pub fn apply_halving(economy: &Economy) -> Result<Economy> {
    apply_subsidy_cut(economy, 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HalvingPrediction {
    /// Uniqueness held on both sides and the price fell weakly, hash strictly.
    Confirmed,
    /// Uniqueness held on both sides but the signs came out wrong.
    Violated,
    /// Uniqueness failed on some side, or the shock was the identity.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalvingReport {
    pub subsidy_factor: f64,
    pub pre: Equilibrium,
    pub post: Equilibrium,
    #[serde(rename = "delta_P")]
    pub delta_p: f64,
    #[serde(rename = "delta_H")]
    pub delta_h: f64,
    pub delta_sigma: f64,
    pub selection_note: String,
    pub uniqueness_pre: bool,
    pub uniqueness_post: bool,
    pub prediction: HalvingPrediction,
}

/// Picks the highest-price stable equilibrium, falling back to the highest
/// price overall.
fn select(equilibria: &[Equilibrium]) -> (Equilibrium, &'static str) {
    let stable = equilibria.iter().rev().find(|e| e.stability == Stability::Stable);
    match stable {
        Some(e) if equilibria.len() == 1 => (*e, "unique"),
        Some(e) => (*e, "highest-price stable"),
        None => (*equilibria.last().expect("nonempty"), "highest-price (no stable equilibrium)"),
    }
}

pub fn halving_report(economy: &Economy, scan: &ScanConfig) -> Result<HalvingReport> {
    subsidy_shock_report(economy, 0.5, scan)
}

/// Solves the economy before and after scaling `B` by `factor` and compares
/// the paired equilibria.
pub fn subsidy_shock_report(economy: &Economy, factor: f64, scan: &ScanConfig) -> Result<HalvingReport> {
    let shocked = apply_subsidy_cut(economy, factor)?;
    let pre_set = find_equilibria(economy, scan)?;
    let post_set = find_equilibria(&shocked, scan)?;
    for (label, set) in [("pre-shock", &pre_set), ("post-shock", &post_set)] {
        if set.equilibria.is_empty() {
            return Err(Error::Scenario(format!(
                "no {label} equilibrium on [{}, {}]: Z(p_min) = {}, Z(p_max) = {}",
                scan.p_min, scan.p_max, set.boundary.z_at_p_min, set.boundary.z_at_p_max
            )));
        }
    }
    let (pre, pre_rule) = select(&pre_set.equilibria);
    let (post, post_rule) = select(&post_set.equilibria);
    let selection_note = format!(
        "pre: {pre_rule} of {}; post: {post_rule} of {}",
        pre_set.equilibria.len(),
        post_set.equilibria.len()
    );

    let uniqueness_pre = check_uniqueness_condition(economy, scan)?.holds_everywhere;
    let uniqueness_post = check_uniqueness_condition(&shocked, scan)?.holds_everywhere;
    let delta_p = post.p_star - pre.p_star;
    let delta_h = post.h_star - pre.h_star;
    let prediction = if factor == 1.0 || !(uniqueness_pre && uniqueness_post) {
        HalvingPrediction::NotApplicable
    } else if delta_h < 0.0 && delta_p <= 1e-12 * pre.p_star {
        HalvingPrediction::Confirmed
    } else {
        HalvingPrediction::Violated
    };

    Ok(HalvingReport {
        subsidy_factor: factor,
        pre,
        post,
        delta_p,
        delta_h,
        delta_sigma: post.sigma_star - pre.sigma_star,
        selection_note,
        uniqueness_pre,
        uniqueness_post,
        prediction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted parameter path, e.g. `security.sigma_eps`.
    pub field: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumSummary {
    #[serde(rename = "P_star")]
    pub p_star: f64,
    #[serde(rename = "H_star")]
    pub h_star: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub valid: bool,
    pub error: Option<String>,
    pub equilibria: Vec<EquilibriumSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    /// Adjacent axis values `[a, b]` whose equilibrium counts differ.
    pub bifurcation_points: Vec<[f64; 2]>,
}

fn sweep_row(base: &EconomyParams, field: &str, value: f64, scan: &ScanConfig) -> SweepRow {
    let mut params = base.clone();
    params.set(field, value);
    let solved = validate(params)
        .map_err(Error::from)
        .and_then(|eco| find_equilibria(&eco, scan));
    match solved {
        Ok(set) => SweepRow {
            axis_value: value,
            valid: true,
            error: None,
            equilibria: set
                .equilibria
                .iter()
                .map(|e| EquilibriumSummary { p_star: e.p_star, h_star: e.h_star, stability: e.stability })
                .collect(),
        },
        Err(err) => SweepRow { axis_value: value, valid: false, error: Some(err.to_string()), equilibria: Vec::new() },
    }
}

pub fn parameter_sweep(base: &EconomyParams, axis: &SweepAxis, scan: &ScanConfig) -> Result<SweepResult> {
    scan.check()?;
    if base.get(&axis.field).is_none() {
        return Err(Error::Domain(format!("unknown sweep field {:?}", axis.field)));
    }
    if axis.values.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Domain("sweep grid must be sorted ascending".into()));
    }
    let rows: Vec<SweepRow> = axis
        .values
        .par_iter()
        .map(|&v| sweep_row(base, &axis.field, v, scan))
        .collect();

    let valid: Vec<&SweepRow> = rows.iter().filter(|r| r.valid).collect();
    let bifurcation_points = valid
        .windows(2)
        .filter(|w| w[0].equilibria.len() != w[1].equilibria.len())
        .map(|w| [w[0].axis_value, w[1].axis_value])
        .collect();

    Ok(SweepResult { axis: axis.clone(), rows, bifurcation_points })
}
