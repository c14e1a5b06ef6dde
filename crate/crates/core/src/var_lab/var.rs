//! Three-variable VAR with an exogenous halving dummy, and its dynamic
//! multipliers.

use nalgebra::{DMatrix, Schur};
use serde::{Deserialize, Serialize};

use super::ols::ols;
use crate::error::{Error, Result};
use crate::var_lab::VarDataset;

pub const VARIABLES: [&str; 3] = ["log_P", "log_H", "log_Phi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarModel {
    pub lag_order: usize,
    pub variables: Vec<String>,
    /// Regressor names in estimation order.
    pub regressors: Vec<String>,
    pub intercept: [f64; 3],
    /// Loading on the halving dummy; `None` when the dummy never switches
    /// within the estimation sample.
    pub exog_loading: Option<[f64; 3]>,
    /// `coefficients[i][eq][var]` multiplies `var` at lag `i + 1` in equation `eq`.
    pub coefficients: Vec<[[f64; 3]; 3]>,
    /// `std_errors[eq][j]` for regressor `j`.
    pub std_errors: Vec<Vec<f64>>,
    pub residual_cov: [[f64; 3]; 3],
    pub spectral_radius: f64,
    pub nobs: usize,
}

impl VarModel {
    /// A model with given dynamics, for propagating known coefficients.
    pub fn from_parts(coefficients: Vec<[[f64; 3]; 3]>, intercept: [f64; 3], exog_loading: Option<[f64; 3]>) -> Self {
        let spectral_radius = spectral_radius(&coefficients);
        Self {
            lag_order: coefficients.len(),
            variables: VARIABLES.iter().map(|s| s.to_string()).collect(),
            regressors: Vec::new(),
            intercept,
            exog_loading,
            coefficients,
            std_errors: Vec::new(),
            residual_cov: [[0.0; 3]; 3],
            spectral_radius,
            nobs: 0,
        }
    }

    pub fn is_stationary(&self) -> bool {
        self.spectral_radius < 1.0
    }
}

/// Minimum observations: `T - p >= 10 (3p + 2)`.
pub fn required_observations(p: usize) -> usize {
    10 * (3 * p + 2)
}

pub fn estimate_var(data: &VarDataset, p: usize) -> Result<VarModel> {
    data.check()?;
    if p == 0 {
        return Err(Error::Estimation("lag order must be >= 1".into()));
    }
    let t_len = data.len();
    if t_len < p || t_len - p < required_observations(p) {
        return Err(Error::Estimation(format!(
            "{t_len} observations with {p} lags; need T - p >= {}",
            required_observations(p)
        )));
    }
    let n = t_len - p;
    let sample_dummy = &data.halving_dummy[p..];
    let use_dummy = sample_dummy.iter().any(|&d| d != 0);

    let mut names = vec!["intercept".to_string()];
    if use_dummy {
        names.push("halving_dummy".into());
    }
    for lag in 1..=p {
        for v in VARIABLES {
            names.push(format!("{v}.l{lag}"));
        }
    }
    let k = names.len();
    let lag_offset = if use_dummy { 2 } else { 1 };

    let mut x = DMatrix::zeros(n, k);
    let mut y = DMatrix::zeros(n, 3);
    for row in 0..n {
        let t = row + p;
        x[(row, 0)] = 1.0;
        if use_dummy {
            x[(row, 1)] = f64::from(data.halving_dummy[t]);
        }
        for lag in 1..=p {
            let lagged = data.row(t - lag);
            for v in 0..3 {
                x[(row, lag_offset + 3 * (lag - 1) + v)] = lagged[v];
            }
        }
        let current = data.row(t);
        for v in 0..3 {
            y[(row, v)] = current[v];
        }
    }

    let fit = ols(&x, &y, &names)?;
    let dof = (n - k) as f64;
    let mut residual_cov = [[0.0; 3]; 3];
    for (a, row) in residual_cov.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = fit.resid.column(a).dot(&fit.resid.column(b)) / dof;
        }
    }
    let std_errors = (0..3)
        .map(|eq| (0..k).map(|j| (residual_cov[eq][eq] * fit.xtx_inv[(j, j)]).sqrt()).collect())
        .collect();

    let intercept = [fit.coef[(0, 0)], fit.coef[(0, 1)], fit.coef[(0, 2)]];
    let exog_loading = use_dummy.then(|| [fit.coef[(1, 0)], fit.coef[(1, 1)], fit.coef[(1, 2)]]);
    let coefficients: Vec<[[f64; 3]; 3]> = (1..=p)
        .map(|lag| {
            let mut a = [[0.0; 3]; 3];
            for (eq, row) in a.iter_mut().enumerate() {
                for (v, cell) in row.iter_mut().enumerate() {
                    *cell = fit.coef[(lag_offset + 3 * (lag - 1) + v, eq)];
                }
            }
            a
        })
        .collect();

    Ok(VarModel {
        lag_order: p,
        variables: VARIABLES.iter().map(|s| s.to_string()).collect(),
        regressors: names,
        intercept,
        exog_loading,
        spectral_radius: spectral_radius(&coefficients),
        coefficients,
        std_errors,
        residual_cov,
        nobs: n,
    })
}

/// Largest eigenvalue modulus of the companion matrix.
pub fn spectral_radius(coefficients: &[[[f64; 3]; 3]]) -> f64 {
    let p = coefficients.len();
    if p == 0 {
        return 0.0;
    }
    let dim = 3 * p;
    let mut companion = DMatrix::zeros(dim, dim);
    for (lag, a) in coefficients.iter().enumerate() {
        for eq in 0..3 {
            for v in 0..3 {
                companion[(eq, 3 * lag + v)] = a[eq][v];
            }
        }
    }
    for i in 3..dim {
        companion[(i, i - 3)] = 1.0;
    }
    if coefficients.iter().flatten().flatten().all(|v| *v == 0.0) {
        // nilpotent shift matrix
        return 0.0;
    }
    match Schur::try_new(companion.clone(), f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max),
        None => gelfand_radius(&companion),
    }
}

/// `||A^k||^(1/k)` for `k = 2^20` by repeated squaring with rescaling.
fn gelfand_radius(a: &DMatrix<f64>) -> f64 {
    let mut m = a.clone();
    let mut log_scale = 0.0;
    let mut k = 1.0;
    for _ in 0..20 {
        let norm = m.norm();
        if norm == 0.0 {
            return 0.0;
        }
        m /= norm;
        log_scale += norm.ln() / k;
        m = &m * &m;
        k *= 2.0;
    }
    (log_scale + m.norm().ln() / k).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Positive,
    Mixed,
}

impl Sign {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (mut neg, mut pos) = (true, true);
        for v in values {
            neg &= v < 0.0;
            pos &= v > 0.0;
        }
        match (neg, pos) {
            (true, false) => Sign::Negative,
            (false, true) => Sign::Positive,
            _ => Sign::Mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignSummary {
    /// Horizons 1 to 8.
    pub short_run: Option<[Sign; 3]>,
    /// Horizons 26 to 52.
    pub long_run: Option<[Sign; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpulseResponse {
    pub horizons: Vec<usize>,
    /// `responses[h][var]`.
    pub responses: Vec<[f64; 3]>,
    pub signs: SignSummary,
    pub non_stationary: bool,
}

impl ImpulseResponse {
    pub fn path(&self, var: usize) -> Vec<f64> {
        self.responses.iter().map(|r| r[var]).collect()
    }
}

fn window_signs(responses: &[[f64; 3]], from: usize, to: usize) -> Option<[Sign; 3]> {
    if responses.len() <= to {
        return None;
    }
    Some([0, 1, 2].map(|v| Sign::of((from..=to).map(|h| responses[h][v]))))
}

/// Response to the dummy switching permanently from 0 to 1 at horizon 0:
/// `r_h = c + sum_i A_i r_{h-i}`.
pub fn impulse_response(model: &VarModel, horizon: usize) -> Result<ImpulseResponse> {
    let loading = model
        .exog_loading
        .ok_or_else(|| Error::Estimation("model was estimated without a halving dummy".into()))?;
    let mut responses: Vec<[f64; 3]> = Vec::with_capacity(horizon + 1);
    for h in 0..=horizon {
        let mut r = loading;
        for (i, a) in model.coefficients.iter().enumerate() {
            let lag = i + 1;
            if lag > h {
                break;
            }
            let prev = responses[h - lag];
            for eq in 0..3 {
                r[eq] += (0..3).map(|v| a[eq][v] * prev[v]).sum::<f64>();
            }
        }
        responses.push(r);
    }
    let signs = SignSummary {
        short_run: window_signs(&responses, 1, 8),
        long_run: window_signs(&responses, 26, 52),
    };
    Ok(ImpulseResponse {
        horizons: (0..=horizon).collect(),
        responses,
        signs,
        non_stationary: !model.is_stationary(),
    })
}
