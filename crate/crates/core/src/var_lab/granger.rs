//! Bivariate lead-lag (Granger-style) diagnostics between price and hash rate.

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::ols::ols;
use crate::error::{Error, Result};
use crate::var_lab::VarDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrangerStat {
    pub lag: usize,
    pub f_stat: f64,
    pub p_value: f64,
    /// Share of the own-lag residual variance explained by the other
    /// series' lags, `(RSS_restricted - RSS_unrestricted) / RSS_restricted`.
    pub incremental_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadLagReport {
    pub max_lag: usize,
    pub nobs: usize,
    /// Lags of log P added to a log H regression.
    pub price_to_hash: Vec<GrangerStat>,
    /// Lags of log H added to a log P regression.
    pub hash_to_price: Vec<GrangerStat>,
}

impl LeadLagReport {
    /// Incremental R^2 at the largest lag, `(price -> hash, hash -> price)`.
    pub fn incremental_r2(&self) -> (f64, f64) {
        let last = |v: &[GrangerStat]| v.last().map_or(0.0, |s| s.incremental_r2);
        (last(&self.price_to_hash), last(&self.hash_to_price))
    }
}

/// F-test of excluding `cause` lags from a regression of `target` on its own
/// lags, over the common sample `t = max_lag..T`.
fn direction(
    target: &[f64],
    cause: &[f64],
    dummy: &[u8],
    max_lag: usize,
    target_name: &str,
    cause_name: &str,
) -> Result<Vec<GrangerStat>> {
    let t_len = target.len();
    let n = t_len - max_lag;
    let with_dummy = dummy[max_lag..].iter().any(|&d| d != dummy[max_lag]);
    let y = DMatrix::from_fn(n, 1, |r, _| target[r + max_lag]);

    let mut out = Vec::with_capacity(max_lag);
    for lag in 1..=max_lag {
        let mut names = vec!["intercept".to_string()];
        if with_dummy {
            names.push("halving_dummy".into());
        }
        let base = names.len();
        names.extend((1..=lag).map(|l| format!("{target_name}.l{l}")));
        let restricted_k = names.len();
        names.extend((1..=lag).map(|l| format!("{cause_name}.l{l}")));
        let k = names.len();

        let x = DMatrix::from_fn(n, k, |r, c| {
            let t = r + max_lag;
            match c {
                0 => 1.0,
                1 if with_dummy => f64::from(dummy[t]),
                c if c < restricted_k => target[t - (c - base + 1)],
                c => cause[t - (c - restricted_k + 1)],
            }
        });
        let xr = x.columns(0, restricted_k).into_owned();
        let rss_u = ols(&x, &y, &names)?.rss(0);
        let rss_r = ols(&xr, &y, &names[..restricted_k])?.rss(0);

        let df2 = (n - k) as f64;
        let f_stat = ((rss_r - rss_u) / lag as f64) / (rss_u / df2);
        let p_value = if f_stat.is_finite() {
            let dist = FisherSnedecor::new(lag as f64, df2).map_err(|e| Error::Estimation(e.to_string()))?;
            1.0 - dist.cdf(f_stat.max(0.0))
        } else {
            0.0
        };
        out.push(GrangerStat {
            lag,
            f_stat,
            p_value,
            incremental_r2: (rss_r - rss_u) / rss_r,
        });
    }
    Ok(out)
}

pub fn granger_lead_lag(data: &VarDataset, max_lag: usize) -> Result<LeadLagReport> {
    data.check()?;
    if max_lag == 0 {
        return Err(Error::Estimation("max_lag must be >= 1".into()));
    }
    let need = 10 * (2 * max_lag + 2);
    if data.len() < max_lag || data.len() - max_lag < need {
        return Err(Error::Estimation(format!(
            "{} observations with {max_lag} lags; need T - max_lag >= {need}",
            data.len()
        )));
    }
    Ok(LeadLagReport {
        max_lag,
        nobs: data.len() - max_lag,
        price_to_hash: direction(&data.log_h, &data.log_p, &data.halving_dummy, max_lag, "log_H", "log_P")?,
        hash_to_price: direction(&data.log_p, &data.log_h, &data.halving_dummy, max_lag, "log_P", "log_H")?,
    })
}
