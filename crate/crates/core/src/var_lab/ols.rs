use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative tolerance on the QR diagonal below which a regressor counts as
/// linearly dependent on the ones before it.
pub const RANK_TOL: f64 = 1e-10;

pub(crate) struct OlsFit {
    /// `k x m` coefficients, one column per equation.
    pub coef: DMatrix<f64>,
    pub resid: DMatrix<f64>,
    /// `(X'X)^{-1}`.
    pub xtx_inv: DMatrix<f64>,
}

impl OlsFit {
    pub fn rss(&self, eq: usize) -> f64 {
        self.resid.column(eq).norm_squared()
    }
}

/// Least squares of every column of `y` on `x` via Householder QR.
pub(crate) fn ols(x: &DMatrix<f64>, y: &DMatrix<f64>, names: &[String]) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if n <= k {
        return Err(Error::Estimation(format!("{n} observations for {k} regressors")));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let collinear: Vec<&str> = (0..k)
        .filter(|&j| {
            let scale = x.column(j).norm();
            scale == 0.0 || r[(j, j)].abs() <= RANK_TOL * scale
        })
        .map(|j| names[j].as_str())
        .collect();
    if !collinear.is_empty() {
        return Err(Error::Estimation(format!(
            "singular regressor cross-product; collinear columns: {}",
            collinear.join(", ")
        )));
    }
    let qty = qr.q().transpose() * y;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Estimation("triangular solve failed".into()))?;
    let resid = y - x * &coef;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Estimation("triangular solve failed".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok(OlsFit { coef, resid, xtx_inv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|j| format!("x{j}")).collect()
    }

    #[test]
    fn residuals_are_orthogonal_to_regressors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DMatrix::from_fn(120, 4, |_, j| if j == 0 { 1.0 } else { rng.gen_range(-2.0..2.0) * j as f64 });
        let y = DMatrix::from_fn(120, 2, |_, _| rng.gen_range(-5.0..5.0));
        let fit = ols(&x, &y, &names(4)).unwrap();
        for eq in 0..2 {
            for j in 0..4 {
                let dot = x.column(j).dot(&fit.resid.column(eq));
                assert!(dot.abs() <= 1e-8 * x.column(j).norm() * y.column(eq).norm(), "{eq} {j} {dot}");
            }
        }
    }

    #[test]
    fn exact_linear_data_is_recovered() {
        let x = DMatrix::from_fn(30, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let y = DMatrix::from_fn(30, 1, |i, _| 2.0 - 0.5 * i as f64);
        let fit = ols(&x, &y, &names(2)).unwrap();
        assert!((fit.coef[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((fit.coef[(1, 0)] + 0.5).abs() < 1e-12);
        assert!(fit.rss(0) < 1e-20);
    }

    #[test]
    fn duplicated_column_is_named() {
        let x = DMatrix::from_fn(30, 3, |i, j| if j == 0 { 1.0 } else { (i * i) as f64 });
        let y = DMatrix::from_fn(30, 1, |i, _| i as f64);
        match ols(&x, &y, &names(3)) {
            Err(Error::Estimation(msg)) => assert!(msg.ends_with("x2"), "{msg}"),
            _ => panic!("expected collinearity error"),
        }
    }

    #[test]
    fn needs_more_rows_than_columns() {
        let x = DMatrix::from_element(3, 3, 1.0);
        let y = DMatrix::from_element(3, 1, 1.0);
        assert!(ols(&x, &y, &names(3)).is_err());
    }
}
