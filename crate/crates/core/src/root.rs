//! Bracketed scalar root finding.

use crate::error::{Error, Result};

pub const MAX_ITERS: usize = 200;

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when the bracket is narrower than `xtol_rel * |x| + f64::MIN_POSITIVE`
/// or `f` hits zero exactly. `f` may fail; failures propagate.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol_rel: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Solver {
            lo: a,
            hi: b,
            residual: fa.abs().min(fb.abs()),
            iterations: 0,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITERS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (xtol_rel * b.abs() + f64::MIN_POSITIVE);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // inverse quadratic / secant step
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::Solver {
        lo: b.min(c),
        hi: b.max(c),
        residual: fb.abs(),
        iterations: MAX_ITERS,
    })
}

/// Expands `[lo, hi]` geometrically around a positive guess until `f` changes
/// sign, staying within `[floor, ceil]`. `f` must be decreasing.
pub fn bracket_decreasing<F>(mut f: F, guess: f64, floor: f64, ceil: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut lo = (guess * 0.5).max(floor);
    let mut hi = (guess * 2.0).min(ceil);
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    for _ in 0..MAX_ITERS {
        if f_lo >= 0.0 && f_hi <= 0.0 {
            return Ok((lo, hi));
        }
        if f_lo < 0.0 {
            if lo <= floor {
                break;
            }
            hi = lo;
            f_hi = f_lo;
            lo = (lo * 0.25).max(floor);
            f_lo = f(lo)?;
        } else {
            if hi >= ceil {
                break;
            }
            lo = hi;
            f_lo = f_hi;
            hi = (hi * 4.0).min(ceil);
            f_hi = f(hi)?;
        }
    }
    Err(Error::Solver {
        lo,
        hi,
        residual: f_lo.abs().min(f_hi.abs()),
        iterations: MAX_ITERS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| Ok(x * x * x - 2.0 * x - 5.0), 2.0, 3.0, 1e-15).unwrap();
        assert!((r - 2.094_551_481_542_326_5).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_non_bracket() {
        let err = brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Solver { .. }));
    }

    #[test]
    fn brent_handles_tiny_scales() {
        let r = brent(|x| Ok(1e-6 / x - 1e3), 1e-12, 1.0, 1e-14).unwrap();
        assert!((r / 1e-9 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_expands_both_ways() {
        let (lo, hi) = bracket_decreasing(|x| Ok(1.0 / x - 1000.0), 1.0, 1e-12, 1e12).unwrap();
        assert!(lo <= 1e-3 && hi >= 1e-3);
        let (lo, hi) = bracket_decreasing(|x| Ok(5e4 - x), 1.0, 1e-12, 1e12).unwrap();
        assert!(lo <= 5e4 && hi >= 5e4);
        assert!(bracket_decreasing(|_| Ok(1.0), 1.0, 1e-3, 1e3).is_err());
    }
}
