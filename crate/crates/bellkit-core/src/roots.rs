//! Bisection on sign changes and on monotone predicates.

use alloc::format;

use crate::error::{Error, Result};

/// Root of `f` in `[lo, hi]` by bisection, given `f(lo)` and `f(hi)` of
/// opposite sign. Stops once the bracket is narrower than `tol`.
pub fn bisect_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Numerical(format!(
            "no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Final bracket of a predicate bisection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredicateBracket {
    /// Largest probe at which the predicate failed.
    pub fails_at: f64,
    /// Smallest probe at which the predicate held.
    pub holds_at: f64,
    pub iterations: usize,
}

/// Bisects a predicate assumed false at `lo` and true at `hi` (monotone
/// non-decreasing) down to a bracket of width `tol`.
pub fn bisect_predicate<P: FnMut(f64) -> Result<bool>>(
    mut pred: P,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<PredicateBracket> {
    let (mut fails_at, mut holds_at) = (lo, hi);
    let mut iterations = 0;
    while holds_at - fails_at > tol {
        let mid = 0.5 * (fails_at + holds_at);
        if pred(mid)? {
            holds_at = mid;
        } else {
            fails_at = mid;
        }
        iterations += 1;
    }
    Ok(PredicateBracket {
        fails_at,
        holds_at,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let x = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((x - core::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn no_sign_change() {
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn predicate_threshold() {
        let b = bisect_predicate(|x| Ok(x > 0.3), 0.0, 1.0, 1e-4).unwrap();
        assert!(b.fails_at <= 0.3 && b.holds_at > 0.3);
        assert!(b.holds_at - b.fails_at <= 1e-4);
        assert_eq!(b.iterations, 14);
    }
}
