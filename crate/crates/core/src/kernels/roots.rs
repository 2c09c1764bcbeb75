//! Scalar root finding for monotone decreasing functions.

use crate::error::{Error, Result};

const MAX_DOUBLINGS: i32 = 100;
const MAX_BISECTIONS: usize = 200;

/// Root `λ ≥ 0` of a decreasing `f`. Returns 0 when `f(0) ≤ 0`. The bracket
/// is found by doubling from 1; `scale` sets the absolute tolerance
/// `1e-10·scale` on `|f|`.
pub fn bisection_root(f: impl Fn(f64) -> f64, scale: f64) -> Result<f64> {
    let f0 = f(0.0);
    if !f0.is_finite() {
        return Err(Error::NumericalFailure("root function is not finite at 0".into()));
    }
    if f0 <= 0.0 {
        return Ok(0.0);
    }
    let tol = 1e-10 * scale.abs().max(f64::MIN_POSITIVE);
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    loop {
        let fh = f(hi);
        if fh.abs() < tol {
            return Ok(hi);
        }
        if fh < 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::BracketFailure);
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() < tol || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonpositive_start_returns_zero() {
        assert_eq!(bisection_root(|x| -1.0 - x, 1.0).unwrap(), 0.0);
        assert_eq!(bisection_root(|x| -x, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_root() {
        assert!((bisection_root(|x| 1.0 - x, 1.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((bisection_root(|x| 1000.0 - x, 1.0).unwrap() - 1000.0).abs() < 1e-7);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(bisection_root(|x| 1.0 + 1.0 / (1.0 + x), 1.0), Err(Error::BracketFailure)));
    }
}
