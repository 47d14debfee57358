//! Bracketed scalar root finding: secant steps guarded by bisection, so
//! convergence never depends on the quality of the secant model.

use super::KernelError;

/// Root of f on [lo, hi]. Requires a sign change (or a zero endpoint);
/// shrinks the bracket to width <= tol and returns its midpoint.
pub fn find_root(
    f: &mut dyn FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, KernelError> {
    if !(tol > 0.0) {
        return Err(KernelError::Domain {
            context: "find_root tol",
            value: tol,
        });
    }
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() * f_hi.signum() > 0.0 || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(KernelError::Bracket {
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    let mut use_secant = true;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at floating point resolution
        }
        let mut x = mid;
        if use_secant {
            let s = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            let w = hi - lo;
            if s > lo + 0.01 * w && s < hi - 0.01 * w {
                x = s;
            }
        }
        // Alternate so the bracket provably halves every other step.
        use_secant = !use_secant;
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sqrt_two() {
        let r = find_root(&mut |x: f64| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - 2.0f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn cubic_root_matches_profile_generator() {
        let r = find_root(&mut |x: f64| -x - x * x * x - 2.0, -2.0, 0.0, 1e-13).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_zero() {
        let r = find_root(&mut |x: f64| x.cos(), 0.0, 2.0, 1e-13).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn missing_sign_change_is_reported() {
        match find_root(&mut |x: f64| x * x + 1.0, -1.0, 1.0, 1e-10) {
            Err(KernelError::Bracket { .. }) => {}
            other => panic!("expected bracket error, got {other:?}"),
        }
    }

    #[test]
    fn zero_endpoint_is_returned() {
        let r = find_root(&mut |x: f64| x, 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(r, 0.0);
    }
}
