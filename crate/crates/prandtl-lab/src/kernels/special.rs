//! Special functions: the real cubic root profile Psi1, a Lanczos gamma,
//! and the closed-form constants built from it.

use super::KernelError;
use std::f64::consts::PI;

/// Cutoff below which the Cardano form of `psi1` loses digits to
/// cancellation and a Maclaurin series takes over.
const PSI1_SERIES_CUTOFF: f64 = 0.02;

/// Real root u of -u - u^3 = x, unchecked. Odd, strictly decreasing,
/// u(x) ~ -x near 0 and u(x) ~ -sign(x) |x|^{1/3} at infinity.
///
/// For x >= 0 the two Cardano radicals are combined as
/// 1/(3 t) - t with t = cbrt(sqrt(1/27 + x^2/4) + x/2), which avoids the
/// subtraction of nearly equal cube roots for large x. For |x| below
/// `PSI1_SERIES_CUTOFF` even that form cancels, so the series
/// -x + x^3 - 3 x^5 + 12 x^7 - 55 x^9 is used instead.
pub(crate) fn psi1_raw(x: f64) -> f64 {
    let ax = x.abs();
    let mag = if ax < PSI1_SERIES_CUTOFF {
        let x2 = ax * ax;
        -ax * (1.0 - x2 * (1.0 - x2 * (3.0 - x2 * (12.0 - 55.0 * x2))))
    } else {
        let s = (1.0 / 27.0 + ax * ax / 4.0).sqrt();
        let t = (s + ax / 2.0).cbrt();
        1.0 / (3.0 * t) - t
    };
    if x < 0.0 {
        -mag
    } else {
        mag
    }
}

/// Real root of -u - u^3 = x.
pub fn psi1(x: f64) -> Result<f64, KernelError> {
    if !x.is_finite() {
        return Err(KernelError::Domain {
            context: "psi1",
            value: x,
        });
    }
    Ok(psi1_raw(x))
}

/// Derivative of `psi1`: -1/(1 + 3 psi1(x)^2).
pub fn psi1_prime(x: f64) -> Result<f64, KernelError> {
    if !x.is_finite() {
        return Err(KernelError::Domain {
            context: "psi1_prime",
            value: x,
        });
    }
    let u = psi1_raw(x);
    Ok(-1.0 / (1.0 + 3.0 * u * u))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the approximation on its accurate half-line.
        PI / ((PI * x).sin() * lanczos(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Gamma function on the positive half-line, accurate to better than
/// 1e-13 relative on (0, 30].
pub fn gamma_fn(x: f64) -> Result<f64, KernelError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(KernelError::Domain {
            context: "gamma_fn",
            value: x,
        });
    }
    Ok(lanczos(x))
}

/// The profile pressure constant 4 Gamma(1/4)^4 / (9 pi^3).
pub fn p_star() -> f64 {
    4.0 * lanczos(0.25).powi(4) / (9.0 * PI.powi(3))
}

/// Far-field amplitudes of the support curve: the displacement height
/// behaves like c_pm(s) |X|^{-1/6} as s*X -> +infinity.
///
/// `sign` selects the branch (+1 or -1); any other value is rejected.
pub fn c_pm(sign: i32) -> Result<f64, KernelError> {
    let third = 1.0 / 3.0;
    match sign {
        1 => Ok(3.0 * 1.5f64.powf(third) * PI.powf(2.5) * lanczos(third)
            / (4.0 * lanczos(0.25).powf(8.0 / 3.0) * lanczos(5.0 / 6.0))),
        -1 => Ok(3.0 * 1.5f64.powf(third) * PI.powf(2.5) * lanczos(7.0 / 6.0)
            / (2.0 * lanczos(0.25).powf(8.0 / 3.0) * lanczos(2.0 / 3.0))),
        _ => Err(KernelError::Domain {
            context: "c_pm sign",
            value: sign as f64,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi1_fixed_points() {
        assert_eq!(psi1(0.0).unwrap(), 0.0);
        assert!((psi1(2.0).unwrap() + 1.0).abs() < 1e-13);
        let u = psi1(5.0).unwrap();
        assert!((-u - u * u * u - 5.0).abs() < 1e-14);
    }

    #[test]
    fn psi1_spot_values() {
        assert!((psi1(0.5).unwrap() + 0.423_853_799_069_783_27).abs() < 1e-15);
        assert!((psi1(5.0).unwrap() + 1.515_980_227_692_820_6).abs() < 2e-15);
        assert!((psi1(1000.0).unwrap() + 9.966_666_790_534_973).abs() < 2e-14);
        assert!((psi1(-3.0).unwrap() - 1.213_411_662_762_229_6).abs() < 2e-15);
    }

    #[test]
    fn psi1_implicit_identity_small_and_large() {
        for &x in &[1e-9, 1e-6, 1e-3, 0.019, 0.021, 0.3, 7.0, 400.0, 1e3] {
            for x in [x, -x] {
                let u = psi1(x).unwrap();
                let res = -u - u * u * u;
                assert!(
                    (res - x).abs() <= 1e-11 * x.abs().max(1e-300),
                    "identity fails at {x}: {res}"
                );
            }
        }
    }

    #[test]
    fn psi1_series_matches_cardano_at_cutoff() {
        // Straddle the cutoff: both branches must agree where they meet.
        for &x in &[0.019_999, 0.020_001] {
            let s = (1.0 / 27.0 + x * x / 4.0f64).sqrt();
            let t = (s + x / 2.0f64).cbrt();
            let cardano: f64 = 1.0 / (3.0 * t) - t;
            assert!((psi1_raw(x) - cardano).abs() < 5e-13 * x.abs());
        }
    }

    #[test]
    fn psi1_rejects_non_finite() {
        assert!(psi1(f64::NAN).is_err());
        assert!(psi1(f64::INFINITY).is_err());
        assert!(psi1_prime(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn psi1_prime_values() {
        assert!((psi1_prime(0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((psi1_prime(2.0).unwrap() + 0.25).abs() < 1e-13);
        // Far field: -1/(3 x^{2/3}) (1 + o(1)).
        let x = 1e9f64;
        let expect = -1.0 / (3.0 * x.powf(2.0 / 3.0));
        let got = psi1_prime(x).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-4);
    }

    #[test]
    fn psi1_prime_matches_finite_difference() {
        for i in 0..100 {
            let x = -8.0 + 16.0 * (i as f64) / 99.0;
            let h = 1e-6 * (1.0 + x.abs());
            let fd = (psi1_raw(x + h) - psi1_raw(x - h)) / (2.0 * h);
            let v = psi1_prime(x).unwrap();
            assert!(
                (fd - v).abs() <= 1e-7f64.max(1e-5 * v.abs()),
                "prime mismatch at {x}: fd {fd}, formula {v}"
            );
        }
    }

    #[test]
    fn gamma_spot_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 24.0 * 1e-14);
        assert!((gamma_fn(0.25).unwrap() - 3.625_609_908_221_908_3).abs() < 1e-13);
        assert!((gamma_fn(0.1).unwrap() - 9.513_507_698_668_731_8).abs() < 1e-12);
        let big = gamma_fn(29.5).unwrap();
        assert!((big / 1.634_812_519_827_426_6e30 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_recurrence() {
        let mut x = 0.26;
        while x < 20.0 {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(
                ((lhs - rhs) / rhs).abs() < 1e-12,
                "recurrence fails at {x}: {lhs} vs {rhs}"
            );
            x += 0.37;
        }
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-3.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn p_star_reference_digits() {
        assert!((p_star() - 2.476_806_986_107_87).abs() < 1e-13);
        assert!(p_star() > 0.0);
        // 4 Gamma(5/4)^2 (pi p*)^{-1/2} recovers the on-axis displacement
        // height 3 pi / 8.
        let v = 4.0 * gamma_fn(1.25).unwrap().powi(2) / (PI * p_star()).sqrt();
        assert!((v - 3.0 * PI / 8.0).abs() < 1e-13);
    }

    #[test]
    fn c_pm_reference_digits() {
        assert!((c_pm(1).unwrap() - 1.148_949_401_922_760_1).abs() < 1e-12);
        assert!((c_pm(-1).unwrap() - 0.663_346_246_485_365_07).abs() < 1e-12);
        assert!(c_pm(0).is_err());
        assert!(c_pm(2).is_err());
    }
}
