//! The generic self-similar profile Theta(X, Y) and its volume-preserving
//! parametrization.
//!
//! The profile is defined implicitly through shear coordinates (a, b):
//! a point on the level set of X satisfies X = a + b^2 + p*^2 a^3 with
//! a(b) = -Psi1(p*(X - b^2))/p*, where Psi1 is the real root of
//! psi^3 + psi + z = 0 and p* a Gamma-function constant. The vertical
//! coordinate is recovered by integrating the level-set speed,
//!
//!   Y(X, b) = integral_{-inf}^{b} dbt / (1 + 3 Psi1^2(p*(X - bt^2))),
//!
//! and the profile value is Theta = -a. The support is the open strip
//! 0 < Y < 2 Y*(X), symmetric about the vorticity line Y = Y*(X) where
//! the shear coordinate b vanishes.

use crate::kernels::{find_root, integrate, p_star, psi1_raw, KernelError, QuadSpec};
use thiserror::Error;

/// |b| below this is treated as sitting on the vorticity line.
pub const ON_LINE_TOL: f64 = 1e-9;

/// Distance to the boundary below which inversion switches to the
/// boundary expansion b ~ -p*^{-2} Y^{-3} for its initial bracket.
const BOUNDARY_CUTOFF: f64 = 1e-3;

#[derive(Debug, Clone, Error)]
pub enum ProfileError {
    #[error("(X, Y) = ({x}, {y}) lies outside the open support 0 < Y < {y_top}")]
    OutsideSupport { x: f64, y: f64, y_top: f64 },
    #[error("vertical derivative changes sign on the vorticity line at X = {x}")]
    OnLineSignAmbiguous { x: f64 },
    #[error("{context}: invalid value {value}")]
    Domain { context: &'static str, value: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Position of a point relative to the vorticity line and the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    BelowVorticityLine,
    OnLine,
    AboveVorticityLine,
    OutsideSupport,
}

/// A fully resolved point of the profile: both coordinate charts plus the
/// first derivatives of Theta.
#[derive(Debug, Clone, Copy)]
pub struct ProfilePoint {
    pub x: f64,
    pub y: f64,
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub dtheta_dx: f64,
    pub dtheta_dy: f64,
    pub region: Region,
}

/// Integrand of the vertical coordinate: the level-set speed dY/db.
fn level_speed(x: f64, u: f64) -> f64 {
    let t = psi1_raw(p_star() * (x - u * u));
    1.0 / (1.0 + 3.0 * t * t)
}

/// Integrand of the X-derivative correction. Decays like |u|^{-10/3}.
fn shear_response(x: f64, u: f64) -> f64 {
    let t = psi1_raw(p_star() * (x - u * u));
    let d = 1.0 + 3.0 * t * t;
    -t / (d * d * d)
}

/// The vorticity line Y = Y*(X) bounding half the support, evaluated by
/// quadrature with a cached specification.
#[derive(Debug, Clone)]
pub struct SupportCurve {
    quad: QuadSpec,
}

impl Default for SupportCurve {
    fn default() -> Self {
        let mut quad = QuadSpec::profile_default();
        // Far-field evaluations (|X| ~ 1e6) spread the integrand over many
        // scales; allow deep subdivision.
        quad.max_subdivisions = 2000;
        SupportCurve { quad }
    }
}

impl SupportCurve {
    pub fn new(quad: QuadSpec) -> Self {
        SupportCurve { quad }
    }

    /// Height of the vorticity line, as the half-width of the level set:
    /// Y*(X) = integral_0^inf du / (1 + 3 Psi1^2(p*(X - u^2))).
    pub fn y_star(&self, x: f64) -> Result<f64, ProfileError> {
        Ok(integrate(
            &mut |u| level_speed(x, u),
            0.0,
            f64::INFINITY,
            &self.quad,
        )?)
    }

    /// Independent route for Y*(X): substitute the profile value
    /// t = Psi1(p*(X - u^2)) as integration variable, which turns the
    /// cubic relation into an explicit quartic radicand,
    /// Y*(X) = integral_0^inf dw / sqrt(1 + 3 t1^2 + 3 p* t1 w^2 + p*^2 w^4)
    /// with t1 = Psi1(p* X). Used to cross-check the primary route.
    pub fn y_star_alt(&self, x: f64) -> Result<f64, ProfileError> {
        let ps = p_star();
        let t1 = psi1_raw(ps * x);
        let base = 1.0 + 3.0 * t1 * t1;
        let quad = self.quad.clone().with_tail(2.0);
        Ok(integrate(
            &mut |w| {
                let w2 = w * w;
                1.0 / (base + 3.0 * ps * t1 * w2 + ps * ps * w2 * w2).sqrt()
            },
            0.0,
            f64::INFINITY,
            &quad,
        )?)
    }

    /// Top of the support, 2 Y*(X).
    pub fn y_top(&self, x: f64) -> Result<f64, ProfileError> {
        Ok(2.0 * self.y_star(x)?)
    }
}

/// Evaluator for the generic profile. Holds the quadrature specification
/// shared by every integral and the tolerance of the level inversion.
#[derive(Debug, Clone)]
pub struct GenericProfile {
    pub quad: QuadSpec,
    pub root_tol: f64,
    support: SupportCurve,
}

impl Default for GenericProfile {
    fn default() -> Self {
        Self::new()
    }
}

impl GenericProfile {
    pub fn new() -> Self {
        let support = SupportCurve::default();
        GenericProfile {
            quad: support.quad.clone(),
            root_tol: 1e-12,
            support,
        }
    }

    pub fn support(&self) -> &SupportCurve {
        &self.support
    }

    pub fn y_star(&self, x: f64) -> Result<f64, ProfileError> {
        self.support.y_star(x)
    }

    /// Mass of the level-set speed beyond |b| = c:
    /// integral_c^inf du / (1 + 3 Psi1^2(p*(X - u^2))). Equals the height
    /// above the boundary of the point with shear coordinate -c.
    fn tail(&self, x: f64, c: f64) -> Result<f64, ProfileError> {
        Ok(integrate(
            &mut |u| level_speed(x, u),
            c,
            f64::INFINITY,
            &self.quad,
        )?)
    }

    /// Vertical coordinate of the point with shear coordinates (a, b) on
    /// the level set of x; the integrand is even in b, so both halves
    /// reduce to tail integrals.
    fn y_of_b(&self, x: f64, b: f64, y_star: f64) -> Result<f64, ProfileError> {
        if b <= 0.0 {
            self.tail(x, -b)
        } else {
            Ok(2.0 * y_star - self.tail(x, b)?)
        }
    }

    /// The volume-preserving chart (a, b) -> (X, Y).
    pub fn phi_map(&self, a: f64, b: f64) -> Result<(f64, f64), ProfileError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(ProfileError::Domain {
                context: "phi_map coordinates",
                value: if a.is_finite() { b } else { a },
            });
        }
        let ps = p_star();
        let x = a + b * b + ps * ps * a * a * a;
        let y_star = self.support.y_star(x)?;
        let y = self.y_of_b(x, b, y_star)?;
        Ok((x, y))
    }

    /// X-derivative of Theta at fixed Y, via the exact variation of the
    /// level-set speed: dTheta/dX = -(1/(1 + 3 p*^2 a^2) - 12 p* b J(b))
    /// where J(b) integrates the shear response up to b.
    fn theta_x(&self, x: f64, b: f64) -> Result<f64, ProfileError> {
        let ps = p_star();
        let quad = self.quad.clone().with_tail(10.0 / 3.0);
        let j_tail = |c: f64| -> Result<f64, KernelError> {
            integrate(&mut |u| shear_response(x, u), c, f64::INFINITY, &quad)
        };
        let j = if b <= 0.0 {
            j_tail(-b)?
        } else {
            2.0 * j_tail(0.0)? - j_tail(b)?
        };
        let t = psi1_raw(ps * (x - b * b));
        let h = 1.0 / (1.0 + 3.0 * t * t);
        Ok(-(h - 12.0 * ps * b * j))
    }

    fn point_from_b(&self, x: f64, y: f64, b: f64) -> Result<ProfilePoint, ProfileError> {
        let ps = p_star();
        let a = -psi1_raw(ps * (x - b * b)) / ps;
        let region = if b.abs() <= ON_LINE_TOL {
            Region::OnLine
        } else if b < 0.0 {
            Region::BelowVorticityLine
        } else {
            Region::AboveVorticityLine
        };
        Ok(ProfilePoint {
            x,
            y,
            a,
            b,
            theta: -a,
            dtheta_dx: self.theta_x(x, b)?,
            dtheta_dy: 2.0 * b,
            region,
        })
    }

    /// Recover the shear coordinates of the point (X, Y) by inverting the
    /// vertical integral on the level set of X.
    pub fn invert_on_level(&self, x: f64, y: f64) -> Result<ProfilePoint, ProfileError> {
        let y_star = self.support.y_star(x)?;
        let y_top = 2.0 * y_star;
        if !(y > 0.0 && y < y_top) {
            return Err(ProfileError::OutsideSupport { x, y, y_top });
        }
        // Work on the lower half and mirror: the level-set speed is even
        // in b, so the height above the nearer boundary determines |b|.
        let yb = y.min(y_top - y);
        let c = if (yb - y_star).abs() <= f64::EPSILON * y_star {
            0.0
        } else {
            let ps = p_star();
            // Boundary expansion: Y ~ p*^{-2/3} |b|^{-1/3}, so |b| ~ p*^{-2} Y^{-3}.
            let c_asym = 1.0 / (ps * ps * yb * yb * yb);
            let mut lo = 0.0;
            if yb < BOUNDARY_CUTOFF {
                let seed = 0.5 * c_asym;
                if self.tail(x, seed)? > yb {
                    lo = seed;
                }
            }
            let mut hi = (x.abs().sqrt() + 10.0).max(1.3 * c_asym);
            let mut grow = 0;
            while self.tail(x, hi)? >= yb {
                hi *= 2.0;
                grow += 1;
                if grow > 200 {
                    return Err(ProfileError::Domain {
                        context: "invert_on_level bracket growth",
                        value: yb,
                    });
                }
            }
            let mut f = |c: f64| match self.tail(x, c) {
                Ok(t) => t - yb,
                Err(_) => f64::NAN,
            };
            find_root(&mut f, lo, hi, self.root_tol)?
        };
        let b = if y >= y_star { c } else { -c };
        self.point_from_b(x, y, b)
    }

    /// Evaluate Theta and its first derivatives at (X, Y). Same
    /// computation as [`invert_on_level`], named for the evaluation
    /// direction.
    pub fn theta_eval(&self, x: f64, y: f64) -> Result<ProfilePoint, ProfileError> {
        self.invert_on_level(x, y)
    }

    /// Classify a point without resolving it.
    pub fn classify(&self, x: f64, y: f64) -> Result<Region, ProfileError> {
        let y_star = self.support.y_star(x)?;
        if !(y > 0.0 && y < 2.0 * y_star) {
            return Ok(Region::OutsideSupport);
        }
        let t1 = psi1_raw(p_star() * x);
        // First-order shear distance from the line: b ~ (Y - Y*) (1 + 3 t1^2).
        if ((y - y_star) * (1.0 + 3.0 * t1 * t1)).abs() <= ON_LINE_TOL {
            Ok(Region::OnLine)
        } else if y < y_star {
            Ok(Region::BelowVorticityLine)
        } else {
            Ok(Region::AboveVorticityLine)
        }
    }

    /// Residual of the vertical characteristic relation
    /// dTheta/dY = sign(b) * 2 sqrt(X + Theta + p*^2 Theta^3).
    /// Errors on the line, where the sign is ambiguous.
    pub fn theta_ode_check(&self, x: f64, y: f64) -> Result<f64, ProfileError> {
        let p = self.invert_on_level(x, y)?;
        if p.region == Region::OnLine {
            return Err(ProfileError::OnLineSignAmbiguous { x });
        }
        let ps = p_star();
        let radicand = (x + p.theta + ps * ps * p.theta.powi(3)).max(0.0);
        let rhs = p.b.signum() * 2.0 * radicand.sqrt();
        Ok((p.dtheta_dy - rhs).abs())
    }

    /// Theta minus its leading boundary behavior p*^{-2} d^{-2}, where d
    /// is the distance to the nearer boundary. Tends to -d^2/5.
    pub fn boundary_expansion_gap(&self, x: f64, y: f64) -> Result<f64, ProfileError> {
        let y_star = self.support.y_star(x)?;
        let y_top = 2.0 * y_star;
        if !(y > 0.0 && y < y_top) {
            return Err(ProfileError::OutsideSupport { x, y, y_top });
        }
        let d = y.min(y_top - y);
        let p = self.invert_on_level(x, y)?;
        let ps = p_star();
        Ok(p.theta - 1.0 / (ps * ps * d * d))
    }

    /// Far-field profile constant C+ or C- by direct quadrature of the
    /// rescaled level-set speed; the closed Gamma-function form lives in
    /// the kernels module.
    pub fn c_pm_integral(&self, sign: i32) -> Result<f64, ProfileError> {
        let k = p_star().powf(-2.0 / 3.0) / 3.0;
        match sign {
            -1 => Ok(k * self.even_speed_tail_minus(0.0)?),
            1 => Ok(k * (self.singular_center_half()? + self.speed_tail_plus_from_one(1.0)?)),
            other => Err(ProfileError::Domain {
                context: "c_pm_integral sign",
                value: other as f64,
            }),
        }
    }

    /// integral_c^inf (1 + s^2)^{-2/3} ds.
    fn even_speed_tail_minus(&self, c: f64) -> Result<f64, ProfileError> {
        Ok(integrate(
            &mut |s| (1.0 + s * s).powf(-2.0 / 3.0),
            c,
            f64::INFINITY,
            &self.quad,
        )?)
    }

    /// integral_c^inf (s^2 - 1)^{-2/3} ds for c >= 1. The endpoint
    /// singularity at s = 1 is removed by the substitution s = 1 + w^3.
    fn speed_tail_plus_from_one(&self, c: f64) -> Result<f64, ProfileError> {
        let mut total = 0.0;
        if c < 2.0 {
            let w0 = (c - 1.0).max(0.0).cbrt();
            total += integrate(
                &mut |w| {
                    let s = 1.0 + w * w * w;
                    3.0 * (s + 1.0).powf(-2.0 / 3.0)
                },
                w0,
                1.0,
                &self.quad,
            )?;
        }
        let lo = c.max(2.0);
        total += integrate(
            &mut |s| (s * s - 1.0).powf(-2.0 / 3.0),
            lo,
            f64::INFINITY,
            &self.quad,
        )?;
        Ok(total)
    }

    /// integral_0^1 (1 - s^2)^{-2/3} ds, with s = 1 - w^3 removing the
    /// upper endpoint singularity (1 + s becomes 2 - w^3).
    fn singular_center_half(&self) -> Result<f64, ProfileError> {
        Ok(integrate(
            &mut |w| 3.0 * (2.0 - w * w * w).powf(-2.0 / 3.0),
            0.0,
            1.0,
            &self.quad,
        )?)
    }

    /// integral_c^1 (1 - s^2)^{-2/3} ds for -1 < c < 1, split at zero so
    /// each half has a single cube-root substitution.
    fn singular_center_partial(&self, c: f64) -> Result<f64, ProfileError> {
        let mut total = 0.0;
        if c < 0.0 {
            // s in [c, 0]: substitute s = w^3 - 1.
            let w0 = (1.0 + c).cbrt();
            total += integrate(
                &mut |w| 3.0 * (2.0 - w * w * w).powf(-2.0 / 3.0),
                w0,
                1.0,
                &self.quad,
            )?;
            total += self.singular_center_half()?;
        } else {
            // s in [c, 1]: substitute s = 1 - w^3.
            let w1 = (1.0 - c).cbrt();
            total += integrate(
                &mut |w| 3.0 * (2.0 - w * w * w).powf(-2.0 / 3.0),
                0.0,
                w1,
                &self.quad,
            )?;
        }
        Ok(total)
    }

    /// Rescaled height of the far-field level set as a function of the
    /// rescaled shear coordinate beta, for the given side.
    fn far_field_height(&self, sign: i32, beta: f64) -> Result<f64, ProfileError> {
        let k = p_star().powf(-2.0 / 3.0) / 3.0;
        let c = -beta;
        let i = if sign == -1 {
            self.even_speed_tail_minus(c)?
        } else if c >= 1.0 {
            self.speed_tail_plus_from_one(c)?
        } else if c > -1.0 {
            self.singular_center_partial(c)? + self.speed_tail_plus_from_one(1.0)?
        } else {
            2.0 * self.speed_tail_plus_from_one(1.0)? + 2.0 * self.singular_center_half()?
                - self.speed_tail_plus_from_one(-c)?
        };
        Ok(k * i)
    }

    /// The far-field profiles phi+ and phi- on (0, 2 C+-): the rescaled
    /// limit of Theta as X -> +-infinity at heights z = |X|^{1/6} Y.
    pub fn varphi_pm(&self, sign: i32, z: f64) -> Result<f64, ProfileError> {
        if sign != 1 && sign != -1 {
            return Err(ProfileError::Domain {
                context: "varphi_pm sign",
                value: sign as f64,
            });
        }
        let c_line = self.c_pm_integral(sign)?;
        if !(z > 0.0 && z < 2.0 * c_line) {
            return Err(ProfileError::Domain {
                context: "varphi_pm height",
                value: z,
            });
        }
        let ps = p_star();
        // Bracket beta using the boundary asymptotics z ~ p*^{-2/3} |beta|^{-1/3}.
        let reach = |margin: f64| 10.0 + 1.5 / (ps * ps * margin * margin * margin);
        let mut lo = -reach(z);
        let mut hi = reach(2.0 * c_line - z);
        let mut grow = 0;
        while self.far_field_height(sign, lo)? >= z {
            lo *= 2.0;
            grow += 1;
            if grow > 60 {
                return Err(ProfileError::Domain {
                    context: "varphi_pm lower bracket",
                    value: z,
                });
            }
        }
        while self.far_field_height(sign, hi)? <= z {
            hi *= 2.0;
            grow += 1;
            if grow > 120 {
                return Err(ProfileError::Domain {
                    context: "varphi_pm upper bracket",
                    value: z,
                });
            }
        }
        let mut f = |beta: f64| match self.far_field_height(sign, beta) {
            Ok(h) => h - z,
            Err(_) => f64::NAN,
        };
        let beta = find_root(&mut f, lo, hi, self.root_tol)?;
        let arg = (beta * beta - sign as f64) / (ps * ps);
        Ok(arg.cbrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::c_pm;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn profile() -> GenericProfile {
        GenericProfile::new()
    }

    fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
        assert!(
            (got - want).abs() <= tol * want.abs().max(1.0),
            "{what}: got {got}, want {want}"
        );
    }

    #[test]
    fn phi_map_sends_origin_to_line_midpoint() {
        let p = profile();
        let (x, y) = p.phi_map(0.0, 0.0).unwrap();
        assert!(x.abs() < 1e-14);
        assert_close(y, 3.0 * PI / 8.0, 1e-10, "phi_map(0,0) height");
    }

    #[test]
    fn phi_map_jacobian_is_unity() {
        let p = profile();
        let h = 1e-5;
        for &(a, b) in &[
            (0.0, 0.0),
            (0.7, -0.9),
            (-1.2, 1.4),
            (1.5, 0.3),
            (-0.4, -1.8),
        ] {
            let fd = |da: f64, db: f64| p.phi_map(a + da, b + db).unwrap();
            let (xp, yp) = fd(h, 0.0);
            let (xm, ym) = fd(-h, 0.0);
            let (xq, yq) = fd(0.0, h);
            let (xr, yr) = fd(0.0, -h);
            let det = ((xp - xm) * (yq - yr) - (xq - xr) * (yp - ym)) / (4.0 * h * h);
            assert_close(det, 1.0, 1e-6, &format!("jacobian at ({a},{b})"));
        }
    }

    #[test]
    fn y_star_matches_frozen_values() {
        let s = SupportCurve::default();
        assert_close(s.y_star(0.0).unwrap(), 3.0 * PI / 8.0, 1e-11, "Y*(0)");
        assert_close(
            s.y_star(-3.0).unwrap(),
            0.5671069454189291,
            1e-10,
            "Y*(-3)",
        );
        assert_close(s.y_star(3.0).unwrap(), 0.9307897760848809, 1e-10, "Y*(3)");
    }

    #[test]
    fn y_star_routes_agree() {
        let s = SupportCurve::default();
        for &x in &[-3.0, 0.0, 3.0, 12.0, -20.0] {
            let a = s.y_star(x).unwrap();
            let b = s.y_star_alt(x).unwrap();
            assert!((a - b).abs() < 1e-10, "routes diverge at X={x}: {a} vs {b}");
        }
    }

    #[test]
    fn y_star_slope_and_curvature_at_origin() {
        let s = SupportCurve::default();
        let h = 1e-4;
        let (yp, y0, ym) = (
            s.y_star(h).unwrap(),
            s.y_star(0.0).unwrap(),
            s.y_star(-h).unwrap(),
        );
        assert_close((yp - ym) / (2.0 * h), 1.0, 1e-6, "dY*/dX(0)");
        // Regression value for the curvature, pinned by both quadrature
        // routes agreeing; guards the second-order term of the line.
        // Richardson-extrapolated second difference.
        let second = |h: f64| (s.y_star(h).unwrap() - 2.0 * y0 + s.y_star(-h).unwrap()) / (h * h);
        let (d1, d2) = (second(1e-2), second(5e-3));
        let curv = (4.0 * d2 - d1) / 3.0;
        assert!((curv - -6.77543).abs() < 5e-4, "curvature drifted: {curv}");
    }

    #[test]
    fn y_star_far_field_matches_constants() {
        let s = SupportCurve::default();
        let scale = 1e6f64.powf(1.0 / 6.0);
        let plus = s.y_star(1e6).unwrap() * scale;
        let minus = s.y_star(-1e6).unwrap() * scale;
        assert_close(plus, c_pm(1).unwrap(), 1e-4, "Y*(1e6) envelope");
        assert_close(minus, c_pm(-1).unwrap(), 1e-4, "Y*(-1e6) envelope");
    }

    #[test]
    fn invert_pins_line_points() {
        let p = profile();
        let pt = p.invert_on_level(0.0, 3.0 * PI / 8.0).unwrap();
        assert!(pt.a.abs() < 1e-9 && pt.b.abs() < 1e-9);
        assert_eq!(pt.region, Region::OnLine);
        assert_close(pt.dtheta_dx, -1.0, 1e-9, "dTheta/dX at the center");

        let ps = p_star();
        let y1 = p.y_star(1.0).unwrap();
        let pt = p.invert_on_level(1.0, y1).unwrap();
        assert!(pt.b.abs() < 1e-9);
        assert_close(pt.a, -psi1_raw(ps) / ps, 1e-10, "a on the line at X=1");
    }

    #[test]
    fn invert_round_trip() {
        let p = profile();
        let ps = p_star();
        for &(a, b) in &[
            (0.5, -1.0),
            (-0.8, 0.7),
            (1.2, 1.5),
            (-1.5, -2.0),
            (0.1, 0.0),
        ] {
            let (x, y) = p.phi_map(a, b).unwrap();
            let pt = p.invert_on_level(x, y).unwrap();
            assert!(
                (pt.a - a).abs() < 1e-8 && (pt.b - b).abs() < 1e-8,
                "round trip ({a},{b}) -> ({},{})",
                pt.a,
                pt.b
            );
            let alg = pt.a + pt.b * pt.b + ps * ps * pt.a.powi(3);
            assert!((alg - x).abs() < 1e-10, "cubic relation violated");
            assert!((pt.dtheta_dy - 2.0 * pt.b).abs() < 1e-10);
            assert_eq!(pt.theta, -pt.a);
        }
    }

    #[test]
    fn theta_matches_frozen_spots() {
        let p = profile();
        let cases = [
            // (X, Y, theta, b, dtheta_dx)
            (
                0.0,
                3.0 * PI / 8.0 + 0.05,
                0.0025000191706381481,
                0.0500011502422090231,
                -1.10004064194272061,
            ),
            (
                0.0,
                3.0 * PI / 8.0 - 0.3,
                0.0909003807186963374,
                -0.309043769440281267,
                -0.432242847240080836,
            ),
        ];
        for &(x, y, theta, b, dtx) in &cases {
            let pt = p.theta_eval(x, y).unwrap();
            assert_close(pt.theta, theta, 1e-9, "theta");
            assert_close(pt.b, b, 1e-9, "b");
            assert_close(pt.dtheta_dx, dtx, 1e-9, "dtheta_dx");
        }

        let y1 = p.y_star(1.0).unwrap();
        let pt = p.theta_eval(1.0, 0.6 * y1).unwrap();
        assert_close(pt.theta, 0.164584698127009365, 1e-9, "theta at (1, 0.6Y*)");
        assert_close(pt.b, -1.09175748502723404, 1e-9, "b at (1, 0.6Y*)");
        assert_close(
            pt.dtheta_dx,
            -0.138581596494373774,
            1e-9,
            "dtheta_dx at (1, 0.6Y*)",
        );

        let y2 = p.y_star(-2.0).unwrap();
        let pt = p.theta_eval(-2.0, 1.3 * y2).unwrap();
        assert_close(pt.theta, 0.911937879928624951, 1e-9, "theta at (-2, 1.3Y*)");
        assert_close(pt.b, 1.8879540601254027, 1e-9, "b at (-2, 1.3Y*)");
        assert_close(
            pt.dtheta_dx,
            -0.464401569252053168,
            1e-9,
            "dtheta_dx at (-2, 1.3Y*)",
        );
    }

    #[test]
    fn outside_support_is_an_error() {
        let p = profile();
        for &(x, y) in &[(0.0, -0.1), (0.0, 0.0), (0.0, 3.0), (2.0, 1e9)] {
            match p.theta_eval(x, y) {
                Err(ProfileError::OutsideSupport { .. }) => {}
                other => panic!("expected support error at ({x},{y}), got {other:?}"),
            }
        }
        assert_eq!(p.classify(0.0, 3.0).unwrap(), Region::OutsideSupport);
        assert_eq!(
            p.classify(0.0, 1.0).unwrap(),
            Region::BelowVorticityLine
        );
    }

    #[test]
    fn reflection_about_the_line() {
        let p = profile();
        let x = 0.7;
        let ys = p.y_star(x).unwrap();
        // Slope of the line enters the X-derivative's reflection law.
        let h = 1e-4;
        let slope = (p.y_star(x + h).unwrap() - p.y_star(x - h).unwrap()) / (2.0 * h);
        for &d in &[0.1, 0.35] {
            let above = p.theta_eval(x, ys + d).unwrap();
            let below = p.theta_eval(x, ys - d).unwrap();
            assert!((above.theta - below.theta).abs() < 1e-9);
            assert!((above.b + below.b).abs() < 1e-9);
            assert!((above.dtheta_dy + below.dtheta_dy).abs() < 1e-9);
            // Differentiating theta(X, 2Y*(X) - Y) = theta(X, Y) in X:
            let gap = below.dtheta_dx - above.dtheta_dx - 2.0 * slope * above.dtheta_dy;
            assert!(gap.abs() < 1e-6, "reflection law violated by {gap}");
        }
    }

    #[test]
    fn vertical_relation_residual_is_small() {
        let p = profile();
        assert!(p.theta_ode_check(0.0, 3.0 * PI / 8.0 - 0.3).unwrap() < 1e-8);
        let y1 = p.y_star(1.0).unwrap();
        assert!(p.theta_ode_check(1.0, 0.5 * y1).unwrap() < 1e-8);
        match p.theta_ode_check(0.0, 3.0 * PI / 8.0) {
            Err(ProfileError::OnLineSignAmbiguous { .. }) => {}
            other => panic!("expected sign ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn boundary_gap_envelope() {
        let p = profile();
        for &(x, y) in &[(0.0, 0.05), (0.0, 0.02), (0.5, 0.05)] {
            let gap = p.boundary_expansion_gap(x, y).unwrap();
            assert!(
                (gap / (y * y) + 0.2).abs() < 0.01,
                "gap envelope at ({x},{y}): {gap}"
            );
        }
        // Same expansion at the top boundary by reflection.
        let top = 2.0 * p.y_star(0.0).unwrap();
        let g_lo = p.boundary_expansion_gap(0.0, 0.05).unwrap();
        let g_hi = p.boundary_expansion_gap(0.0, top - 0.05).unwrap();
        assert!((g_lo - g_hi).abs() < 1e-9);
    }

    #[test]
    fn far_field_constants_closed_form_vs_quadrature() {
        let p = profile();
        for &sign in &[-1, 1] {
            let int = p.c_pm_integral(sign).unwrap();
            let closed = c_pm(sign).unwrap();
            assert!(
                (int - closed).abs() < 1e-10,
                "C[{sign}] mismatch: {int} vs {closed}"
            );
        }
    }

    #[test]
    fn varphi_line_values_and_symmetry() {
        let p = profile();
        let ps = p_star();
        let line_val = ps.powf(-2.0 / 3.0);
        let cm = p.c_pm_integral(-1).unwrap();
        let cp = p.c_pm_integral(1).unwrap();
        assert_close(p.varphi_pm(-1, cm).unwrap(), line_val, 1e-9, "phi-(C-)");
        assert_close(p.varphi_pm(1, cp).unwrap(), -line_val, 1e-9, "phi+(C+)");
        for &d in &[0.2, 0.45] {
            let a = p.varphi_pm(-1, cm + d).unwrap();
            let b = p.varphi_pm(-1, cm - d).unwrap();
            assert!((a - b).abs() < 1e-9, "phi- not even about C-");
            let a = p.varphi_pm(1, cp + d).unwrap();
            let b = p.varphi_pm(1, cp - d).unwrap();
            assert!((a - b).abs() < 1e-9, "phi+ not even about C+");
        }
    }

    #[test]
    fn varphi_frozen_value_and_boundary_limit() {
        let p = profile();
        let v = p.varphi_pm(-1, 0.05).unwrap();
        assert_close(v, 65.2042193668754821, 1e-9, "phi-(0.05)");
        let ps = p_star();
        assert!((0.05 * 0.05 * v * ps * ps - 1.0).abs() < 1e-3);
        assert!(matches!(
            p.varphi_pm(-1, 0.0),
            Err(ProfileError::Domain { .. })
        ));
        assert!(matches!(
            p.varphi_pm(1, 1e9),
            Err(ProfileError::Domain { .. })
        ));
    }

    #[test]
    fn far_field_profile_matches_scaled_theta() {
        let p = profile();
        let x = -1e4f64;
        let scale = x.abs().powf(1.0 / 6.0);
        let cm = p.c_pm_integral(-1).unwrap();
        for &s in &[0.3 * cm, cm, 1.6 * cm] {
            let theta = p.theta_eval(x, s / scale).unwrap().theta;
            let ff = x.abs().cbrt() * p.varphi_pm(-1, s).unwrap();
            assert!(
                ((theta - ff) / ff).abs() < 2e-3,
                "far field mismatch at s={s}: {theta} vs {ff}"
            );
        }
    }

    #[test]
    fn taylor_coefficients_near_line_center() {
        let p = profile();
        let y0 = 3.0 * PI / 8.0;
        // Least-squares fit of theta over |X|, |Y - Y0| <= 0.03. The basis
        // runs through cubic terms so they cannot alias onto the
        // quadratic coefficients under test.
        let n = 7;
        let h = 0.03;
        let basis = |x: f64, yh: f64| {
            [
                1.0,
                x,
                yh,
                x * x,
                x * yh,
                yh * yh,
                x * x * x,
                x * x * yh,
                x * yh * yh,
                yh * yh * yh,
            ]
        };
        let mut ata = vec![vec![0.0f64; 10]; 10];
        let mut atb = vec![0.0f64; 10];
        for i in 0..n {
            let x = -h + 2.0 * h * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let yh = -h + 2.0 * h * j as f64 / (n - 1) as f64;
                let theta = p.theta_eval(x, y0 + yh).unwrap().theta;
                let row = basis(x, yh);
                for r in 0..10 {
                    for c in 0..10 {
                        ata[r][c] += row[r] * row[c];
                    }
                    atb[r] += row[r] * theta;
                }
            }
        }
        let coef = solve_dense(ata, atb);
        let expect = [(1usize, -1.0), (3, 1.0), (4, -2.0), (5, 1.0)];
        for &(idx, want) in &expect {
            assert!(
                ((coef[idx] - want) / want).abs() < 2e-2,
                "coefficient {idx}: got {}, want {want}",
                coef[idx]
            );
        }
        assert!(coef[0].abs() < 5e-4 && coef[2].abs() < 5e-4);
    }

    fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0f64; n];
        for row in (0..n).rev() {
            let mut s = b[row];
            for k in row + 1..n {
                s -= a[row][k] * x[k];
            }
            x[row] = s / a[row][row];
        }
        x
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn chart_round_trip_holds(a in -2.0f64..2.0, b in -2.5f64..2.5) {
            let p = profile();
            let (x, y) = p.phi_map(a, b).unwrap();
            let pt = p.invert_on_level(x, y).unwrap();
            prop_assert!((pt.a - a).abs() < 1e-7);
            prop_assert!((pt.b - b).abs() < 1e-7);
            if b.abs() > 1e-6 {
                prop_assert_eq!(
                    pt.region,
                    if b < 0.0 { Region::BelowVorticityLine } else { Region::AboveVorticityLine }
                );
            }
        }
    }
}
