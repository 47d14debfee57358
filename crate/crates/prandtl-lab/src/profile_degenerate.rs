//! The degenerate self-similar profile Theta'(X, Y), which interacts with
//! the boundary instead of concentrating on an interior line.
//!
//! Its level sets carry the shear parametrization
//! X = a (1 + b^2/4) + a^3, resolved through the mandated substitution
//! a = -sqrt(s) Psi1(X s^{-3/2}) with s = 1 + b^2/4, and the vertical
//! coordinate
//!
//!   Y(X, b) = 2 integral_{-inf}^{b/2} dv / ((1 + v^2)(1 + 3 Psi1^2(X (1 + v^2)^{-3/2}))).
//!
//! The support at fixed X is 0 < Y < 2 Y'*(X) with the vorticity line at
//! Y'*(X); the profile extends by zero beyond it (restricted mode) or
//! repeats with period 2 Y'*(X) (periodic mode). Theta' is odd in X and
//! vanishes identically on the axis X = 0.

use crate::kernels::{find_root, gamma_fn, integrate, psi1_raw, KernelError, QuadSpec};
use thiserror::Error;

/// |b| below this counts as sitting on the vorticity line.
pub const ON_LINE_TOL: f64 = 1e-9;

/// |X| below this snaps the profile value to exactly zero.
pub const AXIS_SNAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Error)]
pub enum DegenerateError {
    #[error("vertical derivative sign is ambiguous at (X, Y) = ({x}, {y})")]
    SignAmbiguous { x: f64, y: f64 },
    #[error("{context}: invalid value {value}")]
    Domain { context: &'static str, value: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// How the profile continues past one support cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Restricted,
    Periodic,
}

#[derive(Debug, Clone, Copy)]
pub struct DegenerateProfilePoint {
    pub x: f64,
    pub y: f64,
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub mode: Mode,
}

impl DegenerateProfilePoint {
    /// Exact vertical derivative a b / 2; zero on the zero extension.
    pub fn dtheta_dy(&self) -> f64 {
        if self.b.is_finite() {
            0.5 * self.a * self.b
        } else {
            0.0
        }
    }
}

/// Level-set speed in the half-shear variable v = b/2.
fn cell_speed(x: f64, v: f64) -> f64 {
    let s = 1.0 + v * v;
    let t = psi1_raw(x * s.powf(-1.5));
    2.0 / (s * (1.0 + 3.0 * t * t))
}

/// Kernel of the X-derivative correction; decays like |v|^{-8}.
fn cell_shear_response(x: f64, v: f64) -> f64 {
    let s = 1.0 + v * v;
    let t = psi1_raw(x * s.powf(-1.5));
    let d = 1.0 + 3.0 * t * t;
    -t / (d * d * d) * s.powf(-2.5)
}

#[derive(Debug, Clone)]
pub struct DegenerateProfile {
    pub quad: QuadSpec,
    pub root_tol: f64,
    pub mode: Mode,
}

impl Default for DegenerateProfile {
    fn default() -> Self {
        Self::new()
    }
}

impl DegenerateProfile {
    pub fn new() -> Self {
        let mut quad = QuadSpec::profile_default().with_tail(2.0);
        quad.max_subdivisions = 2000;
        DegenerateProfile {
            quad,
            root_tol: 1e-12,
            mode: Mode::Restricted,
        }
    }

    pub fn with_mode(mode: Mode) -> Self {
        DegenerateProfile {
            mode,
            ..Self::new()
        }
    }

    /// Mass of the level-set speed beyond v = c (half of one side of the
    /// cell); T(0) is the line height Y'*(X).
    fn tail(&self, x: f64, c: f64) -> Result<f64, DegenerateError> {
        Ok(integrate(
            &mut |v| cell_speed(x, v),
            c,
            f64::INFINITY,
            &self.quad,
        )?)
    }

    /// Height of the vorticity line Y'*(X).
    pub fn y_prime_star(&self, x: f64) -> Result<f64, DegenerateError> {
        self.tail(x, 0.0)
    }

    /// Closed form of the far-field envelope constant:
    /// Y'*(X) ~ const |X|^{-1/3}, const = 2 sqrt(pi) Gamma(7/6) / Gamma(2/3).
    pub fn far_field_constant() -> Result<f64, DegenerateError> {
        let num = 2.0 * std::f64::consts::PI.sqrt() * gamma_fn(7.0 / 6.0)?;
        Ok(num / gamma_fn(2.0 / 3.0)?)
    }

    fn y_of_b(&self, x: f64, b: f64, y_line: f64) -> Result<f64, DegenerateError> {
        if b <= 0.0 {
            self.tail(x, -0.5 * b)
        } else {
            Ok(2.0 * y_line - self.tail(x, 0.5 * b)?)
        }
    }

    /// The volume-preserving chart (a, b) -> (X, Y).
    pub fn phi_prime_map(&self, a: f64, b: f64) -> Result<(f64, f64), DegenerateError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(DegenerateError::Domain {
                context: "phi_prime_map coordinates",
                value: if a.is_finite() { b } else { a },
            });
        }
        let x = a * (1.0 + 0.25 * b * b) + a * a * a;
        let y_line = self.y_prime_star(x)?;
        let y = self.y_of_b(x, b, y_line)?;
        Ok((x, y))
    }

    fn shear_from_height(&self, x: f64, y: f64, y_line: f64) -> Result<f64, DegenerateError> {
        let y_top = 2.0 * y_line;
        let yb = y.min(y_top - y);
        let c = if (yb - y_line).abs() <= f64::EPSILON * y_line {
            0.0
        } else {
            // Top and bottom tails behave like T(c) ~ 2/c.
            let mut hi = 10.0f64.max(2.6 / yb);
            let mut grow = 0;
            while self.tail(x, hi)? >= yb {
                hi *= 2.0;
                grow += 1;
                if grow > 200 {
                    return Err(DegenerateError::Domain {
                        context: "shear bracket growth",
                        value: yb,
                    });
                }
            }
            let mut f = |c: f64| match self.tail(x, c) {
                Ok(t) => t - yb,
                Err(_) => f64::NAN,
            };
            find_root(&mut f, 0.0, hi, self.root_tol)?
        };
        Ok(if y >= y_line { 2.0 * c } else { -2.0 * c })
    }

    /// Evaluate Theta' at (X, Y). Outside one support cell the restricted
    /// mode extends by zero (with b at the matching infinite limit) and
    /// the periodic mode folds Y into the cell first.
    pub fn theta_prime_eval(&self, x: f64, y: f64) -> Result<DegenerateProfilePoint, DegenerateError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(DegenerateError::Domain {
                context: "theta_prime_eval point",
                value: if x.is_finite() { y } else { x },
            });
        }
        let y_line = self.y_prime_star(x)?;
        let y_top = 2.0 * y_line;
        let y_cell = match self.mode {
            Mode::Restricted => y,
            Mode::Periodic => y.rem_euclid(y_top),
        };
        if !(y_cell > 0.0 && y_cell < y_top) {
            let b = if y_cell <= 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
            return Ok(DegenerateProfilePoint {
                x,
                y,
                a: 0.0,
                b,
                theta: 0.0,
                mode: self.mode,
            });
        }
        let b = self.shear_from_height(x, y_cell, y_line)?;
        let s = 1.0 + 0.25 * b * b;
        let a = if x.abs() < AXIS_SNAP_TOL {
            0.0
        } else {
            -s.sqrt() * psi1_raw(x * s.powf(-1.5))
        };
        Ok(DegenerateProfilePoint {
            x,
            y,
            a,
            b,
            theta: -a,
            mode: self.mode,
        })
    }

    /// X-derivative of Theta' at fixed Y:
    /// dTheta'/dX = -1/(s + 3 a^2) + 6 a b K(b), with K integrating the
    /// shear-response kernel along the level set.
    pub fn dtheta_dx(&self, pt: &DegenerateProfilePoint) -> Result<f64, DegenerateError> {
        if !pt.b.is_finite() {
            return Ok(0.0);
        }
        let quad = self.quad.clone().with_tail(8.0);
        let x = pt.x;
        let k_tail = |c: f64| -> Result<f64, KernelError> {
            integrate(&mut |v| cell_shear_response(x, v), c, f64::INFINITY, &quad)
        };
        let half = 0.5 * pt.b;
        let k = if pt.b <= 0.0 {
            k_tail(-half)?
        } else {
            2.0 * k_tail(0.0)? - k_tail(half)?
        };
        let s = 1.0 + 0.25 * pt.b * pt.b;
        Ok(-1.0 / (s + 3.0 * pt.a * pt.a) + 6.0 * pt.a * pt.b * k)
    }

    /// Closed form of dTheta'/dX on the axis X = 0, supported on [0, 2 pi].
    pub fn axis_dx(y: f64) -> f64 {
        if (0.0..=2.0 * std::f64::consts::PI).contains(&y) {
            let s = (0.5 * y).sin();
            -s * s
        } else {
            0.0
        }
    }

    /// Closed form of the cubic axis coefficient (one sixth of the third
    /// X-derivative on the axis), supported on [0, 2 pi].
    pub fn axis_d3x(y: f64) -> f64 {
        if !(0.0..=2.0 * std::f64::consts::PI).contains(&y) {
            return 0.0;
        }
        let half = 0.5 * y;
        let (sh, ch) = (half.sin(), half.cos());
        let sin_y = y.sin();
        let v = 270.0 * y - 80.0 * sin_y + 3.0 * (2.0 * y).sin()
            - 686.0 * sin_y / (3.0 * ch * ch + 0.5);
        let psi = 96.0 * sh.powi(8) / (ch * ch + 1.0 / 6.0) - sin_y * v;
        psi / 576.0
    }

    /// Gap between a centered finite difference of Theta' across the axis
    /// and the closed form [`Self::axis_dx`].
    pub fn axis_dx_consistency(&self, y: f64) -> Result<f64, DegenerateError> {
        let h = 1e-4;
        let plus = self.theta_prime_eval(h, y)?.theta;
        let minus = self.theta_prime_eval(-h, y)?.theta;
        Ok(((plus - minus) / (2.0 * h) - Self::axis_dx(y)).abs())
    }

    /// Residual of the vertical relation (dTheta'/dY)^2 =
    /// Theta' (-Theta'^3 - Theta' - X), with dTheta'/dY = a b / 2 exact.
    /// The sign of the root is ambiguous on the line and on the axis, so
    /// those loci are errors.
    pub fn ode_residual(&self, x: f64, y: f64) -> Result<f64, DegenerateError> {
        let pt = self.theta_prime_eval(x, y)?;
        if !pt.b.is_finite() || pt.b.abs() <= ON_LINE_TOL || x.abs() < AXIS_SNAP_TOL {
            return Err(DegenerateError::SignAmbiguous { x, y });
        }
        let lhs = pt.dtheta_dy().powi(2);
        let rhs = pt.theta * (-pt.theta.powi(3) - pt.theta - x);
        Ok((lhs - rhs).abs())
    }
}
