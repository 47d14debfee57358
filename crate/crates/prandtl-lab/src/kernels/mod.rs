//! Shared numerical kernels: special functions and constants, adaptive
//! Gauss-Kronrod quadrature with algebraic tail substitutions, bracketed
//! root finding, and an embedded RK45 integrator with dense output and
//! event detection.
//!
//! Everything here is a pure function of its inputs; all kernels are safe
//! to call concurrently.

mod ode;
mod quad;
mod roots;
mod special;

pub use ode::{integrate_ode, EventHit, OdeSpec, Trajectory};
pub use quad::{integrate, QuadSpec};
pub use roots::find_root;
pub use special::{c_pm, gamma_fn, p_star, psi1, psi1_prime};

pub(crate) use special::psi1_raw;

use thiserror::Error;

/// Errors shared by every kernel.
#[derive(Debug, Clone, Error)]
pub enum KernelError {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error in {context}: got {value}")]
    Domain { context: &'static str, value: f64 },

    /// The subdivision budget ran out before the tolerance was met. The
    /// best estimate and its error bound are carried along so callers can
    /// decide whether the partial answer is still usable.
    #[error("quadrature budget exhausted: estimate {estimate:e} with error bound {bound:e} (tolerance {tolerance:e})")]
    Accuracy {
        estimate: f64,
        bound: f64,
        tolerance: f64,
    },

    /// `find_root` was handed an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// The ODE step size underflowed (stiffness or finite-time blow-up of
    /// the right-hand side). Carries the last valid state.
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64, last_state: Vec<f64> },
}
