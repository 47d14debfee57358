//! Numerical laboratory for singularity formation in the inviscid 2-D
//! Prandtl system.
//!
//! The library evaluates the backward self-similar profiles that govern
//! generic and degenerate boundary-layer singularities, computes blow-up
//! times along Lagrangian characteristics driven by an outer Euler flow,
//! reconstructs the Eulerian velocity field by volume preservation, and
//! measures how fast a renormalized solution converges to its limiting
//! profile.
//!
//! Module map:
//! - [`kernels`]: special functions, adaptive quadrature, root finding,
//!   embedded RK integration with dense output and event detection.
//! - [`scenario`]: a small closed-form expression language for initial data
//!   and outer flows, with symbolic derivatives and file loading.
//! - [`profile_generic`]: the generic self-similar profile, its
//!   volume-preserving parametrization, and all of its asymptotics.
//! - [`profile_degenerate`]: the degenerate (boundary-interacting) profile.
//! - [`selfsim_verify`]: residual checks that the profiles solve the
//!   stationary renormalized equations.
//! - [`lagrangian`]: characteristics, monodromy, blow-up time, genericity
//!   diagnostics, and the scaling parameters of the limiting profile.
//! - [`eulerian`]: level-curve tracing, velocity sampling, displacement
//!   line, and renormalized-error measurement.

pub mod kernels;
pub mod profile_generic;
pub mod scenario;
