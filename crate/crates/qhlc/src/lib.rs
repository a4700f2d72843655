//! Numerics for the planar quasi-homogeneous system
//!
//! ```text
//! x' = y
//! y' = -x^3 + a x^2 y + y^3
//! ```
//!
//! The crate materializes the computable objects behind the system's
//! limit-cycle structure:
//!
//! * [`dynamics`] — the vector field in the original `(x, y)` chart and in
//!   the chart at infinity `(v, z)` (via `x = v/z`, `y = 1/z`), the cubic
//!   `f(v, a) = v^3 - a v^2 - 1` and its level roots, region membership in
//!   the upper half `(v, z)`-plane and the four equilibria with their
//!   semi-hyperbolic local data.
//! * [`integrator`] — adaptive embedded Runge-Kutta 5(4) propagation of
//!   either chart with event detection, plus the graph-form equation
//!   `dz/dv = z f / (v f + z^2)`.
//! * [`separatrix`] — shooting the saddle separatrices `L-` and `L+` on the
//!   line at infinity, the gap `phi-(0; a) - phi+(0; a)` between them on the
//!   `z`-axis, and bisection for the critical parameter `a*` where the
//!   heteroclinic connection occurs.
//! * [`bounds`] — the closed-form comparison curves bounding `phi-(0)` from
//!   below and `phi+(0)` from above, and a numerical checker for the
//!   underlying differential comparison theorem.
//! * [`cycle`] — Poincare return maps on the positive `x`-axis, limit-cycle
//!   detection with multiplier, and parameter scans for the existence
//!   boundary.
//!
//! All operations are pure functions of their inputs; nothing in the crate
//! holds shared mutable state, so everything may be called concurrently.
//!
//! The crate is `no_std`-compatible (with `alloc`): disable the default
//! `std` feature and enable `libm` instead.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(feature = "std"))]
extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("either the `std` or the `libm` feature must be enabled");

pub(crate) mod math;

pub mod bounds;
pub mod cycle;
pub mod dynamics;
pub mod integrator;
pub mod separatrix;

pub use dynamics::Alpha;
