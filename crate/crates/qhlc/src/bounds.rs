//! Closed-form comparison curves and the two bounds they induce on the
//! separatrix heights at the `z`-axis, plus a numerical checker for the
//! differential comparison principle behind them.
//!
//! The curve `varphi_mu` solves a piecewise equation whose slope minorizes
//! the graph-form slope of `L-`, so its value at `v = 0` bounds `phi-(0)`
//! from below. The curve `psi_lambda` (inverted as `omega_lambda`) majorizes
//! `L+`, so `omega(0) = z3 + v3_lam / z3` bounds `phi+(0)` from above. With
//! `mu = 11/16`, `lambda = -9/16` and `alpha = -3 / 2^(1/3)` the two bounds
//! separate, which pins the ordering of the separatrices at that parameter.

use core::fmt;

#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

use crate::dynamics::{self, Alpha, DynamicsError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundsError {
    Domain { what: &'static str },
    /// `omega_lambda` has no pointwise value at `v = v3_lam`: the two
    /// branches meet only in the limit
    BranchGap { v: f64 },
    /// finite-difference noise exceeds the margin the check relies on
    GridTooCoarse { x: f64 },
    Dynamics(DynamicsError),
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::Domain { what } => write!(f, "domain error: {what}"),
            BoundsError::BranchGap { v } => {
                write!(f, "omega branch gap: no pointwise value at v = {v}")
            }
            BoundsError::GridTooCoarse { x } => {
                write!(f, "grid too coarse near x = {x}: margin below finite-difference noise")
            }
            BoundsError::Dynamics(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for BoundsError {}

impl From<DynamicsError> for BoundsError {
    fn from(e: DynamicsError) -> Self {
        BoundsError::Dynamics(e)
    }
}

fn check_mu(alpha: Alpha, mu: f64) -> Result<(), BoundsError> {
    alpha.require_saddles()?;
    if !(mu > 0.0 && mu < dynamics::f_local_max(alpha)) {
        return Err(BoundsError::Domain { what: "mu must lie in (0, f(2a/3, a))" });
    }
    Ok(())
}

fn check_lambda(alpha: Alpha, lambda: f64) -> Result<(), BoundsError> {
    alpha.require_saddles()?;
    if !(lambda > -1.0 && lambda < 0.0) {
        return Err(BoundsError::Domain { what: "lambda must lie in (-1, 0)" });
    }
    Ok(())
}

/// The lower comparison curve `z = varphi(v)` on `[v1_mu, 0]`.
///
/// Three branches: a square-root arc from the seed `(v1_mu, sqrt(-mu v1_mu))`
/// up to `v2_mu`, the constant `z2_mu` until `v2_0`, and a second
/// square-root arc until `v = 0`. The seed is fixed at the infimum of its
/// admissible interval, which is the value the bound chain substitutes.
pub fn varphi_mu(alpha: Alpha, mu: f64, v: f64) -> Result<f64, BoundsError> {
    check_mu(alpha, mu)?;
    let rm = dynamics::level_roots(alpha, mu)?;
    let r0 = dynamics::level_roots(alpha, 0.0)?;
    if !(v >= rm.v1 && v <= 0.0) {
        return Err(BoundsError::Domain { what: "v must lie in [v1_mu, 0]" });
    }
    let z1 = (-mu * rm.v1).sqrt();
    let first = |v: f64| -> f64 {
        let a = z1 - mu * rm.v1 / z1;
        let b = z1 + mu * rm.v1 / z1;
        0.5 * (a + (b * b + 4.0 * mu * (v - rm.v1)).max(0.0).sqrt())
    };
    if v < rm.v2 {
        return Ok(first(v));
    }
    let z2 = first(rm.v2);
    if v < r0.v2 {
        return Ok(z2);
    }
    let s = z2 + r0.v2 / z2;
    Ok(0.5 * (s + (s * s - 4.0 * v).max(0.0).sqrt()))
}

/// Height of the constant middle branch of [`varphi_mu`].
pub fn z2_mu(alpha: Alpha, mu: f64) -> Result<f64, BoundsError> {
    let rm = dynamics::level_roots(alpha, mu)?;
    varphi_mu(alpha, mu, rm.v2)
}

/// Junction height `z3_lam = sqrt(-lam) (sqrt(v3_0) + sqrt(v3_0 - v3_lam))`
/// where [`psi_lambda`] switches branches.
pub fn z3_lambda(alpha: Alpha, lambda: f64) -> Result<f64, BoundsError> {
    check_lambda(alpha, lambda)?;
    let v30 = dynamics::level_roots(alpha, 0.0)?.v3;
    let v3l = dynamics::level_roots(alpha, lambda)?.v3;
    Ok((-lambda).sqrt() * (v30.sqrt() + (v30 - v3l).max(0.0).sqrt()))
}

/// The larger root of `v3_lam = -z^2 + (v3_lam / z3 + z3) z`, i.e. the height
/// from which the second branch of [`psi_lambda`] comes back down to `v3_lam`.
pub fn z_bar_lambda(alpha: Alpha, lambda: f64) -> Result<f64, BoundsError> {
    let z3 = z3_lambda(alpha, lambda)?;
    let v3l = dynamics::level_roots(alpha, lambda)?.v3;
    let s = v3l / z3 + z3;
    // tangency (disc = 0) is the generic case up to rounding
    let disc = (s * s - 4.0 * v3l).max(0.0);
    Ok(0.5 * (s + disc.sqrt()))
}

/// The upper comparison curve `v = psi(z)` for `z >= sqrt(-lam v3_0)`.
pub fn psi_lambda(alpha: Alpha, lambda: f64, z: f64) -> Result<f64, BoundsError> {
    check_lambda(alpha, lambda)?;
    let v30 = dynamics::level_roots(alpha, 0.0)?.v3;
    let v3l = dynamics::level_roots(alpha, lambda)?.v3;
    let z_low = (-lambda * v30).sqrt();
    if !(z >= z_low) {
        return Err(BoundsError::Domain { what: "z must satisfy z >= sqrt(-lambda v3_0)" });
    }
    let z3 = (-lambda).sqrt() * (v30.sqrt() + (v30 - v3l).max(0.0).sqrt());
    if z <= z3 {
        Ok(z * z / lambda + 2.0 * (-v30 / lambda).sqrt() * z)
    } else {
        let s = v3l / z3 + z3;
        Ok(-z * z + s * z)
    }
}

/// Inverse of [`psi_lambda`] on its two decreasing branches.
///
/// For `v > v3_lam` this inverts the first branch; for `v < v3_lam` the
/// second (taking the larger quadratic root). At `v = v3_lam` exactly the
/// inverse jumps from `z3_lam` to `z_bar_lam` and has no pointwise value.
pub fn omega_lambda(alpha: Alpha, lambda: f64, v: f64) -> Result<f64, BoundsError> {
    check_lambda(alpha, lambda)?;
    let v30 = dynamics::level_roots(alpha, 0.0)?.v3;
    let v3l = dynamics::level_roots(alpha, lambda)?.v3;
    if !(v > 0.0 && v < v30) {
        return Err(BoundsError::Domain { what: "v must lie in (0, v3_0)" });
    }
    if v == v3l {
        return Err(BoundsError::BranchGap { v });
    }
    if v > v3l {
        Ok((-lambda).sqrt() * (v30.sqrt() + (v30 - v).max(0.0).sqrt()))
    } else {
        let z3 = (-lambda).sqrt() * (v30.sqrt() + (v30 - v3l).max(0.0).sqrt());
        let s = v3l / z3 + z3;
        let disc = (s * s - 4.0 * v).max(0.0);
        Ok(0.5 * (s + disc.sqrt()))
    }
}

/// `max { z2_mu + v2_0 / z2_mu, 0 }`, a lower bound for `phi-(0; a)`.
pub fn lower_bound_phi_minus(alpha: Alpha, mu: f64) -> Result<f64, BoundsError> {
    let z2 = z2_mu(alpha, mu)?;
    let v20 = dynamics::level_roots(alpha, 0.0)?.v2;
    Ok((z2 + v20 / z2).max(0.0))
}

/// `z3_lam + v3_lam / z3_lam`, an upper bound for `phi+(0; a)`.
pub fn upper_bound_phi_plus(alpha: Alpha, lambda: f64) -> Result<f64, BoundsError> {
    let z3 = z3_lambda(alpha, lambda)?;
    let v3l = dynamics::level_roots(alpha, lambda)?.v3;
    Ok(z3 + v3l / z3)
}

/// Both bounds and their ingredients at one `(alpha, mu, lambda)`.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub alpha: Alpha,
    pub mu: f64,
    pub lambda: f64,
    pub z2_mu: f64,
    pub z3_lambda: f64,
    pub lower_phi_minus0: f64,
    pub upper_phi_plus0: f64,
    /// `lower - upper`; strictly positive means the bounds alone already
    /// order the separatrix heights
    pub separation: f64,
}

pub fn bound_report(alpha: Alpha, mu: f64, lambda: f64) -> Result<BoundReport, BoundsError> {
    let z2 = z2_mu(alpha, mu)?;
    let z3 = z3_lambda(alpha, lambda)?;
    let lower = lower_bound_phi_minus(alpha, mu)?;
    let upper = upper_bound_phi_plus(alpha, lambda)?;
    Ok(BoundReport {
        alpha,
        mu,
        lambda,
        z2_mu: z2,
        z3_lambda: z3,
        lower_phi_minus0: lower,
        upper_phi_plus0: upper,
        separation: lower - upper,
    })
}

/// How the boundary condition at the left endpoint is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// `limsup (xi - eta) < 0` as `x -> x0`
    StrictLimit,
    /// `limsup (xi - eta) = 0` together with `limsup (xi' - eta') < 0`
    EqualWithSlope,
}

/// Sampled instance of the comparison principle: two curves, a common rate
/// function and the interval they live on.
pub struct ComparisonProblem<'a, G: Fn(f64, f64) -> f64> {
    /// strictly increasing sample abscissae inside `(x0, x1)`
    pub xs: &'a [f64],
    pub xi: &'a [f64],
    pub eta: &'a [f64],
    pub g: G,
    pub interval: (f64, f64),
    pub boundary_mode: BoundaryMode,
}

/// Outcome of [`check_comparison`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparisonOutcome {
    /// hypotheses and conclusion both hold on the samples
    Verified,
    /// the slope or boundary hypothesis fails near this abscissa
    HypothesisFailed { x: f64 },
    /// `xi < eta` is violated at this abscissa
    ConclusionFailed { x: f64 },
}

/// Checks the comparison principle on sampled data.
///
/// The slope hypothesis `xi' - g(x, xi) < eta' - g(x, eta)` is tested with
/// centered finite differences at interior samples; the boundary condition
/// at `x0` per `boundary_mode`; then the conclusion `xi < eta` at every
/// interior sample. A violated conclusion is reported even when a
/// hypothesis also fails, so degenerate inputs surface as
/// `ConclusionFailed`. This is a falsification tool on data, not a proof:
/// slope margins below ten times the local finite-difference noise yield
/// [`BoundsError::GridTooCoarse`].
pub fn check_comparison<G: Fn(f64, f64) -> f64>(
    p: &ComparisonProblem<'_, G>,
) -> Result<ComparisonOutcome, BoundsError> {
    let n = p.xs.len();
    if n < 5 || p.xi.len() != n || p.eta.len() != n {
        return Err(BoundsError::Domain { what: "need at least 5 aligned samples" });
    }
    for w in p.xs.windows(2) {
        if !(w[1] > w[0]) {
            return Err(BoundsError::Domain { what: "sample abscissae must strictly increase" });
        }
    }
    if !(p.xs[0] > p.interval.0 && p.xs[n - 1] < p.interval.1) {
        return Err(BoundsError::Domain { what: "samples must lie inside the open interval" });
    }

    // conclusion first: a broken conclusion is the headline even when the
    // hypotheses are broken too (degenerate xi = eta input)
    for i in 1..n - 1 {
        if !(p.xi[i] < p.eta[i]) {
            return Ok(ComparisonOutcome::ConclusionFailed { x: p.xs[i] });
        }
    }

    let deriv = |ys: &[f64], i: usize| -> f64 {
        (ys[i + 1] - ys[i - 1]) / (p.xs[i + 1] - p.xs[i - 1])
    };
    // roundoff floor of a centered difference: eps-level cancellation in the
    // numerator divided by the stencil width
    let noise = |ys: &[f64], i: usize| -> f64 {
        let num = ys[i + 1].abs().max(ys[i - 1].abs());
        4.0 * f64::EPSILON * num.max(1.0) / (p.xs[i + 1] - p.xs[i - 1])
    };

    for i in 1..n - 1 {
        let x = p.xs[i];
        let lhs = deriv(p.xi, i) - (p.g)(x, p.xi[i]);
        let rhs = deriv(p.eta, i) - (p.g)(x, p.eta[i]);
        let margin = rhs - lhs;
        if margin <= 0.0 {
            return Ok(ComparisonOutcome::HypothesisFailed { x });
        }
        let fd_noise = noise(p.xi, i).max(noise(p.eta, i));
        if margin < 10.0 * fd_noise {
            return Err(BoundsError::GridTooCoarse { x });
        }
    }

    match p.boundary_mode {
        BoundaryMode::StrictLimit => {
            if !(p.xi[0] - p.eta[0] < 0.0) {
                return Ok(ComparisonOutcome::HypothesisFailed { x: p.xs[0] });
            }
        }
        BoundaryMode::EqualWithSlope => {
            let gap0 = p.xi[0] - p.eta[0];
            let scale = p.xi[0].abs().max(p.eta[0].abs()).max(1.0);
            if gap0.abs() > 1e-6 * scale {
                return Ok(ComparisonOutcome::HypothesisFailed { x: p.xs[0] });
            }
            let slope_gap = deriv(p.xi, 1) - deriv(p.eta, 1);
            if !(slope_gap < 0.0) {
                return Ok(ComparisonOutcome::HypothesisFailed { x: p.xs[1] });
            }
        }
    }

    Ok(ComparisonOutcome::Verified)
}
