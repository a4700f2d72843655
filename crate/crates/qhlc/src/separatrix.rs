//! Saddle separatrices on the line at infinity, the gap between them on the
//! `z`-axis, and bisection for the connection parameter.
//!
//! In the `(v, z)` chart the equilibria `P1 = (v1_0, 0)` and `P3 = (v3_0, 0)`
//! are semi-hyperbolic saddles whose unique center separatrices enter the
//! upper half plane. `L-` leaves `P1` (tracked forward in `tau`), `L+`
//! enters `P3` (tracked backward). Both are graphs `z = phi(v)` while they
//! stay in the region `v f + z^2 > 0`; their heights at `v = 0` order the
//! global phase portrait. The gap `delta(a) = phi-(0) - phi+(0)` is strictly
//! decreasing in `a`, and its zero `a*` is the heteroclinic connection.

use core::fmt;

#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

use crate::dynamics::{self, Alpha, DynamicsError};
use crate::integrator::{
    self, Axis, Chart, Crossing, Direction, EventKind, EventSpec, IntegrateError, Termination,
    Trajectory,
};

/// Which separatrix to trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// center separatrix of `P1`, followed forward in `tau`
    LMinus,
    /// center separatrix of `P3`, followed backward in `tau`
    LPlus,
}

/// Where a traced separatrix ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    /// captured by the node at the origin of the `(v, z)` chart
    HitsOrigin,
    /// met the curve `K+` (`v f + z^2 = 0`, `v > v3_0` side)
    HitsKPlus,
    /// captured by `P3`
    HitsP3,
    /// escaped through large `|(v, z)|` on the right
    EscapesRight,
    /// met the curve `K-`
    HitsKMinus,
    /// captured by `P2`
    HitsP2,
    /// captured by `P1`
    HitsP1,
    /// escaped on the left
    EscapesLeft,
    /// step budget exhausted before any of the above
    Undetermined,
}

/// Tuning knobs for [`trace_separatrix`].
#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    pub rtol: f64,
    pub atol: f64,
    /// height of the seed above the saddle on its local center manifold
    pub z_seed: f64,
    /// escape guard radius
    pub r_max: f64,
    pub max_steps: usize,
    /// re-trace with `z_seed / 2` and require agreement of the `z`-axis
    /// height within `10 * rtol` relative
    pub verify_seed: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            rtol: 1e-10,
            atol: 1e-12,
            z_seed: 1e-3,
            r_max: 1e6,
            max_steps: 20_000_000,
            verify_seed: false,
        }
    }
}

/// A traced separatrix.
#[derive(Debug, Clone)]
pub struct SeparatrixTrace {
    pub which: Which,
    pub alpha: Alpha,
    /// height `phi(0)` where the curve crosses the `z`-axis, if it does
    pub phi_at_zero: Option<f64>,
    pub endpoint: Endpoint,
    /// largest `v` reached by `L-` / smallest `v` reached by `L+`
    pub v_extreme: f64,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeparatrixError {
    Dynamics(DynamicsError),
    Integrate(IntegrateError),
    /// the half-seed re-trace disagreed; `z_seed` is outside the local
    /// center-manifold regime
    SeedTooCoarse { phi_full: f64, phi_half: f64 },
    /// bisection bracket endpoints do not straddle a sign change
    BadBracket { delta_lo: f64, delta_hi: f64 },
    /// the gap is undefined because a separatrix missed the `z`-axis
    NoAxisCrossing { which: Which, endpoint: Endpoint },
}

impl fmt::Display for SeparatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeparatrixError::Dynamics(e) => write!(f, "{e}"),
            SeparatrixError::Integrate(e) => write!(f, "{e}"),
            SeparatrixError::SeedTooCoarse { phi_full, phi_half } => write!(
                f,
                "seed sensitivity check failed: phi(0) = {phi_full} vs {phi_half} at half seed"
            ),
            SeparatrixError::BadBracket { delta_lo, delta_hi } => {
                write!(f, "bracket does not straddle zero: delta = {delta_lo} and {delta_hi}")
            }
            SeparatrixError::NoAxisCrossing { which, endpoint } => {
                write!(f, "{which:?} never crossed the z-axis (endpoint {endpoint:?})")
            }
        }
    }
}

impl core::error::Error for SeparatrixError {}

impl From<DynamicsError> for SeparatrixError {
    fn from(e: DynamicsError) -> Self {
        SeparatrixError::Dynamics(e)
    }
}

impl From<IntegrateError> for SeparatrixError {
    fn from(e: IntegrateError) -> Self {
        SeparatrixError::Integrate(e)
    }
}

/// Seed point on the local center manifold of the saddle feeding `which`.
///
/// The manifold is `v = v0 + nu(z)` with `nu(z) = -z^2 / lambda + O(z^4)`,
/// `lambda` the hyperbolic eigenvalue; truncating at the quadratic term and
/// taking `z = z_seed` small keeps the transverse error `O(z_seed^4)`, and
/// the transverse contraction washes even that out before the curve leaves
/// the saddle's neighbourhood.
pub fn seed_separatrix(which: Which, alpha: Alpha, z_seed: f64) -> Result<[f64; 2], SeparatrixError> {
    if !(z_seed > 0.0 && z_seed < 0.1) {
        return Err(SeparatrixError::Integrate(IntegrateError::BadInput {
            what: "z_seed must lie in (0, 0.1)",
        }));
    }
    alpha.require_saddles()?;
    let eq = dynamics::equilibria(alpha)?;
    let info = match which {
        Which::LMinus => &eq[1],
        Which::LPlus => &eq[3],
    };
    let v0 = info.position.0;
    let v = v0 + info.invariant_curve_quad * z_seed * z_seed;
    Ok([v, z_seed])
}

// event ids
const EV_AXIS: u32 = 1;
const EV_ESCAPE: u32 = 2;
const EV_BALL_P1: u32 = 10;
const EV_BALL_P2: u32 = 11;
const EV_BALL_P3: u32 = 12;
const EV_BALL_ORIGIN: u32 = 13;
const EV_K: u32 = 20;
// The chart origin is a star node with pure inflow, so entering any small
// ball there means capture; the larger radius lets capture fire before the
// K-contact function (which also vanishes at every axis equilibrium) decays
// below its bias.
const ORIGIN_RADIUS: f64 = 1e-4;
// The axis saddles are only approached asymptotically along invariant
// manifolds; a passing orbit stays outside this radius except within a
// sliver of parameters around the connection.
const SADDLE_RADIUS: f64 = 1e-6;
// K contact arms once w has cleared the jitter floor of the crawl and fires
// when w collapses back toward 0.
const K_ARM: f64 = 1e-3;
const K_BIAS: f64 = 1e-9;
// a K contact this close to an axis equilibrium is really an asymptotic
// approach whose w has decayed through the bias
const NEAR_EQ: f64 = 1e-2;

/// Traces the chosen separatrix until it is captured, escapes, or meets one
/// of the contact curves `K±` where `v f + z^2` changes sign.
pub fn trace_separatrix(
    which: Which,
    alpha: Alpha,
    cfg: &TraceConfig,
) -> Result<SeparatrixTrace, SeparatrixError> {
    let trace = trace_once(which, alpha, cfg, cfg.z_seed)?;
    if cfg.verify_seed {
        if let Some(phi_full) = trace.phi_at_zero {
            let half = trace_once(which, alpha, cfg, cfg.z_seed / 2.0)?;
            match half.phi_at_zero {
                Some(phi_half)
                    if (phi_full - phi_half).abs() <= 10.0 * cfg.rtol * phi_full.abs().max(1.0) => {}
                Some(phi_half) => {
                    return Err(SeparatrixError::SeedTooCoarse { phi_full, phi_half })
                }
                None => {
                    return Err(SeparatrixError::NoAxisCrossing {
                        which,
                        endpoint: half.endpoint,
                    })
                }
            }
        }
    }
    Ok(trace)
}

fn trace_once(
    which: Which,
    alpha: Alpha,
    cfg: &TraceConfig,
    z_seed: f64,
) -> Result<SeparatrixTrace, SeparatrixError> {
    let start = seed_separatrix(which, alpha, z_seed)?;
    let eq = dynamics::equilibria(alpha)?;
    let (v1, v2, v3) = (eq[1].position.0, eq[2].position.0, eq[3].position.0);

    let direction = match which {
        Which::LMinus => Direction::Forward,
        Which::LPlus => Direction::Backward,
    };

    // The tracked saddle's own ball would capture the seed immediately; skip it.
    let events = [
        EventSpec {
            id: EV_AXIS,
            kind: EventKind::CoordinateCrossing {
                axis: Axis::First,
                value: 0.0,
                crossing: Crossing::Any,
            },
            terminal: false,
        },
        EventSpec {
            id: EV_ESCAPE,
            kind: EventKind::NormExceeds { r_max: cfg.r_max },
            terminal: true,
        },
        EventSpec {
            id: EV_BALL_ORIGIN,
            kind: EventKind::BallEntry { center: (0.0, 0.0), radius: ORIGIN_RADIUS },
            terminal: true,
        },
        EventSpec {
            id: EV_BALL_P2,
            kind: EventKind::BallEntry { center: (v2, 0.0), radius: SADDLE_RADIUS },
            terminal: true,
        },
        EventSpec {
            id: if which == Which::LMinus { EV_BALL_P3 } else { EV_BALL_P1 },
            kind: EventKind::BallEntry {
                center: (if which == Which::LMinus { v3 } else { v1 }, 0.0),
                radius: SADDLE_RADIUS,
            },
            terminal: true,
        },
        EventSpec {
            id: EV_K,
            kind: EventKind::KContact { alpha, arm: K_ARM, bias: K_BIAS },
            terminal: true,
        },
    ];

    let mut traj =
        integrator::integrate(Chart::Vz, alpha, start, direction, &events, cfg.rtol, cfg.atol, cfg.max_steps)?;

    // ball entries are equilibrium captures; surface them as such
    if let Termination::EventHit { id } = traj.termination {
        let index = match id {
            EV_BALL_ORIGIN => Some(0),
            EV_BALL_P1 => Some(1),
            EV_BALL_P2 => Some(2),
            EV_BALL_P3 => Some(3),
            _ => None,
        };
        if let Some(index) = index {
            traj.termination = Termination::EquilibriumCaptured { index };
        }
    }

    let phi_at_zero = traj
        .records
        .iter()
        .find(|r| r.id == EV_AXIS)
        .map(|r| r.state[1]);

    let mut v_extreme = start[0];
    for (_, s) in &traj.samples {
        match which {
            Which::LMinus => v_extreme = v_extreme.max(s[0]),
            Which::LPlus => v_extreme = v_extreme.min(s[0]),
        }
    }

    let (_, last) = traj.last();
    let endpoint = match traj.termination {
        Termination::Escaped => {
            if last[0] >= 0.0 {
                Endpoint::EscapesRight
            } else {
                Endpoint::EscapesLeft
            }
        }
        Termination::EquilibriumCaptured { index: 0 } => Endpoint::HitsOrigin,
        Termination::EquilibriumCaptured { index: 1 } => Endpoint::HitsP1,
        Termination::EquilibriumCaptured { index: 2 } => Endpoint::HitsP2,
        Termination::EquilibriumCaptured { index: 3 } => Endpoint::HitsP3,
        Termination::EventHit { id: EV_K } => {
            let near = |v0: f64| (last[0] - v0).hypot(last[1]) <= NEAR_EQ;
            if near(v1) {
                Endpoint::HitsP1
            } else if near(v2) {
                Endpoint::HitsP2
            } else if near(v3) {
                Endpoint::HitsP3
            } else if last[0] >= v2 {
                Endpoint::HitsKPlus
            } else {
                Endpoint::HitsKMinus
            }
        }
        Termination::EventHit { .. } | Termination::EquilibriumCaptured { .. } => {
            Endpoint::Undetermined
        }
        Termination::MaxSteps => Endpoint::Undetermined,
    };

    Ok(SeparatrixTrace { which, alpha, phi_at_zero, endpoint, v_extreme, trajectory: traj })
}

/// Which of the four global configurations the parameter realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigurationCase {
    /// `L-` falls into the origin of the chart: `phi-(0) = 0`
    I,
    /// both separatrices cross the axis with `phi-(0) < phi+(0)`
    II,
    /// heteroclinic connection: `phi-(0) = phi+(0)` within tolerance
    III,
    /// `phi-(0) > phi+(0)`
    IV,
}

/// The gap `delta(a) = phi-(0; a) - phi+(0; a)` with its ingredients.
#[derive(Debug, Clone)]
pub struct GapResult {
    pub alpha: Alpha,
    pub phi_minus_at_zero: f64,
    pub phi_plus_at_zero: f64,
    pub delta: f64,
    pub case: ConfigurationCase,
}

const CASE_TOL: f64 = 1e-6;

/// Computes the separatrix gap at `alpha`.
///
/// `L-` falling into the chart origin (case I) counts as `phi-(0) = 0`; a
/// missing `L+` crossing is an error because `L+` always reaches the axis
/// for saddle-bearing parameters.
pub fn gap(alpha: Alpha, cfg: &TraceConfig) -> Result<GapResult, SeparatrixError> {
    let lm = trace_separatrix(Which::LMinus, alpha, cfg)?;
    let phi_minus = match lm.phi_at_zero {
        Some(z) => z,
        None if lm.endpoint == Endpoint::HitsOrigin => 0.0,
        None => {
            return Err(SeparatrixError::NoAxisCrossing {
                which: Which::LMinus,
                endpoint: lm.endpoint,
            })
        }
    };
    let lp = trace_separatrix(Which::LPlus, alpha, cfg)?;
    let phi_plus = match lp.phi_at_zero {
        Some(z) => z,
        None => {
            return Err(SeparatrixError::NoAxisCrossing {
                which: Which::LPlus,
                endpoint: lp.endpoint,
            })
        }
    };
    let delta = phi_minus - phi_plus;
    let case = if phi_minus <= CASE_TOL {
        ConfigurationCase::I
    } else if delta.abs() <= CASE_TOL {
        ConfigurationCase::III
    } else if delta < 0.0 {
        ConfigurationCase::II
    } else {
        ConfigurationCase::IV
    };
    Ok(GapResult { alpha, phi_minus_at_zero: phi_minus, phi_plus_at_zero: phi_plus, delta, case })
}

/// Convenience wrapper returning only the case tag.
pub fn classify_configuration(
    alpha: Alpha,
    cfg: &TraceConfig,
) -> Result<ConfigurationCase, SeparatrixError> {
    Ok(gap(alpha, cfg)?.case)
}

/// The located connection parameter.
#[derive(Debug, Clone, Copy)]
pub struct AlphaStar {
    pub value: f64,
    /// final bisection bracket
    pub bracket: (f64, f64),
    /// half-width of the final bracket
    pub tolerance: f64,
    pub iterations: u32,
}

/// Bisects `delta(a)` over `[a_lo, a_hi]` down to bracket half-width `tol`.
///
/// `delta` is strictly decreasing, so the bracket must satisfy
/// `delta(a_lo) > 0 > delta(a_hi)`.
pub fn find_alpha_star(
    a_lo: f64,
    a_hi: f64,
    tol: f64,
    cfg: &TraceConfig,
) -> Result<AlphaStar, SeparatrixError> {
    if !(a_lo < a_hi && tol > 0.0) {
        return Err(SeparatrixError::Integrate(IntegrateError::BadInput {
            what: "need a_lo < a_hi and tol > 0",
        }));
    }
    let d_lo = gap(Alpha::new(a_lo)?, cfg)?.delta;
    let d_hi = gap(Alpha::new(a_hi)?, cfg)?.delta;
    if !(d_lo > 0.0 && d_hi < 0.0) {
        return Err(SeparatrixError::BadBracket { delta_lo: d_lo, delta_hi: d_hi });
    }
    let mut lo = a_lo;
    let mut hi = a_hi;
    let mut iterations = 0u32;
    while hi - lo > 2.0 * tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let d = gap(Alpha::new(mid)?, cfg)?.delta;
        iterations += 1;
        if d > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if iterations > 200 {
            break;
        }
    }
    Ok(AlphaStar {
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        tolerance: 0.5 * (hi - lo),
        iterations,
    })
}
