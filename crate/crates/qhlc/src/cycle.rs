//! Poincare return map on the positive `x`-axis, limit-cycle detection with
//! multiplier, parameter scans for the existence boundary, and origin
//! stability probing.
//!
//! The section is `{y = 0, x > 0}` with crossing orientation `y' < 0`. The
//! orientation is automatic: at any transversal crossing of `y = 0` the
//! vertical speed is `-x^3`, so downward crossings happen only at `x > 0`
//! and upward ones only at `x < 0`. The flow winds clockwise; orbits outside
//! the (unstable) cycle may blow up before returning, which the map reports
//! as `+inf` rather than an error.

use core::fmt;

#[cfg(not(feature = "std"))]
use alloc::vec::Vec;

use crate::dynamics::Alpha;
use crate::integrator::{
    self, Axis, Chart, Crossing, Direction, EventKind, EventSpec, IntegrateError, Termination,
};

#[derive(Debug, Clone, PartialEq)]
pub enum CycleError {
    BadInput { what: &'static str },
    Integrate(IntegrateError),
    /// more than one fixed point of the return map in the search window;
    /// contradicts uniqueness of the cycle
    AmbiguousBracket { fixed_points: Vec<f64> },
    /// neither a section crossing nor escape within the step budget
    NoReturn { x0: f64 },
}

impl fmt::Display for CycleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleError::BadInput { what } => write!(f, "bad input: {what}"),
            CycleError::Integrate(e) => write!(f, "{e}"),
            CycleError::AmbiguousBracket { fixed_points } => {
                write!(f, "multiple return-map fixed points: {fixed_points:?}")
            }
            CycleError::NoReturn { x0 } => {
                write!(f, "no section return and no escape from x0 = {x0} within step budget")
            }
        }
    }
}

impl core::error::Error for CycleError {}

impl From<IntegrateError> for CycleError {
    fn from(e: IntegrateError) -> Self {
        CycleError::Integrate(e)
    }
}

const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-12;
const R_MAX: f64 = 1e6;
const MAX_STEPS: usize = 5_000_000;
const EV_SECTION: u32 = 1;
const EV_ESCAPE: u32 = 2;

fn first_crossing(
    x0: f64,
    alpha: Alpha,
    crossing: Crossing,
) -> Result<Option<(f64, f64)>, CycleError> {
    if !(x0 > 0.0) {
        return Err(CycleError::BadInput { what: "x0 must be positive" });
    }
    let events = [
        EventSpec {
            id: EV_SECTION,
            kind: EventKind::CoordinateCrossing { axis: Axis::Second, value: 0.0, crossing },
            terminal: true,
        },
        EventSpec { id: EV_ESCAPE, kind: EventKind::NormExceeds { r_max: R_MAX }, terminal: true },
    ];
    let traj = integrator::integrate(
        Chart::Xy,
        alpha,
        [x0, 0.0],
        Direction::Forward,
        &events,
        RTOL,
        ATOL,
        MAX_STEPS,
    )?;
    match traj.termination {
        Termination::EventHit { id: EV_SECTION } => {
            let (t, s) = traj.last();
            Ok(Some((s[0], t)))
        }
        Termination::Escaped => Ok(None),
        _ => Err(CycleError::NoReturn { x0 }),
    }
}

/// Full return map: abscissa of the next downward crossing of `y = 0` when
/// starting from `(x0, 0)`. Escape before return maps to `+inf`.
pub fn return_map(x0: f64, alpha: Alpha) -> Result<f64, CycleError> {
    Ok(first_crossing(x0, alpha, Crossing::Downward)?.map_or(f64::INFINITY, |(x, _)| x))
}

/// Half return map: abscissa (negative) of the next upward crossing of
/// `y = 0`. Composing it twice through the central symmetry reproduces the
/// full map.
pub fn half_return_map(x0: f64, alpha: Alpha) -> Result<f64, CycleError> {
    Ok(first_crossing(x0, alpha, Crossing::Upward)?.map_or(f64::NEG_INFINITY, |(x, _)| x))
}

fn return_time(x0: f64, alpha: Alpha) -> Result<Option<(f64, f64)>, CycleError> {
    first_crossing(x0, alpha, Crossing::Downward)
}

/// Stability verdict for a located cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleVerdict {
    UnstableHyperbolic,
    StableHyperbolic,
    NonHyperbolic,
    /// no cycle in the window
    None,
}

#[derive(Debug, Clone, Copy)]
pub struct LimitCycleResult {
    pub alpha: Alpha,
    pub found: bool,
    /// section fixed point (NaN when not found)
    pub x_star: f64,
    /// period in original time units (NaN when not found)
    pub period: f64,
    /// derivative of the return map at the fixed point (NaN when not found)
    pub multiplier: f64,
    pub verdict: CycleVerdict,
}

const FIXED_POINT_RTOL: f64 = 1e-9;
const MULTIPLIER_MARGIN: f64 = 1e-3;

/// Locates the return-map fixed point in `[x_lo, x_hi]` by a sign-change
/// grid plus bisection.
///
/// Escape counts as `return > x`, so the bracket between the last returning
/// abscissa and the escape region is refined like any other; a bracket whose
/// refined point does not actually satisfy `|return(x) - x| <= 1e-9 x` (a
/// basin boundary that blows up rather than cycles) is discarded. Two or
/// more surviving fixed points contradict uniqueness and are an error.
pub fn find_limit_cycle(
    alpha: Alpha,
    x_lo: f64,
    x_hi: f64,
) -> Result<LimitCycleResult, CycleError> {
    if !(x_lo > 0.0 && x_lo < x_hi) {
        return Err(CycleError::BadInput { what: "need 0 < x_lo < x_hi" });
    }
    let none = LimitCycleResult {
        alpha,
        found: false,
        x_star: f64::NAN,
        period: f64::NAN,
        multiplier: f64::NAN,
        verdict: CycleVerdict::None,
    };

    const N: usize = 64;
    let mut xs = [0.0f64; N];
    let mut neg = [false; N];
    for (i, (x, n)) in xs.iter_mut().zip(neg.iter_mut()).enumerate() {
        *x = x_lo + (x_hi - x_lo) * i as f64 / (N - 1) as f64;
        *n = return_map(*x, alpha)? < *x;
    }

    let mut fixed_points: Vec<f64> = Vec::new();
    for i in 0..N - 1 {
        if neg[i] == neg[i + 1] {
            continue;
        }
        // orient the bracket so `lo` is the d < 0 side
        let (mut lo, mut hi) = if neg[i] { (xs[i], xs[i + 1]) } else { (xs[i + 1], xs[i]) };
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if return_map(mid, alpha)? < mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // `lo` returns by construction; accept only a genuine fixed point
        let r = return_map(lo, alpha)?;
        if (r - lo).abs() <= FIXED_POINT_RTOL * lo {
            fixed_points.push(lo);
        }
    }

    match fixed_points.len() {
        0 => Ok(none),
        1 => {
            let x_star = fixed_points[0];
            let (_, period) =
                return_time(x_star, alpha)?.ok_or(CycleError::NoReturn { x0: x_star })?;
            let multiplier = multiplier_at(x_star, alpha)?;
            let verdict = if multiplier > 1.0 + MULTIPLIER_MARGIN {
                CycleVerdict::UnstableHyperbolic
            } else if multiplier < 1.0 - MULTIPLIER_MARGIN {
                CycleVerdict::StableHyperbolic
            } else {
                CycleVerdict::NonHyperbolic
            };
            Ok(LimitCycleResult { alpha, found: true, x_star, period, multiplier, verdict })
        }
        _ => Err(CycleError::AmbiguousBracket { fixed_points }),
    }
}

/// Centered-difference multiplier with relative step `1e-5`; falls back to
/// smaller steps and finally a one-sided stencil when the outward probe
/// escapes before returning.
fn multiplier_at(x_star: f64, alpha: Alpha) -> Result<f64, CycleError> {
    let mut h = 1e-5 * x_star;
    for _ in 0..4 {
        let rp = return_map(x_star + h, alpha)?;
        let rm = return_map(x_star - h, alpha)?;
        if rp.is_finite() && rm.is_finite() {
            return Ok((rp - rm) / (2.0 * h));
        }
        h /= 10.0;
    }
    let r0 = return_map(x_star, alpha)?;
    let rm = return_map(x_star - h, alpha)?;
    Ok((r0 - rm) / h)
}

/// One row of a parameter scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub alpha: f64,
    pub found: bool,
    pub x_star: f64,
    pub multiplier: f64,
}

/// Scan output: rows ordered by `alpha` plus the estimated existence
/// boundary (midpoint between the last not-found and first found row).
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    pub alpha_bar: Option<f64>,
}

/// Default section search window for scans and the CLI.
pub const DEFAULT_X_WINDOW: (f64, f64) = (0.05, 5.0);

pub fn scan_alpha(from: f64, to: f64, step: f64) -> Result<ScanResult, CycleError> {
    if !(from < to && step > 0.0) {
        return Err(CycleError::BadInput { what: "need from < to and step > 0" });
    }
    let mut rows = Vec::new();
    let n = ((to - from) / step) as usize + 1;
    for i in 0..=n {
        let a = from + step * i as f64;
        if a > to + 1e-12 * step {
            break;
        }
        let alpha = Alpha::new(a)
            .map_err(|_| CycleError::BadInput { what: "alpha must be finite" })?;
        let res = find_limit_cycle(alpha, DEFAULT_X_WINDOW.0, DEFAULT_X_WINDOW.1)?;
        rows.push(ScanRow { alpha: a, found: res.found, x_star: res.x_star, multiplier: res.multiplier });
    }
    let mut alpha_bar = None;
    for w in rows.windows(2) {
        if !w[0].found && w[1].found {
            alpha_bar = Some(0.5 * (w[0].alpha + w[1].alpha));
            break;
        }
    }
    Ok(ScanResult { rows, alpha_bar })
}

/// Coarse stability classification of the origin at a probe amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginClass {
    StableFocusLike,
    UnstableFocusLike,
}

/// Compares one return of the probe orbit against its start. A numeric
/// surrogate at the probe scale, not a proof of focus type; a probe outside
/// the cycle classifies the outside dynamics instead.
pub fn classify_origin(alpha: Alpha, probe_amplitude: f64) -> Result<OriginClass, CycleError> {
    if !(probe_amplitude > 0.0 && probe_amplitude <= 0.5) {
        return Err(CycleError::BadInput { what: "probe amplitude must lie in (0, 0.5]" });
    }
    let r = return_map(probe_amplitude, alpha)?;
    Ok(if r < probe_amplitude { OriginClass::StableFocusLike } else { OriginClass::UnstableFocusLike })
}
