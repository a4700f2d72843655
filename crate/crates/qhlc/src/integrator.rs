//! Adaptive explicit Runge-Kutta propagation of either chart with event
//! detection, plus the graph-form equation `dz/dv = z f / (v f + z^2)`.
//!
//! The stepper is the Dormand-Prince embedded 5(4) pair. The fields are
//! smooth polynomials; the only delicate places are the semi-hyperbolic
//! saddles, which the callers handle by event-based handoff instead of by
//! shrinking steps.

use core::fmt;

#[cfg(not(feature = "std"))]
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

use crate::dynamics::{self, Alpha};

/// Which chart the state lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Original `(x, y)` coordinates, time `t`.
    Xy,
    /// Chart at infinity `(v, z)`, rescaled time `tau`.
    Vz,
}

/// Time direction of the propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// Which zero crossings of an event function count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    /// negative to positive along the sample sequence
    Upward,
    /// positive to negative along the sample sequence
    Downward,
    Any,
}

/// Coordinate index inside a state pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    First,
    Second,
}

/// What an event watches for.
#[derive(Debug, Clone, Copy)]
pub enum EventKind {
    /// A coordinate passing through `value` with the given crossing sense.
    CoordinateCrossing { axis: Axis, value: f64, crossing: Crossing },
    /// The euclidean norm of the state exceeding `r_max` (escape guard).
    NormExceeds { r_max: f64 },
    /// Entry into the closed ball around `center`.
    BallEntry { center: (f64, f64), radius: f64 },
    /// Contact with the curve `v f(v) + z^2 = 0` in the `(v, z)` chart,
    /// detected as `w = v f + z^2` falling through `bias`. The event stays
    /// disarmed until `w` has exceeded `arm` once: along a center manifold
    /// `w` is positive but only of order `z^4`, and integration jitter there
    /// would otherwise fake a crossing of any fixed threshold.
    KContact { alpha: Alpha, arm: f64, bias: f64 },
}

/// An event to watch during integration.
#[derive(Debug, Clone, Copy)]
pub struct EventSpec {
    pub id: u32,
    pub kind: EventKind,
    /// Terminal events stop the integration; non-terminal ones are recorded
    /// and the propagation continues.
    pub terminal: bool,
}

impl EventSpec {
    /// Signed event function; a watched crossing is a zero of this.
    fn eval(&self, state: [f64; 2]) -> f64 {
        match self.kind {
            EventKind::CoordinateCrossing { axis, value, .. } => {
                let c = match axis {
                    Axis::First => state[0],
                    Axis::Second => state[1],
                };
                c - value
            }
            EventKind::NormExceeds { r_max } => state[0].hypot(state[1]) - r_max,
            EventKind::BallEntry { center, radius } => {
                (state[0] - center.0).hypot(state[1] - center.1) - radius
            }
            EventKind::KContact { alpha, bias, .. } => {
                state[0] * dynamics::eval_f(state[0], alpha) + state[1] * state[1] - bias
            }
        }
    }

    fn crossing(&self) -> Crossing {
        match self.kind {
            EventKind::CoordinateCrossing { crossing, .. } => crossing,
            EventKind::NormExceeds { .. } => Crossing::Upward,
            EventKind::BallEntry { .. } | EventKind::KContact { .. } => Crossing::Downward,
        }
    }

    fn triggered(&self, g_old: f64, g_new: f64) -> bool {
        if g_old == g_new {
            return false;
        }
        match self.crossing() {
            Crossing::Upward => g_old < 0.0 && g_new >= 0.0,
            Crossing::Downward => g_old > 0.0 && g_new <= 0.0,
            Crossing::Any => g_old.signum() != g_new.signum() && g_new != g_old,
        }
    }

    /// Scale for the refinement stopping test `|g| <= 1e-12 * scale`.
    fn scale(&self) -> f64 {
        match self.kind {
            EventKind::CoordinateCrossing { value, .. } => value.abs().max(1.0),
            EventKind::NormExceeds { r_max } => r_max.max(1.0),
            EventKind::BallEntry { center, .. } => center.0.hypot(center.1).max(1.0),
            EventKind::KContact { .. } => 1.0,
        }
    }
}

/// A non-terminal event occurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub id: u32,
    pub t: f64,
    pub state: [f64; 2],
}

/// Why the propagation stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// A terminal event fired.
    EventHit { id: u32 },
    /// The state settled into the capture ball of the equilibrium with this
    /// index (assigned by the separatrix layer, not by `integrate` itself).
    EquilibriumCaptured { index: usize },
    /// The escape guard fired.
    Escaped,
    /// The step budget ran out first.
    MaxSteps,
}

/// A sampled solution curve.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `(parameter, state)` at every accepted step, endpoints included.
    pub samples: Vec<(f64, [f64; 2])>,
    pub termination: Termination,
    pub direction: Direction,
    /// Non-terminal event occurrences, in parameter order.
    pub records: Vec<EventRecord>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, [f64; 2]) {
        *self.samples.last().expect("trajectory has at least the initial sample")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrateError {
    /// Step size underflowed; the explicit pair cannot resolve the motion.
    Stiffness { t: f64 },
    /// The graph-form equation left the region `v f + z^2 > 0`.
    LeftGraphRegion { v: f64 },
    /// Tolerances or the start state were not usable.
    BadInput { what: &'static str },
}

impl fmt::Display for IntegrateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrateError::Stiffness { t } => write!(f, "step size underflow at t = {t}"),
            IntegrateError::LeftGraphRegion { v } => {
                write!(f, "graph-form equation left the region v f + z^2 > 0 near v = {v}")
            }
            IntegrateError::BadInput { what } => write!(f, "bad input: {what}"),
        }
    }
}

impl core::error::Error for IntegrateError {}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rhs(chart: Chart, alpha: Alpha, s: [f64; 2]) -> [f64; 2] {
    let (a, b) = match chart {
        Chart::Xy => dynamics::field_xy(s[0], s[1], alpha),
        Chart::Vz => dynamics::field_vz(s[0], s[1], alpha),
    };
    [a, b]
}

/// One DP5 step of signed size `h` from `s`; returns the fifth-order state
/// and the embedded error estimate.
fn dp_step<F: Fn([f64; 2]) -> [f64; 2]>(f: &F, s: [f64; 2], h: f64) -> ([f64; 2], [f64; 2]) {
    let mut k = [[0.0f64; 2]; 7];
    k[0] = f(s);
    for i in 1..7 {
        let mut y = s;
        for (j, kj) in k.iter().enumerate().take(i) {
            y[0] += h * A[i][j] * kj[0];
            y[1] += h * A[i][j] * kj[1];
        }
        k[i] = f(y);
    }
    let _ = C; // nodes are implicit in the tableau for autonomous fields
    let mut y5 = s;
    let mut err = [0.0f64; 2];
    for i in 0..7 {
        y5[0] += h * B5[i] * k[i][0];
        y5[1] += h * B5[i] * k[i][1];
        err[0] += h * (B5[i] - B4[i]) * k[i][0];
        err[1] += h * (B5[i] - B4[i]) * k[i][1];
    }
    (y5, err)
}

fn error_norm(err: [f64; 2], s_old: [f64; 2], s_new: [f64; 2], rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let sc = atol + rtol * s_old[i].abs().max(s_new[i].abs());
        let e = err[i] / sc;
        acc += e * e;
    }
    (acc / 2.0).sqrt()
}

/// Propagates the chosen chart from `start` until the first terminal event,
/// escape, or exhaustion of the step budget.
///
/// Non-terminal events are located to `|g| <= 1e-12 * scale` and recorded in
/// the trajectory without stopping it.
pub fn integrate(
    chart: Chart,
    alpha: Alpha,
    start: [f64; 2],
    direction: Direction,
    events: &[EventSpec],
    rtol: f64,
    atol: f64,
    max_steps: usize,
) -> Result<Trajectory, IntegrateError> {
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(IntegrateError::BadInput { what: "tolerances must be positive" });
    }
    if !start[0].is_finite() || !start[1].is_finite() {
        return Err(IntegrateError::BadInput { what: "start state must be finite" });
    }

    let f = |s: [f64; 2]| rhs(chart, alpha, s);
    let sign = direction.sign();

    let mut t = 0.0f64;
    let mut s = start;
    let mut g = [0.0f64; 16];
    let mut armed = [false; 16];
    assert!(events.len() <= g.len(), "too many events");
    for (idx, ev) in events.iter().enumerate() {
        g[idx] = ev.eval(s);
        if let EventKind::KContact { arm, bias, .. } = ev.kind {
            armed[idx] = g[idx] + bias >= arm;
        }
    }

    // initial step from the local derivative scale
    let d0 = s[0].hypot(s[1]).max(atol);
    let f0 = f(s);
    let d1 = f0[0].hypot(f0[1]);
    let mut h = if d1 > 0.0 { (0.01 * d0 / d1).min(1.0) } else { 1e-6 };

    let mut samples = Vec::new();
    samples.push((t, s));
    let mut records = Vec::new();

    for _ in 0..max_steps {
        let (s_new, err) = dp_step(&f, s, sign * h);
        if !s_new[0].is_finite() || !s_new[1].is_finite() {
            h *= 0.25;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(IntegrateError::Stiffness { t });
            }
            continue;
        }
        let en = error_norm(err, s, s_new, rtol, atol);
        if en > 1.0 {
            h *= (0.9 / pow_fifth(en)).clamp(0.1, 1.0);
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(IntegrateError::Stiffness { t });
            }
            continue;
        }

        let t_new = t + sign * h;

        // event scan over the accepted step: locate every triggered event,
        // then handle them in parameter order so an earlier terminal event
        // is not shadowed by a later non-terminal one (or vice versa)
        let mut hits = [(usize::MAX, 0.0f64); 16]; // (event index, signed substep)
        let mut n_hits = 0usize;
        for (idx, ev) in events.iter().enumerate() {
            if matches!(ev.kind, EventKind::KContact { .. }) && !armed[idx] {
                continue;
            }
            let g_new = ev.eval(s_new);
            if ev.triggered(g[idx], g_new) {
                let frac = refine_event(&f, s, sign * h, ev, g[idx]);
                hits[n_hits] = (idx, frac);
                n_hits += 1;
            }
        }
        hits[..n_hits].sort_unstable_by(|a, b| {
            a.1.abs().partial_cmp(&b.1.abs()).unwrap_or(core::cmp::Ordering::Equal)
        });
        for &(idx, frac) in &hits[..n_hits] {
            let ev = &events[idx];
            let (s_ev, _) = dp_step(&f, s, frac);
            let t_ev = t + frac;
            if ev.terminal {
                samples.push((t_ev, s_ev));
                let termination = match ev.kind {
                    EventKind::NormExceeds { .. } => Termination::Escaped,
                    _ => Termination::EventHit { id: ev.id },
                };
                return Ok(Trajectory { samples, termination, direction, records });
            }
            records.push(EventRecord { id: ev.id, t: t_ev, state: s_ev });
        }

        t = t_new;
        s = s_new;
        for (idx, ev) in events.iter().enumerate() {
            g[idx] = ev.eval(s);
            if let EventKind::KContact { arm, bias, .. } = ev.kind {
                armed[idx] = armed[idx] || g[idx] + bias >= arm;
            }
        }
        samples.push((t, s));

        let grow = if en > 0.0 { (0.9 / pow_fifth(en)).clamp(0.2, 5.0) } else { 5.0 };
        h *= grow;
    }

    Ok(Trajectory { samples, termination: Termination::MaxSteps, direction, records })
}

/// `x^(1/5)` for positive `x`.
fn pow_fifth(x: f64) -> f64 {
    // two sqrt + newton: x^(1/4) start, polish to fifth root
    let mut r = x.sqrt().sqrt();
    for _ in 0..3 {
        let r4 = r * r * r * r;
        r -= (r4 * r - x) / (5.0 * r4);
    }
    r
}

/// Locates the zero of `ev` inside a single accepted step by bisection on
/// the substep size; returns the signed substep at the crossing.
fn refine_event<F: Fn([f64; 2]) -> [f64; 2]>(
    f: &F,
    s: [f64; 2],
    h_signed: f64,
    ev: &EventSpec,
    g0: f64,
) -> f64 {
    let tol = 1e-12 * ev.scale();
    let mut lo = 0.0f64;
    let mut hi = h_signed;
    let mut g_lo = g0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let (s_mid, _) = dp_step(f, s, mid);
        let g_mid = ev.eval(s_mid);
        if g_mid.abs() <= tol {
            return mid;
        }
        if ev.triggered(g_lo, g_mid) {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    hi
}

/// Integrates the graph-form equation `dz/dv = z f / (v f + z^2)` from
/// `(v0, z0)` to `v_target`, staying inside the region `v f + z^2 > 0`.
pub fn integrate_graph(
    v0: f64,
    z0: f64,
    alpha: Alpha,
    v_target: f64,
    rtol: f64,
) -> Result<f64, IntegrateError> {
    if !(rtol > 0.0) {
        return Err(IntegrateError::BadInput { what: "rtol must be positive" });
    }
    let atol = rtol * 1e-2;
    let slope = |v: f64, z: f64| -> Option<f64> {
        let fv = dynamics::eval_f(v, alpha);
        let den = v * fv + z * z;
        if den <= 0.0 {
            None
        } else {
            Some(z * fv / den)
        }
    };
    if slope(v0, z0).is_none() {
        return Err(IntegrateError::LeftGraphRegion { v: v0 });
    }
    if v_target == v0 {
        return Ok(z0);
    }

    let span = v_target - v0;
    let sign = span.signum();
    let mut v = v0;
    let mut z = z0;
    let mut h = (span.abs() / 64.0).min(1e-2);
    let mut left_region = false;

    let f1 = |v: f64, z: f64, bad: &mut bool| -> f64 {
        match slope(v, z) {
            Some(s) => s,
            None => {
                *bad = true;
                0.0
            }
        }
    };

    let max_steps = 2_000_000;
    for _ in 0..max_steps {
        if sign * (v_target - v) <= 0.0 {
            return Ok(z);
        }
        let hs = h.min((v_target - v).abs()) * sign;
        // scalar DP5 step
        let mut bad = false;
        let mut k = [0.0f64; 7];
        k[0] = f1(v, z, &mut bad);
        for i in 1..7 {
            let mut y = z;
            for (j, kj) in k.iter().enumerate().take(i) {
                y += hs * A[i][j] * kj;
            }
            k[i] = f1(v + C[i] * hs, y, &mut bad);
        }
        let mut z5 = z;
        let mut err = 0.0;
        for i in 0..7 {
            z5 += hs * B5[i] * k[i];
            err += hs * (B5[i] - B4[i]) * k[i];
        }
        if bad || !z5.is_finite() {
            left_region = true;
            h *= 0.25;
            if h < 1e-14 * v.abs().max(1.0) {
                return Err(IntegrateError::LeftGraphRegion { v });
            }
            continue;
        }
        let sc = atol + rtol * z.abs().max(z5.abs());
        let en = (err / sc).abs();
        if en > 1.0 {
            h *= (0.9 / pow_fifth(en)).clamp(0.1, 1.0);
            if h < 1e-14 * v.abs().max(1.0) {
                return Err(if left_region {
                    IntegrateError::LeftGraphRegion { v }
                } else {
                    IntegrateError::Stiffness { t: v }
                });
            }
            continue;
        }
        left_region = false;
        v += hs;
        z = z5;
        let grow = if en > 0.0 { (0.9 / pow_fifth(en)).clamp(0.2, 5.0) } else { 5.0 };
        h *= grow;
    }
    Err(IntegrateError::Stiffness { t: v })
}
