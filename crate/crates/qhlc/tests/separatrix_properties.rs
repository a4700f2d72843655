//! Cross-module properties of the traced separatrices: parameter
//! continuity/monotonicity of the axis heights, region exclusion, seed
//! robustness, and consistency with the closed-form bounds.

use qhlc::bounds;
use qhlc::dynamics;
use qhlc::separatrix::{self, TraceConfig, Which};
use qhlc::Alpha;

fn gap_at(a: f64) -> separatrix::GapResult {
    separatrix::gap(Alpha::new(a).unwrap(), &TraceConfig::default()).unwrap()
}

#[test]
fn axis_heights_vary_continuously_and_monotonically() {
    // 0.01-spaced parameter grid across the connection
    let n = 26;
    let (a0, a1) = (-2.38, -2.12);
    let mut minus = Vec::with_capacity(n + 1);
    let mut plus = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let g = gap_at(a0 + (a1 - a0) * i as f64 / n as f64);
        minus.push(g.phi_minus_at_zero);
        plus.push(g.phi_plus_at_zero);
    }

    // no jump wildly out of line with the local secant slope
    let smooth = |ys: &[f64]| {
        let typical = (ys[0] - ys[n]).abs() / n as f64;
        for w in ys.windows(2) {
            assert!((w[1] - w[0]).abs() <= 10.0 * typical, "jump {} vs typical {typical}", (w[1] - w[0]).abs());
        }
    };
    smooth(&minus);
    smooth(&plus);

    // heights are ordered in the parameter, so the gap strictly decreases
    let tol = 1e-8;
    for w in minus.windows(2) {
        assert!(w[1] <= w[0] + tol, "phi-(0) not nonincreasing: {} -> {}", w[0], w[1]);
    }
    for w in plus.windows(2) {
        assert!(w[1] >= w[0] - tol, "phi+(0) not nondecreasing: {} -> {}", w[0], w[1]);
    }
    for i in 0..n {
        assert!(minus[i + 1] - plus[i + 1] < minus[i] - plus[i]);
    }
}

#[test]
fn lower_separatrix_stays_clear_of_the_left_lobe() {
    // along L-, every sample left of v2_0 keeps v f + z^2 nonnegative:
    // the curve rides the lobe boundary but never dips inside
    for a in [-2.3, -3.0 / 2.0f64.cbrt()] {
        let alpha = Alpha::new(a).unwrap();
        let v20 = dynamics::level_roots(alpha, 0.0).unwrap().v2;
        let tr = separatrix::trace_separatrix(Which::LMinus, alpha, &TraceConfig::default()).unwrap();
        for &(_, s) in &tr.trajectory.samples {
            if s[0] < v20 {
                let w = s[0] * dynamics::eval_f(s[0], alpha) + s[1] * s[1];
                assert!(w >= -1e-6, "lobe entry at v={} z={} (w={w})", s[0], s[1]);
            }
        }
    }
}

#[test]
fn axis_heights_are_insensitive_to_the_seed() {
    let a = Alpha::new(-2.3).unwrap();
    let base = TraceConfig::default();
    let half = TraceConfig { z_seed: base.z_seed / 2.0, ..base };
    for which in [Which::LMinus, Which::LPlus] {
        let p0 = separatrix::trace_separatrix(which, a, &base).unwrap().phi_at_zero.unwrap();
        let p1 = separatrix::trace_separatrix(which, a, &half).unwrap().phi_at_zero.unwrap();
        assert!((p0 - p1).abs() <= 1e-6, "{which:?}: {p0} vs {p1}");
    }
}

#[test]
fn closed_form_bounds_sandwich_the_traced_heights() {
    // at each parameter the traced heights must respect every admissible
    // closed-form bound pair
    let slack = 1e-3;
    for a in [-2.3, -3.0 / 2.0f64.cbrt(), -2.5] {
        let alpha = Alpha::new(a).unwrap();
        let g = separatrix::gap(alpha, &TraceConfig::default()).unwrap();
        let top = dynamics::f_local_max(alpha);
        for mu in [0.3, 11.0 / 16.0] {
            if mu >= top {
                continue;
            }
            let lower = bounds::lower_bound_phi_minus(alpha, mu).unwrap();
            assert!(
                lower <= g.phi_minus_at_zero + slack,
                "a={a} mu={mu}: lower {lower} vs traced {}",
                g.phi_minus_at_zero
            );
        }
        for lam in [-0.3, -9.0 / 16.0] {
            let upper = bounds::upper_bound_phi_plus(alpha, lam).unwrap();
            assert!(
                upper >= g.phi_plus_at_zero - slack,
                "a={a} lam={lam}: upper {upper} vs traced {}",
                g.phi_plus_at_zero
            );
        }
    }
}
