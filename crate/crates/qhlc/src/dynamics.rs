//! Exact formulas of the system: both vector fields, the cubic `f` and its
//! level roots, region membership in the upper half `(v, z)`-plane, and the
//! equilibria with their semi-hyperbolic local data.
//!
//! The chart at infinity is reached through `x = v/z`, `y = 1/z` with the
//! time rescaling `dtau = dt / z^2`, which turns the system into
//!
//! ```text
//! dv/dtau = v f(v, a) + z^2
//! dz/dtau = z f(v, a)          with  f(v, a) = v^3 - a v^2 - 1.
//! ```

use core::fmt;

#[cfg(not(feature = "std"))]
use crate::math::FloatExt;

/// `-3 / cbrt(4)`: saddles at infinity exist only for `a` below this value.
pub const ALPHA_SADDLE_THRESHOLD: f64 = -1.8898815748423097;

/// Default half-width of the numerical band around the curves `K-`/`K+`.
pub const DEFAULT_K_BAND: f64 = 1e-12;

/// Errors from the exact-formula layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DynamicsError {
    /// Input outside the admissible parameter/argument range.
    Domain { what: &'static str },
    /// `mu` sits exactly on an endpoint of the three-root interval, where a
    /// double root collapses the configuration.
    DegenerateLevel { mu: f64 },
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::Domain { what } => write!(f, "domain error: {what}"),
            DynamicsError::DegenerateLevel { mu } => {
                write!(f, "degenerate level mu = {mu}: double root at interval endpoint")
            }
        }
    }
}

impl core::error::Error for DynamicsError {}

/// The real parameter `a` of the system.
///
/// Construction only requires finiteness; operations that need a saddle pair
/// at infinity check `a < -3/cbrt(4)` themselves and reject other values.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Alpha, DynamicsError> {
        if value.is_finite() {
            Ok(Alpha(value))
        } else {
            Err(DynamicsError::Domain { what: "alpha must be finite" })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// True iff the chart at infinity has its four equilibria,
    /// i.e. `a < -3/cbrt(4)`.
    pub fn has_saddles(self) -> bool {
        self.0 < ALPHA_SADDLE_THRESHOLD
    }

    pub(crate) fn require_saddles(self) -> Result<(), DynamicsError> {
        if self.has_saddles() {
            Ok(())
        } else {
            Err(DynamicsError::Domain { what: "alpha must be below -3/cbrt(4)" })
        }
    }
}

/// `f(v, a) = v^3 - a v^2 - 1`.
pub fn eval_f(v: f64, alpha: Alpha) -> f64 {
    (v - alpha.get()) * v * v - 1.0
}

/// `f(2a/3, a) = -4 a^3 / 27 - 1`, the local maximum of `f` in `v` for
/// `a < 0`. Level sets `f = mu` have three real roots exactly for
/// `mu` in `(-1, f(2a/3, a))`.
pub fn f_local_max(alpha: Alpha) -> f64 {
    let a = alpha.get();
    -4.0 * a * a * a / 27.0 - 1.0
}

/// The three ascending real roots `v1 < v2 < v3` of `f(v, a) = mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRoots {
    pub mu: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

/// Solves `f(v, a) = mu` for the three real roots, ordered
/// `v1 < 2a/3 < v2 < 0 < v3`.
///
/// Uses the trigonometric three-real-root formula on the depressed cubic,
/// followed by one Newton polish per root; the combination stays accurate
/// near the double-root boundary without branch switches.
pub fn level_roots(alpha: Alpha, mu: f64) -> Result<LevelRoots, DynamicsError> {
    let a = alpha.get();
    if a >= 0.0 {
        return Err(DynamicsError::Domain { what: "level roots require alpha < 0" });
    }
    let top = f_local_max(alpha);
    if mu == -1.0 || mu == top {
        return Err(DynamicsError::DegenerateLevel { mu });
    }
    if mu < -1.0 || mu > top {
        return Err(DynamicsError::Domain { what: "mu outside (-1, f(2a/3, a))" });
    }

    // v^3 - a v^2 - (1 + mu) = 0; substitute v = w + a/3.
    let c = 1.0 + mu;
    let p = -a * a / 3.0;
    let q = -(2.0 * a * a * a / 27.0 + c);

    let m = 2.0 * (-p / 3.0).sqrt();
    // acos argument may drift a hair out of [-1, 1] near the endpoints
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    const TWO_THIRDS_PI: f64 = 2.0 * core::f64::consts::FRAC_PI_3;

    let mut roots = [
        m * theta.cos(),
        m * (theta - TWO_THIRDS_PI).cos(),
        m * (theta + TWO_THIRDS_PI).cos(),
    ];
    for w in &mut roots {
        let mut v = *w + a / 3.0;
        for _ in 0..2 {
            let fv = eval_f(v, alpha) - mu;
            let dfv = v * (3.0 * v - 2.0 * a);
            if dfv != 0.0 {
                v -= fv / dfv;
            }
        }
        *w = v;
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let [v1, v2, v3] = roots;

    let ridge = 2.0 * a / 3.0;
    if !(v1 < ridge && ridge < v2 && v2 < 0.0 && 0.0 < v3) {
        // Ordering can only break when the roots have effectively merged.
        return Err(DynamicsError::DegenerateLevel { mu });
    }
    Ok(LevelRoots { mu, v1, v2, v3 })
}

/// The original field: `(dx/dt, dy/dt) = (y, -x^3 + a x^2 y + y^3)`.
pub fn field_xy(x: f64, y: f64, alpha: Alpha) -> (f64, f64) {
    (y, -x * x * x + alpha.get() * x * x * y + y * y * y)
}

/// The chart field: `(dv/dtau, dz/dtau) = (v f + z^2, z f)`.
pub fn field_vz(v: f64, z: f64, alpha: Alpha) -> (f64, f64) {
    let fv = eval_f(v, alpha);
    (v * fv + z * z, z * fv)
}

/// Determinant of the field against its `a`-derivative: `x^2 y^2`.
///
/// Positivity off `xy = 0` is what makes the family rotate monotonically
/// with `a`.
pub fn rotated_determinant(x: f64, y: f64) -> f64 {
    x * x * y * y
}

/// Membership of a point of the closed upper half `(v, z)`-plane in the
/// domain decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    /// `v <= v1`, `z > 0`
    D1,
    /// `v1 < v < v2`, `v f + z^2 > 0`
    D2,
    /// `v2 <= v < v3`, `v f + z^2 > 0`
    D3,
    /// `v >= v3`, `z > 0`
    D4,
    /// `v1 < v < v2`, `v f + z^2 < 0`
    AMinus,
    /// `0 < v < v3`, `v f + z^2 < 0`
    APlus,
    /// on the curve `z = sqrt(-v f)`, `v1 < v < v2`
    KMinus,
    /// on the curve `z = sqrt(-v f)`, `0 < v < v3`
    KPlus,
    /// on the `v`-axis away from the equilibria
    VAxis,
    /// at one of the four equilibria
    Equilibrium,
}

/// Classifies `(v, z)` with the default `K`-curve band.
pub fn classify_region(v: f64, z: f64, alpha: Alpha) -> Result<RegionTag, DynamicsError> {
    classify_region_with_band(v, z, alpha, DEFAULT_K_BAND)
}

/// Classifies `(v, z)`, treating `|v f + z^2| <= band` as membership in the
/// curves `K-`/`K+`. The sets themselves are exact; the band is the
/// numerical stand-in.
pub fn classify_region_with_band(
    v: f64,
    z: f64,
    alpha: Alpha,
    band: f64,
) -> Result<RegionTag, DynamicsError> {
    alpha.require_saddles()?;
    if z < 0.0 {
        return Err(DynamicsError::Domain { what: "classify_region needs z >= 0" });
    }
    let roots = level_roots(alpha, 0.0)?;
    let (v1, v2, v3) = (roots.v1, roots.v2, roots.v3);

    if z == 0.0 {
        let at_equilibrium = v == 0.0
            || (v - v1).abs() <= band
            || (v - v2).abs() <= band
            || (v - v3).abs() <= band;
        return Ok(if at_equilibrium { RegionTag::Equilibrium } else { RegionTag::VAxis });
    }

    let w = v * eval_f(v, alpha) + z * z;
    if w.abs() <= band {
        if v1 < v && v < v2 {
            return Ok(RegionTag::KMinus);
        }
        if 0.0 < v && v < v3 {
            return Ok(RegionTag::KPlus);
        }
    }
    if w < 0.0 {
        if v1 < v && v < v2 {
            return Ok(RegionTag::AMinus);
        }
        if 0.0 < v && v < v3 {
            return Ok(RegionTag::APlus);
        }
        // v f + z^2 >= 0 holds identically outside those strips
        return Err(DynamicsError::Domain { what: "inconsistent sign of v f + z^2" });
    }
    Ok(if v <= v1 {
        RegionTag::D1
    } else if v < v2 {
        RegionTag::D2
    } else if v < v3 {
        RegionTag::D3
    } else {
        RegionTag::D4
    })
}

/// Local type of an equilibrium of the chart field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    /// The origin of the chart: both eigenvalues `-1`.
    HyperbolicStableNode,
    /// Semi-hyperbolic saddle whose center separatrices leave along the
    /// vertical direction (`P1`).
    SemiHyperbolicSaddleUnstableCenter,
    /// Semi-hyperbolic node, repelling in both the hyperbolic and the
    /// center direction (`P2`).
    SemiHyperbolicUnstableNode,
    /// Semi-hyperbolic saddle whose center separatrices arrive along the
    /// vertical direction (`P3`).
    SemiHyperbolicSaddleStableCenter,
}

/// An equilibrium on the `v`-axis with its local normal-form data.
///
/// For the semi-hyperbolic points `P1..P3` at `v0 = v_i^0`:
///
/// * `lambda_hyp = v0 f'(v0) = (3 v0 - 2a) v0^2 = a v0^2 + 3` is the single
///   hyperbolic eigenvalue (the linearization of `d v/dtau` along the axis);
/// * the invariant center curve through the point is
///   `v = v0 + invariant_curve_quad * z^2 + O(z^4)` with
///   `invariant_curve_quad = -1 / lambda_hyp`;
/// * on that curve `dz/dtau = center_cubic * z^3 + ...` with
///   `center_cubic = -1 / v0`.
///
/// For `P0` the center fields are unused and set to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumInfo {
    pub index: usize,
    pub position: (f64, f64),
    pub kind: EquilibriumKind,
    pub lambda_hyp: f64,
    pub center_cubic: f64,
    pub invariant_curve_quad: f64,
}

/// Hyperbolic eigenvalue of the semi-hyperbolic point at `v0` on the axis.
pub(crate) fn lambda_hyp(v0: f64, alpha: Alpha) -> f64 {
    (3.0 * v0 - 2.0 * alpha.get()) * v0 * v0
}

/// The four equilibria `P0..P3` of the chart field, in ascending index
/// order, for `a < -3/cbrt(4)`.
pub fn equilibria(alpha: Alpha) -> Result<[EquilibriumInfo; 4], DynamicsError> {
    alpha.require_saddles()?;
    let roots = level_roots(alpha, 0.0)?;

    let p0 = EquilibriumInfo {
        index: 0,
        position: (0.0, 0.0),
        kind: EquilibriumKind::HyperbolicStableNode,
        lambda_hyp: -1.0,
        center_cubic: 0.0,
        invariant_curve_quad: 0.0,
    };
    let semi = |index: usize, v0: f64| {
        let lam = lambda_hyp(v0, alpha);
        let kind = match (lam > 0.0, -1.0 / v0 > 0.0) {
            (false, true) => EquilibriumKind::SemiHyperbolicSaddleUnstableCenter,
            (true, true) => EquilibriumKind::SemiHyperbolicUnstableNode,
            (true, false) => EquilibriumKind::SemiHyperbolicSaddleStableCenter,
            // lambda < 0 with contracting center would be a stable node;
            // the sign table excludes it for this f
            (false, false) => unreachable!("sign table rules this out for a < -3/cbrt(4)"),
        };
        EquilibriumInfo {
            index,
            position: (v0, 0.0),
            kind,
            lambda_hyp: lam,
            center_cubic: -1.0 / v0,
            invariant_curve_quad: -1.0 / lam,
        }
    };
    Ok([p0, semi(1, roots.v1), semi(2, roots.v2), semi(3, roots.v3)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn alpha(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    #[test]
    fn f_values() {
        assert_eq!(eval_f(0.0, alpha(-2.0)), -1.0);
        assert_eq!(eval_f(0.0, alpha(7.5)), -1.0);
        // v^3 + 2v^2 - 1 = (v + 1)(v^2 + v - 1)
        assert_eq!(eval_f(-1.0, alpha(-2.0)), 0.0);
        // local maximum value: f(2a/3, a) = -4a^3/27 - 1
        assert_eq!(eval_f(-2.0, alpha(-3.0)), 3.0);
        assert!((f_local_max(alpha(-3.0)) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn golden_roots_at_minus_two() {
        let r = level_roots(alpha(-2.0), 0.0).unwrap();
        let s5 = 5.0f64.sqrt();
        assert!((r.v1 - (-1.0 - s5) / 2.0).abs() < 1e-12);
        assert!((r.v2 - (-1.0)).abs() < 1e-12);
        assert!((r.v3 - (s5 - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_roots_at_special_alpha() {
        // a = -3 / cbrt(2)
        let a = alpha(-3.0 / 2.0f64.cbrt());
        let c = 2.0f64.cbrt();
        let s3 = 3.0f64.sqrt();
        let r = level_roots(a, 0.0).unwrap();
        assert!((r.v1 + (s3 + 1.0) / c).abs() < 1e-12);
        assert!((r.v2 + 1.0 / c).abs() < 1e-12);
        assert!((r.v3 - (s3 - 1.0) / c).abs() < 1e-12);

        let r = level_roots(a, 11.0 / 16.0).unwrap();
        let s5 = 5.0f64.sqrt();
        assert!((r.v1 + (3.0 * s5 + 3.0) / (4.0 * c)).abs() < 1e-12);
        assert!((r.v2 + 3.0 / (2.0 * c)).abs() < 1e-12);
    }

    #[test]
    fn root_residuals_and_ordering_randomized() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..2000 {
            let a = alpha(rng.gen_range(-4.0..-1.9));
            let top = f_local_max(a);
            let mu = rng.gen_range(-0.999..top * 0.999);
            let r = match level_roots(a, mu) {
                Ok(r) => r,
                Err(DynamicsError::DegenerateLevel { .. }) => continue,
                Err(e) => panic!("unexpected error {e}"),
            };
            let tol = 1e-12 * mu.abs().max(1.0);
            for v in [r.v1, r.v2, r.v3] {
                assert!(
                    (eval_f(v, a) - mu).abs() <= tol,
                    "residual too large at a={} mu={} v={}",
                    a.get(),
                    mu,
                    v
                );
            }
            let ridge = 2.0 * a.get() / 3.0;
            assert!(r.v1 < ridge && ridge < r.v2 && r.v2 < 0.0 && 0.0 < r.v3);
        }
    }

    #[test]
    fn root_monotonicity_in_alpha() {
        // as a decreases: v1 decreases, v2 increases toward 0, v3 decreases
        // toward 0
        for mu in [0.0, 0.15] {
            let grid = [-2.0, -2.5, -3.0, -4.0];
            let mut prev: Option<LevelRoots> = None;
            for &a in &grid {
                let r = level_roots(alpha(a), mu).unwrap();
                if let Some(p) = prev {
                    assert!(r.v1 < p.v1);
                    assert!(r.v2 > p.v2 && r.v2 < 0.0);
                    assert!(r.v3 < p.v3 && r.v3 > 0.0);
                }
                prev = Some(r);
            }
        }
    }

    #[test]
    fn level_roots_domain_errors() {
        assert!(matches!(
            level_roots(alpha(-2.0), 5.0),
            Err(DynamicsError::Domain { .. })
        ));
        assert!(matches!(
            level_roots(alpha(-2.0), -2.0),
            Err(DynamicsError::Domain { .. })
        ));
        assert!(matches!(
            level_roots(alpha(1.0), 0.0),
            Err(DynamicsError::Domain { .. })
        ));
        assert!(matches!(
            level_roots(alpha(-2.0), -1.0),
            Err(DynamicsError::DegenerateLevel { .. })
        ));
        let top = f_local_max(alpha(-2.0));
        assert!(matches!(
            level_roots(alpha(-2.0), top),
            Err(DynamicsError::DegenerateLevel { .. })
        ));
    }

    #[test]
    fn field_point_values() {
        assert_eq!(field_xy(1.0, 0.0, alpha(-2.0)), (0.0, -1.0));
        assert_eq!(field_xy(0.0, 1.0, alpha(-2.0)), (1.0, 1.0));
        assert_eq!(field_vz(0.0, 1.0, alpha(-2.0)), (1.0, -1.0));
        let r = level_roots(alpha(-2.0), 0.0).unwrap();
        for v in [r.v1, r.v2, r.v3] {
            let (dv, dz) = field_vz(v, 0.0, alpha(-2.0));
            assert!(dv.abs() < 1e-12 && dz == 0.0);
        }
    }

    #[test]
    fn central_symmetry_randomized() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..1000 {
            let a = alpha(rng.gen_range(-4.0..4.0));
            let x = rng.gen_range(-10.0..10.0);
            let y = rng.gen_range(-10.0..10.0);
            let (dx, dy) = field_xy(x, y, a);
            let (mx, my) = field_xy(-x, -y, a);
            assert_eq!(mx, -dx);
            assert_eq!(my, -dy);
        }
    }

    #[test]
    fn chart_consistency_randomized() {
        // pushing (x', y') through x = v/z, y = 1/z and rescaling by z^2
        // must reproduce the chart field
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..1000 {
            let a = alpha(rng.gen_range(-4.0..-1.9));
            let v = rng.gen_range(-3.0..3.0);
            let z = rng.gen_range(0.1..10.0);
            let (x, y) = (v / z, 1.0 / z);
            let (xd, yd) = field_xy(x, y, a);
            let zdot_t = -yd * z * z;
            let vdot_t = xd * z + x * zdot_t;
            let (dv, dz) = field_vz(v, z, a);
            let scale = dv.abs().max(dz.abs()).max(1e-300);
            assert!((vdot_t * z * z - dv).abs() <= 1e-10 * scale);
            assert!((zdot_t * z * z - dz).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn region_classification() {
        let a = alpha(-2.0);
        assert_eq!(classify_region(0.0, 1.0, a).unwrap(), RegionTag::D3);
        assert_eq!(classify_region(-3.0, 0.5, a).unwrap(), RegionTag::D1);
        let v = -1.3;
        let zk = (-v * eval_f(v, a)).sqrt();
        assert_eq!(
            classify_region_with_band(v, zk, a, 1e-9).unwrap(),
            RegionTag::KMinus
        );
        // just inside the lobe
        assert_eq!(classify_region(v, 0.9 * zk, a).unwrap(), RegionTag::AMinus);
        let vp = 0.3;
        let zp = (-vp * eval_f(vp, a)).sqrt();
        assert_eq!(
            classify_region_with_band(vp, zp, a, 1e-9).unwrap(),
            RegionTag::KPlus
        );
        assert_eq!(classify_region(vp, 0.5 * zp, a).unwrap(), RegionTag::APlus);
        assert_eq!(classify_region(5.0, 1.0, a).unwrap(), RegionTag::D4);
        assert_eq!(classify_region(-1.3, 2.0, a).unwrap(), RegionTag::D2);
        assert_eq!(classify_region(0.5, 0.0, a).unwrap(), RegionTag::VAxis);
        assert_eq!(classify_region(0.0, 0.0, a).unwrap(), RegionTag::Equilibrium);
        assert!(classify_region(0.0, 1.0, alpha(-1.0)).is_err());
        assert!(classify_region(0.0, -1.0, a).is_err());
    }

    #[test]
    fn equilibria_at_minus_two() {
        let e = equilibria(alpha(-2.0)).unwrap();
        let s5 = 5.0f64.sqrt();
        assert_eq!(e[0].position, (0.0, 0.0));
        assert_eq!(e[0].kind, EquilibriumKind::HyperbolicStableNode);
        assert!((e[1].position.0 - (-1.0 - s5) / 2.0).abs() < 1e-12);
        assert!((e[2].position.0 + 1.0).abs() < 1e-12);
        assert!((e[3].position.0 - (s5 - 1.0) / 2.0).abs() < 1e-12);

        // P1: contracting hyperbolic direction, expanding center direction
        assert_eq!(e[1].kind, EquilibriumKind::SemiHyperbolicSaddleUnstableCenter);
        assert!(e[1].lambda_hyp < 0.0 && e[1].center_cubic > 0.0);
        // lambda = a v0^2 + 3; at a=-2, v1 = -(1+sqrt5)/2 this is -sqrt5
        assert!((e[1].lambda_hyp + s5).abs() < 1e-12);
        assert_eq!(e[2].kind, EquilibriumKind::SemiHyperbolicUnstableNode);
        assert!(e[2].lambda_hyp > 0.0 && e[2].center_cubic > 0.0);
        assert_eq!(e[3].kind, EquilibriumKind::SemiHyperbolicSaddleStableCenter);
        assert!(e[3].lambda_hyp > 0.0 && e[3].center_cubic < 0.0);

        for i in e.iter().skip(1) {
            assert!((i.invariant_curve_quad - (-1.0 / i.lambda_hyp)).abs() < 1e-15);
            assert!((i.center_cubic - (-1.0 / i.position.0)).abs() < 1e-15);
        }
        assert!(equilibria(alpha(-1.0)).is_err());
    }

    #[test]
    fn normal_form_consistency() {
        // first chart-field component near each axis equilibrium is
        // lambda * nu + O(nu^2 + z^2)
        for a in [-2.0, -2.5, -3.1] {
            let a = alpha(a);
            let e = equilibria(a).unwrap();
            for i in e.iter().skip(1) {
                let v0 = i.position.0;
                // fit the constant on a coarse scale, then check it bounds
                // the remainder on finer ones
                let rem = |nu: f64, z: f64| {
                    let (dv, _) = field_vz(v0 + nu, z, a);
                    (dv - i.lambda_hyp * nu).abs() / (nu * nu + z * z)
                };
                let c = 2.0 * rem(1e-3, 1e-3);
                for k in 1..6 {
                    let s = 1e-3 * 0.5f64.powi(k);
                    assert!(
                        rem(s, s) <= c,
                        "remainder not quadratic near v0={v0}"
                    );
                }
            }
        }
    }

    #[test]
    fn rotated_determinant_values() {
        assert_eq!(rotated_determinant(1.0, 1.0), 1.0);
        assert_eq!(rotated_determinant(3.7, 0.0), 0.0);
        assert_eq!(rotated_determinant(2.0, 3.0), 36.0);
    }
}
