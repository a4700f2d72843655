//! Command-line front end: every library operation behind a subcommand,
//! emitting CSV or JSON suitable for plotting and regression diffing.
//!
//! Exit codes: 0 success, 1 usage, 2 domain error, 3 numerical failure.
//! Config precedence is flags > environment (QHLC_ prefix) > defaults.
//! Floats in CSV are printed with 17 significant digits; identical inputs
//! produce byte-identical output.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qhlc::cycle;
use qhlc::dynamics;
use qhlc::separatrix::{self, TraceConfig, Which};
use qhlc::{bounds, Alpha};

#[derive(Parser)]
#[command(name = "qhlc", version, about = "numerics for a cubic planar system and its behavior at infinity", disable_help_subcommand = true)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunConfig {
    /// relative integration tolerance
    #[arg(long, global = true, env = "QHLC_RTOL", default_value_t = 1e-10)]
    rtol: f64,
    /// absolute integration tolerance
    #[arg(long, global = true, env = "QHLC_ATOL", default_value_t = 1e-12)]
    atol: f64,
    /// seed height above a saddle when tracing separatrices
    #[arg(long, global = true, env = "QHLC_Z_SEED", default_value_t = 1e-3)]
    z_seed: f64,
    /// escape guard radius
    #[arg(long, global = true, env = "QHLC_R_MAX", default_value_t = 1e6)]
    r_max: f64,
    /// half-width of the K-curve membership band
    #[arg(long, global = true, env = "QHLC_BAND", default_value_t = 1e-12)]
    band: f64,
    /// output format
    #[arg(long, global = true, env = "QHLC_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,
    /// write the artifact here instead of stdout
    #[arg(long, global = true, env = "QHLC_OUTPUT")]
    output: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Minus,
    Plus,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartArg {
    Xy,
    Vz,
}

#[derive(Subcommand)]
enum Cmd {
    /// Roots v1 < v2 < v3 of v^3 - alpha v^2 - 1 = mu
    Roots {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        mu: f64,
    },
    /// The four equilibria of the chart at infinity with local data
    Equilibria {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
    },
    /// Trace one saddle separatrix and report where it goes
    Separatrix {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_enum)]
        which: WhichArg,
        /// decimate the emitted curve to at most this many samples
        #[arg(long, default_value_t = 2000)]
        max_points: usize,
    },
    /// Separatrix gap delta(alpha) = phi-(0) - phi+(0) and its case tag
    Gap {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
    },
    /// Bisect the gap for the connection parameter alpha*
    AlphaStar {
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Closed-form bounds on the separatrix heights at the z-axis
    Bounds {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Locate the limit cycle on the positive x-axis section
    LimitCycle {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = cycle::DEFAULT_X_WINDOW.0)]
        x_lo: f64,
        #[arg(long, default_value_t = cycle::DEFAULT_X_WINDOW.1)]
        x_hi: f64,
    },
    /// Scan alpha for cycle existence and estimate the boundary
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Sample the vector field (and the K curves in the vz chart)
    Portrait {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = ChartArg::Xy)]
        chart: ChartArg,
        #[arg(long, default_value_t = 40)]
        grid: usize,
    },
}

enum Failure {
    Domain(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 2,
            Failure::Numerical(_) | Failure::Io(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<dynamics::DynamicsError> for Failure {
    fn from(e: dynamics::DynamicsError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<bounds::BoundsError> for Failure {
    fn from(e: bounds::BoundsError) -> Self {
        match e {
            bounds::BoundsError::GridTooCoarse { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<separatrix::SeparatrixError> for Failure {
    fn from(e: separatrix::SeparatrixError) -> Self {
        use qhlc::integrator::IntegrateError;
        match e {
            separatrix::SeparatrixError::Dynamics(d) => Failure::Domain(d.to_string()),
            separatrix::SeparatrixError::Integrate(IntegrateError::BadInput { .. }) => {
                Failure::Domain(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<cycle::CycleError> for Failure {
    fn from(e: cycle::CycleError) -> Self {
        match e {
            cycle::CycleError::BadInput { .. } => Failure::Domain(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are success paths, everything else is a usage error
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match run(&cli) {
        Ok(artifact) => match emit(&cli.run, &artifact) {
            Ok(()) => ExitCode::SUCCESS,
            Err(f) => {
                eprintln!("error: {}", f.message());
                ExitCode::from(f.code())
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn emit(run: &RunConfig, artifact: &str) -> Result<(), Failure> {
    match &run.output {
        Some(path) => {
            std::fs::write(path, artifact).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{artifact}");
            Ok(())
        }
    }
}

/// 17 significant digits, locale-free.
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn trace_config(run: &RunConfig) -> TraceConfig {
    TraceConfig {
        rtol: run.rtol,
        atol: run.atol,
        z_seed: run.z_seed,
        r_max: run.r_max,
        ..TraceConfig::default()
    }
}

fn check_positive(run: &RunConfig) -> Result<(), Failure> {
    for (name, v) in [
        ("rtol", run.rtol),
        ("atol", run.atol),
        ("z-seed", run.z_seed),
        ("r-max", run.r_max),
        ("band", run.band),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::Domain(format!("--{name} must be positive and finite")));
        }
    }
    Ok(())
}

fn alpha(a: f64) -> Result<Alpha, Failure> {
    Ok(Alpha::new(a)?)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    check_positive(&cli.run)?;
    let fmt = cli.run.format;
    match &cli.cmd {
        Cmd::Roots { alpha: a, mu } => {
            let r = dynamics::level_roots(alpha(*a)?, *mu)?;
            Ok(match fmt {
                Format::Csv => {
                    let mut s = String::from("alpha,mu,v1,v2,v3\n");
                    let _ = writeln!(s, "{},{},{},{},{}", num(*a), num(*mu), num(r.v1), num(r.v2), num(r.v3));
                    s
                }
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "alpha": a,
                    "mu": mu,
                    "v1": r.v1,
                    "v2": r.v2,
                    "v3": r.v3,
                })),
            })
        }
        Cmd::Equilibria { alpha: a } => {
            let eq = dynamics::equilibria(alpha(*a)?)?;
            Ok(match fmt {
                Format::Csv => {
                    let mut s =
                        String::from("index,v,z,kind,lambda_hyp,center_cubic,invariant_curve_quad\n");
                    for e in &eq {
                        let _ = writeln!(
                            s,
                            "{},{},{},{:?},{},{},{}",
                            e.index,
                            num(e.position.0),
                            num(e.position.1),
                            e.kind,
                            num(e.lambda_hyp),
                            num(e.center_cubic),
                            num(e.invariant_curve_quad)
                        );
                    }
                    s
                }
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "alpha": a,
                    "equilibria": eq.iter().map(|e| json!({
                        "index": e.index,
                        "v": e.position.0,
                        "z": e.position.1,
                        "kind": format!("{:?}", e.kind),
                        "lambda_hyp": e.lambda_hyp,
                        "center_cubic": e.center_cubic,
                        "invariant_curve_quad": e.invariant_curve_quad,
                    })).collect::<Vec<_>>(),
                })),
            })
        }
        Cmd::Separatrix { alpha: a, which, max_points } => {
            let which = match which {
                WhichArg::Minus => Which::LMinus,
                WhichArg::Plus => Which::LPlus,
            };
            let tr = separatrix::trace_separatrix(which, alpha(*a)?, &trace_config(&cli.run))?;
            Ok(match fmt {
                Format::Csv => {
                    let mut s = String::from("tau,v,z\n");
                    let n = tr.trajectory.samples.len();
                    let stride = n.div_ceil((*max_points).max(2));
                    for (i, (t, st)) in tr.trajectory.samples.iter().enumerate() {
                        if i % stride == 0 || i == n - 1 {
                            let _ = writeln!(s, "{},{},{}", num(*t), num(st[0]), num(st[1]));
                        }
                    }
                    s
                }
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "alpha": a,
                    "which": match which { Which::LMinus => "minus", Which::LPlus => "plus" },
                    "phi_at_zero": tr.phi_at_zero,
                    "endpoint": format!("{:?}", tr.endpoint),
                    "v_extreme": tr.v_extreme,
                    "samples": tr.trajectory.samples.len(),
                })),
            })
        }
        Cmd::Gap { alpha: a } => {
            let g = separatrix::gap(alpha(*a)?, &trace_config(&cli.run))?;
            Ok(match fmt {
                Format::Csv => {
                    let mut s = String::from("alpha,phi_minus_at_zero,phi_plus_at_zero,delta,case\n");
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{:?}",
                        num(*a),
                        num(g.phi_minus_at_zero),
                        num(g.phi_plus_at_zero),
                        num(g.delta),
                        g.case
                    );
                    s
                }
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "alpha": a,
                    "phi_minus_at_zero": g.phi_minus_at_zero,
                    "phi_plus_at_zero": g.phi_plus_at_zero,
                    "delta": g.delta,
                    "case": format!("{:?}", g.case),
                })),
            })
        }
        Cmd::AlphaStar { lo, hi, tol } => {
            let st = separatrix::find_alpha_star(*lo, *hi, *tol, &trace_config(&cli.run))?;
            Ok(match fmt {
                Format::Csv => {
                    let mut s = String::from("value,bracket_lo,bracket_hi,tolerance,iterations\n");
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        num(st.value),
                        num(st.bracket.0),
                        num(st.bracket.1),
                        num(st.tolerance),
                        st.iterations
                    );
                    s
                }
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "value": st.value,
                    "bracket": [st.bracket.0, st.bracket.1],
                    "tolerance": st.tolerance,
                    "iterations": st.iterations,
                })),
            })
        }
        Cmd::Bounds { alpha: a, mu, lambda } => {
            let br = bounds::bound_report(alpha(*a)?, *mu, *lambda)?;
            Ok(match fmt {
                Format::Csv => {
                    let mut s = String::from(
                        "alpha,mu,lambda,z2_mu,z3_lambda,lower_phi_minus0,upper_phi_plus0,separation\n",
                    );
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{}",
                        num(*a),
                        num(*mu),
                        num(*lambda),
                        num(br.z2_mu),
                        num(br.z3_lambda),
                        num(br.lower_phi_minus0),
                        num(br.upper_phi_plus0),
                        num(br.separation)
                    );
                    s
                }
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "alpha": a,
                    "mu": mu,
                    "lambda": lambda,
                    "z2_mu": br.z2_mu,
                    "z3_lambda": br.z3_lambda,
                    "lower_phi_minus0": br.lower_phi_minus0,
                    "upper_phi_plus0": br.upper_phi_plus0,
                    "separation": br.separation,
                })),
            })
        }
        Cmd::LimitCycle { alpha: a, x_lo, x_hi } => {
            let lc = cycle::find_limit_cycle(alpha(*a)?, *x_lo, *x_hi)?;
            Ok(match fmt {
                Format::Csv => {
                    let mut s = String::from("alpha,found,x_star,period,multiplier,verdict\n");
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{:?}",
                        num(*a),
                        lc.found,
                        num(lc.x_star),
                        num(lc.period),
                        num(lc.multiplier),
                        lc.verdict
                    );
                    s
                }
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "alpha": a,
                    "found": lc.found,
                    "x_star": finite_or_null(lc.x_star),
                    "period": finite_or_null(lc.period),
                    "multiplier": finite_or_null(lc.multiplier),
                    "verdict": format!("{:?}", lc.verdict),
                })),
            })
        }
        Cmd::Scan { from, to, step } => {
            let sc = cycle::scan_alpha(*from, *to, *step)?;
            Ok(match fmt {
                Format::Csv => {
                    let mut s = String::from("alpha,found,x_star,multiplier\n");
                    for r in &sc.rows {
                        let _ = writeln!(
                            s,
                            "{},{},{},{}",
                            num(r.alpha),
                            r.found,
                            num(r.x_star),
                            num(r.multiplier)
                        );
                    }
                    s
                }
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "alpha_bar": sc.alpha_bar,
                    "rows": sc.rows.iter().map(|r| json!({
                        "alpha": r.alpha,
                        "found": r.found,
                        "x_star": finite_or_null(r.x_star),
                        "multiplier": finite_or_null(r.multiplier),
                    })).collect::<Vec<_>>(),
                })),
            })
        }
        Cmd::Portrait { alpha: a, chart, grid } => {
            if *grid < 2 || *grid > 2000 {
                return Err(Failure::Domain("--grid must lie in [2, 2000]".into()));
            }
            portrait(alpha(*a)?, *chart, *grid, fmt)
        }
    }
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() { json!(x) } else { serde_json::Value::Null }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialization");
    s.push('\n');
    s
}

/// Field samples on a grid, plus the contact curves `K±` in the chart at
/// infinity (where `v f + z^2 = 0`).
fn portrait(a: Alpha, chart: ChartArg, grid: usize, fmt: Format) -> Result<String, Failure> {
    let mut rows: Vec<(String, f64, f64, f64, f64)> = Vec::new();
    match chart {
        ChartArg::Xy => {
            let (lo, hi) = (-2.5, 2.5);
            for i in 0..grid {
                for j in 0..grid {
                    let x = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
                    let y = lo + (hi - lo) * j as f64 / (grid - 1) as f64;
                    let (dx, dy) = dynamics::field_xy(x, y, a);
                    rows.push(("field".into(), x, y, dx, dy));
                }
            }
        }
        ChartArg::Vz => {
            let r0 = dynamics::level_roots(a, 0.0)?;
            let (vlo, vhi) = (r0.v1 - 1.0, r0.v3 + 1.0);
            let (zlo, zhi) = (0.0, 2.0);
            for i in 0..grid {
                for j in 0..grid {
                    let v = vlo + (vhi - vlo) * i as f64 / (grid - 1) as f64;
                    let z = zlo + (zhi - zlo) * j as f64 / (grid - 1) as f64;
                    let (dv, dz) = dynamics::field_vz(v, z, a);
                    rows.push(("field".into(), v, z, dv, dz));
                }
            }
            // contact curves z = sqrt(-v f) where v f < 0
            let m = 4 * grid;
            for i in 0..=m {
                let v = vlo + (vhi - vlo) * i as f64 / m as f64;
                let w = -v * dynamics::eval_f(v, a);
                if w > 0.0 {
                    let z = w.sqrt();
                    let kind = if v < 0.0 { "kminus" } else { "kplus" };
                    rows.push((kind.into(), v, z, 0.0, 0.0));
                }
            }
        }
    }
    Ok(match fmt {
        Format::Csv => {
            let mut s = String::from("kind,c1,c2,d1,d2\n");
            for (k, a, b, c, d) in &rows {
                let _ = writeln!(s, "{k},{},{},{},{}", num(*a), num(*b), num(*c), num(*d));
            }
            s
        }
        Format::Json => pretty(&json!({
            "schema": 1,
            "rows": rows.iter().map(|(k, a, b, c, d)| json!({
                "kind": k, "c1": a, "c2": b, "d1": c, "d2": d,
            })).collect::<Vec<_>>(),
        })),
    })
}
