use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;
use theta_opers::curve::{BranchPoint, Chart, CurveConfig, HyperellipticCurve, SurfacePoint};
use theta_opers::kernels::{finiteness_probe, klein_coordinates, KernelValue, Kernels, ProbeConfig};
use theta_opers::parse::{parse_complex, parse_curve, parse_matrix, parse_point, parse_vector};
use theta_opers::theta::{theta_jet, Characteristic, RiemannMatrix, ThetaConfig};
use theta_opers::verify::{run_suite, Check, Suite, VerifyConfig};
use theta_opers::C64;

use crate::args::{defaults, Eval, Format, Global, PointArgs, ProbeArgs};
use crate::error::{CliError, EXIT_CHECK_FAILED};

/// A rendered report and the exit code it implies.
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn rows(m: &DMatrix<C64>) -> Vec<Vec<C64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn theta_config(g: &Global) -> ThetaConfig {
    ThetaConfig {
        tol: g.tol,
        zero_floor: g.zero_floor,
    }
}

fn check_positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::input(format!("--{name} must be positive, got {x}")))
    }
}

fn load_curve(g: &Global) -> Result<HyperellipticCurve, CliError> {
    let path = g.curve.as_ref().ok_or_else(|| CliError::input("this command needs --curve <path>"))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let config = CurveConfig {
        quadrature_tol: g.quadrature_tol,
        ..CurveConfig::default()
    };
    Ok(parse_curve(&text, config)?)
}

fn matrix_csv(m: &[Vec<C64>]) -> String {
    let mut s = String::from("row,col,re,im\n");
    for (i, r) in m.iter().enumerate() {
        for (j, z) in r.iter().enumerate() {
            s.push_str(&format!("{i},{j},{:e},{:e}\n", z.re, z.im));
        }
    }
    s
}

#[derive(Serialize)]
struct PeriodsReport {
    f: Vec<C64>,
    genus: usize,
    branch_points: Vec<C64>,
    branch_at_infinity: bool,
    quadrature_nodes: usize,
    a_periods: Vec<Vec<C64>>,
    b_periods: Vec<Vec<C64>>,
    riemann_matrix: Vec<Vec<C64>>,
    symmetry_residual: f64,
    min_im_eigenvalue: f64,
}

pub fn periods(g: &Global) -> Result<Output, CliError> {
    check_positive("quadrature-tol", g.quadrature_tol)?;
    let curve = load_curve(g)?;
    let p = curve.periods();
    let report = PeriodsReport {
        f: curve.coeffs().to_vec(),
        genus: curve.genus(),
        branch_points: curve
            .branch_points()
            .into_iter()
            .filter_map(|b| match b {
                BranchPoint::Finite(x) => Some(x),
                BranchPoint::Infinity(_) => None,
            })
            .collect(),
        branch_at_infinity: curve.branch_at_infinity(),
        quadrature_nodes: p.nodes,
        a_periods: rows(&p.a),
        b_periods: rows(&p.b),
        riemann_matrix: rows(p.omega.entries()),
        symmetry_residual: p.asymmetry,
        min_im_eigenvalue: p.omega.min_im_eigenvalue(),
    };
    let text = match g.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            matrix_csv(&report.riemann_matrix)
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct VerifyReport {
    suite: Suite,
    passed: bool,
    seed: u64,
    cases: usize,
    order: usize,
    max_residual: f64,
    checks: Vec<Check>,
}

pub fn verify(g: &Global, suite: Suite) -> Result<Output, CliError> {
    check_positive("tol", g.tol)?;
    check_positive("zero-floor", g.zero_floor)?;
    let curve = if suite.needs_curve() { Some(load_curve(g)?) } else { None };
    let config = VerifyConfig {
        seed: g.seed,
        cases: g.samples.unwrap_or(defaults::VERIFY_CASES),
        jet_order: g.order,
        theta: theta_config(g),
    };
    if config.cases == 0 {
        return Err(CliError::input("--samples must be at least 1"));
    }
    let report = run_suite(suite, curve.as_ref(), &config)?;
    let out = VerifyReport {
        suite,
        passed: report.passed,
        seed: config.seed,
        cases: config.cases,
        order: config.jet_order,
        max_residual: report.max_residual(),
        checks: report.checks,
    };
    let text = match g.format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut s = String::from("name,passed,residual,tolerance\n");
            for c in &out.checks {
                let r = c.residual.map(|r| format!("{r:e}")).unwrap_or_default();
                s.push_str(&format!("{},{},{},{:e}\n", c.name, c.passed, r, c.tolerance));
            }
            s
        }
    };
    Ok(Output {
        text,
        code: if out.passed { 0 } else { EXIT_CHECK_FAILED },
    })
}

pub fn probe(g: &Global, args: &ProbeArgs) -> Result<Output, CliError> {
    check_positive("tol", g.tol)?;
    check_positive("collision-tol", args.collision_tol)?;
    check_positive("trivial-tol", args.trivial_tol)?;
    let samples = g.samples.unwrap_or(defaults::PROBE_SAMPLES);
    if samples < 2 {
        return Err(CliError::input(format!("--samples must be at least 2, got {samples}")));
    }
    let curve = load_curve(g)?;
    let extra = args
        .points
        .iter()
        .map(|p| parse_vector(p))
        .collect::<Result<Vec<_>, _>>()?;
    let config = ProbeConfig {
        samples,
        collision_tol: args.collision_tol,
        trivial_tol: args.trivial_tol,
        seed: g.seed,
        extra,
        theta: theta_config(g),
    };
    let report = finiteness_probe(&curve, &config)?;
    if let Some(path) = &args.csv_out {
        write_file(path, &report.to_csv())?;
    }
    let text = match g.format {
        Format::Json => to_json(&report),
        Format::Csv => report.to_csv(),
    };
    Ok(Output::ok(text))
}

fn chart(spec: &str) -> Result<Chart, CliError> {
    if spec == "dx" {
        return Ok(Chart::default());
    }
    if let Some(rest) = spec.strip_prefix("linear:") {
        let scale = parse_complex(rest)?;
        if scale.norm() == 0.0 {
            return Err(CliError::input("linear chart scale must be nonzero"));
        }
        return Ok(Chart::Linear { scale });
    }
    if let Some(rest) = spec.strip_prefix("abelian:") {
        let index = rest
            .parse()
            .map_err(|_| CliError::input(format!("bad abelian chart index '{rest}'")))?;
        return Ok(Chart::Abelian { index });
    }
    Err(CliError::input(format!("unknown chart '{spec}' (dx, linear:<complex>, abelian:<index>)")))
}

fn point(curve: &HyperellipticCurve, spec: &str) -> Result<SurfacePoint, CliError> {
    let (x, sheet) = parse_point(spec)?;
    Ok(curve.point(x, sheet)?)
}

fn charts(p: &PointArgs) -> Result<[Chart; 2], CliError> {
    Ok([chart(&p.chart_x)?, chart(&p.chart_y)?])
}

#[derive(Serialize)]
struct KernelReport<'a> {
    what: &'a str,
    x: SurfacePoint,
    y: SurfacePoint,
    e: Vec<Vec<C64>>,
    #[serde(flatten)]
    value: KernelValue,
}

#[derive(Serialize)]
struct ThetaReport {
    what: &'static str,
    z: Vec<C64>,
    characteristic: Characteristic,
    derivative: Vec<usize>,
    /// `null` when it overflows; `mantissa * exp(log_scale)` always holds.
    value: Option<C64>,
    mantissa: C64,
    log_scale: f64,
    /// `|theta|` over the largest term of the series.
    zero_ratio: f64,
}

#[derive(Serialize)]
struct ValueReport<'a> {
    what: &'a str,
    x: SurfacePoint,
    e: Vec<C64>,
    chart: Chart,
    order: usize,
    value: C64,
}

#[derive(Serialize)]
struct CoordinatesReport {
    what: &'static str,
    e: Vec<C64>,
    coordinates: Vec<Vec<C64>>,
}

fn render_value(format: Format, what: &str, value: C64, body: String) -> String {
    match format {
        Format::Json => body,
        Format::Csv => format!("what,re,im\n{what},{:e},{:e}\n", value.re, value.im),
    }
}

fn bits(v: &serde_json::Value) -> Option<Vec<u8>> {
    v.as_array()?
        .iter()
        .map(|b| match b.as_u64() {
            Some(0) => Some(0),
            Some(1) => Some(1),
            _ => None,
        })
        .collect()
}

/// Relative asymmetry accepted in a user-supplied Riemann matrix.
const OMEGA_SYMMETRY_TOL: f64 = 1e-9;

pub fn eval(g: &Global, what: &Eval) -> Result<Output, CliError> {
    check_positive("tol", g.tol)?;
    check_positive("zero-floor", g.zero_floor)?;
    let config = theta_config(g);
    match what {
        Eval::Theta {
            z,
            omega,
            characteristic,
            derivative,
        } => {
            let omega = match omega {
                Some(text) => {
                    let m = RiemannMatrix::from_rows(&parse_matrix(text)?)?;
                    let size = m.entries().iter().map(|c| c.norm()).fold(1.0, f64::max);
                    if m.asymmetry() > OMEGA_SYMMETRY_TOL * size {
                        return Err(CliError::input(format!(
                            "omega is not symmetric (max |omega_ij - omega_ji| = {:e})",
                            m.asymmetry()
                        )));
                    }
                    m
                }
                None => load_curve(g)?.riemann_matrix().clone(),
            };
            let genus = omega.genus();
            let z = match z {
                Some(text) => parse_vector(text)?,
                None => vec![C64::new(0.0, 0.0); genus],
            };
            let ch = match characteristic {
                None => Characteristic::zero(genus),
                Some(text) => {
                    let bad = || CliError::input("characteristic must be [[a bits], [b bits]] with bits 0 or 1");
                    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::input(e.to_string()))?;
                    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                    Characteristic::new(bits(&pair[0]).ok_or_else(bad)?, bits(&pair[1]).ok_or_else(bad)?)
                        .ok_or_else(bad)?
                }
            };
            let deriv: Vec<usize> = match derivative {
                None => vec![0; genus],
                Some(text) => serde_json::from_str(text)
                    .map_err(|e| CliError::input(format!("derivative: {e}")))?,
            };
            for (name, len) in [("z", z.len()), ("characteristic", ch.genus()), ("derivative", deriv.len())] {
                if len != genus {
                    return Err(CliError::input(format!("{name} has {len} components, the genus is {genus}")));
                }
            }
            let order: usize = deriv.iter().sum();
            let jet = theta_jet(&z, &ch, &omega, order, g.tol)?;
            let mantissa = jet.derivative(&deriv);
            let value = mantissa * jet.log_scale.exp();
            let report = ThetaReport {
                what: "theta",
                z,
                characteristic: ch,
                derivative: deriv,
                value: value.is_finite().then_some(value),
                mantissa,
                log_scale: jet.log_scale,
                zero_ratio: jet.zero_ratio(),
            };
            Ok(Output::ok(render_value(g.format, "theta", value, to_json(&report))))
        }
        Eval::Bergman { points } => {
            let curve = load_curve(g)?;
            let k = Kernels::with_config(&curve, config)?;
            let (x, y) = (point(&curve, &points.x)?, point(&curve, &points.y)?);
            let value = k.bergman(&x, &y, charts(points)?)?;
            let report = KernelReport {
                what: "bergman",
                x,
                y,
                e: vec![],
                value,
            };
            Ok(Output::ok(render_value(g.format, "bergman", value.value, to_json(&report))))
        }
        Eval::Szego { e, points } => {
            let curve = load_curve(g)?;
            let k = Kernels::with_config(&curve, config)?;
            let e = parse_vector(e)?;
            let (x, y) = (point(&curve, &points.x)?, point(&curve, &points.y)?);
            let value = k.szego(&e, &x, &y, charts(points)?)?;
            let report = KernelReport {
                what: "szego",
                x,
                y,
                e: vec![e],
                value,
            };
            Ok(Output::ok(render_value(g.format, "szego", value.value, to_json(&report))))
        }
        Eval::Klein {
            e,
            x,
            y,
            chart_x,
            chart_y,
        } => {
            let curve = load_curve(g)?;
            let mut es = e.iter().map(|s| parse_vector(s)).collect::<Result<Vec<_>, _>>()?;
            match (x, y) {
                (Some(x), Some(y)) => {
                    if es.len() == 1 {
                        let minus = es[0].iter().map(|z| -z).collect();
                        es.push(minus);
                    }
                    let k = Kernels::with_config(&curve, config)?;
                    let (x, y) = (point(&curve, x)?, point(&curve, y)?);
                    let value = k.klein(&es, &x, &y, [chart(chart_x)?, chart(chart_y)?])?;
                    let report = KernelReport {
                        what: "klein",
                        x,
                        y,
                        e: es,
                        value,
                    };
                    Ok(Output::ok(render_value(g.format, "klein", value.value, to_json(&report))))
                }
                _ => {
                    if es.len() != 1 {
                        return Err(CliError::input("Klein coordinates take a single --e"));
                    }
                    let e = es.remove(0);
                    let c = klein_coordinates(&curve, &e, &config)?;
                    let report = CoordinatesReport {
                        what: "klein_coordinates",
                        e,
                        coordinates: c.rows(),
                    };
                    Ok(Output::ok(match g.format {
                        Format::Json => to_json(&report),
                        Format::Csv => matrix_csv(&report.coordinates),
                    }))
                }
            }
        }
        Eval::Wirtinger { e, x, chart: spec } => {
            let curve = load_curve(g)?;
            let k = Kernels::with_config(&curve, config)?;
            let e = parse_vector(e)?;
            let x = point(&curve, x)?;
            let c = chart(spec)?;
            let value = k.wirtinger(&e, &x, g.order, c)?;
            let report = ValueReport {
                what: "wirtinger",
                x,
                e,
                chart: c,
                order: g.order,
                value,
            };
            Ok(Output::ok(render_value(g.format, "wirtinger", value, to_json(&report))))
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
