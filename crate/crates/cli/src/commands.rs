//! Command definitions and their JSON responses.

use std::path::Path;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use stablefrac_core::algebra::{format_rational, parse_rational};
use stablefrac_core::branches::find_proper_t;
use stablefrac_core::integrability::{dim_ip_quotient, lp_threshold, membership_report};
use stablefrac_core::localmodel::extract_local_model;
use stablefrac_core::parse::{parse_expression, parse_halfplane, Coords};
use stablefrac_core::quotient::{integrability_basis, reduction_truncation, BasisReport};
use stablefrac_core::transfer::torus_to_halfplane;
use stablefrac_core::{BiPoly, Exponent, GaussianRational, LocalModel, Rational};
use stablefrac_numeric::numverify::{derivative_probe, integrate_local, LocalIntegrand, NumVerdict, Params};
use stablefrac_numeric::onevar::{interlacing_check, parseval_check, quadrature, sampling_bounds_check, StablePoly};
use thiserror::Error;

use crate::acceptance::{run_criterion, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Inconclusive(_) => EXIT_INCONCLUSIVE,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "stablefrac", version, about = "Local L^p integrability of rational functions with stable denominators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Where the denominator comes from. Exactly one must be given.
#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Local model as JSON text or a path to a JSON file.
    #[arg(long, group = "source")]
    pub model: Option<String>,
    /// Denominator in half-plane coordinates x, y (local picture at the origin).
    #[arg(long = "P", group = "source")]
    pub p_expr: Option<String>,
    /// Denominator in torus coordinates z, w, analyzed at (1, 1).
    #[arg(long, group = "source")]
    pub disk: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Membership of Q/P in L^p for each listed exponent.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[arg(long = "Q", default_value = "1")]
        q: String,
        /// Comma-separated exponents: rationals "a/b" or "inf".
        #[arg(long, default_value = "1,2,inf")]
        p: String,
    },
    /// Critical exponent p* with membership for p in [1, p*).
    Threshold {
        #[command(flatten)]
        source: Source,
        #[arg(long = "Q", default_value = "1")]
        q: String,
    },
    /// dim I^p/(P, P̄); a bare number for one exponent.
    Dims {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        p: String,
    },
    /// Explicit basis of I^p/(P, P̄).
    Basis {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        p: String,
        /// Parameter t for A + tB; searched for when omitted.
        #[arg(long)]
        t: Option<String>,
    },
    /// Search for a proper parameter t and print the branch expansions.
    ProperT {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        max_attempts: usize,
    },
    /// Dyadic-annulus integration of |Q/P|^p near the origin.
    VerifyNumeric {
        #[command(flatten)]
        source: Source,
        #[arg(long = "Q", default_value = "1")]
        q: String,
        #[arg(long, required_unless_present = "derivative")]
        p: Option<String>,
        /// Probe |Im(P_y/P)|^p around 1 + 1/K instead.
        #[arg(long)]
        derivative: bool,
        #[arg(long, default_value_t = Params::default().k0)]
        k0: u32,
        #[arg(long, default_value_t = Params::default().k1)]
        k1: u32,
        #[arg(long, default_value_t = Params::default().margin)]
        margin: f64,
    },
    /// One-variable quadrature, Parseval, interlacing and sampling checks.
    QuadratureCheck {
        /// Stable polynomial in y (coefficients may involve i).
        #[arg(long)]
        poly: String,
        #[arg(long = "Q", default_value = "1")]
        q: String,
        #[arg(long, default_value = "0")]
        t: String,
        /// Comma-separated exponents for the sampling inequalities.
        #[arg(long, default_value = "4/3,2,4")]
        sampling: String,
    },
    /// Cayley transfer of a torus polynomial to the half-plane picture.
    Transfer {
        #[arg(long)]
        disk: String,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Serialize)]
struct Threshold {
    p_star: String,
    open: bool,
}

/// JSON text and exit status of one invocation.
#[derive(Debug)]
pub struct Response {
    pub json: String,
    pub code: i32,
}

impl Response {
    fn ok<T: Serialize>(v: &T) -> Self {
        Response { json: serde_json::to_string(v).expect("serializable"), code: EXIT_OK }
    }
}

pub fn load_model(text: &str) -> Result<LocalModel, CliError> {
    let t = text.trim();
    let body = if t.starts_with('{') {
        t.to_string()
    } else {
        std::fs::read_to_string(Path::new(t)).map_err(|e| CliError::Input(format!("{t}: {e}")))?
    };
    LocalModel::from_json(&body).map_err(input)
}

/// Resolved denominator: the local model, `P` in the local picture, and
/// whether numerators are in torus coordinates.
struct Resolved {
    model: LocalModel,
    p: BiPoly,
    disk: bool,
}

fn resolve(s: &Source) -> Result<Resolved, CliError> {
    match (&s.model, &s.p_expr, &s.disk) {
        (Some(m), None, None) => {
            let model = load_model(m)?;
            let p = model.build_p();
            Ok(Resolved { model, p, disk: false })
        }
        (None, Some(e), None) => {
            let p = parse_halfplane(e).map_err(input)?;
            let model = extract_local_model(&p).map_err(input)?.model;
            Ok(Resolved { model, p, disk: false })
        }
        (None, None, Some(e)) => {
            let pd = parse_disk(e)?;
            let p = torus_to_halfplane(&pd).p_halfplane;
            let model = extract_local_model(&p).map_err(input)?.model;
            Ok(Resolved { model, p, disk: true })
        }
        _ => Err(CliError::Input("give exactly one of --model, --P, --disk".into())),
    }
}

fn parse_disk(e: &str) -> Result<BiPoly, CliError> {
    let parsed = parse_expression(e).map_err(input)?;
    if parsed.coords == Some(Coords::HalfPlane) {
        return Err(CliError::Input("torus polynomial must use z, w".into()));
    }
    Ok(parsed.poly)
}

/// Numerator in the local picture.
fn numerator(r: &Resolved, q: &str) -> Result<BiPoly, CliError> {
    if r.disk {
        Ok(torus_to_halfplane(&parse_disk(q)?).p_halfplane)
    } else {
        parse_halfplane(q).map_err(input)
    }
}

fn exponents(list: &str) -> Result<Vec<Exponent>, CliError> {
    list.split(',').map(|s| s.trim().parse::<Exponent>().map_err(input)).collect()
}

fn real(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    if let Some(r) = parse_rational(t) {
        return Ok(rat_f64(&r));
    }
    t.parse::<f64>().map_err(|_| CliError::Input(format!("not a number: {t}")))
}

fn rat_f64(r: &Rational) -> f64 {
    GaussianRational::real(r.clone()).to_f64().0
}

fn univariate(s: &str) -> Result<Vec<Complex64>, CliError> {
    let p = parse_halfplane(s).map_err(input)?;
    if p.deg_x().unwrap_or(0) > 0 {
        return Err(CliError::Input(format!("expected a polynomial in y only: {s}")));
    }
    let n = p.deg_y().map_or(0, |d| d as usize + 1);
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for (&(_, b), v) in p.terms() {
        let (re, im) = v.to_f64();
        c[b as usize] = Complex64::new(re, im);
    }
    Ok(c)
}

pub fn run(cli: Cli) -> Result<Response, CliError> {
    match cli.command {
        Command::Analyze { source, q, p } => {
            let r = resolve(&source)?;
            let qp = numerator(&r, &q)?;
            let reports: Vec<_> = exponents(&p)?.iter().map(|e| membership_report(&qp, &r.model, e)).collect();
            Ok(Response::ok(&json!({ "model": r.model, "reports": reports })))
        }
        Command::Threshold { source, q } => {
            let r = resolve(&source)?;
            let range = lp_threshold(&numerator(&r, &q)?, &r.model);
            let p_star = range.p_star.as_ref().map_or_else(|| "inf".to_string(), format_rational);
            Ok(Response::ok(&Threshold { p_star, open: range.open }))
        }
        Command::Dims { source, p } => {
            let r = resolve(&source)?;
            let ps = exponents(&p)?;
            if let [one] = ps.as_slice() {
                return Ok(Response::ok(&dim_ip_quotient(&r.model, one)));
            }
            let rows: Vec<_> =
                ps.iter().map(|e| json!({ "p": e.to_string(), "dim": dim_ip_quotient(&r.model, e) })).collect();
            Ok(Response::ok(&rows))
        }
        Command::Basis { source, p, t } => {
            let r = resolve(&source)?;
            let e: Exponent = p.trim().parse().map_err(input)?;
            let t = t.map(|s| parse_rational(&s).ok_or_else(|| CliError::Input(format!("bad t: {s}")))).transpose()?;
            let ib = integrability_basis(&r.model, &e, t.as_ref(), reduction_truncation(&r.model)).map_err(|e| {
                CliError::Inconclusive(e.to_string())
            })?;
            Ok(Response::ok(&BasisReport::from(&ib)))
        }
        Command::ProperT { source, seed, max_attempts } => {
            let r = resolve(&source)?;
            let cert = find_proper_t(&r.model, seed, max_attempts).map_err(|e| CliError::Inconclusive(e.to_string()))?;
            let branches = match cert.branches.exact() {
                Some(b) => json!(b.iter().map(|s| s.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>()),
                None => json!(cert.branches.approx()),
            };
            Ok(Response::ok(&json!({
                "t": format_rational(&cert.t),
                "exact": cert.branches.is_exact(),
                "branches": branches,
            })))
        }
        Command::VerifyNumeric { source, q, p, derivative, k0, k1, margin } => {
            let r = resolve(&source)?;
            if k1 < k0 + 3 {
                return Err(CliError::Input("need k1 >= k0 + 3".into()));
            }
            let params = Params { k0, k1, margin, ..Params::default() };
            if derivative {
                let d = derivative_probe(&r.model, &params);
                let code = if d.flip_ok { EXIT_OK } else { EXIT_INCONCLUSIVE };
                return Ok(Response { code, ..Response::ok(&d) });
            }
            let e = real(p.as_deref().unwrap_or_default())?;
            if !(e > 0.0 && e.is_finite()) {
                return Err(CliError::Input("p must be a positive finite number".into()));
            }
            let qp = numerator(&r, &q)?;
            let f = if source.model.is_some() {
                LocalIntegrand::from_model(&qp, &r.model, e)
            } else {
                LocalIntegrand::with_geometry(&qp, &r.p, &r.model, e)
            };
            let report = integrate_local(&f, &params);
            let code = if report.verdict == NumVerdict::Inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK };
            Ok(Response { code, ..Response::ok(&report) })
        }
        Command::QuadratureCheck { poly, q, t, sampling } => {
            let p = StablePoly::new(&univariate(&poly)?).map_err(input)?;
            let qc = univariate(&q)?;
            let t = real(&t)?;
            let quad = quadrature(&p, t).map_err(input)?;
            let parseval = parseval_check(&qc, &p, t, 1e-8).map_err(input)?;
            let interlacing = interlacing_check(&p, t).map_err(input)?;
            let mut samples = Vec::new();
            for e in sampling.split(',') {
                let e = real(e)?;
                samples.push(sampling_bounds_check(&qc, &p, e, t, 1.0).map_err(input)?);
            }
            Ok(Response::ok(&json!({
                "quadrature": quad,
                "parseval": parseval,
                "interlacing": interlacing,
                "sampling": samples,
            })))
        }
        Command::Transfer { disk } => Ok(Response::ok(&torus_to_halfplane(&parse_disk(&disk)?))),
        Command::Selftest { seed, only } => {
            let ids: Vec<u32> = match only {
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().parse::<u32>().ok().filter(|id| (1..=11).contains(id)))
                    .collect::<Option<_>>()
                    .ok_or_else(|| CliError::Input(format!("criteria are 1..=11: {list}")))?,
                None => (1..=11).collect(),
            };
            let outcomes: Vec<Outcome> = ids
                .iter()
                .map(|&id| {
                    let o = run_criterion(id, seed);
                    eprintln!("{}", o.line());
                    o
                })
                .collect();
            let code = if outcomes.iter().all(|o| o.pass) { EXIT_OK } else { EXIT_FAILED };
            Ok(Response { code, ..Response::ok(&outcomes) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_text_or_path() {
        let m = load_model(r#" {"branches":[{"L":2,"q":["1/2",0]}]} "#).unwrap();
        assert_eq!(m.branch(0).l, 2);
        assert!(matches!(load_model("/nonexistent/model.json"), Err(CliError::Input(_))));
    }

    #[test]
    fn exponent_lists() {
        let ps = exponents("1, 5/4,inf").unwrap();
        assert_eq!(ps, vec![Exponent::int(1), Exponent::ratio(5, 4), Exponent::Infinity]);
        assert!(exponents("0").is_err());
        assert_eq!(real("3/4").unwrap(), 0.75);
        assert_eq!(real("2.5").unwrap(), 2.5);
    }

    #[test]
    fn univariate_input() {
        let c = univariate("y^2 + 2*i*y - 1").unwrap();
        assert_eq!(c, vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 0.0)]);
        assert!(univariate("x*y").is_err());
    }
}
