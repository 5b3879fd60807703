//! Command-line front end for `bergkern`.

pub mod config;
pub mod expr;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use bergkern::checks::{self, CheckOutcome, Suite, SuiteConfig};
use bergkern::exact::{self, Param};
use bergkern::kernels::{self, EvalResult};
use bergkern::starcalc;
use bergkern::weights::{self, RadialWeight};
use bergkern::zeros::{self, ZeroReport};
use bergkern::{plane, Error};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub use config::{Format, RunConfig, CONFIG_ENV};
pub use expr::{parse_weight, ParseError, WeightExpr};

#[derive(Debug, Parser)]
#[command(name = "bergkern", version, about = "Bergman kernels of radial weights: moments, zeros and checks")]
pub struct Cli {
    /// TOML run config.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub series_tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum Command {
    /// Table of moments ωₙ, n = 0..=max.
    Moments {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 16)]
        max: usize,
    },
    /// Kernel value B(ζ).
    Kernel {
        #[arg(long)]
        weight: String,
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        zeta: String,
    },
    /// Exact numerator p_{α,n} of the n-th star iterate of the standard kernel.
    Poly {
        #[arg(long)]
        n: usize,
        /// Evaluate at this α (decimal or p/q); omitted, coefficients are polynomials in α.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
    },
    /// Zeros of B_z in the domain.
    Zeros {
        #[arg(long)]
        weight: String,
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Zero counts of B_z over |z| = r for a sweep `a:b:step`.
    Zeromap {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        radii: String,
        /// Also write the root loci as CSV.
        #[arg(long)]
        loci: Option<PathBuf>,
    },
    /// Rouché threshold α* for each n.
    Threshold {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5])]
        n: Vec<usize>,
    },
    /// Run a check suite.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteName::All)]
        suite: SuiteName,
    },
    /// Segal–Bargmann star iterates: factored kernel and its zeros.
    Sb {
        /// γ (decimal or p/q).
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Also evaluate at ζ (`re` or `re,im`).
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Reproducing,
    LittlewoodPaley,
    Sharpness,
    Holder,
    Hardy,
    Plane,
    All,
}

impl From<SuiteName> for Suite {
    fn from(s: SuiteName) -> Self {
        match s {
            SuiteName::Reproducing => Suite::Reproducing,
            SuiteName::LittlewoodPaley => Suite::LittlewoodPaley,
            SuiteName::Sharpness => Suite::Sharpness,
            SuiteName::Holder => Suite::Holder,
            SuiteName::Hardy => Suite::Hardy,
            SuiteName::Plane => Suite::Plane,
            SuiteName::All => Suite::All,
        }
    }
}

/// A bad invocation: exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Exit code and error kind for an error chain.
pub fn classify(err: &anyhow::Error) -> (i32, String) {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return (2, "usage".into());
        }
        if cause.is::<ParseError>() {
            return (2, "weight_syntax".into());
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            let kind = format!("{e:?}");
            let kind = kind.split(['(', ' ', '{']).next().unwrap_or_default().to_string();
            let code = match e {
                Error::AlphaOutOfRange(_)
                | Error::GammaOutOfRange(_)
                | Error::InvalidArgument(_)
                | Error::InvalidExponent(_)
                | Error::OutsideDomain { .. }
                | Error::DepthCap { .. } => 2,
                _ => 1,
            };
            return (code, kind);
        }
    }
    (1, "runtime".into())
}

pub fn error_json(err: &anyhow::Error) -> Value {
    let (code, kind) = classify(err);
    json!({ "error": { "kind": kind, "message": format!("{err:#}"), "exit_code": code } })
}

pub fn resolve_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| usage(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    if let Some(v) = &cli.output {
        cfg.output = Some(v.clone());
    }
    if let Some(v) = cli.format {
        cfg.format = Some(v);
    }
    macro_rules! take {
        ($($f:ident),*) => { $( if let Some(v) = cli.$f { cfg.$f = v; } )* };
    }
    take!(seed, workers, truncation, rel_tol, abs_tol, series_tol);
    cfg.validate().map_err(|e| usage(format!("{e:#}")))?;
    Ok(cfg)
}

fn c_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn check_json(o: &CheckOutcome) -> Value {
    let mut v = json!({
        "name": o.name,
        "lhs": c_json(o.lhs),
        "rhs": c_json(o.rhs),
        "abs_err": o.abs_err,
        "rel_err": o.rel_err,
        "tolerance": o.tolerance,
        "relation": o.relation,
        "pass": o.pass,
        "informational": o.informational,
    });
    if let Some(n) = &o.note {
        v["note"] = json!(n);
    }
    v
}

fn weight_arg(text: &str) -> anyhow::Result<(WeightExpr, RadialWeight)> {
    let e = parse_weight(text)?;
    let w = e.to_weight()?;
    Ok((e, w))
}

fn rational_arg(name: &str, text: &str) -> anyhow::Result<BigRational> {
    exact::parse(text).map_err(|_| usage(format!("--{name}: not a number: {text:?}")))
}

/// `re` or `re,im`.
pub fn parse_complex(text: &str) -> anyhow::Result<Complex64> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
    match parts.as_slice() {
        [re] => num(re).map(|re| Complex64::new(re, 0.0)),
        [re, im] => num(re).zip(num(im)).map(|(re, im)| Complex64::new(re, im)),
        _ => None,
    }
    .ok_or_else(|| usage(format!("not a complex number (expected re or re,im): {text:?}")))
}

/// `a:b:step`, inclusive of `b` up to rounding. Values are rounded to 12
/// decimals so that `0.1:0.9:0.05` lands on 0.5 exactly.
pub fn parse_range(text: &str) -> anyhow::Result<Vec<f64>> {
    let bad = || usage(format!("not a range a:b:step: {text:?}"));
    let parts: Vec<f64> = text.split(':').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [a, b, step] = parts.as_slice() else {
        return Err(bad());
    };
    if !(a.is_finite() && b.is_finite() && *step > 0.0 && a <= b) {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(usage(format!("range {text:?} has {count} points (limit 100000)")));
    }
    Ok((0..count).map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12).collect())
}

/// What a subcommand produced.
pub struct Report {
    pub results: Value,
    pub checks: Vec<CheckOutcome>,
    /// Tabular form, when the subcommand has one.
    pub table: Option<Table>,
    /// Extra CSV written to the path.
    pub side_table: Option<(PathBuf, Table)>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    fn json(results: Value) -> Self {
        Self {
            results,
            checks: Vec::new(),
            table: None,
            side_table: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(CheckOutcome::failed)
    }
}

/// Runs the command and writes its artifact. Returns the exit code.
pub fn run(cli: &Cli) -> anyhow::Result<i32> {
    let cfg = resolve_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    let report = pool.install(|| execute(&cli.command, &cfg))?;
    let default_format = match cli.command {
        Command::Zeromap { .. } => Format::Csv,
        _ => Format::Json,
    };
    let format = cfg.format.unwrap_or(default_format);
    let header = Header {
        version: bergkern::VERSION,
        command: &cli.command,
        config: &cfg,
    };
    let body = match format {
        Format::Json => render_json(&header, &report)?,
        Format::Csv => {
            let table = report
                .table
                .as_ref()
                .ok_or_else(|| usage("this subcommand has no CSV form; use --format json"))?;
            render_csv(&header, table)?
        }
    };
    emit(cfg.output.as_deref(), &body)?;
    if let Some((path, table)) = &report.side_table {
        emit(Some(path), &render_csv(&header, table)?)?;
    }
    Ok(if report.failed() { 1 } else { 0 })
}

#[derive(Serialize)]
struct Header<'a> {
    version: &'a str,
    command: &'a Command,
    config: &'a RunConfig,
}

fn render_json(h: &Header, r: &Report) -> anyhow::Result<String> {
    let doc = json!({
        "version": h.version,
        "command": h.command,
        "config": h.config,
        "results": r.results,
        "checks": r.checks.iter().map(check_json).collect::<Vec<_>>(),
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn render_csv(h: &Header, t: &Table) -> anyhow::Result<String> {
    let mut out = format!(
        "# bergkern {}\n# command {}\n# config {}\n",
        h.version,
        serde_json::to_string(h.command)?,
        serde_json::to_string(h.config)?
    );
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&t.header)?;
    for row in &t.rows {
        w.write_record(row)?;
    }
    out.push_str(std::str::from_utf8(&w.into_inner()?)?);
    Ok(out)
}

fn emit(path: Option<&Path>, body: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn execute(command: &Command, cfg: &RunConfig) -> anyhow::Result<Report> {
    match command {
        Command::Moments { weight, max } => moments(weight, *max, cfg),
        Command::Kernel { weight, zeta } => kernel(weight, parse_complex(zeta)?, cfg),
        Command::Poly { n, alpha } => poly(*n, alpha.as_deref()),
        Command::Zeros { weight, z } => {
            let (e, w) = weight_arg(weight)?;
            let z = parse_complex(z)?;
            let report = zeros::zeros_of_bz(&w, z, &cfg.zeros())?;
            Ok(Report::json(json!({ "weight": e.to_string(), "z": c_json(z), "report": report })))
        }
        Command::Zeromap { weight, radii, loci } => zeromap(weight, radii, loci.as_deref(), cfg),
        Command::Threshold { n } => threshold(n),
        Command::Verify { suite } => verify(*suite, cfg),
        Command::Sb { gamma, n, zeta } => sb(gamma, *n, zeta.as_deref(), cfg),
    }
}

fn moments(weight: &str, max: usize, cfg: &RunConfig) -> anyhow::Result<Report> {
    let (e, w) = weight_arg(weight)?;
    let q = cfg.quadrature();
    let rows: Vec<(usize, f64, Option<String>)> = (0..=max)
        .into_par_iter()
        .map(|n| {
            let v = weights::moment(&w, n, &q)?;
            Ok((n, v, weights::moment_exact(&w, n).map(|r| exact::to_string(&r))))
        })
        .collect::<bergkern::Result<_>>()?;
    let results = json!({
        "weight": e.to_string(),
        "moments": rows.iter().map(|(n, v, x)| json!({ "n": n, "value": v, "exact": x })).collect::<Vec<_>>(),
    });
    let table = Table {
        header: vec!["n", "value", "exact"],
        rows: rows.iter().map(|(n, v, x)| vec![n.to_string(), format!("{v:e}"), x.clone().unwrap_or_default()]).collect(),
    };
    Ok(Report {
        table: Some(table),
        ..Report::json(results)
    })
}

/// Series and closed form must agree to this relative error.
pub const AGREEMENT_TOL: f64 = 1e-9;

fn eval_json(r: &EvalResult) -> Value {
    json!({ "value": c_json(r.value), "tail_bound": r.tail_bound, "terms_used": r.terms_used })
}

fn kernel(weight: &str, zeta: Complex64, cfg: &RunConfig) -> anyhow::Result<Report> {
    let (e, w) = weight_arg(weight)?;
    let q = cfg.quadrature();
    let series = kernels::kernel_series(&w, cfg.truncation, &q)?;
    let series = match series.eval(zeta, cfg.series_tol) {
        Err(Error::TruncationInsufficient { .. }) => kernels::eval_adaptive(&w, zeta, cfg.series_tol, &q)?,
        r => r?,
    };
    let closed = match kernels::closed_form(&w, zeta) {
        Ok(v) => Some(v),
        Err(Error::NoClosedForm) => None,
        Err(e) => return Err(e.into()),
    };
    let mut checks = Vec::new();
    if let Some(v) = closed {
        checks.push(CheckOutcome::compare("series_vs_closed_form", series.value, v, checks::Relation::Equal, AGREEMENT_TOL));
    }
    let results = json!({
        "weight": e.to_string(),
        "zeta": c_json(zeta),
        "closed_form": closed.map(c_json),
        "series": eval_json(&series),
    });
    Ok(Report {
        checks,
        ..Report::json(results)
    })
}

fn poly(n: usize, alpha: Option<&str>) -> anyhow::Result<Report> {
    let p = starcalc::p_n(n)?;
    let results = match alpha {
        None => json!({
            "n": n,
            "variable": "alpha",
            "pole_exponent": format!("2 + alpha + {}", 2 * n),
            "coefficients": p.to_strings(),
        }),
        Some(text) => {
            let a = rational_arg("alpha", text)?;
            RadialWeight::standard_exact(a.clone())?;
            let pole = &a + BigRational::from_integer((2 + 2 * n).into());
            json!({
                "n": n,
                "alpha": exact::to_string(&a),
                "pole_exponent": exact::to_string(&pole),
                "coefficients": p.eval_alpha(&a).iter().map(exact::to_string).collect::<Vec<_>>(),
            })
        }
    };
    Ok(Report::json(results))
}

fn zeromap(weight: &str, radii: &str, loci: Option<&Path>, cfg: &RunConfig) -> anyhow::Result<Report> {
    let (e, w) = weight_arg(weight)?;
    let radii = parse_range(radii)?;
    if let Some(bad) = radii.iter().find(|r| **r <= 0.0) {
        return Err(usage(format!("radii must be positive, got {bad}")));
    }
    let reports: Vec<ZeroReport> = zeros::zero_map_reports(&w, &radii, &cfg.zeros())?;
    let results = json!({
        "weight": e.to_string(),
        "rows": radii.iter().zip(&reports).map(|(r, rep)| json!({
            "radius": r,
            "count": rep.total_count(),
            "certified": rep.certified,
            "roots": rep.roots,
        })).collect::<Vec<_>>(),
    });
    let table = Table {
        header: vec!["radius", "count", "certified"],
        rows: radii
            .iter()
            .zip(&reports)
            .map(|(r, rep)| vec![r.to_string(), rep.total_count().to_string(), rep.certified.to_string()])
            .collect(),
    };
    let side_table = loci.map(|p| {
        let rows = radii
            .iter()
            .zip(&reports)
            .flat_map(|(r, rep)| {
                rep.roots.iter().map(move |x| {
                    vec![
                        r.to_string(),
                        format!("{:e}", x.value.re),
                        format!("{:e}", x.value.im),
                        x.multiplicity.to_string(),
                        format!("{:e}", x.residual),
                    ]
                })
            })
            .collect();
        let t = Table {
            header: vec!["radius", "re", "im", "multiplicity", "residual"],
            rows,
        };
        (p.to_path_buf(), t)
    });
    Ok(Report {
        results,
        checks: Vec::new(),
        table: Some(table),
        side_table,
    })
}

fn threshold(ns: &[usize]) -> anyhow::Result<Report> {
    if ns.is_empty() {
        return Err(usage("--n needs at least one value"));
    }
    let rows: Vec<(usize, f64, f64)> = ns
        .par_iter()
        .map(|&n| {
            let t = starcalc::rouche_threshold(n)?;
            let largest = zeros::largest_zero_modulus(n, t + 1.0)?;
            Ok((n, t, largest))
        })
        .collect::<bergkern::Result<_>>()?;
    let results = json!(rows
        .iter()
        .map(|(n, t, l)| json!({ "n": n, "threshold": t, "largest_zero_modulus_at_threshold_plus_one": l }))
        .collect::<Vec<_>>());
    let table = Table {
        header: vec!["n", "threshold", "largest_zero_modulus_at_threshold_plus_one"],
        rows: rows.iter().map(|(n, t, l)| vec![n.to_string(), t.to_string(), l.to_string()]).collect(),
    };
    Ok(Report {
        table: Some(table),
        ..Report::json(results)
    })
}

fn verify(suite: SuiteName, cfg: &RunConfig) -> anyhow::Result<Report> {
    let scfg = SuiteConfig {
        seed: cfg.seed,
        zeros: cfg.zeros(),
        ..SuiteConfig::default()
    };
    let checks = checks::run_suite(suite.into(), &scfg)?;
    let failed = checks.iter().filter(|c| c.failed()).count();
    let informational = checks.iter().filter(|c| c.informational).count();
    let results = json!({
        "suite": suite,
        "seed": cfg.seed,
        "total": checks.len(),
        "failed": failed,
        "informational": informational,
    });
    Ok(Report {
        checks,
        ..Report::json(results)
    })
}

fn sb(gamma: &str, n: usize, zeta: Option<&str>, cfg: &RunConfig) -> anyhow::Result<Report> {
    let g = rational_arg("gamma", gamma)?;
    RadialWeight::gaussian_exact(g.clone())?;
    let param = Param::exact(g);
    let form = plane::sb_star_iterate(&param, n)?;
    let report = plane::sb_zeros(&param, n)?;
    let mut checks = vec![CheckOutcome::compare(
        "zero_count_equals_n",
        Complex64::new(report.total_count() as f64, 0.0),
        Complex64::new(n as f64, 0.0),
        checks::Relation::Equal,
        0.0,
    )];
    let mut results = json!({
        "gamma": param.to_string(),
        "n": n,
        "prefactor": exact::to_string(&form.prefactor),
        "polynomial_in_gamma_zeta": form.polynomial.iter().map(exact::to_string).collect::<Vec<_>>(),
        "zeros": report,
    });
    if let Some(text) = zeta {
        let z = parse_complex(text)?;
        let w = RadialWeight::gaussian_exact(param.rational().clone())?.star_n(n);
        let closed = form.eval(z);
        let series = kernels::eval_adaptive(&w, z, cfg.series_tol, &cfg.quadrature())?;
        checks.push(CheckOutcome::compare(
            "series_vs_closed_form",
            series.value,
            closed,
            checks::Relation::Equal,
            AGREEMENT_TOL,
        ));
        results["zeta"] = c_json(z);
        results["value"] = c_json(closed);
        results["series"] = eval_json(&series);
    }
    Ok(Report {
        checks,
        ..Report::json(results)
    })
}
