//! Command line: parameter parsing, command dispatch and reports.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactnum::{format_rational, parse_rational, rat, Rational};
use crate::gevp::{verify_gevp, RIIParams};
use crate::hahn::{
    bilinear_coefficients, build_bilinear_w, build_x, build_y, compose_bilinear, eigen_residual, hahn_eigenvalue,
    hahn_poly, hahn_recurrence, hahn_tridiag, taus_to_heun, verify_hahn_algebra, HahnBasis, HahnParams, Taus,
};
use crate::heunhahn::{
    build_heun_hahn, degree_raise_check, heun_params_from_op, pochhammer_tridiag, qes_truncate, HeunParams,
    PochhammerBasis,
};
use crate::heunracah::{
    build_racah_triple, differential_realization, e1_closed_form, e2_closed_form, fit_heun_racah, fit_xw_relations,
    verify_degeneration, verify_racah_pairs,
};
use crate::polyops::Poly;
use crate::verify::{resolved_taus, run_suites, run_verify_all, CheckRecord, Failure, Mutation, Status, VerifyConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", .0.render())]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {message}")]
    Config { path: PathBuf, line: usize, message: String },
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid parameters: {0}")]
    Parameters(String),
}

#[derive(Parser, Debug)]
#[command(name = "heun-hahn", version, about = "Exact checks for the Heun operator of Hahn type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// The seven-parameter operator and its polynomial bases
    Heun {
        #[command(subcommand)]
        op: HeunOp,
    },
    /// Hahn polynomials, the Hahn algebra and the bilinear operator
    Hahn {
        #[command(subcommand)]
        op: HahnOp,
    },
    /// Cubic relations, the Racah triple and the differential realization
    Algebra {
        #[command(subcommand)]
        op: AlgebraOp,
    },
    /// Rational solutions of the pencil L1 - lambda L2
    Gevp {
        #[command(subcommand)]
        op: GevpOp,
    },
    /// Every verification suite plus the mutation sweep
    VerifyAll,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeunOp {
    Construct,
    VerifyDegree,
    TridiagPochhammer,
    Qes,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum HahnOp {
    Poly,
    VerifyEigen,
    Algebra,
    Bilinear,
    Tridiag,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraOp {
    FitYw,
    FitXw,
    Degenerate,
    Triple,
    Diffreal,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GevpOp {
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (group, op) = match self {
            Command::Heun { op } => ("heun", format!("{op:?}")),
            Command::Hahn { op } => ("hahn", format!("{op:?}")),
            Command::Algebra { op } => ("algebra", format!("{op:?}")),
            Command::Gevp { op } => ("gevp", format!("{op:?}")),
            Command::VerifyAll => return f.write_str("verify-all"),
        };
        write!(f, "{group} {}", kebab(&op))
    }
}

fn kebab(camel: &str) -> String {
    let mut out = String::new();
    for (i, ch) in camel.chars().enumerate() {
        if ch.is_uppercase() && i > 0 {
            out.push('-');
        }
        out.extend(ch.to_lowercase());
    }
    out
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Flags shared by every command. Each one may also appear as a key in the
/// config file.
#[derive(Args, Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub alpha: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub beta: Option<Rational>,
    /// Grid size: the grid is 0, 1, ..., N
    #[arg(long = "N", global = true)]
    pub big_n: Option<usize>,
    /// Polynomial index
    #[arg(long = "n", global = true)]
    pub n: Option<usize>,
    /// Truncation degree
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    /// Largest index checked by `gevp verify`
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub tau0: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub tau1: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub tau2: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub tau3: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub tau4: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub gamma: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub epsilon: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub kappa: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub mu1: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub mu0: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub nu1: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub nu0: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub r1: Option<Rational>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = rational_arg)]
    pub r0: Option<Rational>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Flat `key = value` file with the same keys as the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Shift one predicted value by +1 (for testing the checks)
    #[arg(long, global = true, hide = true)]
    pub mutate: Option<Mutation>,
}

impl Params {
    /// Fills every unset field from `other`.
    fn or(self, other: Params) -> Params {
        macro_rules! merge {
            ($($f:ident),*) => { Params { $($f: self.$f.or(other.$f)),* } };
        }
        merge!(
            alpha, beta, big_n, n, m, n_max, tau0, tau1, tau2, tau3, tau4, gamma, epsilon, kappa, mu1, mu0, nu1, nu0,
            r1, r0, seed, format, output, config, mutate
        )
    }

    fn heun_given(&self) -> bool {
        [&self.kappa, &self.mu1, &self.mu0, &self.nu1, &self.nu0, &self.r1, &self.r0]
            .iter()
            .any(|v| v.is_some())
    }
}

impl clap::builder::ValueParserFactory for Mutation {
    type Parser = fn(&str) -> Result<Mutation, String>;

    fn value_parser() -> Self::Parser {
        |s| s.parse()
    }
}

/// Keys accepted in a config file.
pub const CONFIG_KEYS: [&str; 23] = [
    "alpha", "beta", "N", "n", "M", "n-max", "tau0", "tau1", "tau2", "tau3", "tau4", "gamma", "epsilon", "kappa", "mu1",
    "mu0", "nu1", "nu0", "r1", "r0", "seed", "format", "output",
];

#[derive(Parser, Debug)]
#[command(name = "config", no_binary_name = true, disable_help_flag = true, disable_version_flag = true)]
struct ConfigFlags {
    #[command(flatten)]
    params: Params,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(path: &Path) -> Result<Params, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let mut argv = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CliError::Config {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if !CONFIG_KEYS.contains(&key) {
            return Err(err(format!("unknown key {key:?}")));
        }
        argv.push(format!("--{key}={value}"));
    }
    let parsed = ConfigFlags::try_parse_from(&argv).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        line: 0,
        message: e.render().to_string().trim().to_string(),
    })?;
    Ok(parsed.params)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    /// Flags override config file values. `config` itself is cleared.
    pub params: Params,
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_ALPHA: (i64, i64) = (1, 3);
pub const DEFAULT_BETA: (i64, i64) = (1, 5);
pub const DEFAULT_N: usize = 8;

pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let mut params = cli.params;
    if let Some(path) = params.config.take() {
        params = params.or(parse_config_file(&path)?);
    }
    validate(&cli.command, &params)?;
    Ok(RunConfig {
        command: cli.command,
        output: params.output.clone(),
        format: params.format.unwrap_or_default(),
        params,
    })
}

fn validate(command: &Command, p: &Params) -> Result<(), CliError> {
    let big_n = p.big_n.unwrap_or(DEFAULT_N);
    let bad = |m: String| Err(CliError::Usage(m));
    if big_n < 1 {
        return bad("N must be at least 1".into());
    }
    if let Some(n) = p.n {
        if n > big_n {
            return bad(format!("n = {n} exceeds N = {big_n}"));
        }
    }
    if let Some(n) = p.n_max {
        if n > big_n {
            return bad(format!("n-max = {n} exceeds N = {big_n}"));
        }
    }
    if let Some(m) = p.m {
        if m == 0 || m >= big_n {
            return bad(format!("M = {m} must satisfy 1 <= M < N = {big_n}"));
        }
    }
    if matches!(command, Command::Heun { op: HeunOp::Qes }) && big_n < 2 {
        return bad("qes needs N >= 2".into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub data: Value,
}

impl Report {
    fn new(command: &Command, parameters: BTreeMap<String, String>, checks: Vec<CheckRecord>, data: Value) -> Self {
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            total: checks.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            errors: count(Status::Error),
        };
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            parameters,
            checks,
            summary,
            data,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.command);
        for (k, v) in &self.parameters {
            out += &format!("  {k} = {v}\n");
        }
        for c in &self.checks {
            out += &format!("{:<5} {}\n", c.status.to_string().to_uppercase(), c.name);
            out += &format!("      identity: {}\n", c.identity);
            out += &format!("      expected: {}\n", c.expected);
            out += &format!("      observed: {}\n", c.observed);
        }
        let s = &self.summary;
        out += &format!("{} checks: {} passed, {} failed, {} errors\n", s.total, s.passed, s.failed, s.errors);
        out
    }
}

/// Parameters with defaults filled in.
struct Resolved {
    alpha: Rational,
    beta: Rational,
    big_n: usize,
    taus: Taus,
    seed: u64,
    echo: BTreeMap<String, String>,
}

impl Resolved {
    fn new(p: &Params) -> Self {
        let alpha = p.alpha.clone().unwrap_or_else(|| rat(DEFAULT_ALPHA.0, DEFAULT_ALPHA.1));
        let beta = p.beta.clone().unwrap_or_else(|| rat(DEFAULT_BETA.0, DEFAULT_BETA.1));
        let big_n = p.big_n.unwrap_or(DEFAULT_N);
        let seed = p.seed.unwrap_or(0);
        let sampled = resolved_taus(&VerifyConfig {
            seed,
            ..VerifyConfig::default()
        });
        let taus = Taus::new(
            p.tau0.clone().unwrap_or(sampled.tau0),
            p.tau1.clone().unwrap_or(sampled.tau1),
            p.tau2.clone().unwrap_or(sampled.tau2),
            p.tau3.clone().unwrap_or(sampled.tau3),
            p.tau4.clone().unwrap_or(sampled.tau4),
        );
        let mut echo = BTreeMap::new();
        echo.insert("alpha".into(), format_rational(&alpha));
        echo.insert("beta".into(), format_rational(&beta));
        echo.insert("N".into(), big_n.to_string());
        echo.insert("seed".into(), seed.to_string());
        Resolved {
            alpha,
            beta,
            big_n,
            taus,
            seed,
            echo,
        }
    }

    fn echo_taus(&mut self) {
        let t = &self.taus;
        for (k, v) in [("tau0", &t.tau0), ("tau1", &t.tau1), ("tau2", &t.tau2), ("tau3", &t.tau3), ("tau4", &t.tau4)] {
            self.echo.insert(k.into(), format_rational(v));
        }
    }

    fn echo(&mut self, key: &str, value: impl fmt::Display) {
        self.echo.insert(key.into(), value.to_string());
    }

    fn hahn(&self) -> Result<HahnParams, CliError> {
        HahnParams::new(self.alpha.clone(), self.beta.clone(), self.big_n).map_err(|e| CliError::Parameters(e.to_string()))
    }
}

type Outcome = Result<(String, String), Failure>;

fn record(name: &str, identity: &str, outcome: Outcome) -> CheckRecord {
    CheckRecord::new(name, identity, outcome)
}

fn compare<T: PartialEq + fmt::Display>(expected: &T, observed: &T) -> Outcome {
    if expected == observed {
        Ok((expected.to_string(), observed.to_string()))
    } else {
        Err(Failure::mismatch(expected.to_string(), observed.to_string()))
    }
}

fn compare_rat(expected: &Rational, observed: &Rational) -> Outcome {
    compare(&format_rational(expected), &format_rational(observed))
}

fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(format_rational(r))).collect())
}

fn poly_json(p: &Poly) -> Value {
    Value::Array(p.to_strings().into_iter().map(Value::String).collect())
}

fn matrix_json(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|row| rats(row)).collect())
}

/// Seven parameters from the flags, or the image of `(alpha, beta, tau)`
/// when none is given.
fn heun_params(p: &Params, r: &mut Resolved) -> Result<HeunParams, CliError> {
    let hp = if p.heun_given() {
        let z = || Rational::zero();
        HeunParams {
            kappa: p.kappa.clone().unwrap_or_else(z),
            mu1: p.mu1.clone().unwrap_or_else(z),
            mu0: p.mu0.clone().unwrap_or_else(z),
            nu1: p.nu1.clone().unwrap_or_else(z),
            nu0: p.nu0.clone().unwrap_or_else(z),
            r1: p.r1.clone().unwrap_or_else(z),
            r0: p.r0.clone().unwrap_or_else(z),
        }
    } else {
        r.echo_taus();
        taus_to_heun(&r.taus, &r.hahn()?)
    };
    for (k, v) in HeunParams::NAMES.iter().zip(hp.to_array()) {
        r.echo(k, format_rational(&v));
    }
    Ok(hp)
}

fn run_heun(op: HeunOp, p: &Params, r: &mut Resolved) -> Result<(Vec<CheckRecord>, Value), CliError> {
    let hp = heun_params(p, r)?;
    let big_n = r.big_n;
    let w = build_heun_hahn(&hp, big_n);
    let out = match op {
        HeunOp::Construct => {
            let back = heun_params_from_op(&w, big_n);
            let round_trip = match &back {
                Ok(q) => compare(&hp.to_json().to_string(), &q.to_json().to_string()),
                Err(e) => Err(Failure::from_error("reading the seven parameters", e)),
            };
            let boundary = match w.check_boundary(big_n) {
                Ok(()) => Ok(("no term leaves the grid".into(), "none".into())),
                Err(e) => Err(Failure::mismatch("no term leaves the grid", e.to_string())),
            };
            let checks = vec![
                record("seven-parameter-round-trip", "W(kappa, mu, nu, r) determines its parameters", round_trip),
                record("grid-boundary", "A1(N) = 0 and A2(0) = 0", boundary),
            ];
            (checks, json!({ "heun": hp.to_json(), "operator": w.to_json() }))
        }
        HeunOp::VerifyDegree => {
            let rep = degree_raise_check(&w, big_n);
            let first_bad = rep
                .entries
                .iter()
                .find(|e| e.degree != Some(e.n + 1) || e.predicted.as_ref() != Some(&e.leading));
            let outcome = match first_bad {
                None => Ok(("deg W x^n = n + 1, leading sigma1_n".into(), format!("n = 0..{big_n} all match"))),
                Some(e) => Err(Failure::mismatch(
                    format!("n = {}: degree {}, leading {}", e.n, e.n + 1, e.predicted.as_ref().map_or("?".into(), format_rational)),
                    format!("n = {}: degree {:?}, leading {}", e.n, e.degree, format_rational(&e.leading)),
                )),
            };
            let entries: Vec<Value> = rep
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "n": e.n,
                        "degree": e.degree,
                        "leading": format_rational(&e.leading),
                        "predicted": e.predicted.as_ref().map(format_rational),
                    })
                })
                .collect();
            let checks = vec![record(
                "degree-raising",
                "deg W x^n = n + 1 with leading coefficient sigma1_n",
                outcome,
            )];
            (checks, json!({ "heun": hp.to_json(), "entries": entries }))
        }
        HeunOp::TridiagPochhammer => {
            let basis = PochhammerBasis::new(big_n);
            match pochhammer_tridiag(&w, &basis) {
                Ok(c) => (
                    vec![record(
                        "pochhammer-tridiagonal",
                        "W phi_n = sigma1_n phi_(n+1) + sigma2_n phi_n + sigma3_n phi_(n-1)",
                        Ok(("three bands equal the closed forms".into(), format!("n = 0..={big_n} match"))),
                    )],
                    json!({ "heun": hp.to_json(), "coefficients": c }),
                ),
                Err(e) => (
                    vec![record(
                        "pochhammer-tridiagonal",
                        "W phi_n = sigma1_n phi_(n+1) + sigma2_n phi_n + sigma3_n phi_(n-1)",
                        Err(Failure::mismatch("three bands equal the closed forms", e.to_string())),
                    )],
                    json!({ "heun": hp.to_json() }),
                ),
            }
        }
        HeunOp::Qes => {
            let m = p.m.unwrap_or(1);
            r.echo("M", m);
            match qes_truncate(&hp, big_n, m) {
                Err(e) => (
                    vec![record(
                        "qes-truncation",
                        "sigma1_M = 0",
                        Err(Failure::mismatch("sigma1_M = 0", e.to_string())),
                    )],
                    json!({ "heun": hp.to_json() }),
                ),
                Ok(t) => {
                    let mut checks = vec![record(
                        "qes-truncation",
                        "sigma1_M = 0",
                        Ok(("sigma1_M = 0".into(), format!("sigma1_M = {}", format_rational(&t.sigma1_m)))),
                    )];
                    for (i, psi) in t.kernel_polys.iter().enumerate() {
                        let image = w.apply_poly(psi);
                        checks.push(record(
                            &format!("kernel-{i}"),
                            "W psi = 0",
                            compare(&Poly::zero().to_string(), &image.to_string()),
                        ));
                    }
                    let data = json!({
                        "heun": hp.to_json(),
                        "M": m,
                        "sigma1_M": format_rational(&t.sigma1_m),
                        "sigma1_M_plus_1": format_rational(&t.sigma1_next),
                        "matrix": matrix_json(&t.matrix),
                        "char_poly": poly_json(&t.char_poly),
                        "kernel": matrix_json(&t.kernel),
                        "kernel_polys": t.kernel_polys.iter().map(poly_json).collect::<Vec<_>>(),
                    });
                    (checks, data)
                }
            }
        }
    };
    Ok(out)
}

fn run_hahn(op: HahnOp, p: &Params, r: &mut Resolved) -> Result<(Vec<CheckRecord>, Value), CliError> {
    let h = r.hahn()?;
    let big_n = r.big_n;
    let out = match op {
        HahnOp::Poly => {
            let n = p.n.unwrap_or(big_n.min(3));
            r.echo("n", n);
            let poly = hahn_poly(&h, n).map_err(|e| CliError::Parameters(e.to_string()))?;
            let lam = hahn_eigenvalue(&h, n as i64);
            let image = build_y(&h).apply_poly(&poly);
            let checks = vec![
                record(
                    "monic",
                    "P_n is monic of degree n",
                    compare(&format!("degree {n}, leading 1"), &format!("degree {}, leading {}", poly.degree().map_or(-1, |d| d as i64), format_rational(&poly.leading_coeff()))),
                ),
                record(
                    "eigenvalue",
                    "Y P_n = n (n + alpha + beta + 1) P_n",
                    compare(&poly.scale(&lam).to_string(), &image.to_string()),
                ),
            ];
            let mut data = json!({ "n": n, "poly": poly_json(&poly), "eigenvalue": format_rational(&lam) });
            if n < big_n {
                let (b, u) = hahn_recurrence(&h, n).map_err(|e| CliError::Parameters(e.to_string()))?;
                data["recurrence"] = json!({ "b": format_rational(&b), "u": format_rational(&u) });
            }
            (checks, data)
        }
        HahnOp::VerifyEigen => {
            let basis = HahnBasis::new(&h).map_err(|e| CliError::Parameters(e.to_string()))?;
            let checks = (0..=big_n)
                .map(|n| {
                    let res = eigen_residual(&h, &basis, n);
                    record(&format!("eigen-{n}"), "Y P_n - n (n + alpha + beta + 1) P_n = 0", compare(&"0".to_string(), &res.to_string()))
                })
                .collect();
            let eigenvalues: Vec<Rational> = (0..=big_n).map(|n| hahn_eigenvalue(&h, n as i64)).collect();
            (checks, json!({ "eigenvalues": rats(&eigenvalues), "polys": basis.polys().iter().map(poly_json).collect::<Vec<_>>() }))
        }
        HahnOp::Algebra => {
            let rep = verify_hahn_algebra(&h);
            let mut checks = Vec::new();
            match &rep.fitted {
                Ok(fit) => {
                    for (name, value) in rep.expected.iter() {
                        checks.push(record(&format!("constant-{name}"), "fitted Hahn algebra constant", compare_rat(value, &fit.value(name))));
                    }
                }
                Err(e) => checks.push(record("fit", "unique exact fit", Err(Failure::from_error("fit", e)))),
            }
            for (name, ok) in &rep.relations_hold {
                let outcome = if *ok { Ok(("zero residual".into(), "zero residual".into())) } else { Err(Failure::mismatch("zero residual", "nonzero residual")) };
                checks.push(record(&format!("relation-{name}"), "relation holds with the closed-form constants", outcome));
            }
            let fitted = rep.fitted.as_ref().map(|f| f.to_json()).unwrap_or(Value::Null);
            (checks, json!({ "fitted": fitted, "expected": rep.expected.to_json() }))
        }
        HahnOp::Bilinear => {
            r.echo_taus();
            let t = r.taus.clone();
            let (w, hp) = build_bilinear_w(&t, &h).map_err(|e| CliError::Parameters(e.to_string()))?;
            let [a1, a2, a0] = bilinear_coefficients(&t, &h);
            let checks = vec![
                record("coefficient-up", "T+ coefficient equals the explicit cubic", compare(&a1.to_string(), &w.coeff(1).to_string())),
                record("coefficient-down", "T- coefficient equals the explicit cubic", compare(&a2.to_string(), &w.coeff(-1).to_string())),
                record("coefficient-identity", "identity part equals the explicit cubic", compare(&a0.to_string(), &w.coeff(0).to_string())),
                record("kappa", "kappa = tau1 + tau2", compare_rat(&t.kappa(), &hp.kappa)),
            ];
            (checks, json!({ "operator": w.to_json(), "heun": hp.to_json() }))
        }
        HahnOp::Tridiag => {
            r.echo_taus();
            let w = compose_bilinear(&r.taus, &build_x(), &build_y(&h));
            let identity = "W P_n = xi_(n+1) P_(n+1) + eta_n P_n + zeta_n u_n P_(n-1)";
            match hahn_tridiag(&w, &h, &r.taus) {
                Ok(e) => (
                    vec![record("hahn-tridiagonal", identity, Ok(("bands equal xi, eta, zeta u".into(), format!("n = 0..{big_n} match"))))],
                    serde_json::to_value(&e).unwrap_or(Value::Null),
                ),
                Err(e) => (vec![record("hahn-tridiagonal", identity, Err(Failure::mismatch("bands equal xi, eta, zeta u", e.to_string())))], Value::Null),
            }
        }
    };
    Ok(out)
}

fn run_algebra(op: AlgebraOp, p: &Params, r: &mut Resolved) -> Result<(Vec<CheckRecord>, Value), CliError> {
    let h = r.hahn()?;
    r.echo_taus();
    let t = r.taus.clone();
    let y = build_y(&h);
    let w = compose_bilinear(&t, &build_x(), &y);
    let out = match op {
        AlgebraOp::FitYw => match fit_heun_racah(&y, &w) {
            Ok(fit) => (
                vec![
                    record("fit", "unique exact fit with zero residual", Ok(("unique fit".into(), "unique fit".into()))),
                    record("e2", "e2 = 2 (tau1 + tau2)^2", compare_rat(&e2_closed_form(&t), &fit.value("e2"))),
                    record("e1", "e1 closed form", compare_rat(&e1_closed_form(&t, &h), &fit.value("e1"))),
                ],
                json!({ "fitted": fit.to_json() }),
            ),
            Err(e) => (vec![record("fit", "unique exact fit with zero residual", Err(Failure::from_error("fit", e)))], Value::Null),
        },
        AlgebraOp::FitXw => match fit_xw_relations(&build_x(), &w) {
            Ok(fit) => (
                vec![record("fit", "unique exact fit with zero residual", Ok(("unique fit".into(), "unique fit".into())))],
                json!({ "fitted": fit.to_json() }),
            ),
            Err(e) => (vec![record("fit", "unique exact fit with zero residual", Err(Failure::from_error("fit", e)))], Value::Null),
        },
        AlgebraOp::Degenerate => {
            let rep = verify_degeneration(&t, &h);
            let d = rep.degeneration;
            let outcome = compare(&format!("extra terms vanish: {}", d.is_racah), &format!("extra terms vanish: {}", rep.extra_terms_vanish));
            let data = json!({
                "racah": d.is_racah,
                "sign": d.which_sign,
                "extra_terms_vanish": rep.extra_terms_vanish,
                "fitted": rep.fit.as_ref().map(|f| f.to_json()).unwrap_or(Value::Null),
            });
            (
                vec![record("degeneration", "e1 = e2 = 0 iff tau1 + tau2 = 0 and tau4 = +-tau2", outcome)],
                data,
            )
        }
        AlgebraOp::Triple => {
            let gamma = p.gamma.clone().unwrap_or_else(|| rat(1, 2));
            let epsilon = p.epsilon.clone().unwrap_or_else(|| rat(1, 3));
            r.echo("gamma", format_rational(&gamma));
            r.echo("epsilon", format_rational(&epsilon));
            match build_racah_triple(&h, &gamma, &epsilon) {
                Err(e) => (vec![record("triple", "Y + W1 + W2 = 0", Err(Failure::from_error("triple", e)))], Value::Null),
                Ok(triple) => {
                    let mut checks = vec![record("sum", "Y + W1 + W2 = 0", Ok(("0".into(), "0".into())))];
                    let mut fits = serde_json::Map::new();
                    match verify_racah_pairs(&triple) {
                        Err(e) => checks.push(record("pairs", "Racah relations for each pair", Err(Failure::from_error("pairs", e)))),
                        Ok(pairs) => {
                            for pf in pairs {
                                let name = format!("pair-{}-{}", pf.first, pf.second);
                                let outcome = match &pf.fit {
                                    Ok(f) => {
                                        fits.insert(name.clone(), f.to_json());
                                        Ok(("unique fit".into(), "unique fit".into()))
                                    }
                                    Err(e) => Err(Failure::from_error("Racah fit", e)),
                                };
                                checks.push(record(&name, "Racah relations with zero residual", outcome));
                            }
                        }
                    }
                    let data = json!({
                        "Y": triple.y.to_json(),
                        "W1": triple.w1.to_json(),
                        "W2": triple.w2.to_json(),
                        "fits": fits,
                    });
                    (checks, data)
                }
            }
        }
        AlgebraOp::Diffreal => {
            // Jacobi-type first-order parts
            let ap1 = r.alpha.clone() + Rational::one();
            let q1 = Poly::new(vec![Rational::zero(), Rational::one()]);
            let t1 = Poly::new(vec![ap1.clone(), -(ap1 + &r.beta + Rational::one())]);
            r.echo("q1", &q1);
            r.echo("t1", &t1);
            match differential_realization(&q1, &t1, &t) {
                Err(e) => (vec![record("realization", "composed differential operator", Err(Failure::from_error("realization", e)))], Value::Null),
                Ok(d) => {
                    let order = d.w.order().map_or(-1, |o| o as i64);
                    let top = if order == 3 { d.w.coeff(3) } else { d.w.coeff(2) };
                    let checks = vec![
                        record("top-coefficient", "order 2 with x(x-1)(2 tau1 x - tau1 - tau4) when tau2 = -tau1, else -(tau1+tau2) x^2 (x-1)^2 D^3", compare(&d.predicted_top.to_string(), &top.to_string())),
                        record("second-order-shape", "x(x-1) divides the second-order coefficient", compare(&true, &d.second_order_shape)),
                        record("degree-raising", "deg W x^n <= n + 1", compare(&true, &d.degree_check.passed)),
                    ];
                    let coeffs: BTreeMap<String, Value> = d.w.terms().iter().map(|(k, c)| (k.to_string(), poly_json(c))).collect();
                    (checks, json!({ "class": format!("{:?}", d.class), "order": order, "coefficients": coeffs }))
                }
            }
        }
    };
    Ok(out)
}

fn run_gevp(p: &Params, r: &mut Resolved) -> Result<(Vec<CheckRecord>, Value), CliError> {
    let rp = RIIParams::new(r.alpha.clone(), r.beta.clone(), r.big_n).map_err(|e| CliError::Parameters(e.to_string()))?;
    let n_max = p.n_max.unwrap_or(r.big_n.min(5));
    r.echo("n-max", n_max);
    let mut checks = Vec::new();
    let mut per_n = Vec::new();
    for n in 0..=n_max {
        match verify_gevp(&rp, n) {
            Err(e) => checks.push(record(&format!("gevp-{n}"), "(L1 - lambda_n L2) U_n = 0", Err(Failure::from_error(format!("U_{n}"), e)))),
            Ok(c) => {
                let grid_ok = c.grid_residual.iter().all(Zero::is_zero);
                checks.push(record(&format!("gevp-{n}"), "(L1 - lambda_n L2) U_n = 0", compare(&"0".to_string(), &c.residual.to_string())));
                checks.push(record(&format!("gevp-grid-{n}"), "(L1 - lambda_n L2) U_n = 0 at every grid point", compare(&true, &grid_ok)));
                per_n.push(json!({
                    "n": n,
                    "lambda": format_rational(&c.lambda),
                    "poles": rats(&c.poles),
                    "residual_zero": c.residual.is_zero(),
                    "grid_residual": rats(&c.grid_residual),
                }));
            }
        }
    }
    Ok((checks, json!({ "solutions": per_n })))
}

/// Runs a parsed command.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = &cfg.params;
    let mut r = Resolved::new(p);
    let (checks, data) = match cfg.command {
        Command::Heun { op } => run_heun(op, p, &mut r)?,
        Command::Hahn { op } => run_hahn(op, p, &mut r)?,
        Command::Algebra { op } => run_algebra(op, p, &mut r)?,
        Command::Gevp { .. } => run_gevp(p, &mut r)?,
        Command::VerifyAll => {
            let given = [&p.tau0, &p.tau1, &p.tau2, &p.tau3, &p.tau4].iter().any(|v| v.is_some());
            let vc = VerifyConfig {
                seed: r.seed,
                alpha: r.alpha.clone(),
                beta: r.beta.clone(),
                n: r.big_n,
                taus: given.then(|| r.taus.clone()),
                gamma: p.gamma.clone(),
                epsilon: p.epsilon.clone(),
            };
            let rep = match p.mutate {
                Some(m) => run_suites(&vc, Some(m)),
                None => run_verify_all(&vc),
            };
            r.echo.clear();
            r.echo.extend(rep.parameters);
            (rep.checks, Value::Null)
        }
    };
    Ok(Report::new(&cfg.command, r.echo, checks, data))
}

/// Renders a report in the configured format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Text => report.to_text(),
    }
}

/// Entry point: returns the process exit code (0 when every check passed,
/// 1 when a check failed, 2 on a usage or parameter error).
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match parse_config(argv) {
        Ok(cfg) => cfg,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = render(&report, cfg.format);
    let written = match &cfg.output {
        Some(path) => fs::write(path, &text).map_err(|e| CliError::Io(path.clone(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e)),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if report.passed() {
        0
    } else {
        1
    }
}
