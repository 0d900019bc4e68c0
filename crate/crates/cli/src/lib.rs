//! Command-line front end: `compute`, `verify`, `sweep` and `validate-fn`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use affsurf_core::bodies::BodySpec;
use affsurf_core::functionals::validate_class;
use affsurf_core::verify::{run_suite, Suite, SuiteConfig};
use affsurf_core::{ConvexBody, Engine, Error, ExtReal, Functional, RuleKind, ScalarFunction, SphereRule};
use clap::{Parser, ValueEnum};
use serde::Serialize;

pub mod exit {
    pub const OK: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const BAD_BODY: u8 = 3;
    pub const NUMERIC: u8 = 4;
    pub const UNSUPPORTED: u8 = 5;
    pub const IO: u8 = 6;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Compute,
    Verify,
    Sweep,
    ValidateFn,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum QuadKind {
    #[default]
    Auto,
    Trapezoid,
    Gauss,
    Lds,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    #[default]
    Boundary,
    Sphere,
}

#[derive(Parser, Debug)]
#[command(name = "affsurf", version, about = "Affine surface areas of convex bodies")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Body JSON file; repeat for several bodies.
    #[arg(long = "body")]
    bodies: Vec<PathBuf>,
    /// Functional: phi:power:a=A, phi:log1p, phi:mincap, psi:power:c=C,
    /// psi:expinv, psistar:power:c=C, psistar:expinv, lp:p=P.
    #[arg(long = "fn")]
    functional: Option<String>,
    #[arg(long)]
    quad_level: Option<u32>,
    #[arg(long, value_enum, default_value_t)]
    quad_kind: QuadKind,
    #[arg(long, value_enum, default_value_t)]
    engine: EngineArg,
    /// Seed for randomised rules, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed, default_value = "0x5EED")]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = "all")]
    suite: String,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// A validated invocation.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub bodies: Vec<(PathBuf, ConvexBody)>,
    pub fn_spec: String,
    pub functional: Option<Functional>,
    pub scalar: Option<ScalarFunction>,
    pub quad_level: Option<u32>,
    pub quad_kind: QuadKind,
    pub engine: Engine,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: Option<f64>,
    pub suite: Suite,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: exit::USAGE, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::UndefinedP(_) | Error::ClassMismatch(_) | Error::QuadratureLevel { .. } => {
                exit::USAGE
            }
            Error::InvalidBody(_)
            | Error::DimensionMismatch { .. }
            | Error::NonUnitDirection { .. }
            | Error::CapCover(_)
            | Error::NonConvex { .. } => exit::BAD_BODY,
            Error::Unsupported { .. } => exit::UNSUPPORTED,
            _ => exit::NUMERIC,
        };
        Self { code, message: e.to_string() }
    }
}

fn number(key: &str, s: &str) -> Result<f64, Error> {
    let v = s
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| Error::Parse(format!("expected {key}=<number>, got {s:?}")))?;
    let x: f64 = v.parse().map_err(|_| Error::Parse(format!("{v:?} is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse(format!("{v:?} is not finite")))
    }
}

/// Parses the functional mini-syntax.
pub fn parse_functional(s: &str) -> Result<Functional, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let scalar = |form: &[&str], conc: bool| -> Result<ScalarFunction, Error> {
        match (conc, form) {
            (true, ["power", a]) => ScalarFunction::power_conc(number("a", a)?),
            (true, ["log1p"]) => Ok(ScalarFunction::log1p()),
            (true, ["mincap"]) => Ok(ScalarFunction::min_cap()),
            (false, ["power", c]) => ScalarFunction::power_conv(number("c", c)?),
            (false, ["expinv"]) => Ok(ScalarFunction::exp_inv()),
            _ => Err(Error::Parse(format!("unknown function form in {s:?}"))),
        }
    };
    match parts.as_slice() {
        ["phi", rest @ ..] => Ok(Functional::Phi(scalar(rest, true)?)),
        ["psi", rest @ ..] => Ok(Functional::Psi(scalar(rest, false)?)),
        ["psistar", rest @ ..] => Ok(Functional::PsiStar(scalar(rest, false)?)),
        ["lp", p] => {
            let p = number("p", p)?;
            if p == 0.0 {
                return Err(Error::UndefinedP(p));
            }
            Ok(Functional::Lp(p))
        }
        _ => Err(Error::Parse(format!("functional {s:?} does not match phi:|psi:|psistar:|lp:p="))),
    }
}

fn bad_flag(flag: &str, e: Error) -> CliError {
    let mut err = CliError::from(e);
    err.message = format!("{flag}: {}", err.message);
    err
}

/// Parses and validates the token list (without the program name).
pub fn parse_specs<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let tokens = std::iter::once(std::ffi::OsString::from("affsurf")).chain(args.into_iter().map(Into::into));
    let a = Args::try_parse_from(tokens).map_err(|e| CliError::usage(e.to_string()))?;

    let suite: Suite = a.suite.parse().map_err(|e| bad_flag("--suite", e))?;
    if let Some(level) = a.quad_level {
        if level < 3 {
            return Err(CliError::usage(format!("--quad-level: {level} is below the minimum 3")));
        }
    }
    if let Some(tol) = a.tol {
        if !(tol > 0.0 && tol < 0.1) {
            return Err(CliError::usage(format!("--tol: {tol} is outside (0, 0.1)")));
        }
    }

    let fn_spec = a.functional.clone().unwrap_or_else(|| match a.command {
        Command::ValidateFn => "phi:power:a=0.5".to_string(),
        _ => "lp:p=1".to_string(),
    });
    let mut functional = None;
    let mut scalar = None;
    if a.command == Command::ValidateFn {
        scalar = Some(parse_scalar(&fn_spec).map_err(|e| bad_flag("--fn", e))?);
    } else if a.command != Command::Sweep {
        functional = Some(parse_functional(&fn_spec).map_err(|e| bad_flag("--fn", e))?);
    }

    let needs_body = a.command != Command::ValidateFn;
    if needs_body && a.bodies.is_empty() {
        return Err(CliError::usage("--body: at least one body file is required"));
    }
    let mut bodies = Vec::new();
    for path in &a.bodies {
        let body = BodySpec::load(path)
            .and_then(|s| s.build())
            .map_err(|e| bad_flag(&format!("--body {}", path.display()), e))?;
        if let Some(Functional::Lp(p)) = &functional {
            if *p == -(body.dim() as f64) {
                return Err(bad_flag("--fn", Error::UndefinedP(*p)));
            }
        }
        bodies.push((path.clone(), body));
    }

    Ok(RunConfig {
        command: a.command,
        bodies,
        fn_spec,
        functional,
        scalar,
        quad_level: a.quad_level,
        quad_kind: a.quad_kind,
        engine: match a.engine {
            EngineArg::Boundary => Engine::Boundary,
            EngineArg::Sphere => Engine::Sphere,
        },
        seed: a.seed,
        out: a.out,
        format: a.format,
        tol: a.tol,
        suite,
    })
}

fn parse_scalar(s: &str) -> Result<ScalarFunction, Error> {
    match parse_functional(s)? {
        Functional::Phi(f) | Functional::Psi(f) | Functional::PsiStar(f) => Ok(f),
        Functional::Lp(_) => Err(Error::Parse("validate-fn needs a phi:, psi: or psistar: function".into())),
    }
}

impl RunConfig {
    fn rule_kind(&self, n: usize) -> RuleKind {
        match self.quad_kind {
            QuadKind::Auto => RuleKind::default_for(n),
            QuadKind::Trapezoid => RuleKind::Trapezoid,
            QuadKind::Gauss => RuleKind::Gauss,
            QuadKind::Lds => RuleKind::Lds,
        }
    }

    fn level(&self, n: usize) -> Result<u32, Error> {
        match self.quad_level {
            Some(l) => Ok(l),
            None => Ok(SphereRule::default_for(n)?.level),
        }
    }

    fn rule(&self, n: usize, level: u32) -> Result<SphereRule, Error> {
        SphereRule::build_with(n, level, self.rule_kind(n), self.seed)
    }
}

#[derive(Serialize)]
struct ComputeRecord {
    body: String,
    functional: String,
    value: ExtReal,
    engine: &'static str,
    quad_level: u32,
    converged: bool,
    relative_delta: Option<f64>,
}

#[derive(Serialize)]
struct SweepRow {
    p: f64,
    value: ExtReal,
    is_infinite: bool,
    homogeneity_degree: f64,
}

/// Default sweep grid: 13 points in `[-6,-2.5] ∪ [-1.5,-0.5] ∪ [0.5,6]`
/// for `n = 2`, scaled by `n/2` otherwise.
pub fn sweep_grid(n: usize) -> Vec<f64> {
    let base = [-6.0, -4.5, -3.5, -2.5, -1.5, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0];
    base.iter().map(|p| p * n as f64 / 2.0).collect()
}

fn fmt_ext(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(x) => format!("{x}"),
        ExtReal::PlusInfinity => "inf".into(),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError {
            code: exit::IO,
            message: format!("--out {}: {e}", path.display()),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError { code: exit::IO, message: e.to_string() })
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn compute(cfg: &RunConfig) -> Result<u8, CliError> {
    let f = cfg.functional.as_ref().expect("parsed");
    let tol = cfg.tol.unwrap_or(1e-6);
    let mut records = Vec::new();
    for (path, k) in &cfg.bodies {
        let n = k.dim();
        let level = cfg.level(n)?;
        let v = f.evaluate(k, &cfg.rule(n, level)?, cfg.engine)?;
        let w = f.evaluate(k, &cfg.rule(n, level + 1)?, cfg.engine)?;
        let delta = match (v, w) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => Some(if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) }),
            _ => None,
        };
        let converged = match delta {
            Some(d) => d <= tol,
            None => v.is_infinite() && w.is_infinite(),
        };
        records.push(ComputeRecord {
            body: path.display().to_string(),
            functional: cfg.fn_spec.clone(),
            value: v,
            engine: match cfg.engine {
                Engine::Boundary => "boundary",
                Engine::Sphere => "sphere",
            },
            quad_level: level,
            converged,
            relative_delta: delta,
        });
    }
    let text = match cfg.format {
        Format::Json if records.len() == 1 => to_json(&records[0]),
        Format::Json => to_json(&records),
        Format::Csv => {
            let mut s = String::from("body,value,is_infinite,quad_level,converged\n");
            for r in &records {
                let _ = writeln!(s, "{},{},{},{},{}", r.body, fmt_ext(r.value), r.value.is_infinite(), r.quad_level, r.converged);
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for r in &records {
                let _ = writeln!(
                    s,
                    "{:<24} {:<16} {:>22} level {:>3}  {}",
                    r.body,
                    r.functional,
                    fmt_ext(r.value),
                    r.quad_level,
                    if r.converged { "converged" } else { "not converged" }
                );
            }
            s
        }
    };
    emit(cfg, &text)?;
    Ok(exit::OK)
}

fn sweep(cfg: &RunConfig) -> Result<u8, CliError> {
    let mut text = String::new();
    let mut all_rows = Vec::new();
    for (_, k) in &cfg.bodies {
        let n = k.dim();
        let rule = cfg.rule(n, cfg.level(n)?)?;
        for p in sweep_grid(n) {
            let f = Functional::Lp(p);
            let value = f.evaluate(k, &rule, cfg.engine)?;
            all_rows.push(SweepRow {
                p,
                value,
                is_infinite: value.is_infinite(),
                homogeneity_degree: f.scaling_degree(n).expect("power form"),
            });
        }
    }
    match cfg.format {
        Format::Json => text = to_json(&all_rows),
        Format::Csv | Format::Table => {
            text.push_str("p,value,is_infinite,homogeneity_degree\n");
            for r in &all_rows {
                let _ = writeln!(text, "{},{},{},{}", r.p, fmt_ext(r.value), r.is_infinite, r.homogeneity_degree);
            }
        }
    }
    emit(cfg, &text)?;
    Ok(exit::OK)
}

fn verify(cfg: &RunConfig) -> Result<u8, CliError> {
    let mut reports = Vec::new();
    for (_, k) in &cfg.bodies {
        let n = k.dim();
        let sc = SuiteConfig {
            functional: cfg.functional.clone().expect("parsed"),
            level: cfg.level(n)?,
            kind: Some(cfg.rule_kind(n)),
            seed: cfg.seed,
            tol: cfg.tol,
        };
        reports.extend(run_suite(k, cfg.suite, &sc)?);
    }
    let json = to_json(&reports);
    if let Some(path) = &cfg.out {
        fs::write(path, &json).map_err(|e| CliError { code: exit::IO, message: format!("--out {}: {e}", path.display()) })?;
    }
    let mut stdout = std::io::stdout().lock();
    match cfg.format {
        Format::Json if cfg.out.is_none() => {
            let _ = stdout.write_all(json.as_bytes());
        }
        _ => {
            for r in &reports {
                let _ = writeln!(
                    stdout,
                    "{:<16} {:<12} lhs {:>20} rhs {:>20} tol {:e}",
                    r.check,
                    r.status.to_string(),
                    fmt_ext(r.lhs),
                    fmt_ext(r.rhs),
                    r.tolerance
                );
            }
        }
    }
    let failing: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.check.as_str()).collect();
    if failing.is_empty() {
        Ok(exit::OK)
    } else {
        eprintln!("failing checks: {}", failing.join(", "));
        Ok(exit::CHECK_FAILED)
    }
}

fn validate(cfg: &RunConfig) -> Result<u8, CliError> {
    let report = validate_class(cfg.scalar.as_ref().expect("parsed"));
    let text = match cfg.format {
        Format::Json => to_json(&report),
        _ => {
            let mut s = format!("{} {:?}: {}\n", report.function, report.class, if report.pass { "pass" } else { "fail" });
            for f in &report.failures {
                let _ = writeln!(s, "  {f}");
            }
            s
        }
    };
    emit(cfg, &text)?;
    Ok(if report.pass { exit::OK } else { exit::CHECK_FAILED })
}

/// Executes the command and returns the process exit status.
pub fn run(cfg: &RunConfig) -> Result<u8, CliError> {
    match cfg.command {
        Command::Compute => compute(cfg),
        Command::Verify => verify(cfg),
        Command::Sweep => sweep(cfg),
        Command::ValidateFn => validate(cfg),
    }
}
