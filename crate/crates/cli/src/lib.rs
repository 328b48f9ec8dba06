//! The `dilemma` command line. Every command writes its report to `out`,
//! diagnostics to `err`, and returns the process exit code.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use dilemma_core::corpus::{self, verify_golden, CorpusError, DilemmaSuite, DILEMMAS};
use dilemma_core::dsl::{parse_bytes, serialize};
use dilemma_core::rational::parse_rational;
use dilemma_core::theories::{
    cdt_best_response, cdt_ratify, cdt_ratify_support, point_mass, Distribution, TheoryError,
};
use dilemma_core::{evaluate, Model, Rational, Theory};

pub mod report;

use report::{GoldenSummary, RunReport, TraceReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_THEORY: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "dilemma",
    version,
    about = "Exact EDT, CDT and FDT on Newcomblike dilemmas"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryArg {
    Edt,
    Cdt,
    Fdt,
    All,
}

impl TheoryArg {
    fn theories(self) -> Vec<Theory> {
        match self {
            TheoryArg::Edt => vec![Theory::Edt],
            TheoryArg::Cdt => vec![Theory::Cdt],
            TheoryArg::Fdt => vec![Theory::Fdt],
            TheoryArg::All => Theory::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one or all theories on a dilemma.
    Run {
        /// Built-in dilemma name or path to a `.dlm` file.
        dilemma: String,
        #[arg(long, value_enum, default_value = "all")]
        theory: TheoryArg,
        /// Observed value of the observation node.
        #[arg(long)]
        obs: Option<String>,
        /// Parameter override `name=value` (built-in dilemmas only).
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Check the golden tables of the corpus.
    Golden {
        /// Restrict to one dilemma.
        filter: Option<String>,
        /// Parameter override `name=value`; needs a filter.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Replace a suite model with a `.dlm` file, `label=path`; needs a filter.
        #[arg(long = "model", value_name = "LABEL=PATH")]
        models: Vec<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Iterate CDT best responses to its own self-prediction.
    Trace {
        dilemma: String,
        /// Start from the point mass on this action (default: the first action).
        #[arg(long, conflicts_with = "prior")]
        start: Option<String>,
        /// Start from a mixed prior `a=p,b=q`.
        #[arg(long)]
        prior: Option<String>,
        #[arg(long, default_value_t = 20)]
        budget: usize,
        /// Also solve for the ratifiable self-prediction.
        #[arg(long)]
        ratify: bool,
        /// Ratify on the support `a,b` instead of the whole two-action domain.
        #[arg(long, requires = "ratify", value_name = "A,B")]
        support: Option<String>,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Print a `.dlm` file in canonical form.
    Fmt {
        path: PathBuf,
        /// Rewrite the file in place.
        #[arg(long, conflicts_with = "check")]
        write: bool,
        /// Exit 1 if the file is not canonical.
        #[arg(long)]
        check: bool,
    },
}

/// A failure carrying its exit code and one-line diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        let code = match e {
            CorpusError::Invalid(_) => EXIT_INVALID,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<TheoryError> for Failure {
    fn from(e: TheoryError) -> Self {
        Failure::new(EXIT_THEORY, e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command, out, err),
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            code
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match command {
        Command::Run {
            dilemma,
            theory,
            obs,
            params,
            format,
        } => cmd_run(&dilemma, theory, obs.as_deref(), &params, format, out, err),
        Command::Golden {
            filter,
            params,
            models,
            format,
        } => cmd_golden(filter.as_deref(), &params, &models, format, out),
        Command::Trace {
            dilemma,
            start,
            prior,
            budget,
            ratify,
            support,
            params,
            format,
        } => {
            let options = TraceOptions {
                start,
                prior,
                budget,
                ratify,
                support,
            };
            cmd_trace(&dilemma, &options, &params, format, out)
        }
        Command::Fmt { path, write, check } => cmd_fmt(&path, write, check, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// `name=value` pairs; flags also accept `true` and `false`.
pub fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, Rational>, Failure> {
    let mut out = BTreeMap::new();
    for pair in pairs {
        let (k, v) = pair.split_once('=').ok_or_else(|| {
            Failure::new(
                EXIT_USAGE,
                format!("parameter `{pair}` is not of the form name=value"),
            )
        })?;
        let value = match v.trim() {
            "true" => Rational::from_integer(1.into()),
            "false" => Rational::from_integer(0.into()),
            text => parse_rational(text)
                .map_err(|e| Failure::new(EXIT_USAGE, format!("parameter `{k}`: {e}")))?,
        };
        if out.insert(k.trim().to_string(), value).is_some() {
            return Err(Failure::new(
                EXIT_USAGE,
                format!("parameter `{k}` given twice"),
            ));
        }
    }
    Ok(out)
}

/// A dilemma resolved either from the corpus or from a file.
enum Source {
    Corpus(DilemmaSuite),
    File { path: String, model: Model },
}

impl Source {
    fn name(&self) -> String {
        match self {
            Source::Corpus(s) => s.name.clone(),
            Source::File { model, .. } => model.name().to_string(),
        }
    }

    /// The model a theory's agent uses, and its label.
    fn model_for(&self, theory: Theory) -> Result<(String, &Model), Failure> {
        match self {
            Source::Corpus(s) => s
                .model_for(theory)
                .map(|m| (theory.as_str().to_string(), m))
                .ok_or_else(|| {
                    Failure::new(EXIT_USAGE, format!("`{}` has no {theory} model", s.name))
                }),
            Source::File { path, model } => Ok((path.clone(), model)),
        }
    }
}

fn looks_like_path(s: &str) -> bool {
    s.ends_with(".dlm") || s.contains('/') || s.contains(std::path::MAIN_SEPARATOR)
}

fn read_model(path: &Path) -> Result<Model, Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read `{}`: {e}", path.display())))?;
    parse_bytes(&bytes).map_err(|errs| {
        let lines: Vec<String> = errs
            .errors()
            .iter()
            .map(|e| format!("{}:{e}", path.display()))
            .collect();
        Failure::new(EXIT_INVALID, lines.join("\n"))
    })
}

fn resolve(dilemma: &str, params: &[String]) -> Result<Source, Failure> {
    let overrides = parse_params(params)?;
    if DILEMMAS.contains(&dilemma) || !looks_like_path(dilemma) {
        return Ok(Source::Corpus(corpus::load(dilemma, &overrides)?));
    }
    if !overrides.is_empty() {
        return Err(Failure::new(
            EXIT_USAGE,
            "parameters apply only to built-in dilemmas",
        ));
    }
    let model = read_model(Path::new(dilemma))?;
    Ok(Source::File {
        path: dilemma.to_string(),
        model,
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot write output: {e}")))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn cmd_run(
    dilemma: &str,
    theory: TheoryArg,
    obs: Option<&str>,
    params: &[String],
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let source = resolve(dilemma, params)?;
    let mut reports = Vec::new();
    let mut code = EXIT_OK;
    for t in theory.theories() {
        let (label, model) = source.model_for(t)?;
        let started = Instant::now();
        match evaluate(model, t, obs) {
            Ok(p) => {
                let elapsed = started.elapsed().as_micros() as u64;
                reports.push(RunReport::new(&source.name(), &label, &p, elapsed));
            }
            Err(e) => {
                let _ = writeln!(err, "error: {t}: {e}");
                code = EXIT_THEORY;
            }
        }
    }
    let text = match format {
        Format::Json => json(&reports),
        Format::Table => reports
            .iter()
            .map(RunReport::table)
            .collect::<Vec<_>>()
            .join("\n"),
    };
    emit(out, &text)?;
    Ok(code)
}

/// Loads the suites `golden` would check.
pub fn golden_suites(
    filter: Option<&str>,
    params: &[String],
    models: &[String],
) -> Result<Vec<DilemmaSuite>, Failure> {
    let overrides = parse_params(params)?;
    let Some(name) = filter else {
        if !overrides.is_empty() || !models.is_empty() {
            return Err(Failure::new(
                EXIT_USAGE,
                "--param and --model need a dilemma filter",
            ));
        }
        return DILEMMAS
            .iter()
            .map(|n| corpus::load_default(n).map_err(Failure::from))
            .collect();
    };
    let mut suite = corpus::load(name, &overrides)?;
    for spec in models {
        let (label, path) = spec.split_once('=').ok_or_else(|| {
            Failure::new(
                EXIT_USAGE,
                format!("model `{spec}` is not of the form label=path"),
            )
        })?;
        let model = read_model(Path::new(path))?;
        suite = suite.with_model(label, model).ok_or_else(|| {
            Failure::new(
                EXIT_USAGE,
                format!("`{name}` has no model labelled `{label}`"),
            )
        })?;
    }
    Ok(vec![suite])
}

/// Verifies `suites`, writes the report, and returns 0 iff every entry passes.
pub fn golden(
    suites: &[DilemmaSuite],
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let reports: Vec<_> = suites.iter().map(|s| (s, verify_golden(s))).collect();
    let summary = GoldenSummary::new(&reports);
    let text = match format {
        Format::Json => json(&summary),
        Format::Table => summary.table(),
    };
    emit(out, &text)?;
    Ok(if summary.failed == 0 {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

pub fn cmd_golden(
    filter: Option<&str>,
    params: &[String],
    models: &[String],
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let suites = golden_suites(filter, params, models)?;
    golden(&suites, format, out)
}

#[derive(Debug, Clone, Default)]
pub struct TraceOptions {
    pub start: Option<String>,
    pub prior: Option<String>,
    pub budget: usize,
    pub ratify: bool,
    pub support: Option<String>,
}

fn parse_prior(text: &str) -> Result<Distribution, Failure> {
    text.split(',')
        .map(|part| {
            let (a, p) = part.split_once('=').ok_or_else(|| {
                Failure::new(
                    EXIT_USAGE,
                    format!("prior entry `{part}` is not of the form action=p"),
                )
            })?;
            let p = parse_rational(p.trim())
                .map_err(|e| Failure::new(EXIT_USAGE, format!("prior of `{a}`: {e}")))?;
            Ok((a.trim().to_string(), p))
        })
        .collect()
}

pub fn cmd_trace(
    dilemma: &str,
    options: &TraceOptions,
    params: &[String],
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let source = resolve(dilemma, params)?;
    let (label, model) = source.model_for(Theory::Cdt)?;
    let initial = match (&options.start, &options.prior) {
        (_, Some(p)) => parse_prior(p)?,
        (Some(a), None) => {
            if !model.actions().contains(a) {
                return Err(TheoryError::UnknownAction(a.clone()).into());
            }
            point_mass(model, a)
        }
        (None, None) => point_mass(model, &model.actions()[0]),
    };
    let trace = cdt_best_response(model, &initial, options.budget)?;
    let ratification = if options.ratify {
        Some(match &options.support {
            Some(s) => {
                let (a, b) = s.split_once(',').ok_or_else(|| {
                    Failure::new(EXIT_USAGE, format!("support `{s}` is not of the form a,b"))
                })?;
                cdt_ratify_support(model, a.trim(), b.trim())?
            }
            None => cdt_ratify(model)?,
        })
    } else {
        None
    };
    let report = TraceReport::new(&source.name(), &label, &trace, ratification.as_ref());
    let text = match format {
        Format::Json => json(&report),
        Format::Table => report.table(),
    };
    emit(out, &text)?;
    Ok(EXIT_OK)
}

pub fn cmd_fmt(
    path: &Path,
    write: bool,
    check: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let text = serialize(&read_model(path)?);
    if check {
        let current = fs::read(path).unwrap_or_default();
        if current == text.as_bytes() {
            return Ok(EXIT_OK);
        }
        let _ = writeln!(err, "{}: not in canonical form", path.display());
        return Ok(EXIT_MISMATCH);
    }
    if write {
        fs::write(path, &text).map_err(|e| {
            Failure::new(
                EXIT_USAGE,
                format!("cannot write `{}`: {e}", path.display()),
            )
        })?;
        return Ok(EXIT_OK);
    }
    emit(out, &text)?;
    Ok(EXIT_OK)
}
