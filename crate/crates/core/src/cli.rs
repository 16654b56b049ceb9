//! Command-line front end.
//!
//! Exit codes: 0 success, 1 counterexample (`verify`) or horizon
//! insufficient (`ramsey`), 2 any error.

use std::collections::HashSet;
use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::coloring::{
    build_context, ColoringError, ConstantColoring, FactorColoring, FirstLetterColoring, RecurrenceConstant,
};
use crate::par::Parallelism;
use crate::report::{
    self, AuditReport, ColorReport, CounterexampleReport, EstimateKReport, EstimateReport, GenReport, KSource,
    PrefixColor, RamseyReport, ReturnsReport, Status, Timing, VerifyReport,
};
use crate::returns::{estimate_k, prefix_return_system, KEstimate, ReturnError};
use crate::specfile::{read_spec, SpecError, WordSpec};
use crate::verifier::{
    audit_recurrence, check_theorem, find_ramsey_tail, verify_strongly_monochromatic, CheckOptions, VerificationReport,
    VerifyError,
};
use crate::word::{prefix, PrefixBuffer, WordError, WordSource};

/// Longest factor sampled when estimating K.
pub const DEFAULT_SAMPLE_LEN: usize = 20;
/// Buffer length used when estimating K.
pub const DEFAULT_ESTIMATE_BUFFER: usize = 8192;
/// Longest factor and prefix covered by the recurrence audit.
pub const AUDIT_MAX_LEN: usize = 20;
/// Smallest buffer the audit runs on, so that return systems of the audited
/// prefixes are stable.
pub const AUDIT_BUFFER: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "lrwords", version, about = "Return words and factor colorings of linearly recurrent words")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the length-n prefix.
    Gen(RunArgs),
    /// Print the return system of the length-n prefix.
    Returns(RunArgs),
    /// Estimate the linear-recurrence constant from factors of length <= n.
    EstimateK(RunArgs),
    /// Print the theorem coloring of every prefix of length <= n.
    Color(RunArgs),
    /// Search every prefix up to n for a monochromatic monotone factorization.
    Verify(RunArgs),
    /// Search for a strongly monochromatic tail with t blocks within n symbols.
    Ramsey(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColoringKind {
    Theorem,
    FirstLetter,
    /// Negative control: every factor gets the same color.
    Constant,
}

impl ColoringKind {
    fn name(self) -> &'static str {
        match self {
            ColoringKind::Theorem => "theorem",
            ColoringKind::FirstLetter => "first-letter",
            ColoringKind::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Word specification file.
    #[arg(long)]
    pub spec: PathBuf,
    /// Length: prefix (gen), base (returns), sample bound (estimate-k), horizon (color, verify, ramsey).
    #[arg(long)]
    pub n: Option<usize>,
    /// Factorization length, K+1 by default.
    #[arg(long)]
    pub h: Option<usize>,
    /// Recurrence constant, estimated when absent.
    #[arg(long)]
    pub k: Option<usize>,
    /// Buffer length for returns and estimate-k.
    #[arg(long)]
    pub window: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, value_enum)]
    pub coloring: Option<ColoringKind>,
    /// Fan the search out over threads.
    #[arg(long)]
    pub parallel: bool,
    /// Number of blocks (ramsey).
    #[arg(long)]
    pub t: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Return(#[from] ReturnError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

/// Report text and exit code of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, exit_code: 0 }
    }
}

struct Loaded {
    word_id: String,
    source: WordSource,
}

fn load(args: &RunArgs) -> Result<Loaded, CliError> {
    let WordSpec { id, source } = read_spec(&args.spec)?;
    Ok(Loaded { word_id: id.unwrap_or_default(), source })
}

/// Prefix of length `n`, or the whole word when a literal is shorter.
fn materialize(source: &WordSource, n: usize) -> Result<PrefixBuffer, WordError> {
    prefix(source, source.max_len().map_or(n, |max| max.min(n)))
}

fn timing(started: Instant) -> Timing {
    Timing { elapsed_ms: started.elapsed().as_millis() as u64 }
}

fn render<T: serde::Serialize>(format: Format, report: &T, text: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Text => text(report),
        Format::Machine => report::to_machine(report),
    }
}

fn estimate(source: &WordSource, mode: Parallelism) -> Result<KEstimate, CliError> {
    let buffer = materialize(source, DEFAULT_ESTIMATE_BUFFER)?;
    Ok(estimate_k(buffer.as_slice(), DEFAULT_SAMPLE_LEN, mode)?)
}

fn resolve_k(
    args: &RunArgs,
    source: &WordSource,
    mode: Parallelism,
) -> Result<(RecurrenceConstant, Option<KEstimate>), CliError> {
    match args.k {
        Some(k) => Ok((RecurrenceConstant::new(k)?, None)),
        None => {
            let est = estimate(source, mode)?;
            Ok((RecurrenceConstant::new(est.k_hat)?, Some(est)))
        }
    }
}

pub fn cmd_gen(args: &RunArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let loaded = load(args)?;
    let n = args.n.ok_or_else(|| CliError::Usage("gen needs --n".into()))?;
    let buffer = prefix(&loaded.source, n)?;
    let alphabet = loaded.source.alphabet();
    let report = GenReport {
        timing: timing(started),
        command: "gen",
        word_id: loaded.word_id,
        alphabet: alphabet.names().to_vec(),
        n,
        word: buffer.render(),
    };
    Ok(Outcome::ok(render(args.format, &report, |r| {
        if r.n == 0 {
            String::new()
        } else {
            format!("# alphabet: {}\n{}\n", r.alphabet.join(" "), r.word)
        }
    })))
}

pub fn cmd_returns(args: &RunArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let loaded = load(args)?;
    let base_len = args.n.unwrap_or(1);
    let buffer = materialize(&loaded.source, args.window.unwrap_or(4096))?;
    let system = prefix_return_system(buffer.as_slice(), base_len, buffer.len())?;
    let report = ReturnsReport::new(loaded.word_id, &system, loaded.source.alphabet(), timing(started));
    Ok(Outcome::ok(render(args.format, &report, report::returns_text)))
}

pub fn cmd_estimate_k(args: &RunArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let loaded = load(args)?;
    let max_base_len = args.n.unwrap_or(DEFAULT_SAMPLE_LEN);
    let buffer = materialize(&loaded.source, args.window.unwrap_or(DEFAULT_ESTIMATE_BUFFER))?;
    let est = estimate_k(buffer.as_slice(), max_base_len, Parallelism::from_flag(args.parallel))?;
    let report = EstimateKReport {
        timing: timing(started),
        command: "estimate-k",
        word_id: loaded.word_id,
        max_base_len,
        buffer_len: buffer.len(),
        estimate: EstimateReport::new(&est, loaded.source.alphabet()),
    };
    Ok(Outcome::ok(render(args.format, &report, report::estimate_text)))
}

pub fn cmd_color(args: &RunArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let loaded = load(args)?;
    let mode = Parallelism::from_flag(args.parallel);
    let (k, _) = resolve_k(args, &loaded.source, mode)?;
    let n = args.n.unwrap_or(50);
    let buffer = materialize(&loaded.source, (k.get() + 2) * n)?;
    let ctx = build_context(&buffer, k, n)?;
    let prefixes: Vec<PrefixColor> =
        (1..=n).map(|len| PrefixColor { len, color: ctx.prefix_color(len).to_string() }).collect();
    let distinct = prefixes.iter().map(|p| p.color.as_str()).collect::<HashSet<_>>().len();
    let report = ColorReport {
        timing: timing(started),
        command: "color",
        word_id: loaded.word_id,
        k: k.get(),
        n,
        levels: ctx.levels().iter().map(|l| l.base().len()).collect(),
        level0_codes: ctx.level0_codes(),
        distinct_prefix_colors: distinct,
        prefixes,
    };
    Ok(Outcome::ok(render(args.format, &report, report::color_text)))
}

fn run_check<C: FactorColoring>(
    coloring: &C,
    n: usize,
    h: usize,
    mode: Parallelism,
) -> Result<VerificationReport, CliError> {
    Ok(check_theorem(coloring, n, h, CheckOptions { parallelism: mode, ..CheckOptions::default() })?)
}

pub fn cmd_verify(args: &RunArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let loaded = load(args)?;
    let mode = Parallelism::from_flag(args.parallel);
    let (k, est) = resolve_k(args, &loaded.source, mode)?;
    let n = args.n.unwrap_or(200);
    let h = args.h.unwrap_or(k.get() + 1);
    if h == 0 || n < h {
        return Err(CliError::Usage(format!("need N >= h >= 1, got N = {n}, h = {h}")));
    }
    let kind = args.coloring.unwrap_or(ColoringKind::Theorem);
    let audit_len = AUDIT_BUFFER.max((k.get() + 1) * AUDIT_MAX_LEN);
    let buffer_len = match kind {
        ColoringKind::Theorem => (k.get() + 2) * n,
        _ => n,
    };
    let buffer = materialize(&loaded.source, buffer_len.max(audit_len))?;

    let (result, level0_codes) = match kind {
        ColoringKind::Theorem => {
            let ctx = build_context(&buffer, k, n)?;
            (run_check(&ctx, n, h, mode)?, Some(ctx.level0_codes()))
        }
        ColoringKind::FirstLetter => (run_check(&FirstLetterColoring::new(&buffer), n, h, mode)?, None),
        ColoringKind::Constant => (run_check(&ConstantColoring::new(buffer.as_slice()), n, h, mode)?, None),
    };
    let audit = audit_recurrence(buffer.as_slice(), k, AUDIT_MAX_LEN, mode)?;

    let counterexample = result.counterexample.map(|cx| CounterexampleReport {
        start: cx.factorization.start,
        parts: cx.factorization.parts,
        color: cx.color,
    });
    let report = VerifyReport {
        timing: timing(started),
        command: "verify",
        word_id: loaded.word_id,
        k: k.get(),
        k_source: if est.is_some() { KSource::Estimated } else { KSource::Override },
        n,
        h,
        coloring: kind.name().to_string(),
        status: if counterexample.is_some() { Status::Counterexample } else { Status::Confirmed },
        degenerate: result.degenerate,
        counterexample,
        prefixes_checked: result.prefixes_checked,
        classifications: result.classifications,
        colors_observed: result.colors_observed,
        level0_codes,
        lemma_audit: AuditReport::from(&audit),
        k_estimate: est.as_ref().map(|e| EstimateReport::new(e, loaded.source.alphabet())),
    };
    let exit_code = match report.status {
        Status::Confirmed => 0,
        Status::Counterexample => 1,
    };
    Ok(Outcome { output: render(args.format, &report, report::verify_text), exit_code })
}

/// Tail start and blocks, if found, and whether they re-verify.
type TailOutcome = (Option<(usize, Vec<usize>)>, bool);

fn tail_search<C: FactorColoring>(coloring: &C, n: usize, t: usize) -> Result<TailOutcome, CliError> {
    match find_ramsey_tail(coloring, n, t)? {
        Some(tail) => {
            let verified = verify_strongly_monochromatic(coloring, tail.start, &tail.factorization.parts)?;
            Ok((Some((tail.start, tail.factorization.parts)), verified))
        }
        None => Ok((None, false)),
    }
}

pub fn cmd_ramsey(args: &RunArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let loaded = load(args)?;
    let n = args.n.unwrap_or(2000);
    let t = args.t.unwrap_or(10);
    let kind = args.coloring.unwrap_or(ColoringKind::FirstLetter);
    let (found, verified) = match kind {
        ColoringKind::Theorem => {
            let (k, _) = resolve_k(args, &loaded.source, Parallelism::from_flag(args.parallel))?;
            let buffer = materialize(&loaded.source, (k.get() + 2) * n)?;
            tail_search(&build_context(&buffer, k, n)?, n, t)?
        }
        ColoringKind::FirstLetter => {
            let buffer = materialize(&loaded.source, n)?;
            tail_search(&FirstLetterColoring::new(&buffer), n, t)?
        }
        ColoringKind::Constant => {
            let buffer = materialize(&loaded.source, n)?;
            tail_search(&ConstantColoring::new(buffer.as_slice()), n, t)?
        }
    };
    let (start, blocks) = found.unzip();
    let report = RamseyReport {
        timing: timing(started),
        command: "ramsey",
        word_id: loaded.word_id,
        coloring: kind.name().to_string(),
        n,
        t,
        found: start.is_some(),
        start,
        blocks,
        verified,
    };
    let exit_code = if report.found { 0 } else { 1 };
    Ok(Outcome { output: render(args.format, &report, report::ramsey_text), exit_code })
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Returns(a) => cmd_returns(a),
        Command::EstimateK(a) => cmd_estimate_k(a),
        Command::Color(a) => cmd_color(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Ramsey(a) => cmd_ramsey(a),
    }
}

fn out_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Gen(a)
        | Command::Returns(a)
        | Command::EstimateK(a)
        | Command::Color(a)
        | Command::Verify(a)
        | Command::Ramsey(a) => a.out.as_ref(),
    }
}

fn emit(cli: &Cli, output: &str) -> Result<(), CliError> {
    match out_path(cli) {
        Some(path) => {
            std::fs::write(path, output).map_err(|source| CliError::Output { path: path.display().to_string(), source })
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.as_bytes()).map_err(|source| CliError::Output { path: "stdout".into(), source })
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli).and_then(|outcome| emit(&cli, &outcome.output).map(|()| outcome.exit_code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
