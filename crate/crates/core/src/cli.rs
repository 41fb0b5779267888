//! The `pac-implicit` command line.
//!
//! Exit codes: 0 accept or success, 1 reject, 2 usage or input error,
//! 3 unbounded objective.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::bench::{
    format_summary, read_dataset, resolve_problems, run_experiment, summarise, write_csv, ExperimentConfig,
    DEFAULT_RUNS, DEFAULT_SEED,
};
use crate::linarith::{parse_atom, ConjunctiveFormula, LinearAtom, Vocabulary};
use crate::optimise::{optimise_pac_with, Goal, OptimiseError, OptimiseOptions, DEFAULT_ACCURACY};
use crate::pac::{decide_pac_with, sample_count, DecideOptions, PacParams, PartialInterval, SampleOutcome};
use crate::rational::{parse_rational, to_decimal_string, to_f64, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "pac-implicit",
    version,
    about = "Implicit learning from blurred examples over linear arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Accept or reject a query against a knowledge base and observations.
    Decide(DecideArgs),
    /// Estimate a problem's optimum from observations.
    Optimise(OptimiseArgs),
    /// Run the sample-size by run grid and write CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct SampleSizeArgs {
    /// Accuracy γ; with --delta, limits the run to the required sample count.
    #[arg(long, value_parser = rational_arg, requires = "delta")]
    gamma: Option<Rational>,
    /// Confidence parameter δ.
    #[arg(long, value_parser = rational_arg, requires = "gamma")]
    delta: Option<Rational>,
}

impl SampleSizeArgs {
    fn required(&self) -> Result<Option<u64>, String> {
        match (&self.gamma, &self.delta) {
            (Some(g), Some(d)) => sample_count(g, d).map(Some).map_err(|e| e.to_string()),
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Args)]
struct DecideArgs {
    /// Knowledge base: one linear atom per line.
    kb: PathBuf,
    /// Query: linear atoms joined by `&&`.
    query: String,
    /// Observations in `.data` format.
    data: PathBuf,
    #[arg(long, value_parser = rational_arg, default_value = "0")]
    epsilon: Rational,
    #[command(flatten)]
    size: SampleSizeArgs,
    /// Evaluate samples in parallel.
    #[arg(long)]
    parallel: bool,
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct OptimiseArgs {
    /// Problem name or `.prob` file.
    problem: String,
    /// Observations in `.data` format.
    data: PathBuf,
    #[arg(long, value_parser = rational_arg, default_value = "0")]
    epsilon: Rational,
    #[arg(long, default_value_t = DEFAULT_ACCURACY)]
    accuracy: u32,
    /// Override the problem's goal.
    #[arg(long)]
    goal: Option<Goal>,
    /// Seed for generated problems.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    size: SampleSizeArgs,
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// pollution, police, simplexN, cubeN, simplexn, cuben or a `.prob` file.
    problem: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_parser = rational_arg, default_value = "0")]
    noise: Rational,
    #[arg(long, value_parser = rational_arg, default_value = "0")]
    outliers: Rational,
    /// Probability of masking each variable of a positive sample.
    #[arg(long, default_value_t = 0.0)]
    mask: f64,
    /// Defaults to 0.05 with noise, outliers or masking, else 0.
    #[arg(long, value_parser = rational_arg)]
    epsilon: Option<Rational>,
    #[command(flatten)]
    size: SampleSizeArgs,
    #[arg(long, default_value_t = DEFAULT_ACCURACY)]
    accuracy: u32,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    samples: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Run grid cells one at a time.
    #[arg(long)]
    sequential: bool,
    #[arg(short, long)]
    verbose: bool,
}

/// Failure of a command, carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: EXIT_ERROR,
            message: e.to_string(),
        }
    }
}

fn fail(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_ERROR,
        message: message.into(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Decide(a) => decide(a, out, err),
        Command::Optimise(a) => optimise(a, out, err),
        Command::Bench(a) => bench(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

/// One atom per line; `#` starts a comment.
fn parse_kb(text: &str, vocab: &mut Vocabulary) -> Result<ConjunctiveFormula, Failure> {
    let mut kb = ConjunctiveFormula::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        kb.push(parse_atom(line, vocab).map_err(|e| fail(format!("knowledge base line {}: {e}", k + 1)))?);
    }
    Ok(kb)
}

fn parse_query(text: &str, vocab: &mut Vocabulary) -> Result<Vec<LinearAtom>, Failure> {
    text.split("&&")
        .map(|part| parse_atom(part.trim(), vocab).map_err(|e| fail(format!("query `{}`: {e}", part.trim()))))
        .collect()
}

/// Truncates to the sample count γ and δ call for, if given.
fn limit_samples(
    mut samples: Vec<PartialInterval>,
    size: &SampleSizeArgs,
    err: &mut dyn Write,
) -> Result<Vec<PartialInterval>, Failure> {
    if let Some(m) = size.required().map_err(fail)? {
        let m = usize::try_from(m).unwrap_or(usize::MAX);
        if samples.len() < m {
            return Err(fail(format!(
                "γ and δ call for {m} samples but only {} are available",
                samples.len()
            )));
        }
        let _ = writeln!(err, "using the first {m} of {} samples", samples.len());
        samples.truncate(m);
    }
    if samples.is_empty() {
        return Err(fail("no positive observations in the data file"));
    }
    Ok(samples)
}

fn decide(a: DecideArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut vocab = Vocabulary::new();
    let kb = parse_kb(&read_text(&a.kb)?, &mut vocab)?;
    let query = parse_query(&a.query, &mut vocab)?;
    let data = read_dataset(&a.data, &mut vocab)?;
    let samples = limit_samples(data.observations(), &a.size, err)?;
    if let (Some(g), Some(d)) = (&a.size.gamma, &a.size.delta) {
        if PacParams::new(a.epsilon.clone(), g.clone(), d.clone())?.is_degenerate() {
            let _ = writeln!(err, "warning: ε + γ > 1, the guarantee is vacuous");
        }
    }
    let options = DecideOptions {
        full_evaluation: a.verbose,
        parallel: a.parallel,
    };
    let decision = decide_pac_with(&kb, &query, &a.epsilon, &samples, options)?;
    let verdict = if decision.accepted() { "Accept" } else { "Reject" };
    writeln!(out, "{verdict}")?;
    writeln!(out, "FAILED = {}", decision.failed_count)?;
    writeln!(out, "B = {}", decision.budget)?;
    writeln!(out, "m = {}", samples.len())?;
    if a.verbose {
        for (k, o) in decision.per_sample.iter().enumerate() {
            let text = match o {
                SampleOutcome::Entailed => "entailed",
                SampleOutcome::NotEntailed => "not entailed",
            };
            writeln!(out, "sample {}: {text}", k + 1)?;
        }
    }
    Ok(if decision.accepted() { EXIT_OK } else { EXIT_REJECT })
}

fn optimise(a: OptimiseArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut problems = resolve_problems(&a.problem, a.seed)?;
    if problems.len() != 1 {
        return Err(fail(format!(
            "`{}` names {} problems; pick one",
            a.problem,
            problems.len()
        )));
    }
    let spec = problems.remove(0);
    let goal = a.goal.unwrap_or(spec.goal);
    let data = spec.read_dataset(&a.data)?;
    let samples = limit_samples(data.observations(), &a.size, err)?;
    let start = Instant::now();
    let result = optimise_pac_with(
        &spec.knowledge_base(),
        &spec.objective,
        &a.epsilon,
        a.accuracy,
        &samples,
        goal,
        &OptimiseOptions::default(),
    );
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    let r = match result {
        Ok(r) => r,
        Err(e @ (OptimiseError::UnboundedAbove(_) | OptimiseError::UnboundedBelow(_))) => {
            let _ = writeln!(err, "error: {e}");
            return Ok(EXIT_UNBOUNDED);
        }
        Err(e) => return Err(e.into()),
    };
    let (lo, hi) = r.objective_bracket();
    writeln!(out, "problem: {}", spec.name)?;
    writeln!(out, "goal: {goal}")?;
    writeln!(out, "estimate: {}", to_decimal_string(&r.estimate))?;
    writeln!(out, "estimate_approx: {}", to_f64(&r.estimate))?;
    writeln!(out, "bracket: [{}, {}]", to_decimal_string(&lo), to_decimal_string(&hi))?;
    writeln!(out, "width: {}", to_decimal_string(&r.width()))?;
    if let Some(t) = &spec.true_optimum {
        writeln!(out, "true_optimum: {}", to_decimal_string(t))?;
    }
    writeln!(out, "samples: {}", samples.len())?;
    writeln!(out, "decide_calls: {}", r.decide_calls)?;
    writeln!(out, "time_ms: {elapsed:.3}")?;
    if a.verbose {
        for p in &r.probes {
            let verdict = if p.accepted { "accept" } else { "reject" };
            writeln!(out, "probe {} {verdict}", to_decimal_string(&p.bound))?;
        }
    }
    Ok(EXIT_OK)
}

fn bench(a: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let sample_sizes = match a.size.required().map_err(fail)? {
        Some(m) => vec![usize::try_from(m).map_err(|_| fail("sample count too large"))?],
        None if a.samples.is_empty() => crate::bench::DEFAULT_SAMPLE_SIZES.to_vec(),
        None => a.samples,
    };
    let config = ExperimentConfig {
        seed: a.seed,
        sample_sizes,
        runs: a.runs,
        noise: a.noise,
        outliers: a.outliers,
        epsilon: a.epsilon,
        accuracy: a.accuracy,
        mask_probability: a.mask,
        parallel: !a.sequential,
        ..ExperimentConfig::new(a.problem)
    };
    let rows = run_experiment(&config)?;
    if a.verbose {
        for r in rows.iter().filter(|r| r.error.is_some()) {
            let _ = writeln!(
                err,
                "{} m={} run={}: {}",
                r.problem,
                r.samples,
                r.run,
                r.error.as_deref().unwrap_or_default()
            );
        }
    }
    let summary = format_summary(&summarise(&rows));
    match &a.output {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
            write_csv(&rows, std::io::BufWriter::new(file))?;
            out.write_all(summary.as_bytes())?;
        }
        None => {
            write_csv(&rows, &mut *out)?;
            err.write_all(summary.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}
