use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::optimise::{optimise_pac_with, Goal, OptimiseOptions, DEFAULT_ACCURACY};
use crate::rational::{int, parse_rational, ratio, to_decimal_string, to_f64, Rational};

use super::{
    builtin_problem, cell_rng, gen_cuben, gen_simplexn, load_problem, sample_dataset, BenchError, DatasetConfig,
    ProblemSpec,
};

pub const DEFAULT_SEED: u64 = 111_921;
pub const DEFAULT_SAMPLE_SIZES: [usize; 6] = [50, 100, 200, 300, 400, 500];
pub const DEFAULT_RUNS: usize = 10;

/// Size index used for the stream that generates a random problem.
const PROBLEM_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Built-in name, generated family (`simplex3`, `cuben`, ...) or `.prob` path.
    pub problem: String,
    pub seed: u64,
    pub sample_sizes: Vec<usize>,
    pub runs: usize,
    pub noise: Rational,
    pub outliers: Rational,
    /// `None` picks 0.05 when noise or outliers are present, else 0.
    pub epsilon: Option<Rational>,
    pub accuracy: u32,
    pub mask_probability: f64,
    /// Run grid cells on the rayon pool.
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn new(problem: impl Into<String>) -> Self {
        Self {
            problem: problem.into(),
            seed: DEFAULT_SEED,
            sample_sizes: DEFAULT_SAMPLE_SIZES.to_vec(),
            runs: DEFAULT_RUNS,
            noise: int(0),
            outliers: int(0),
            epsilon: None,
            accuracy: DEFAULT_ACCURACY,
            mask_probability: 0.0,
            parallel: true,
        }
    }

    pub fn is_noisy(&self) -> bool {
        self.noise != int(0) || self.outliers != int(0) || self.mask_probability > 0.0
    }

    pub fn effective_epsilon(&self) -> Rational {
        match &self.epsilon {
            Some(e) => e.clone(),
            None if self.is_noisy() => ratio(1, 20),
            None => int(0),
        }
    }
}

fn generated(family: &str, n: usize, seed: u64) -> Result<ProblemSpec, BenchError> {
    let name = format!("{family}{n}");
    let mut rng = cell_rng(seed, &name, PROBLEM_STREAM, 0);
    match family {
        "simplex" => gen_simplexn(n, &mut rng),
        _ => gen_cuben(n, &mut rng),
    }
}

/// The problems a name stands for. Generated problems depend on `seed`.
pub fn resolve_problems(name: &str, seed: u64) -> Result<Vec<ProblemSpec>, BenchError> {
    if name == "pollution" || name == "police" {
        return Ok(vec![builtin_problem(name)?]);
    }
    for family in ["simplex", "cube"] {
        if let Some(rest) = name.strip_prefix(family) {
            if rest == "n" {
                return (2..=4).map(|n| generated(family, n, seed)).collect();
            }
            if let Ok(n) = rest.parse::<usize>() {
                return Ok(vec![generated(family, n, seed)?]);
            }
        }
    }
    let path = Path::new(name);
    if path.extension().is_some_and(|e| e == "prob") || path.is_file() {
        return Ok(vec![load_problem(path)?]);
    }
    Err(BenchError::UnknownProblem(name.to_string()))
}

fn ser_rational<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_decimal_string(value))
}

fn de_rational<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let text = String::deserialize(d)?;
    parse_rational(&text).map_err(serde::de::Error::custom)
}

fn ser_opt_rational<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_str(&to_decimal_string(v)),
        None => s.serialize_str(""),
    }
}

fn de_opt_rational<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
    let text = String::deserialize(d)?;
    if text.is_empty() {
        return Ok(None);
    }
    parse_rational(&text).map(Some).map_err(serde::de::Error::custom)
}

/// One grid cell of an experiment, as written to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub problem: String,
    pub dims: usize,
    pub samples: usize,
    pub run: usize,
    pub seed: u64,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub noise: Rational,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub outliers: Rational,
    #[serde(serialize_with = "ser_opt_rational", deserialize_with = "de_opt_rational")]
    pub estimate: Option<Rational>,
    #[serde(serialize_with = "ser_opt_rational", deserialize_with = "de_opt_rational")]
    pub true_optimum: Option<Rational>,
    /// Estimate on the safe side of the true optimum.
    pub feasible: Option<bool>,
    pub found: bool,
    pub runtime_ms: f64,
    pub decide_calls: usize,
    /// Why the run produced no estimate. Not part of the CSV.
    #[serde(skip)]
    pub error: Option<String>,
}

/// Generates the dataset for one cell and runs the search on its
/// positive observations. Failures are recorded in the row.
pub fn run_cell(
    spec: &ProblemSpec,
    config: &ExperimentConfig,
    size_index: usize,
    samples: usize,
    run: usize,
) -> BenchRow {
    let mut row = BenchRow {
        problem: spec.name.clone(),
        dims: spec.dims(),
        samples,
        run,
        seed: config.seed,
        noise: config.noise.clone(),
        outliers: config.outliers.clone(),
        estimate: None,
        true_optimum: spec.true_optimum.clone(),
        feasible: None,
        found: false,
        runtime_ms: 0.0,
        decide_calls: 0,
        error: None,
    };
    let mut rng = cell_rng(config.seed, &spec.name, size_index as u64, run as u64);
    let data_config = DatasetConfig {
        noise: config.noise.clone(),
        outlier_ratio: config.outliers.clone(),
        mask_probability: config.mask_probability,
        ..DatasetConfig::new(samples)
    };
    let observations = match sample_dataset(spec, &data_config, &mut rng) {
        Ok(d) => d.observations(),
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let kb = spec.knowledge_base();
    let epsilon = config.effective_epsilon();
    let start = Instant::now();
    let result = optimise_pac_with(
        &kb,
        &spec.objective,
        &epsilon,
        config.accuracy,
        &observations,
        spec.goal,
        &OptimiseOptions::default(),
    );
    row.runtime_ms = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    match result {
        Ok(r) => {
            row.decide_calls = r.decide_calls;
            row.found = true;
            row.feasible = spec.true_optimum.as_ref().map(|t| match spec.goal {
                Goal::Minimise => &r.estimate >= t,
                Goal::Maximise => &r.estimate <= t,
            });
            row.estimate = Some(r.estimate);
        }
        Err(e) => {
            row.error = Some(e.to_string());
            if spec.true_optimum.is_some() {
                row.feasible = Some(false);
            }
        }
    }
    row
}

/// Every `(problem, size, run)` cell, in that order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<BenchRow>, BenchError> {
    if config.sample_sizes.is_empty() || config.sample_sizes.contains(&0) || config.runs == 0 {
        return Err(BenchError::OutOfRange {
            name: "grid",
            value: format!("{:?} x {} runs", config.sample_sizes, config.runs),
            range: "positive sample sizes and runs",
        });
    }
    let problems = resolve_problems(&config.problem, config.seed)?;
    let cells: Vec<(&ProblemSpec, usize, usize, usize)> = problems
        .iter()
        .flat_map(|p| {
            config
                .sample_sizes
                .iter()
                .enumerate()
                .flat_map(move |(s, &m)| (0..config.runs).map(move |r| (p, s, m, r)))
        })
        .collect();
    let run = |&(p, s, m, r): &(&ProblemSpec, usize, usize, usize)| run_cell(p, config, s, m, r);
    Ok(if config.parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    })
}

pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<BenchRow>, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Aggregate over the runs of one `(problem, samples)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub samples: usize,
    pub runs: usize,
    pub found_pct: f64,
    /// `None` when the problem has no known optimum.
    pub feasible_pct: Option<f64>,
    pub median_runtime_ms: f64,
    pub mean_estimate: Option<f64>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

pub fn summarise(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in rows {
        let key = (r.problem.clone(), r.samples);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(problem, samples)| {
            let group: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.problem == problem && r.samples == samples)
                .collect();
            let n = group.len();
            let pct = |k: usize| 100.0 * k as f64 / n as f64;
            let found = group.iter().filter(|r| r.found).count();
            let judged: Vec<bool> = group.iter().filter_map(|r| r.feasible).collect();
            let feasible_pct = (!judged.is_empty()).then(|| pct(judged.iter().filter(|&&f| f).count()));
            let estimates: Vec<f64> = group.iter().filter_map(|r| r.estimate.as_ref()).map(to_f64).collect();
            let mean_estimate = (!estimates.is_empty()).then(|| estimates.iter().sum::<f64>() / estimates.len() as f64);
            SummaryRow {
                problem,
                samples,
                runs: n,
                found_pct: pct(found),
                feasible_pct,
                median_runtime_ms: median(group.iter().map(|r| r.runtime_ms).collect()),
                mean_estimate,
            }
        })
        .collect()
}

pub fn format_summary(summary: &[SummaryRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:>7} {:>5} {:>8} {:>10} {:>12} {:>14}",
        "problem", "samples", "runs", "found%", "feasible%", "median_ms", "mean_estimate"
    );
    for r in summary {
        let feasible = r.feasible_pct.map_or_else(|| "-".to_string(), |p| format!("{p:.1}"));
        let estimate = r.mean_estimate.map_or_else(|| "-".to_string(), |e| format!("{e:.6}"));
        let _ = writeln!(
            s,
            "{:<12} {:>7} {:>5} {:>8.1} {:>10} {:>12.2} {:>14}",
            r.problem, r.samples, r.runs, r.found_pct, feasible, r.median_runtime_ms, estimate
        );
    }
    s
}
