//! Benchmark problems, synthetic datasets and the experiment grid.

mod dataset;
mod experiment;
mod generate;
mod lp;
mod problem;
mod rng;

use thiserror::Error;

pub use dataset::{
    format_dataset, parse_dataset, read_dataset, sample_dataset, write_dataset, Dataset, DatasetConfig, Label,
    LabelledSample,
};
pub use experiment::{
    format_summary, read_csv, resolve_problems, run_cell, run_experiment, summarise, write_csv, BenchRow,
    ExperimentConfig, SummaryRow, DEFAULT_RUNS, DEFAULT_SAMPLE_SIZES, DEFAULT_SEED,
};
pub use generate::{gen_cuben, gen_simplexn, PRISM_SLOPE};
pub use lp::exact_optimum;
pub use problem::{builtin_problem, load_problem, ProblemSpec, BUILTIN_PROBLEMS};
pub use rng::{cell_rng, substream_seed};

use crate::feasibility::FeasibilityError;
use crate::optimise::OptimiseError;
use crate::pac::PacError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("problem `{0}` has no feasible point inside its domain box")]
    InfeasibleProblem(String),
    #[error("problem `{name}`: stated optimum {stated} but the constraints give {exact}")]
    OptimumMismatch {
        name: String,
        stated: String,
        exact: String,
    },
    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },
    #[error("rejection sampling accepted {hits} of {draws} draws for the {what}")]
    RejectionBudgetExceeded { what: &'static str, hits: u64, draws: u64 },
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error(transparent)]
    Pac(#[from] PacError),
    #[error(transparent)]
    Optimise(#[from] OptimiseError),
}

impl BenchError {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        BenchError::Parse {
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
