//! Learning from blurred examples: grounding, witnessing, sample sizes and
//! the accept/reject decision procedure.
//!
//! [`decide_pac`] counts the examples whose grounding, together with the
//! knowledge base, fails to entail the query, and rejects as soon as that
//! count exceeds `⌊ε·m⌋`. An example that contradicts the knowledge base
//! entails every query and so never counts as a failure; noisy samples
//! that fall outside the modelled region are accepted silently.

mod blur;
mod interval;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

pub use blur::{blur, noise_interval_width, standard_normal, BlurConfig, GRID_BITS};
pub use interval::{ground, witnessed, Interval, PartialInterval};

use crate::feasibility::{Entailment, FeasibilityError};
use crate::linarith::{ConjunctiveFormula, LinearAtom};
use crate::rational::{ceil_int, ln_enclosure, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PacError {
    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },
    #[error("no samples given")]
    EmptySampleList,
    #[error("invalid interval {0}")]
    InvalidInterval(String),
    #[error("invalid blur configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

fn check_open_unit(name: &'static str, value: &Rational) -> Result<(), PacError> {
    if value.is_positive() && value < &Rational::one() {
        Ok(())
    } else {
        Err(PacError::OutOfRange {
            name,
            value: value.to_string(),
            range: "(0, 1)",
        })
    }
}

/// Validity slack, accuracy and confidence of a learning run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacParams {
    pub epsilon: Rational,
    pub gamma: Rational,
    pub delta_conf: Rational,
}

impl PacParams {
    pub fn new(epsilon: Rational, gamma: Rational, delta_conf: Rational) -> Result<Self, PacError> {
        if epsilon.is_negative() || epsilon > Rational::one() {
            return Err(PacError::OutOfRange {
                name: "epsilon",
                value: epsilon.to_string(),
                range: "[0, 1]",
            });
        }
        check_open_unit("gamma", &gamma)?;
        check_open_unit("delta", &delta_conf)?;
        Ok(Self {
            epsilon,
            gamma,
            delta_conf,
        })
    }

    /// `ε + γ > 1` makes both guarantees vacuous; allowed but worth flagging.
    pub fn is_degenerate(&self) -> bool {
        &self.epsilon + &self.gamma > Rational::one()
    }

    pub fn sample_count(&self) -> u64 {
        sample_count(&self.gamma, &self.delta_conf).expect("validated on construction")
    }
}

/// `⌈ln(1/δ) / (2γ²)⌉`, the number of examples that makes the empirical
/// failure rate `γ`-accurate with probability `1 - δ`.
///
/// The logarithm is enclosed with exact rational bounds that are refined
/// until the ceiling is unambiguous, so the result is exact.
pub fn sample_count(gamma: &Rational, delta_conf: &Rational) -> Result<u64, PacError> {
    check_open_unit("gamma", gamma)?;
    check_open_unit("delta", delta_conf)?;
    let scale = (Rational::from_integer(BigInt::from(2)) * gamma * gamma).recip();
    let inv = delta_conf.recip();
    let mut terms = 16;
    loop {
        let (lo, hi) = ln_enclosure(&inv, terms);
        let (lo, hi) = (lo * &scale, hi * &scale);
        let (c_lo, c_hi) = (ceil_int(&lo), ceil_int(&hi));
        if c_lo == c_hi {
            return c_lo.to_u64().ok_or(PacError::OutOfRange {
                name: "gamma",
                value: gamma.to_string(),
                range: "a sample count that fits in u64",
            });
        }
        // ln of a rational other than 1 is irrational, so this terminates
        terms *= 2;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleOutcome {
    Entailed,
    NotEntailed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub failed_count: usize,
    pub budget: usize,
    /// Outcomes for the samples actually evaluated, in order.
    pub per_sample: Vec<SampleOutcome>,
}

impl Decision {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DecideOptions {
    /// Evaluate every sample even after the budget is exceeded.
    pub full_evaluation: bool,
    /// Evaluate samples on the rayon pool. The result is identical to the
    /// sequential run; speculative results past the early-exit point are
    /// discarded.
    pub parallel: bool,
}

/// `⌊ε·m⌋`, computed exactly.
pub fn failure_budget(epsilon: &Rational, m: usize) -> usize {
    let product = epsilon * Rational::from_integer(BigInt::from(m));
    product.floor().to_integer().to_usize().unwrap_or(0)
}

fn outcome(checker: &mut Entailment<'_>, sample: &PartialInterval) -> Result<SampleOutcome, PacError> {
    Ok(if checker.holds_with(&ground(sample))? {
        SampleOutcome::Entailed
    } else {
        SampleOutcome::NotEntailed
    })
}

/// Accepts when at most `⌊ε·m⌋` samples fail to entail `query` together
/// with `kb`; rejects at the first failure past that budget.
pub fn decide_pac(
    kb: &ConjunctiveFormula,
    query: &[LinearAtom],
    epsilon: &Rational,
    samples: &[PartialInterval],
) -> Result<Decision, PacError> {
    decide_pac_with(kb, query, epsilon, samples, DecideOptions::default())
}

pub fn decide_pac_with(
    kb: &ConjunctiveFormula,
    query: &[LinearAtom],
    epsilon: &Rational,
    samples: &[PartialInterval],
    options: DecideOptions,
) -> Result<Decision, PacError> {
    if samples.is_empty() {
        return Err(PacError::EmptySampleList);
    }
    if options.parallel {
        let all: Vec<SampleOutcome> = samples
            .par_iter()
            .map_init(
                || Entailment::new(kb, query),
                |checker, s| match checker {
                    Ok(c) => outcome(c, s),
                    Err(e) => Err(e.clone().into()),
                },
            )
            .collect::<Result<_, _>>()?;
        return decide_with(epsilon, samples.len(), options.full_evaluation, |k| Ok(all[k]));
    }
    let mut checker = Entailment::new(kb, query)?;
    decide_with(epsilon, samples.len(), options.full_evaluation, |k| {
        outcome(&mut checker, &samples[k])
    })
}

/// The counting loop shared by every caller: asks `outcome` about samples
/// `0..m` in order and stops at the first failure past `⌊ε·m⌋` unless
/// `full_evaluation` is set.
pub fn decide_with<F>(epsilon: &Rational, m: usize, full_evaluation: bool, mut outcome: F) -> Result<Decision, PacError>
where
    F: FnMut(usize) -> Result<SampleOutcome, PacError>,
{
    if m == 0 {
        return Err(PacError::EmptySampleList);
    }
    if epsilon.is_negative() || epsilon > &Rational::one() {
        return Err(PacError::OutOfRange {
            name: "epsilon",
            value: epsilon.to_string(),
            range: "[0, 1]",
        });
    }
    let budget = failure_budget(epsilon, m);
    let mut failed = 0;
    let mut per_sample = Vec::with_capacity(m);
    let mut rejected = false;
    for k in 0..m {
        let result = outcome(k)?;
        per_sample.push(result);
        if result == SampleOutcome::NotEntailed {
            failed += 1;
            if failed > budget {
                rejected = true;
                if !full_evaluation {
                    break;
                }
            }
        }
    }
    Ok(Decision {
        verdict: if rejected { Verdict::Reject } else { Verdict::Accept },
        failed_count: failed,
        budget,
        per_sample,
    })
}
