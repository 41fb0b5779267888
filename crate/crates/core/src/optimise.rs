//! Objective-bound search on top of [`decide_pac`].
//!
//! The objective is always maximised internally (minimisation negates it).
//! Each probe asks whether `b ≥ f` is accepted; accepted bounds form an
//! upward-closed set. A doubling phase brackets the smallest accepted bound
//! between a rejected `l` and an accepted `u`, then `accuracy` bisection
//! steps shrink the bracket to `(u₀ - l₀)·2⁻ᵃ`. The estimate is `l`, the
//! largest bound known to be rejected, so it is pessimistic by design.

use num_traits::Signed;
use thiserror::Error;

use crate::feasibility::Entailment;
use crate::linarith::{ConjunctiveFormula, LinearAtom, LinearExpr, Relation};
use crate::pac::{decide_pac_with, decide_with, ground, DecideOptions, PacError, PartialInterval, SampleOutcome};
use crate::rational::{int, pow2, ratio, Rational};

/// Bisection steps used by the experiment harness.
pub const DEFAULT_ACCURACY: u32 = 60;

/// The doubling phase gives up once `|b|` exceeds `2^DEFAULT_MAGNITUDE_CAP_BITS`.
pub const DEFAULT_MAGNITUDE_CAP_BITS: i64 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Goal {
    Maximise,
    Minimise,
}

impl Goal {
    pub fn as_str(self) -> &'static str {
        match self {
            Goal::Maximise => "maximise",
            Goal::Minimise => "minimise",
        }
    }
}

impl std::str::FromStr for Goal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "maximise" | "maximize" | "max" => Ok(Goal::Maximise),
            "minimise" | "minimize" | "min" => Ok(Goal::Minimise),
            other => Err(format!("unknown goal `{other}`")),
        }
    }
}

impl std::fmt::Display for Goal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptimiseError {
    #[error("objective is not bounded above by the data (|b| exceeded 2^{0})")]
    UnboundedAbove(i64),
    #[error("objective is not bounded below by the data (|b| exceeded 2^{0})")]
    UnboundedBelow(i64),
    #[error("accuracy must be at least 1")]
    ZeroAccuracy,
    #[error(transparent)]
    Pac(#[from] PacError),
}

/// One decision made during the search, in the internal maximisation frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub bound: Rational,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimiseResult {
    /// `l` for maximisation, `-l` for minimisation.
    pub estimate: Rational,
    /// Final bracket in the internal maximisation frame.
    pub bracket_low: Rational,
    pub bracket_high: Rational,
    /// Bracket right after the doubling phase.
    pub initial_low: Rational,
    pub initial_high: Rational,
    pub decide_calls: usize,
    pub goal: Goal,
    pub probes: Vec<Probe>,
}

impl OptimiseResult {
    /// `u - l` after the search.
    pub fn width(&self) -> Rational {
        &self.bracket_high - &self.bracket_low
    }

    /// The final bracket mapped back to the objective's own frame.
    pub fn objective_bracket(&self) -> (Rational, Rational) {
        match self.goal {
            Goal::Maximise => (self.bracket_low.clone(), self.bracket_high.clone()),
            Goal::Minimise => (-self.bracket_high.clone(), -self.bracket_low.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimiseOptions {
    pub magnitude_cap_bits: i64,
    pub decide: DecideOptions,
}

impl Default for OptimiseOptions {
    fn default() -> Self {
        Self {
            magnitude_cap_bits: DEFAULT_MAGNITUDE_CAP_BITS,
            decide: DecideOptions::default(),
        }
    }
}

struct Search<'a> {
    kb: &'a ConjunctiveFormula,
    objective: LinearExpr,
    epsilon: &'a Rational,
    samples: &'a [PartialInterval],
    options: &'a OptimiseOptions,
    probes: Vec<Probe>,
    grounded: Vec<ConjunctiveFormula>,
    memo: Vec<Known>,
}

/// Entailment of `b ≥ f` is monotone in `b`, so each sample remembers the
/// smallest bound it entailed and the largest it failed.
#[derive(Default, Clone)]
struct Known {
    entailed_from: Option<Rational>,
    failed_upto: Option<Rational>,
}

impl Search<'_> {
    /// Does DecidePAC accept `b ≥ f`?
    fn accepts(&mut self, bound: &Rational) -> Result<bool, OptimiseError> {
        let query = [LinearAtom::compare(
            LinearExpr::constant(bound.clone()),
            Relation::Ge,
            self.objective.clone(),
        )];
        let decision = if self.options.decide.parallel {
            decide_pac_with(self.kb, &query, self.epsilon, self.samples, self.options.decide)?
        } else {
            let mut checker = Entailment::new(self.kb, &query).map_err(PacError::from)?;
            let (grounded, memo) = (&self.grounded, &mut self.memo);
            decide_with(
                self.epsilon,
                self.samples.len(),
                self.options.decide.full_evaluation,
                |k| {
                    let known = &mut memo[k];
                    if known.entailed_from.as_ref().is_some_and(|e| bound >= e) {
                        return Ok(SampleOutcome::Entailed);
                    }
                    if known.failed_upto.as_ref().is_some_and(|f| bound <= f) {
                        return Ok(SampleOutcome::NotEntailed);
                    }
                    if checker.holds_with(&grounded[k])? {
                        known.entailed_from = Some(bound.clone());
                        Ok(SampleOutcome::Entailed)
                    } else {
                        known.failed_upto = Some(bound.clone());
                        Ok(SampleOutcome::NotEntailed)
                    }
                },
            )?
        };
        self.probes.push(Probe {
            bound: bound.clone(),
            accepted: decision.accepted(),
        });
        Ok(decision.accepted())
    }

    fn over_cap(&self, b: &Rational) -> bool {
        b.abs() > pow2(self.options.magnitude_cap_bits)
    }

    fn bracket(&mut self) -> Result<(Rational, Rational), OptimiseError> {
        let cap = self.options.magnitude_cap_bits;
        if self.accepts(&int(0))? {
            if !self.accepts(&int(-1))? {
                return Ok((int(-1), int(0)));
            }
            let mut b = int(-2);
            while self.accepts(&b)? {
                b *= int(2);
                if self.over_cap(&b) {
                    return Err(OptimiseError::UnboundedBelow(cap));
                }
            }
            let half = &b / int(2);
            Ok((b, half))
        } else {
            if self.accepts(&int(1))? {
                return Ok((int(0), int(1)));
            }
            let mut b = int(2);
            while !self.accepts(&b)? {
                b *= int(2);
                if self.over_cap(&b) {
                    return Err(OptimiseError::UnboundedAbove(cap));
                }
            }
            let half = &b / int(2);
            Ok((half, b))
        }
    }
}

/// Estimates the optimum of `objective` supported by `samples` at validity
/// `1 - epsilon`, to `accuracy` halvings of the initial bracket.
pub fn optimise_pac(
    kb: &ConjunctiveFormula,
    objective: &LinearExpr,
    epsilon: &Rational,
    accuracy: u32,
    samples: &[PartialInterval],
    goal: Goal,
) -> Result<OptimiseResult, OptimiseError> {
    optimise_pac_with(
        kb,
        objective,
        epsilon,
        accuracy,
        samples,
        goal,
        &OptimiseOptions::default(),
    )
}

pub fn optimise_pac_with(
    kb: &ConjunctiveFormula,
    objective: &LinearExpr,
    epsilon: &Rational,
    accuracy: u32,
    samples: &[PartialInterval],
    goal: Goal,
    options: &OptimiseOptions,
) -> Result<OptimiseResult, OptimiseError> {
    if samples.is_empty() {
        return Err(PacError::EmptySampleList.into());
    }
    if accuracy == 0 {
        return Err(OptimiseError::ZeroAccuracy);
    }
    let internal = match goal {
        Goal::Maximise => objective.clone(),
        Goal::Minimise => -objective.clone(),
    };
    let mut search = Search {
        kb,
        objective: internal,
        epsilon,
        samples,
        options,
        probes: Vec::new(),
        grounded: samples.iter().map(ground).collect(),
        memo: vec![Known::default(); samples.len()],
    };
    let unbounded_flip = |e: OptimiseError| match (goal, e) {
        (Goal::Minimise, OptimiseError::UnboundedAbove(c)) => OptimiseError::UnboundedBelow(c),
        (Goal::Minimise, OptimiseError::UnboundedBelow(c)) => OptimiseError::UnboundedAbove(c),
        (_, e) => e,
    };
    let (mut low, mut high) = search.bracket().map_err(unbounded_flip)?;
    let (initial_low, initial_high) = (low.clone(), high.clone());
    let half = ratio(1, 2);
    for _ in 0..accuracy {
        let mid = (&low + &high) * &half;
        if search.accepts(&mid)? {
            high = mid;
        } else {
            low = mid;
        }
    }
    let estimate = match goal {
        Goal::Maximise => low.clone(),
        Goal::Minimise => -low.clone(),
    };
    Ok(OptimiseResult {
        estimate,
        bracket_low: low,
        bracket_high: high,
        initial_low,
        initial_high,
        decide_calls: search.probes.len(),
        goal,
        probes: search.probes,
    })
}

/// Sample count for the objective search; same value as
/// [`crate::pac::sample_count`] since the bound class has VC dimension one.
pub fn optimise_sample_count(gamma: &Rational, delta_conf: &Rational) -> Result<u64, PacError> {
    crate::pac::sample_count(gamma, delta_conf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linarith::{parse_expr, Vocabulary};
    use crate::pac::Interval;

    fn points(values: &[Rational], v: &mut Vocabulary) -> Vec<PartialInterval> {
        let x = v.intern("x");
        values
            .iter()
            .map(|val| PartialInterval::new().with(&x, Interval::point(val.clone())))
            .collect()
    }

    #[test]
    fn max_of_point_samples() {
        let mut v = Vocabulary::new();
        let samples = points(&[ratio(1, 5), ratio(7, 10), ratio(2, 5)], &mut v);
        let f = parse_expr("x", &mut v).unwrap();
        let r = optimise_pac(&ConjunctiveFormula::new(), &f, &int(0), 30, &samples, Goal::Maximise).unwrap();
        let tol = (&r.initial_high - &r.initial_low) * pow2(-30);
        assert!(r.estimate <= ratio(7, 10));
        assert!(ratio(7, 10) - &r.estimate <= tol);
        assert_eq!(r.width(), tol);
    }

    #[test]
    fn goal_symmetry() {
        let mut v = Vocabulary::new();
        let samples = points(&[ratio(-3, 2), int(4), ratio(9, 4)], &mut v);
        let f = parse_expr("2*x - 1", &mut v).unwrap();
        let kb = ConjunctiveFormula::new();
        let min = optimise_pac(&kb, &f, &int(0), 20, &samples, Goal::Minimise).unwrap();
        let max = optimise_pac(&kb, &(-f), &int(0), 20, &samples, Goal::Maximise).unwrap();
        assert_eq!(min.estimate, -max.estimate);
        assert_eq!(min.decide_calls, max.decide_calls);
    }

    #[test]
    fn zero_threshold_point() {
        let mut v = Vocabulary::new();
        let samples = points(&[int(0)], &mut v);
        let f = parse_expr("x", &mut v).unwrap();
        let r = optimise_pac(&ConjunctiveFormula::new(), &f, &int(0), 8, &samples, Goal::Maximise).unwrap();
        assert_eq!((r.initial_low.clone(), r.initial_high.clone()), (int(-1), int(0)));
        assert!(r.estimate <= int(0) && r.estimate >= -pow2(-8));
    }

    #[test]
    fn single_halving() {
        let mut v = Vocabulary::new();
        let samples = points(&[int(5)], &mut v);
        let f = parse_expr("x", &mut v).unwrap();
        let r = optimise_pac(&ConjunctiveFormula::new(), &f, &int(0), 1, &samples, Goal::Maximise).unwrap();
        // 0 rejected, 1 rejected, then 2, 4 rejected and 8 accepted
        assert_eq!((r.initial_low.clone(), r.initial_high.clone()), (int(4), int(8)));
        assert_eq!(r.width(), int(2));
        assert_eq!(r.decide_calls, 6);
    }

    #[test]
    fn unbounded_when_every_sample_is_vacuous() {
        let mut v = Vocabulary::new();
        let samples = points(&[int(5)], &mut v);
        // kb contradicts every sample, so every query is accepted
        let kb: ConjunctiveFormula = vec![crate::linarith::parse_atom("x <= 0", &mut v).unwrap()].into();
        let f = parse_expr("x", &mut v).unwrap();
        let opts = OptimiseOptions {
            magnitude_cap_bits: 16,
            ..Default::default()
        };
        let r = optimise_pac_with(&kb, &f, &int(0), 4, &samples, Goal::Maximise, &opts);
        assert_eq!(r, Err(OptimiseError::UnboundedBelow(16)));
        let r = optimise_pac_with(&kb, &f, &int(0), 4, &samples, Goal::Minimise, &opts);
        assert_eq!(r, Err(OptimiseError::UnboundedAbove(16)));
    }

    #[test]
    fn argument_errors() {
        let mut v = Vocabulary::new();
        let f = parse_expr("x", &mut v).unwrap();
        let kb = ConjunctiveFormula::new();
        assert!(matches!(
            optimise_pac(&kb, &f, &int(0), 4, &[], Goal::Maximise),
            Err(OptimiseError::Pac(PacError::EmptySampleList))
        ));
        let samples = points(&[int(1)], &mut v);
        assert_eq!(
            optimise_pac(&kb, &f, &int(0), 0, &samples, Goal::Maximise),
            Err(OptimiseError::ZeroAccuracy)
        );
    }

    #[test]
    fn sample_count_matches_decide() {
        assert_eq!(optimise_sample_count(&ratio(1, 10), &ratio(1, 20)).unwrap(), 150);
        assert_eq!(optimise_sample_count(&ratio(1, 20), &ratio(1, 100)).unwrap(), 922);
    }
}
