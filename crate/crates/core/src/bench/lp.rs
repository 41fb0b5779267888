use crate::feasibility::{check_feasible, concretize, Verdict};
use crate::linarith::{ConjunctiveFormula, LinearAtom, LinearExpr, Relation};
use crate::optimise::Goal;
use crate::rational::{int, pow2, simplest_between, Rational};

use super::BenchError;

const MAGNITUDE_CAP_BITS: i64 = 128;

/// A point of `region ∧ f ⋈ bound` and its objective value, if any.
fn probe(
    region: &ConjunctiveFormula,
    f: &LinearExpr,
    rel: Relation,
    bound: &Rational,
) -> Result<Option<Rational>, BenchError> {
    let mut formula = region.clone();
    formula.push(LinearAtom::compare(f.clone(), rel, LinearExpr::constant(bound.clone())));
    Ok(match check_feasible(&formula)? {
        Verdict::Unsat => None,
        Verdict::Sat(model) => {
            let point = concretize(&model, &formula);
            Some(f.evaluate(&point).expect("model assigns every variable"))
        }
    })
}

/// The exact optimum of `objective` over `region`, or `None` when the
/// region is empty.
///
/// Feasibility checks double as an LP oracle: a bracket `[lo, hi)` with
/// `lo` attained and `f ≥ hi` infeasible is narrowed by bisection, and the
/// simplest rational in the bracket is tried as a candidate each round.
/// The answer is certified by `f = v` satisfiable and `f > v` unsatisfiable.
pub fn exact_optimum(
    region: &ConjunctiveFormula,
    objective: &LinearExpr,
    goal: Goal,
) -> Result<Option<Rational>, BenchError> {
    let f = match goal {
        Goal::Maximise => objective.clone(),
        Goal::Minimise => -objective.clone(),
    };
    let unbounded = || BenchError::OutOfRange {
        name: "objective",
        value: "unbounded".into(),
        range: "a bounded region",
    };
    let mut lo = match check_feasible(region)? {
        Verdict::Unsat => return Ok(None),
        // a variable the region never mentions is free
        Verdict::Sat(model) => f.evaluate(&concretize(&model, region)).map_err(|_| unbounded())?,
    };
    let cap = pow2(MAGNITUDE_CAP_BITS);
    let mut step = int(1);
    let mut hi = loop {
        let b = &lo + &step;
        match probe(region, &f, Relation::Ge, &b)? {
            None => break b,
            Some(v) => lo = v,
        }
        step *= int(2);
        if step > cap {
            return Err(unbounded());
        }
    };
    loop {
        match probe(region, &f, Relation::Gt, &lo)? {
            None => break,
            Some(v) => lo = v,
        }
        let mid = (&lo + &hi) / int(2);
        match probe(region, &f, Relation::Ge, &mid)? {
            None => hi = mid,
            Some(v) => lo = v,
        }
        let candidate = simplest_between(&lo, &hi);
        if candidate > lo && candidate < hi {
            match probe(region, &f, Relation::Ge, &candidate)? {
                None => hi = candidate,
                Some(v) => lo = v,
            }
        }
    }
    Ok(Some(match goal {
        Goal::Maximise => lo,
        Goal::Minimise => -lo,
    }))
}
