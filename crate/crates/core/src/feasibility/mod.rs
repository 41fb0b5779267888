//! Sound and complete satisfiability checking for conjunctions of linear
//! atoms over the rationals, with strict inequalities handled exactly.
//!
//! [`check_feasible`] runs a general simplex over [`DeltaRational`]
//! bounds: a strict `e < 0` becomes `e ≤ -δ` for a symbolic `δ > 0`.
//! [`fm_feasible`] is an independent Fourier–Motzkin procedure used to
//! cross-check it on small systems.
//!
//! Entailment follows the usual refutation route: `kb ⊨ q` iff `kb ∧ ¬q`
//! is unsatisfiable. An inconsistent `kb` therefore entails everything.

mod delta;
mod fm;
mod simplex;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use delta::DeltaRational;
pub use fm::{fm_feasible, MAX_ATOMS as FM_MAX_ATOMS, MAX_VARS as FM_MAX_VARS};

use crate::linarith::{Assignment, ConjunctiveFormula, LinearAtom, Relation, Variable};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("disequality `{0}` must be case-split before the feasibility check")]
    UnexpectedNeq(String),
    #[error("system too large for Fourier-Motzkin ({vars} variables, {atoms} atoms)")]
    SizeLimitExceeded { vars: usize, atoms: usize },
}

/// A satisfying valuation in delta form.
pub type DeltaModel = BTreeMap<Variable, DeltaRational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(DeltaModel),
    Unsat,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn model(&self) -> Option<&DeltaModel> {
        match self {
            Verdict::Sat(m) => Some(m),
            Verdict::Unsat => None,
        }
    }
}

/// Decides a conjunction without disequalities. Deterministic.
pub fn check_feasible(formula: &ConjunctiveFormula) -> Result<Verdict, FeasibilityError> {
    check_atoms(formula.atoms())
}

/// Same as [`check_feasible`] over any cloneable sequence of atoms.
pub fn check_atoms<'a, I>(atoms: I) -> Result<Verdict, FeasibilityError>
where
    I: IntoIterator<Item = &'a LinearAtom> + Clone,
{
    Ok(match simplex::solve(atoms)? {
        simplex::Outcome::Sat(model) => Verdict::Sat(model.into_iter().collect()),
        simplex::Outcome::Unsat => Verdict::Unsat,
    })
}

/// Replaces each `e ≠ 0` by the split `e < 0 ∨ e > 0`, returning every
/// resulting conjunction of the extra atoms (one vector per branch).
fn neq_branches<'a>(atoms: impl Iterator<Item = &'a LinearAtom>) -> Vec<Vec<LinearAtom>> {
    let mut branches = vec![Vec::new()];
    for atom in atoms.filter(|a| a.relation() == Relation::Neq) {
        let sides = atom.negate()[0].negate(); // [e < 0, e > 0]
        branches = branches
            .into_iter()
            .flat_map(|b| {
                sides.iter().map(move |side| {
                    let mut b = b.clone();
                    b.push(side.clone());
                    b
                })
            })
            .collect();
    }
    branches
}

/// `parts[0] ∧ parts[1] ∧ … ⊨ q1 ∧ … ∧ qk`, checked disjunct by disjunct
/// on the negated query. Disequalities anywhere in the premises are split.
pub fn entails_all(parts: &[&ConjunctiveFormula], query: &[LinearAtom]) -> Result<bool, FeasibilityError> {
    let premises = || parts.iter().flat_map(|p| p.iter());
    let plain: Vec<&LinearAtom> = premises().filter(|a| a.relation() != Relation::Neq).collect();
    let branches = neq_branches(premises());
    for q in query {
        for disjunct in q.negate() {
            for branch in &branches {
                let atoms = plain
                    .iter()
                    .copied()
                    .chain(branch.iter())
                    .chain(std::iter::once(&disjunct));
                if check_atoms(atoms)?.is_sat() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Repeated entailment checks of one query against one knowledge base,
/// each with different extra premises.
///
/// When the knowledge base has no disequalities and the extra premises are
/// bounds on single variables (as groundings are), every negated query
/// disjunct keeps a warm tableau between calls. Anything else falls back
/// to [`entails_all`].
pub struct Entailment<'a> {
    kb: &'a ConjunctiveFormula,
    query: &'a [LinearAtom],
    /// One solver per disjunct of the negated query; empty when the
    /// knowledge base contains a disequality.
    solvers: Vec<simplex::Incremental>,
}

impl<'a> Entailment<'a> {
    pub fn new(kb: &'a ConjunctiveFormula, query: &'a [LinearAtom]) -> Result<Self, FeasibilityError> {
        let mut solvers = Vec::new();
        if kb.iter().all(|a| a.relation() != Relation::Neq) {
            for q in query {
                for disjunct in q.negate() {
                    let atoms = kb.iter().chain(std::iter::once(&disjunct));
                    solvers.push(simplex::Incremental::new(atoms)?);
                }
            }
        }
        Ok(Self { kb, query, solvers })
    }

    /// `kb ∧ extra ⊨ query`.
    pub fn holds_with(&mut self, extra: &ConjunctiveFormula) -> Result<bool, FeasibilityError> {
        // support depends only on `extra`, so either every solver answers or none does
        let mut answered = !self.solvers.is_empty();
        for solver in &mut self.solvers {
            match solver.check_with(extra.iter()) {
                Some(true) => return Ok(false),
                Some(false) => {}
                None => {
                    answered = false;
                    break;
                }
            }
        }
        if answered {
            return Ok(true);
        }
        entails_all(&[self.kb, extra], self.query)
    }
}

/// `kb ⊨ q1 ∧ … ∧ qk`.
pub fn entails(kb: &ConjunctiveFormula, query: &[LinearAtom]) -> Result<bool, FeasibilityError> {
    entails_all(&[kb], query)
}

/// Picks a concrete `δ > 0` small enough for every atom of `formula` and
/// substitutes it into `model`.
pub fn concretize(model: &DeltaModel, formula: &ConjunctiveFormula) -> Assignment {
    let delta = choose_delta(model, formula);
    model.iter().map(|(v, d)| (v.clone(), d.at(&delta))).collect()
}

fn choose_delta(model: &DeltaModel, formula: &ConjunctiveFormula) -> Rational {
    let mut delta = Rational::one();
    for atom in formula {
        let mut value = DeltaRational::real(atom.expr().constant_term().clone());
        for (var, coeff) in atom.expr().coefficients() {
            if let Some(v) = model.get(var) {
                value += &(v * coeff);
            }
        }
        // need real + delta·δ ⋈ 0; only a negative real part with a
        // positive delta coefficient restricts δ
        if value.real.is_negative() && value.delta.is_positive() {
            let limit = -&value.real / &value.delta / Rational::from_integer(2.into());
            if limit < delta {
                delta = limit;
            }
        }
        if atom.relation() == Relation::Neq && value.real.is_zero() && !value.delta.is_zero() {
            // any δ > 0 keeps the value nonzero
            continue;
        }
        if atom.relation() == Relation::Neq && !value.real.is_zero() && !value.delta.is_zero() {
            let limit = (value.real.abs() / value.delta.abs()) / Rational::from_integer(2.into());
            if limit < delta {
                delta = limit;
            }
        }
    }
    debug_assert!(!delta.is_zero());
    delta
}
