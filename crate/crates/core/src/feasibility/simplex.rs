//! General simplex over bound constraints with delta-rational values.
//!
//! Each non-unit linear form becomes a slack column defined by a tableau
//! row; single-variable atoms become bounds directly. Pivoting uses
//! Bland's rule (smallest index first) so the search never cycles.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};

use super::delta::DeltaRational;
use super::FeasibilityError;
use crate::linarith::{LinearAtom, Relation, Variable};
use crate::rational::Rational;

pub(crate) enum Outcome {
    Sat(Vec<(Variable, DeltaRational)>),
    Unsat,
}

pub(crate) struct Tableau {
    originals: Vec<Variable>,
    /// `rows[r]` holds the coefficients of `basic[r] = Σ rows[r][j]·x_j`;
    /// entries at basic columns are zero.
    rows: Vec<Vec<Rational>>,
    basic: Vec<usize>,
    row_of: Vec<Option<usize>>,
    lower: Vec<Option<DeltaRational>>,
    upper: Vec<Option<DeltaRational>>,
    value: Vec<DeltaRational>,
}

enum Step {
    Consistent,
    Pivoted,
    Conflict,
}

enum Build {
    Ready(Tableau),
    Conflict,
}

impl Tableau {
    fn build<'a, I>(atoms: I) -> Result<Build, FeasibilityError>
    where
        I: IntoIterator<Item = &'a LinearAtom> + Clone,
    {
        let mut originals = BTreeSet::new();
        for atom in atoms.clone() {
            if atom.relation() == Relation::Neq {
                return Err(FeasibilityError::UnexpectedNeq(atom.to_string()));
            }
            originals.extend(atom.expr().vars().cloned());
        }
        let originals: Vec<Variable> = originals.into_iter().collect();
        let column: HashMap<&Variable, usize> = originals.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let n = originals.len();

        // slack definitions, keyed by their normalised coefficient vector
        let mut slack_forms: Vec<Vec<(usize, Rational)>> = Vec::new();
        let mut slack_index: HashMap<Vec<(usize, Rational)>, usize> = HashMap::new();
        let mut bounds: Vec<(usize, Relation, Rational)> = Vec::new();

        for atom in atoms {
            let expr = atom.expr();
            let rel = atom.relation();
            let terms: Vec<(usize, Rational)> = expr
                .coefficients()
                .iter()
                .map(|(v, c)| (column[v], c.clone()))
                .collect();
            let neg_const = -expr.constant_term().clone();
            match terms.len() {
                0 => {
                    if !constant_holds(expr.constant_term(), rel) {
                        return Ok(Build::Conflict);
                    }
                }
                1 => {
                    let (col, coeff) = &terms[0];
                    let (rel, k) = unit_bound(coeff, rel, neg_const);
                    bounds.push((*col, rel, k));
                }
                _ => {
                    // leading coefficient 1, so forms equal up to scaling share a slack
                    let scale = terms[0].1.clone();
                    let rel = if scale.is_negative() { flip(rel) } else { rel };
                    let form: Vec<(usize, Rational)> = terms.iter().map(|(j, c)| (*j, c / &scale)).collect();
                    let next = n + slack_forms.len();
                    let col = *slack_index.entry(form.clone()).or_insert_with(|| {
                        slack_forms.push(form);
                        next
                    });
                    bounds.push((col, rel, neg_const / scale));
                }
            }
        }

        let width = n + slack_forms.len();
        let mut tab = Tableau {
            originals,
            rows: Vec::with_capacity(slack_forms.len()),
            basic: Vec::with_capacity(slack_forms.len()),
            row_of: vec![None; width],
            lower: vec![None; width],
            upper: vec![None; width],
            value: vec![DeltaRational::zero(); width],
        };
        for (r, form) in slack_forms.into_iter().enumerate() {
            let mut row = vec![Rational::zero(); width];
            for (j, c) in form {
                row[j] = c;
            }
            tab.rows.push(row);
            tab.basic.push(n + r);
            tab.row_of[n + r] = Some(r);
        }
        for (col, rel, k) in bounds {
            if !tab.assert_bound(col, rel, k) {
                return Ok(Build::Conflict);
            }
        }
        for j in 0..n {
            tab.value[j] = match (&tab.lower[j], &tab.upper[j]) {
                (Some(l), _) if l > &DeltaRational::zero() => l.clone(),
                (_, Some(u)) if u < &DeltaRational::zero() => u.clone(),
                _ => DeltaRational::zero(),
            };
        }
        for r in 0..tab.rows.len() {
            let v = tab.row_value(r);
            tab.value[tab.basic[r]] = v;
        }
        Ok(Build::Ready(tab))
    }

    /// Tightens the bounds of `col`; false on an empty range.
    fn assert_bound(&mut self, col: usize, rel: Relation, k: Rational) -> bool {
        tighten(&mut self.lower[col], &mut self.upper[col], rel, k)
    }

    fn row_value(&self, r: usize) -> DeltaRational {
        let mut acc = DeltaRational::zero();
        for (j, c) in self.rows[r].iter().enumerate() {
            if !c.is_zero() {
                acc += &(&self.value[j] * c);
            }
        }
        acc
    }

    fn below_lower(&self, x: usize) -> bool {
        self.lower[x].as_ref().is_some_and(|l| &self.value[x] < l)
    }

    fn above_upper(&self, x: usize) -> bool {
        self.upper[x].as_ref().is_some_and(|u| &self.value[x] > u)
    }

    fn can_increase(&self, x: usize) -> bool {
        self.upper[x].as_ref().is_none_or(|u| &self.value[x] < u)
    }

    fn can_decrease(&self, x: usize) -> bool {
        self.lower[x].as_ref().is_none_or(|l| &self.value[x] > l)
    }

    /// Moves nonbasic `x` to `target`, keeping every row equation true.
    fn update(&mut self, x: usize, target: DeltaRational) {
        let theta = &target - &self.value[x];
        for r in 0..self.rows.len() {
            let c = &self.rows[r][x];
            if !c.is_zero() {
                let b = self.basic[r];
                let step = &theta * c;
                self.value[b] += &step;
            }
        }
        self.value[x] = target;
    }

    /// Exchanges basic variable of row `r` with nonbasic column `x`.
    fn pivot(&mut self, r: usize, x: usize) {
        let leaving = self.basic[r];
        let a = self.rows[r][x].clone();
        debug_assert!(!a.is_zero());
        // leaving = a·x + rest  =>  x = (leaving - rest) / a
        let inv = a.recip();
        let mut row = std::mem::take(&mut self.rows[r]);
        for c in row.iter_mut() {
            if !c.is_zero() {
                *c = -(&*c * &inv);
            }
        }
        row[x] = Rational::zero();
        row[leaving] = inv;
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = std::mem::take(&mut self.rows[i][x]);
            if factor.is_zero() {
                continue;
            }
            let target = &mut self.rows[i];
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    target[j] += &factor * c;
                }
            }
        }
        self.rows[r] = row;
        self.basic[r] = x;
        self.row_of[x] = Some(r);
        self.row_of[leaving] = None;
    }

    fn check(&mut self) -> bool {
        loop {
            match self.step() {
                Step::Consistent => return true,
                Step::Conflict => return false,
                Step::Pivoted => {}
            }
        }
    }

    fn step(&mut self) -> Step {
        {
            // smallest-index basic variable out of bounds
            let violated = (0..self.value.len())
                .filter(|&x| self.row_of[x].is_some())
                .find(|&x| self.below_lower(x) || self.above_upper(x));
            let Some(xb) = violated else {
                return Step::Consistent;
            };
            let r = self.row_of[xb].unwrap();
            let raise = self.below_lower(xb);
            let entering = (0..self.value.len()).find(|&j| {
                let c = &self.rows[r][j];
                if c.is_zero() {
                    return false;
                }
                match (raise, c.is_positive()) {
                    (true, true) | (false, false) => self.can_increase(j),
                    (true, false) | (false, true) => self.can_decrease(j),
                }
            });
            let Some(xn) = entering else {
                return Step::Conflict;
            };
            let target = if raise {
                self.lower[xb].clone().unwrap()
            } else {
                self.upper[xb].clone().unwrap()
            };
            let theta = (&target - &self.value[xb]).scale(&self.rows[r][xn].recip());
            let new_xn = &self.value[xn] + &theta;
            self.update(xn, new_xn);
            self.pivot(r, xn);
            Step::Pivoted
        }
    }

    fn model(&self) -> Vec<(Variable, DeltaRational)> {
        self.originals
            .iter()
            .enumerate()
            .map(|(j, v)| (v.clone(), self.value[j].clone()))
            .collect()
    }

    #[cfg(test)]
    fn invariants_hold(&self) -> bool {
        let rows_ok = (0..self.rows.len()).all(|r| self.row_value(r) == self.value[self.basic[r]]);
        let nonbasic_ok = (0..self.value.len())
            .filter(|&x| self.row_of[x].is_none())
            .all(|x| !self.below_lower(x) && !self.above_upper(x));
        rows_ok && nonbasic_ok
    }
}

/// Narrows `[lower, upper]` by `x ⋈ k`; false when the range empties.
fn tighten(lower: &mut Option<DeltaRational>, upper: &mut Option<DeltaRational>, rel: Relation, k: Rational) -> bool {
    let (lo, hi) = match rel {
        Relation::Le => (None, Some(DeltaRational::real(k))),
        Relation::Lt => (None, Some(DeltaRational::below(k))),
        Relation::Ge => (Some(DeltaRational::real(k)), None),
        Relation::Gt => (Some(DeltaRational::above(k)), None),
        Relation::Eq => (Some(DeltaRational::real(k.clone())), Some(DeltaRational::real(k))),
        Relation::Neq => unreachable!(),
    };
    if let Some(lo) = lo {
        if lower.as_ref().is_none_or(|cur| &lo > cur) {
            *lower = Some(lo);
        }
    }
    if let Some(hi) = hi {
        if upper.as_ref().is_none_or(|cur| &hi < cur) {
            *upper = Some(hi);
        }
    }
    match (lower, upper) {
        (Some(l), Some(u)) => l <= u,
        _ => true,
    }
}

/// Does `c ⋈ 0` hold?
fn constant_holds(c: &Rational, rel: Relation) -> bool {
    match rel {
        Relation::Le => !c.is_positive(),
        Relation::Lt => c.is_negative(),
        Relation::Eq => c.is_zero(),
        _ => unreachable!(),
    }
}

/// `coeff·x + c ⋈ 0` as a bound `x ⋈' -c/coeff`.
fn unit_bound(coeff: &Rational, rel: Relation, neg_const: Rational) -> (Relation, Rational) {
    let k = neg_const / coeff;
    let rel = if coeff.is_negative() { flip(rel) } else { rel };
    (rel, k)
}

fn flip(rel: Relation) -> Relation {
    match rel {
        Relation::Le => Relation::Ge,
        Relation::Lt => Relation::Gt,
        Relation::Ge => Relation::Le,
        Relation::Gt => Relation::Lt,
        other => other,
    }
}

pub(crate) fn solve<'a, I>(atoms: I) -> Result<Outcome, FeasibilityError>
where
    I: IntoIterator<Item = &'a LinearAtom> + Clone,
{
    match Tableau::build(atoms)? {
        Build::Conflict => Ok(Outcome::Unsat),
        Build::Ready(mut tab) => {
            if tab.check() {
                Ok(Outcome::Sat(tab.model()))
            } else {
                Ok(Outcome::Unsat)
            }
        }
    }
}

/// A fixed set of base atoms whose tableau is kept between checks.
///
/// Each check resets the bounds to those of the base atoms, tightens them
/// with extra single-variable atoms and resumes pivoting from the previous
/// basis. The rows never change, so consecutive checks that differ only
/// in bounds usually need few pivots.
pub(crate) struct Incremental {
    /// `None` when the base atoms alone are contradictory.
    state: Option<Warm>,
}

struct Warm {
    tab: Tableau,
    column: HashMap<Variable, usize>,
    base_lower: Vec<Option<DeltaRational>>,
    base_upper: Vec<Option<DeltaRational>>,
}

impl Incremental {
    pub(crate) fn new<'a, I>(atoms: I) -> Result<Self, FeasibilityError>
    where
        I: IntoIterator<Item = &'a LinearAtom> + Clone,
    {
        let state = match Tableau::build(atoms)? {
            Build::Conflict => None,
            Build::Ready(tab) => Some(Warm {
                column: tab.originals.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect(),
                base_lower: tab.lower.clone(),
                base_upper: tab.upper.clone(),
                tab,
            }),
        };
        Ok(Self { state })
    }

    /// Satisfiability of the base atoms together with `extra`, or `None`
    /// if some extra atom mentions more than one variable or is a
    /// disequality.
    pub(crate) fn check_with<'a, I>(&mut self, extra: I) -> Option<bool>
    where
        I: IntoIterator<Item = &'a LinearAtom> + Clone,
    {
        let supported = extra
            .clone()
            .into_iter()
            .all(|a| a.relation() != Relation::Neq && a.expr().coefficients().len() <= 1);
        if !supported {
            return None;
        }
        let Some(w) = &mut self.state else {
            return Some(false);
        };
        w.tab.lower.clone_from(&w.base_lower);
        w.tab.upper.clone_from(&w.base_upper);
        // variables outside the tableau only need consistent bounds
        let mut loose: HashMap<&Variable, (Option<DeltaRational>, Option<DeltaRational>)> = HashMap::new();
        for atom in extra {
            let expr = atom.expr();
            let rel = atom.relation();
            let Some((var, coeff)) = expr.coefficients().iter().next() else {
                if !constant_holds(expr.constant_term(), rel) {
                    return Some(false);
                }
                continue;
            };
            let (rel, k) = unit_bound(coeff, rel, -expr.constant_term().clone());
            let consistent = match w.column.get(var) {
                Some(&col) => w.tab.assert_bound(col, rel, k),
                None => {
                    let (lo, hi) = loose.entry(var).or_default();
                    tighten(lo, hi, rel, k)
                }
            };
            if !consistent {
                return Some(false);
            }
        }
        for x in 0..w.tab.value.len() {
            if w.tab.row_of[x].is_some() {
                continue;
            }
            if w.tab.below_lower(x) {
                let target = w.tab.lower[x].clone().unwrap();
                w.tab.update(x, target);
            } else if w.tab.above_upper(x) {
                let target = w.tab.upper[x].clone().unwrap();
                w.tab.update(x, target);
            }
        }
        Some(w.tab.check())
    }
}
