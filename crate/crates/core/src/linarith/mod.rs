//! Terms and constraints of quantifier-free linear real arithmetic.

mod parse;

pub use parse::{parse_atom, parse_atom_in, parse_expr, parse_expr_in, ParseError};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

/// A named real-valued variable with a dense index assigned by its
/// [`Vocabulary`]. Ordering follows the index.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    index: usize,
    name: Arc<str>,
}

impl Variable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Interns variable names to contiguous indices starting at zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    vars: Vec<Variable>,
    by_name: HashMap<Arc<str>, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab = Self::new();
        for name in names {
            vocab.intern(name.as_ref());
        }
        vocab
    }

    /// Returns the variable called `name`, creating it if needed.
    pub fn intern(&mut self, name: &str) -> Variable {
        if let Some(&i) = self.by_name.get(name) {
            return self.vars[i].clone();
        }
        let name: Arc<str> = Arc::from(name);
        let var = Variable {
            index: self.vars.len(),
            name: name.clone(),
        };
        self.by_name.insert(name, var.index);
        self.vars.push(var.clone());
        var
    }

    pub fn get(&self, name: &str) -> Option<&Variable> {
        self.by_name.get(name).map(|&i| &self.vars[i])
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

/// A rational valuation of (some) variables.
pub type Assignment = BTreeMap<Variable, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` has no value in the assignment")]
    MissingVariable(String),
}

/// `constant + Σ coeff·var`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearExpr {
    coefficients: BTreeMap<Variable, Rational>,
    constant: Rational,
}

impl LinearExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: Rational) -> Self {
        Self {
            coefficients: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn var(var: &Variable) -> Self {
        Self::term(Rational::one(), var)
    }

    pub fn term(coeff: Rational, var: &Variable) -> Self {
        let mut expr = Self::zero();
        expr.add_term(coeff, var);
        expr
    }

    pub fn from_terms<I>(terms: I, constant: Rational) -> Self
    where
        I: IntoIterator<Item = (Rational, Variable)>,
    {
        let mut expr = Self::constant(constant);
        for (c, v) in terms {
            expr.add_term(c, &v);
        }
        expr
    }

    pub fn add_term(&mut self, coeff: Rational, var: &Variable) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.coefficients.entry(var.clone()).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.coefficients.remove(var);
        }
    }

    pub fn coefficients(&self) -> &BTreeMap<Variable, Rational> {
        &self.coefficients
    }

    pub fn coefficient(&self, var: &Variable) -> Rational {
        self.coefficients.get(var).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Variable> {
        self.coefficients.keys()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            coefficients: self.coefficients.iter().map(|(v, c)| (v.clone(), c * factor)).collect(),
            constant: &self.constant * factor,
        }
    }

    /// Exact value under `assignment`.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Rational, EvalError> {
        let mut total = self.constant.clone();
        for (var, coeff) in &self.coefficients {
            let value = assignment
                .get(var)
                .ok_or_else(|| EvalError::MissingVariable(var.name().to_string()))?;
            total += coeff * value;
        }
        Ok(total)
    }
}

impl fmt::Debug for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Renders `c1*x1 + x2 - c3*x3 + k`. Unit coefficients are dropped, and so
/// is a zero constant unless the expression is constant.
impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |f: &mut fmt::Formatter<'_>, c: &Rational, var: &Variable| {
            if c.is_one() {
                write!(f, "{var}")
            } else {
                write!(f, "{c}*{var}")
            }
        };
        let mut first = true;
        for (var, coeff) in &self.coefficients {
            if first && coeff.is_negative() {
                f.write_str("-")?;
                term(f, &-coeff, var)?;
            } else if first {
                term(f, coeff, var)?;
            } else if coeff.is_negative() {
                f.write_str(" - ")?;
                term(f, &-coeff, var)?;
            } else {
                f.write_str(" + ")?;
                term(f, coeff, var)?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_negative() {
            write!(f, " - {}", -&self.constant)
        } else if self.constant.is_positive() {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}

impl Add for LinearExpr {
    type Output = LinearExpr;

    fn add(mut self, rhs: LinearExpr) -> LinearExpr {
        for (v, c) in rhs.coefficients {
            self.add_term(c, &v);
        }
        self.constant += rhs.constant;
        self
    }
}

impl Sub for LinearExpr {
    type Output = LinearExpr;

    fn sub(self, rhs: LinearExpr) -> LinearExpr {
        self + (-rhs)
    }
}

impl Neg for LinearExpr {
    type Output = LinearExpr;

    fn neg(self) -> LinearExpr {
        LinearExpr {
            coefficients: self.coefficients.into_iter().map(|(v, c)| (v, -c)).collect(),
            constant: -self.constant,
        }
    }
}

impl Mul<&Rational> for LinearExpr {
    type Output = LinearExpr;

    fn mul(self, rhs: &Rational) -> LinearExpr {
        self.scale(rhs)
    }
}

/// Comparison of an expression against zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Neq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "=",
            Relation::Neq => "!=",
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Lt | Relation::Gt)
    }

    fn holds(self, value: &Rational) -> bool {
        match self {
            Relation::Le => !value.is_positive(),
            Relation::Lt => value.is_negative(),
            Relation::Ge => !value.is_negative(),
            Relation::Gt => value.is_positive(),
            Relation::Eq => value.is_zero(),
            Relation::Neq => !value.is_zero(),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `expr ⋈ 0`. Construction rewrites `>=`/`>` into `<=`/`<` by negating
/// the expression, so the stored relation is one of `Le`, `Lt`, `Eq`, `Neq`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearAtom {
    expr: LinearExpr,
    relation: Relation,
}

impl LinearAtom {
    pub fn new(expr: LinearExpr, relation: Relation) -> Self {
        match relation {
            Relation::Ge => Self {
                expr: -expr,
                relation: Relation::Le,
            },
            Relation::Gt => Self {
                expr: -expr,
                relation: Relation::Lt,
            },
            _ => Self { expr, relation },
        }
    }

    /// `lhs ⋈ rhs`, stored as `lhs - rhs ⋈ 0`.
    pub fn compare(lhs: LinearExpr, relation: Relation, rhs: LinearExpr) -> Self {
        Self::new(lhs - rhs, relation)
    }

    pub fn expr(&self) -> &LinearExpr {
        &self.expr
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn satisfies(&self, assignment: &Assignment) -> Result<bool, EvalError> {
        Ok(self.relation.holds(&self.expr.evaluate(assignment)?))
    }

    /// Classical negation as a disjunction of atoms.
    pub fn negate(&self) -> Vec<LinearAtom> {
        let e = self.expr.clone();
        match self.relation {
            Relation::Le => vec![LinearAtom::new(e, Relation::Gt)],
            Relation::Lt => vec![LinearAtom::new(e, Relation::Ge)],
            Relation::Eq => vec![
                LinearAtom::new(e.clone(), Relation::Lt),
                LinearAtom::new(e, Relation::Gt),
            ],
            Relation::Neq => vec![LinearAtom::new(e, Relation::Eq)],
            Relation::Ge | Relation::Gt => unreachable!("atoms are canonical"),
        }
    }
}

impl fmt::Debug for LinearAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LinearAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} 0", self.expr, self.relation)
    }
}

pub fn evaluate(expr: &LinearExpr, assignment: &Assignment) -> Result<Rational, EvalError> {
    expr.evaluate(assignment)
}

pub fn satisfies(atom: &LinearAtom, assignment: &Assignment) -> Result<bool, EvalError> {
    atom.satisfies(assignment)
}

pub fn negate_literal(atom: &LinearAtom) -> Vec<LinearAtom> {
    atom.negate()
}

/// Conjunction of atoms in insertion order; empty means true.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct ConjunctiveFormula {
    atoms: Vec<LinearAtom>,
}

impl ConjunctiveFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, atom: LinearAtom) {
        self.atoms.push(atom);
    }

    pub fn extend<I: IntoIterator<Item = LinearAtom>>(&mut self, atoms: I) {
        self.atoms.extend(atoms);
    }

    /// `self ∧ other`.
    pub fn and(&self, other: &ConjunctiveFormula) -> ConjunctiveFormula {
        let mut out = self.clone();
        out.atoms.extend(other.atoms.iter().cloned());
        out
    }

    pub fn atoms(&self) -> &[LinearAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LinearAtom> {
        self.atoms.iter()
    }

    pub fn satisfies(&self, assignment: &Assignment) -> Result<bool, EvalError> {
        for atom in &self.atoms {
            if !atom.satisfies(assignment)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl From<Vec<LinearAtom>> for ConjunctiveFormula {
    fn from(atoms: Vec<LinearAtom>) -> Self {
        Self { atoms }
    }
}

impl FromIterator<LinearAtom> for ConjunctiveFormula {
    fn from_iter<T: IntoIterator<Item = LinearAtom>>(iter: T) -> Self {
        Self {
            atoms: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a ConjunctiveFormula {
    type Item = &'a LinearAtom;
    type IntoIter = std::slice::Iter<'a, LinearAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.atoms.iter()
    }
}

impl fmt::Debug for ConjunctiveFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.atoms).finish()
    }
}

/// Atoms joined by ` && `; `true` when empty.
impl fmt::Display for ConjunctiveFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        for (k, atom) in self.atoms.iter().enumerate() {
            if k > 0 {
                f.write_str(" && ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn watch() -> (Vocabulary, LinearExpr) {
        let mut vocab = Vocabulary::new();
        let hr = vocab.intern("hr");
        let ox = vocab.intern("ox");
        // hr - 5·(ox - 90)
        let stress = LinearExpr::var(&hr) - (LinearExpr::var(&ox) - LinearExpr::constant(int(90))) * &int(5);
        (vocab, stress)
    }

    #[test]
    fn evaluates_stress_reading() {
        let (vocab, stress) = watch();
        let mut a = Assignment::new();
        a.insert(vocab.get("hr").unwrap().clone(), int(92));
        a.insert(vocab.get("ox").unwrap().clone(), int(99));
        assert_eq!(stress.evaluate(&a).unwrap(), int(47));
    }

    #[test]
    fn zero_assignment_gives_constant() {
        let (vocab, stress) = watch();
        let a: Assignment = vocab.vars().iter().map(|v| (v.clone(), int(0))).collect();
        assert_eq!(stress.evaluate(&a).unwrap(), int(450));
    }

    #[test]
    fn fractional_evaluation() {
        let mut vocab = Vocabulary::new();
        let x = vocab.intern("x");
        let y = vocab.intern("y");
        let e = LinearExpr::from_terms([(int(2), x.clone()), (int(3), y.clone())], int(-1));
        let a: Assignment = [(x, ratio(1, 2)), (y, ratio(1, 3))].into_iter().collect();
        assert_eq!(e.evaluate(&a).unwrap(), int(1));
    }

    #[test]
    fn missing_variable_is_reported() {
        let (vocab, stress) = watch();
        let mut a = Assignment::new();
        a.insert(vocab.get("hr").unwrap().clone(), int(92));
        assert_eq!(stress.evaluate(&a), Err(EvalError::MissingVariable("ox".into())));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut vocab = Vocabulary::new();
        let x = vocab.intern("x");
        let e = LinearExpr::var(&x) - LinearExpr::var(&x);
        assert!(e.is_constant());
        assert_eq!(e, LinearExpr::zero());
    }

    #[test]
    fn satisfies_relations() {
        let mut vocab = Vocabulary::new();
        let x = vocab.intern("x");
        let at = |v: i64| -> Assignment { [(x.clone(), int(v))].into_iter().collect() };
        let gt5 = LinearAtom::compare(LinearExpr::var(&x), Relation::Gt, LinearExpr::constant(int(5)));
        assert!(gt5.satisfies(&at(6)).unwrap());
        assert!(!gt5.satisfies(&at(5)).unwrap());
        let eq0 = LinearAtom::new(LinearExpr::var(&x), Relation::Eq);
        assert!(eq0.satisfies(&at(0)).unwrap());
        let ne0 = LinearAtom::new(LinearExpr::var(&x), Relation::Neq);
        assert!(!ne0.satisfies(&at(0)).unwrap());
    }

    #[test]
    fn canonical_relations_only() {
        let mut vocab = Vocabulary::new();
        let x = vocab.intern("x");
        let a = LinearAtom::new(LinearExpr::var(&x), Relation::Ge);
        assert_eq!(a.relation(), Relation::Le);
        assert_eq!(a.expr().coefficient(&x), int(-1));
        let b = LinearAtom::new(LinearExpr::var(&x), Relation::Gt);
        assert_eq!(b.relation(), Relation::Lt);
    }

    #[test]
    fn negation_cases() {
        let mut vocab = Vocabulary::new();
        let x = vocab.intern("x");
        let e = LinearExpr::var(&x);
        let le = LinearAtom::new(e.clone(), Relation::Le);
        assert_eq!(le.negate(), vec![LinearAtom::new(e.clone(), Relation::Gt)]);
        let eq = LinearAtom::new(e.clone(), Relation::Eq);
        assert_eq!(
            eq.negate(),
            vec![
                LinearAtom::new(e.clone(), Relation::Lt),
                LinearAtom::new(e.clone(), Relation::Gt)
            ]
        );
        let ne = LinearAtom::new(e.clone(), Relation::Neq);
        assert_eq!(ne.negate(), vec![eq]);
    }

    #[test]
    fn negating_stress_alert() {
        let (mut vocab, _) = watch();
        let stress = vocab.intern("stress");
        let alert = LinearAtom::compare(LinearExpr::var(&stress), Relation::Gt, LinearExpr::constant(int(50)));
        let expected = LinearAtom::compare(LinearExpr::var(&stress), Relation::Le, LinearExpr::constant(int(50)));
        assert_eq!(alert.negate(), vec![expected]);
    }

    #[test]
    fn renders_canonical_text() {
        let mut vocab = Vocabulary::new();
        let x = vocab.intern("x");
        let y = vocab.intern("y");
        let e = LinearExpr::from_terms([(ratio(1, 2), x), (int(-3), y)], int(-1));
        let atom = LinearAtom::new(e, Relation::Lt);
        assert_eq!(atom.to_string(), "1/2*x - 3*y - 1 < 0");
        assert_eq!(
            LinearAtom::new(LinearExpr::constant(int(2)), Relation::Eq).to_string(),
            "2 = 0"
        );
        let both: ConjunctiveFormula = [atom.clone(), atom].into_iter().collect();
        assert_eq!(both.to_string(), "1/2*x - 3*y - 1 < 0 && 1/2*x - 3*y - 1 < 0");
        assert_eq!(ConjunctiveFormula::new().to_string(), "true");
    }
}
