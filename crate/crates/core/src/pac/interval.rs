use std::collections::BTreeMap;
use std::fmt;

use crate::feasibility::{entails, FeasibilityError};
use crate::linarith::{Assignment, ConjunctiveFormula, LinearAtom, LinearExpr, Relation, Variable};
use crate::rational::Rational;

use super::PacError;

/// Closed interval with optional infinite ends (`None` is ±∞).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Interval {
    lower: Option<Rational>,
    upper: Option<Rational>,
}

impl Interval {
    pub fn new(lower: Option<Rational>, upper: Option<Rational>) -> Result<Self, PacError> {
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if l > u {
                return Err(PacError::InvalidInterval(format!("[{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn closed(lower: Rational, upper: Rational) -> Result<Self, PacError> {
        Self::new(Some(lower), Some(upper))
    }

    pub fn point(value: Rational) -> Self {
        Self {
            lower: Some(value.clone()),
            upper: Some(value),
        }
    }

    /// `(-∞, +∞)`
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn lower(&self) -> Option<&Rational> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&Rational> {
        self.upper.as_ref()
    }

    pub fn is_point(&self) -> bool {
        matches!((&self.lower, &self.upper), (Some(l), Some(u)) if l == u)
    }

    pub fn is_unbounded(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }

    pub fn contains(&self, value: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| l <= value) && self.upper.as_ref().is_none_or(|u| value <= u)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lower {
            Some(l) => write!(f, "[{l}, ")?,
            None => write!(f, "(-inf, ")?,
        }
        match &self.upper {
            Some(u) => write!(f, "{u}]"),
            None => write!(f, "+inf)"),
        }
    }
}

/// A blurred observation: one interval per observed variable. Variables
/// that do not appear are fully masked.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PartialInterval {
    bounds: BTreeMap<Variable, Interval>,
}

impl PartialInterval {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &Variable, interval: Interval) -> Self {
        self.set(var, interval);
        self
    }

    pub fn set(&mut self, var: &Variable, interval: Interval) {
        self.bounds.insert(var.clone(), interval);
    }

    /// Point observation of every assigned variable.
    pub fn from_point(point: &Assignment) -> Self {
        Self {
            bounds: point
                .iter()
                .map(|(v, x)| (v.clone(), Interval::point(x.clone())))
                .collect(),
        }
    }

    /// The interval for `var`, `(-∞, +∞)` when unobserved.
    pub fn get(&self, var: &Variable) -> Interval {
        self.bounds.get(var).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Interval)> {
        self.bounds.iter()
    }

    pub fn contains(&self, point: &Assignment) -> bool {
        self.bounds
            .iter()
            .all(|(v, i)| point.get(v).is_none_or(|x| i.contains(x)))
    }

    pub fn is_fully_masked(&self) -> bool {
        self.bounds.values().all(Interval::is_unbounded)
    }
}

impl fmt::Debug for PartialInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.bounds.iter()).finish()
    }
}

/// Conjunction of the finite bounds of `phi`. Point observations become a
/// single equality.
pub fn ground(phi: &PartialInterval) -> ConjunctiveFormula {
    let mut out = ConjunctiveFormula::new();
    for (var, interval) in phi.iter() {
        let x = LinearExpr::var(var);
        if interval.is_point() {
            let c = LinearExpr::constant(interval.lower().unwrap().clone());
            out.push(LinearAtom::compare(x, Relation::Eq, c));
            continue;
        }
        if let Some(l) = interval.lower() {
            out.push(LinearAtom::compare(
                x.clone(),
                Relation::Ge,
                LinearExpr::constant(l.clone()),
            ));
        }
        if let Some(u) = interval.upper() {
            out.push(LinearAtom::compare(x, Relation::Le, LinearExpr::constant(u.clone())));
        }
    }
    out
}

/// True when `psi` holds under every assignment `phi` allows.
pub fn witnessed(phi: &PartialInterval, psi: &[LinearAtom]) -> Result<bool, FeasibilityError> {
    entails(&ground(phi), psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linarith::{parse_atom, Vocabulary};
    use crate::rational::int;

    fn closed(l: i64, u: i64) -> Interval {
        Interval::closed(int(l), int(u)).unwrap()
    }

    #[test]
    fn grounds_box_example() {
        let mut v = Vocabulary::new();
        let x = v.intern("x");
        let y = v.intern("y");
        let phi = PartialInterval::new().with(&x, closed(1, 5)).with(&y, closed(2, 6));
        let expected: ConjunctiveFormula = ["1 <= x", "x <= 5", "2 <= y", "y <= 6"]
            .iter()
            .map(|s| parse_atom(s, &mut v).unwrap())
            .collect();
        assert_eq!(ground(&phi), expected);
    }

    #[test]
    fn masked_grounds_to_true() {
        let mut v = Vocabulary::new();
        let x = v.intern("x");
        let phi = PartialInterval::new().with(&x, Interval::unbounded());
        assert!(ground(&phi).is_empty());
        assert!(phi.is_fully_masked());
    }

    #[test]
    fn point_grounds_to_equality() {
        let mut v = Vocabulary::new();
        let hr = v.intern("hr");
        let ox = v.intern("ox");
        let phi = PartialInterval::new()
            .with(&hr, Interval::point(int(92)))
            .with(&ox, Interval::point(int(99)));
        let expected: ConjunctiveFormula = ["hr = 92", "ox = 99"]
            .iter()
            .map(|s| parse_atom(s, &mut v).unwrap())
            .collect();
        assert_eq!(ground(&phi), expected);
    }

    #[test]
    fn witnessing() {
        let mut v = Vocabulary::new();
        let x = v.intern("x");
        let gt5 = vec![parse_atom("x > 5", &mut v).unwrap()];
        let six = PartialInterval::new().with(&x, Interval::point(int(6)));
        assert!(witnessed(&six, &gt5).unwrap());
        let masked = PartialInterval::new().with(&x, Interval::unbounded());
        assert!(!witnessed(&masked, &gt5).unwrap());
        let ge1 = vec![parse_atom("x >= 1", &mut v).unwrap()];
        assert!(witnessed(&PartialInterval::new().with(&x, closed(1, 2)), &ge1).unwrap());
    }

    #[test]
    fn reversed_interval_is_rejected() {
        assert!(Interval::closed(int(2), int(1)).is_err());
    }
}
