use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_traits::Signed;

use crate::feasibility::check_feasible;
use crate::linarith::{
    parse_atom_in, parse_expr_in, Assignment, ConjunctiveFormula, LinearAtom, LinearExpr, Relation, Variable,
    Vocabulary,
};
use crate::optimise::Goal;
use crate::rational::{parse_rational, ratio, to_decimal_string, Rational};

use super::dataset::{read_dataset, Dataset};
use super::lp::exact_optimum;
use super::BenchError;

/// An optimisation problem over a finite box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub name: String,
    pub vocab: Vocabulary,
    /// `[lo, hi]` per variable, indexed like `vocab`.
    pub domain: Vec<(Rational, Rational)>,
    pub hard_constraints: ConjunctiveFormula,
    pub objective: LinearExpr,
    pub goal: Goal,
    pub true_optimum: Option<Rational>,
}

/// Names accepted by [`builtin_problem`].
pub const BUILTIN_PROBLEMS: [&str; 2] = ["pollution", "police"];

const POLLUTION: &str = include_str!("../../data/pollution.prob");
const POLICE: &str = include_str!("../../data/police.prob");

/// Stated optima may be rounded; the exact optimum must lie within this
/// distance of them.
fn optimum_tolerance() -> Rational {
    ratio(1, 100)
}

impl ProblemSpec {
    pub fn dims(&self) -> usize {
        self.vocab.len()
    }

    pub fn vars(&self) -> &[Variable] {
        self.vocab.vars()
    }

    pub fn domain_map(&self) -> BTreeMap<Variable, (Rational, Rational)> {
        self.vars().iter().cloned().zip(self.domain.iter().cloned()).collect()
    }

    /// `lo ≤ x ≤ hi` for every variable.
    pub fn box_formula(&self) -> ConjunctiveFormula {
        let mut out = ConjunctiveFormula::new();
        for (var, (lo, hi)) in self.vars().iter().zip(&self.domain) {
            let x = LinearExpr::var(var);
            out.push(LinearAtom::compare(
                x.clone(),
                Relation::Ge,
                LinearExpr::constant(lo.clone()),
            ));
            out.push(LinearAtom::compare(x, Relation::Le, LinearExpr::constant(hi.clone())));
        }
        out
    }

    /// The box together with the hard constraints: the background
    /// knowledge handed to the learner.
    pub fn knowledge_base(&self) -> ConjunctiveFormula {
        self.box_formula().and(&self.hard_constraints)
    }

    pub fn in_box(&self, point: &Assignment) -> bool {
        self.vars()
            .iter()
            .zip(&self.domain)
            .all(|(v, (lo, hi))| point.get(v).is_some_and(|x| lo <= x && x <= hi))
    }

    /// Inside the box and satisfying every hard constraint.
    pub fn is_feasible_point(&self, point: &Assignment) -> bool {
        self.in_box(point) && self.hard_constraints.satisfies(point).unwrap_or(false)
    }

    /// Checks that the region is nonempty and, when an optimum is stated,
    /// that it matches the constraints.
    pub fn validate(&self) -> Result<(), BenchError> {
        if !check_feasible(&self.knowledge_base())?.is_sat() {
            return Err(BenchError::InfeasibleProblem(self.name.clone()));
        }
        if let Some(stated) = &self.true_optimum {
            let exact = exact_optimum(&self.knowledge_base(), &self.objective, self.goal)?
                .ok_or_else(|| BenchError::InfeasibleProblem(self.name.clone()))?;
            if (&exact - stated).abs() > optimum_tolerance() {
                return Err(BenchError::OptimumMismatch {
                    name: self.name.clone(),
                    stated: stated.to_string(),
                    exact: exact.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Reads a `.data` file whose columns are this problem's variables.
    pub fn read_dataset(&self, path: impl AsRef<Path>) -> Result<Dataset, BenchError> {
        let mut vocab = self.vocab.clone();
        let data = read_dataset(path, &mut vocab)?;
        if vocab.len() != self.dims() {
            let extra: Vec<&str> = vocab.vars()[self.dims()..].iter().map(Variable::name).collect();
            return Err(BenchError::parse(
                1,
                format!("variables {} are not part of problem `{}`", extra.join(", "), self.name),
            ));
        }
        Ok(data)
    }

    /// `.prob` text that [`ProblemSpec::parse`] reads back to an equal spec.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name: {}", self.name);
        let _ = writeln!(s, "dims: {}", self.dims());
        let _ = writeln!(s, "goal: {}", self.goal);
        if let Some(opt) = &self.true_optimum {
            let _ = writeln!(s, "optimum: {}", to_decimal_string(opt));
        }
        for (var, (lo, hi)) in self.vars().iter().zip(&self.domain) {
            let _ = writeln!(s, "var {var} {} {}", to_decimal_string(lo), to_decimal_string(hi));
        }
        for atom in &self.hard_constraints {
            let _ = writeln!(s, "con {atom}");
        }
        let _ = writeln!(s, "obj {}", self.objective);
        s
    }

    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut name = None;
        let mut dims = None;
        let mut goal = None;
        let mut optimum = None;
        let mut vocab = Vocabulary::new();
        let mut domain = Vec::new();
        let mut hard = ConjunctiveFormula::new();
        let mut objective = None;

        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| BenchError::parse(line_no, reason);
            if let Some((key, value)) = header(line) {
                let value = value.trim();
                match key {
                    "name" => name = Some(value.to_string()),
                    "dims" => dims = Some(value.parse::<usize>().map_err(|_| err(format!("bad dims `{value}`")))?),
                    "goal" => goal = Some(value.parse::<Goal>().map_err(err)?),
                    "optimum" => optimum = Some(parse_rational(value).map_err(|e| err(e.to_string()))?),
                    other => return Err(err(format!("unknown header `{other}`"))),
                }
                continue;
            }
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match keyword {
                "var" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let [var, lo, hi] = parts[..] else {
                        return Err(err("expected `var <name> <lo> <hi>`".into()));
                    };
                    if vocab.get(var).is_some() {
                        return Err(err(format!("variable `{var}` declared twice")));
                    }
                    if !is_identifier(var) {
                        return Err(err(format!("bad variable name `{var}`")));
                    }
                    let lo = parse_rational(lo).map_err(|e| err(e.to_string()))?;
                    let hi = parse_rational(hi).map_err(|e| err(e.to_string()))?;
                    if lo > hi {
                        return Err(err(format!("empty range for `{var}`")));
                    }
                    vocab.intern(var);
                    domain.push((lo, hi));
                }
                "con" => {
                    let atom = parse_atom_in(rest, &vocab).map_err(|e| err(e.to_string()))?;
                    if atom.relation() == Relation::Neq {
                        return Err(err("disequalities are not allowed as hard constraints".into()));
                    }
                    hard.push(atom);
                }
                "obj" => {
                    if objective.is_some() {
                        return Err(err("objective given twice".into()));
                    }
                    objective = Some(parse_expr_in(rest, &vocab).map_err(|e| err(e.to_string()))?);
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }

        let last = text.lines().count().max(1);
        let name = name.ok_or_else(|| BenchError::parse(last, "missing `name:` header"))?;
        let goal = goal.ok_or_else(|| BenchError::parse(last, "missing `goal:` header"))?;
        let objective = objective.ok_or_else(|| BenchError::parse(last, "missing `obj` line"))?;
        if vocab.is_empty() {
            return Err(BenchError::parse(last, "no variables declared"));
        }
        if let Some(d) = dims {
            if d != vocab.len() {
                return Err(BenchError::parse(
                    last,
                    format!("dims: {d} but {} variables declared", vocab.len()),
                ));
            }
        }
        Ok(ProblemSpec {
            name,
            vocab,
            domain,
            hard_constraints: hard,
            objective,
            goal,
            true_optimum: optimum,
        })
    }
}

fn header(line: &str) -> Option<(&str, &str)> {
    let (key, value) = line.split_once(':')?;
    let key = key.trim();
    is_identifier(key).then_some((key, value))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Reads and validates a `.prob` file.
pub fn load_problem(path: impl AsRef<Path>) -> Result<ProblemSpec, BenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    let spec = ProblemSpec::parse(&text)?;
    spec.validate()?;
    Ok(spec)
}

/// One of the shipped problems, parsed and validated.
pub fn builtin_problem(name: &str) -> Result<ProblemSpec, BenchError> {
    let text = match name {
        "pollution" => POLLUTION,
        "police" => POLICE,
        other => return Err(BenchError::UnknownProblem(other.to_string())),
    };
    let spec = ProblemSpec::parse(text)?;
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    const TOY: &str = "\
name: toy
dims: 2
goal: maximise
optimum: 3
var x 0 2
var y 0 2
con x + y <= 3
obj x + y
";

    #[test]
    fn parses_and_validates_toy() {
        let spec = ProblemSpec::parse(TOY).unwrap();
        assert_eq!(spec.dims(), 2);
        assert_eq!(spec.goal, Goal::Maximise);
        assert_eq!(spec.true_optimum, Some(int(3)));
        spec.validate().unwrap();
    }

    #[test]
    fn render_round_trips() {
        let spec = ProblemSpec::parse(TOY).unwrap();
        assert_eq!(ProblemSpec::parse(&spec.render()).unwrap(), spec);
    }

    #[test]
    fn malformed_relation_reports_line() {
        let bad = TOY.replace("con x + y <= 3", "con x + y =< 3");
        match ProblemSpec::parse(&bad) {
            Err(BenchError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_variable_rejected() {
        let bad = TOY.replace("obj x + y", "obj x + z");
        assert!(matches!(
            ProblemSpec::parse(&bad),
            Err(BenchError::Parse { line: 8, .. })
        ));
    }

    #[test]
    fn infeasible_region_rejected() {
        let bad = TOY.replace("con x + y <= 3", "con x + y >= 5");
        let spec = ProblemSpec::parse(&bad).unwrap();
        assert!(matches!(spec.validate(), Err(BenchError::InfeasibleProblem(_))));
    }

    #[test]
    fn wrong_optimum_rejected() {
        let bad = TOY.replace("optimum: 3", "optimum: 3.5");
        let spec = ProblemSpec::parse(&bad).unwrap();
        assert!(matches!(spec.validate(), Err(BenchError::OptimumMismatch { .. })));
    }

    #[test]
    fn builtins_load() {
        let p = builtin_problem("pollution").unwrap();
        assert_eq!(p.dims(), 6);
        assert_eq!(p.goal, Goal::Minimise);
        assert_eq!(p.true_optimum, Some(ratio(3215, 100)));
        let q = builtin_problem("police").unwrap();
        assert_eq!(q.dims(), 5);
        assert_eq!(q.goal, Goal::Minimise);
        assert_eq!(q.true_optimum, Some(ratio(337, 100)));
        assert!(builtin_problem("nope").is_err());
    }
}
