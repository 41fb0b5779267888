//! Fourier–Motzkin elimination, kept as an independent cross-check for the
//! simplex procedure on small systems.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};

use super::FeasibilityError;
use crate::linarith::{ConjunctiveFormula, Relation, Variable};
use crate::rational::Rational;

pub const MAX_VARS: usize = 5;
pub const MAX_ATOMS: usize = 12;

/// `Σ coeffs[i]·x_i + constant (< | ≤) 0`
#[derive(Clone, PartialEq, Eq, Hash)]
struct Row {
    coeffs: Vec<Rational>,
    constant: Rational,
    strict: bool,
}

impl Row {
    /// Scales so the first nonzero coefficient has magnitude one.
    fn normalised(mut self) -> Row {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c = &*c / &lead;
            }
            self.constant = &self.constant / &lead;
        }
        self
    }
}

/// Decides satisfiability of a small conjunction by eliminating variables.
pub fn fm_feasible(formula: &ConjunctiveFormula) -> Result<bool, FeasibilityError> {
    let vars: Vec<Variable> = formula
        .iter()
        .flat_map(|a| a.expr().vars().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if vars.len() > MAX_VARS || formula.len() > MAX_ATOMS {
        return Err(FeasibilityError::SizeLimitExceeded {
            vars: vars.len(),
            atoms: formula.len(),
        });
    }

    let mut rows = Vec::new();
    let mut equalities = Vec::new();
    for atom in formula {
        let coeffs: Vec<Rational> = vars.iter().map(|v| atom.expr().coefficient(v)).collect();
        let constant = atom.expr().constant_term().clone();
        match atom.relation() {
            Relation::Le | Relation::Lt => rows.push(Row {
                coeffs,
                constant,
                strict: atom.relation() == Relation::Lt,
            }),
            Relation::Eq => equalities.push(Row {
                coeffs,
                constant,
                strict: false,
            }),
            Relation::Neq => return Err(FeasibilityError::UnexpectedNeq(atom.to_string())),
            Relation::Ge | Relation::Gt => unreachable!("atoms are canonical"),
        }
    }

    // Each equality with a live variable is solved for it and substituted
    // into everything else.
    while let Some(eq) = equalities.pop() {
        let Some(k) = eq.coeffs.iter().position(|c| !c.is_zero()) else {
            if !eq.constant.is_zero() {
                return Ok(false);
            }
            continue;
        };
        for row in rows.iter_mut().chain(equalities.iter_mut()) {
            if row.coeffs[k].is_zero() {
                continue;
            }
            let factor = &row.coeffs[k] / &eq.coeffs[k];
            for (c, e) in row.coeffs.iter_mut().zip(&eq.coeffs) {
                *c -= &factor * e;
            }
            row.constant -= &factor * &eq.constant;
        }
    }

    let mut rows = match prune(rows) {
        Some(rows) => rows,
        None => return Ok(false),
    };
    let mut live: Vec<usize> = (0..vars.len()).collect();
    while !live.is_empty() {
        // cheapest variable first: fewest generated rows
        let (pick, k) = live
            .iter()
            .enumerate()
            .min_by_key(|(_, &k)| {
                let up = rows.iter().filter(|r| r.coeffs[k].is_positive()).count();
                let down = rows.iter().filter(|r| r.coeffs[k].is_negative()).count();
                up * down
            })
            .map(|(i, &k)| (i, k))
            .expect("nonempty");
        live.swap_remove(pick);
        let mut upper = Vec::new(); // coefficient > 0: bounds x_k from above
        let mut lower = Vec::new();
        let mut next = Vec::new();
        for row in rows {
            if row.coeffs[k].is_positive() {
                upper.push(row);
            } else if row.coeffs[k].is_negative() {
                lower.push(row);
            } else {
                next.push(row);
            }
        }
        for p in &upper {
            for n in &lower {
                // (-n_k)·p + p_k·n cancels x_k; both multipliers positive
                let a = -n.coeffs[k].clone();
                let b = p.coeffs[k].clone();
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(pc, nc)| &a * pc + &b * nc)
                    .collect();
                next.push(Row {
                    coeffs,
                    constant: &a * &p.constant + &b * &n.constant,
                    strict: p.strict || n.strict,
                });
            }
        }
        rows = match prune(next) {
            Some(rows) => rows,
            None => return Ok(false),
        };
    }
    Ok(true)
}

/// Normalises rows, keeps only the tightest of each parallel family and
/// drops constant rows. `None` when a constant row is violated.
fn prune(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut best: HashMap<Vec<Rational>, Row> = HashMap::new();
    for row in rows {
        if row.coeffs.iter().all(Zero::is_zero) {
            let holds = if row.strict {
                row.constant.is_negative()
            } else {
                !row.constant.is_positive()
            };
            if !holds {
                return None;
            }
            continue;
        }
        let row = row.normalised();
        match best.get_mut(&row.coeffs) {
            // Σ + c ≤ 0 is tighter for larger c, and strict beats non-strict
            Some(kept) if (&row.constant, row.strict) > (&kept.constant, kept.strict) => *kept = row,
            Some(_) => {}
            None => {
                best.insert(row.coeffs.clone(), row);
            }
        }
    }
    let mut out: Vec<Row> = best.into_values().collect();
    out.sort_by(|a, b| (&a.coeffs, &a.constant).cmp(&(&b.coeffs, &b.constant)));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linarith::{parse_atom, Vocabulary};

    fn formula(src: &[&str]) -> ConjunctiveFormula {
        let mut vocab = Vocabulary::new();
        src.iter().map(|s| parse_atom(s, &mut vocab).unwrap()).collect()
    }

    #[test]
    fn small_cases() {
        assert!(!fm_feasible(&formula(&["x + y <= 1", "x >= 1", "y >= 1"])).unwrap());
        assert!(fm_feasible(&formula(&["x < 0", "x > -1"])).unwrap());
        assert!(!fm_feasible(&formula(&["x < 0", "x > 0"])).unwrap());
        assert!(fm_feasible(&formula(&["x <= 0", "x >= 0"])).unwrap());
        assert!(!fm_feasible(&formula(&["x + y = 1", "x - y = 1", "y > 0"])).unwrap());
        assert!(fm_feasible(&formula(&[])).unwrap());
    }

    #[test]
    fn size_limit() {
        let many: Vec<String> = (0..6).map(|i| format!("x{i} <= 1")).collect();
        let refs: Vec<&str> = many.iter().map(String::as_str).collect();
        assert!(matches!(
            fm_feasible(&formula(&refs)),
            Err(FeasibilityError::SizeLimitExceeded { vars: 6, .. })
        ));
    }
}
