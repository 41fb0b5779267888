use rand::Rng;

use crate::linarith::{ConjunctiveFormula, LinearAtom, LinearExpr, Relation, Vocabulary};
use crate::optimise::Goal;
use crate::rational::{int, ratio, snap_f64, Rational};

use super::lp::exact_optimum;
use super::{BenchError, ProblemSpec};

/// Slope of the slanted prism faces, a rational just above `√3` so each
/// prism has a (nearly) equilateral triangular footprint.
pub const PRISM_SLOPE: (i64, i64) = (97, 56);

const COEFF_BITS: u32 = 16;

fn check_dims(n: usize) -> Result<(), BenchError> {
    if (2..=4).contains(&n) {
        Ok(())
    } else {
        Err(BenchError::OutOfRange {
            name: "n",
            value: n.to_string(),
            range: "2..=4",
        })
    }
}

fn uniform_snapped<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Rational {
    snap_f64(rng.random_range(lo..=hi), COEFF_BITS)
}

/// Coefficients and constant uniform in `[-1, 1]`.
fn random_objective<R: Rng + ?Sized>(vocab: &Vocabulary, rng: &mut R) -> LinearExpr {
    let terms: Vec<_> = vocab
        .vars()
        .iter()
        .map(|v| (uniform_snapped(rng, -1.0, 1.0), v.clone()))
        .collect();
    let constant = uniform_snapped(rng, -1.0, 1.0);
    LinearExpr::from_terms(terms, constant)
}

fn unit_box(n: usize) -> (Vocabulary, Vec<(Rational, Rational)>) {
    let vocab = Vocabulary::from_names((1..=n).map(|i| format!("x{i}")));
    (vocab, vec![(int(0), int(1)); n])
}

fn finish(mut spec: ProblemSpec) -> Result<ProblemSpec, BenchError> {
    spec.true_optimum = exact_optimum(&spec.knowledge_base(), &spec.objective, spec.goal)?;
    if spec.true_optimum.is_none() {
        return Err(BenchError::InfeasibleProblem(spec.name));
    }
    Ok(spec)
}

/// Intersection of one triangular prism per variable pair inside `[0,1]^n`,
/// with a random objective to maximise.
///
/// For the pair `(xi, xj)` the prism is `xj ≥ 0`, `xj ≤ s·xi`,
/// `xj ≤ s·(1 - xi)`: a triangle on the unit base of the `xi` axis,
/// extended along every other axis.
pub fn gen_simplexn<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ProblemSpec, BenchError> {
    check_dims(n)?;
    let (vocab, domain) = unit_box(n);
    let s = ratio(PRISM_SLOPE.0, PRISM_SLOPE.1);
    let vars = vocab.vars();
    let mut hard = ConjunctiveFormula::new();
    for i in 0..n {
        for j in i + 1..n {
            let xi = LinearExpr::var(&vars[i]);
            let xj = LinearExpr::var(&vars[j]);
            hard.push(LinearAtom::compare(xj.clone(), Relation::Ge, LinearExpr::zero()));
            hard.push(LinearAtom::compare(xj.clone(), Relation::Le, xi.scale(&s)));
            let rest = (LinearExpr::constant(int(1)) - xi).scale(&s);
            hard.push(LinearAtom::compare(xj, Relation::Le, rest));
        }
    }
    let objective = random_objective(&vocab, rng);
    finish(ProblemSpec {
        name: format!("simplex{n}"),
        vocab,
        domain,
        hard_constraints: hard,
        objective,
        goal: Goal::Maximise,
        true_optimum: None,
    })
}

/// An axis-aligned box `[a_i, b_i]` inside `[0,1]^n` with `a_i` drawn from
/// `[0.05, 0.3]` and `b_i` from `[0.7, 0.95]`, with a random objective to
/// maximise.
pub fn gen_cuben<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ProblemSpec, BenchError> {
    check_dims(n)?;
    let (vocab, domain) = unit_box(n);
    let mut hard = ConjunctiveFormula::new();
    for var in vocab.vars() {
        let a = uniform_snapped(rng, 0.05, 0.3);
        let b = uniform_snapped(rng, 0.7, 0.95);
        let x = LinearExpr::var(var);
        hard.push(LinearAtom::compare(x.clone(), Relation::Ge, LinearExpr::constant(a)));
        hard.push(LinearAtom::compare(x, Relation::Le, LinearExpr::constant(b)));
    }
    let objective = random_objective(&vocab, rng);
    finish(ProblemSpec {
        name: format!("cube{n}"),
        vocab,
        domain,
        hard_constraints: hard,
        objective,
        goal: Goal::Maximise,
        true_optimum: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::check_feasible;
    use crate::linarith::Assignment;
    use num_traits::Signed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constraint_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(gen_simplexn(2, &mut rng).unwrap().hard_constraints.len(), 3);
        assert_eq!(gen_simplexn(3, &mut rng).unwrap().hard_constraints.len(), 9);
        assert_eq!(gen_simplexn(4, &mut rng).unwrap().hard_constraints.len(), 18);
        assert_eq!(gen_cuben(2, &mut rng).unwrap().hard_constraints.len(), 4);
        assert_eq!(gen_cuben(4, &mut rng).unwrap().hard_constraints.len(), 8);
        assert!(gen_simplexn(5, &mut rng).is_err());
        assert!(gen_cuben(1, &mut rng).is_err());
    }

    #[test]
    fn objective_bounded_on_box_corners() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            for _ in 0..20 {
                let spec = gen_simplexn(n, &mut rng).unwrap();
                let bound = int(n as i64 + 1);
                for mask in 0..(1u32 << n) {
                    let corner: Assignment = spec
                        .vars()
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (v.clone(), int(i64::from((mask >> i) & 1))))
                        .collect();
                    assert!(spec.objective.evaluate(&corner).unwrap().abs() <= bound);
                }
                assert!(spec.true_optimum.unwrap().abs() <= bound);
            }
        }
    }

    #[test]
    fn cube_faces_inside_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=4 {
            let spec = gen_cuben(n, &mut rng).unwrap();
            // leaving the unit box from inside the cube is impossible
            for var in spec.vars() {
                for outside in ["< 0", "> 1"] {
                    let mut f = spec.hard_constraints.clone();
                    let atom = crate::linarith::parse_atom_in(&format!("{var} {outside}"), &spec.vocab).unwrap();
                    f.push(atom);
                    assert!(!check_feasible(&f).unwrap().is_sat());
                }
            }
        }
    }
}
