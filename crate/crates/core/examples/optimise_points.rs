//! Bounds an objective from exact points and compares the estimate with
//! the best point.

use pac_implicit::linarith::{parse_expr, Assignment, ConjunctiveFormula, Vocabulary};
use pac_implicit::optimise::{optimise_pac, Goal};
use pac_implicit::pac::PartialInterval;
use pac_implicit::rational::{int, to_f64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut vocab = Vocabulary::new();
    let f = parse_expr("3*x - 2*y + 1", &mut vocab)?;
    let (x, y) = (vocab.vars()[0].clone(), vocab.vars()[1].clone());
    let points: Vec<Assignment> = [(1, 2), (4, 1), (-3, -7), (2, 0)]
        .into_iter()
        .map(|(a, b)| [(x.clone(), int(a)), (y.clone(), int(b))].into_iter().collect())
        .collect();
    let samples: Vec<PartialInterval> = points.iter().map(PartialInterval::from_point).collect();

    for goal in [Goal::Maximise, Goal::Minimise] {
        let r = optimise_pac(&ConjunctiveFormula::new(), &f, &int(0), 30, &samples, goal)?;
        let values = points.iter().map(|p| f.evaluate(p).expect("all variables set"));
        let best = match goal {
            Goal::Maximise => values.max(),
            Goal::Minimise => values.min(),
        }
        .expect("nonempty");
        let (lo, hi) = r.objective_bracket();
        println!(
            "{goal}: estimate {:.9} best point {best} bracket [{:.9}, {:.9}] after {} decisions",
            to_f64(&r.estimate),
            to_f64(&lo),
            to_f64(&hi),
            r.decide_calls
        );
    }
    Ok(())
}
