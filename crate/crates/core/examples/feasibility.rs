//! Exact feasibility and entailment over the rationals, with strict
//! inequalities and a Fourier–Motzkin cross-check.

use pac_implicit::feasibility::{check_feasible, concretize, entails, fm_feasible};
use pac_implicit::linarith::{parse_atom, ConjunctiveFormula, Vocabulary};

fn conj(src: &[&str], vocab: &mut Vocabulary) -> ConjunctiveFormula {
    src.iter().map(|s| parse_atom(s, vocab).expect("valid atom")).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut vocab = Vocabulary::new();

    let open = conj(&["x + y < 1", "x > 0", "y > 0", "3*x - y = 1/2"], &mut vocab);
    let verdict = check_feasible(&open)?;
    println!("{open}\n  simplex: {}  fm: {}", verdict.is_sat(), fm_feasible(&open)?);
    if let Some(model) = verdict.model() {
        let point = concretize(model, &open);
        let shown: Vec<String> = point.iter().map(|(v, x)| format!("{v} = {x}")).collect();
        println!(
            "  model {model:?}\n  concrete point {} satisfies: {}",
            shown.join(", "),
            open.satisfies(&point)?
        );
    }

    let closed = conj(&["x + y <= 1", "x >= 1", "y > 0"], &mut vocab);
    println!(
        "{closed}\n  simplex: {}  fm: {}",
        check_feasible(&closed)?.is_sat(),
        fm_feasible(&closed)?
    );

    let kb = conj(&["x >= 2", "y >= x + 1"], &mut vocab);
    for q in ["y >= 3", "y > 3", "x + y >= 5"] {
        let query = [parse_atom(q, &mut vocab)?];
        println!("{kb} |= {q}: {}", entails(&kb, &query)?);
    }
    Ok(())
}
