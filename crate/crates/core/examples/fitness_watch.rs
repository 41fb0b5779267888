//! Decides `stress > 50` from three fitness-watch readings, one of which
//! has lost its oxygen value.

use std::path::Path;

use pac_implicit::bench::read_dataset;
use pac_implicit::linarith::{parse_atom, ConjunctiveFormula, Vocabulary};
use pac_implicit::pac::{decide_pac, SampleOutcome};
use pac_implicit::rational::ratio;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut vocab = Vocabulary::new();

    let mut kb = ConjunctiveFormula::new();
    for line in std::fs::read_to_string(data.join("fitness_watch.kb"))?.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            kb.push(parse_atom(line, &mut vocab)?);
        }
    }
    let query = [parse_atom("stress > 50", &mut vocab)?];
    let readings = read_dataset(data.join("fitness_watch.data"), &mut vocab)?.observations();

    println!("kb: {kb}");
    let decision = decide_pac(&kb, &query, &ratio(3, 5), &readings)?;
    for (phi, outcome) in readings.iter().zip(&decision.per_sample) {
        let mark = if *outcome == SampleOutcome::Entailed {
            "entailed"
        } else {
            "not entailed"
        };
        println!("{phi:?}: {mark}");
    }
    println!(
        "{:?} with FAILED = {}, B = {}",
        decision.verdict, decision.failed_count, decision.budget
    );
    Ok(())
}
