//! How many observations a decision needs, and how many failures it
//! tolerates.

use pac_implicit::pac::{failure_budget, sample_count};
use pac_implicit::rational::{ratio, to_f64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (gamma, delta) in [
        (ratio(1, 10), ratio(1, 20)),
        (ratio(1, 20), ratio(1, 100)),
        (ratio(1, 100), ratio(1, 100)),
    ] {
        let m = sample_count(&gamma, &delta)?;
        println!("gamma = {:<5} delta = {:<5} m = {m}", to_f64(&gamma), to_f64(&delta));
    }
    for eps in [ratio(0, 1), ratio(1, 20), ratio(1, 10), ratio(3, 5)] {
        println!(
            "epsilon = {:<5} budget at m = 150: {}",
            to_f64(&eps),
            failure_budget(&eps, 150)
        );
    }
    Ok(())
}
