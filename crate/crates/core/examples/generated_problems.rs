//! Builds the synthetic simplex and cube families and prints them.

use pac_implicit::bench::{gen_cuben, gen_simplexn};
use pac_implicit::rational::to_f64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=3 {
        for spec in [gen_simplexn(n, &mut rng)?, gen_cuben(n, &mut rng)?] {
            print!("{}", spec.render());
            let opt = spec.true_optimum.as_ref().map(to_f64);
            println!("# {} constraints, optimum {opt:?}\n", spec.hard_constraints.len());
        }
    }
    Ok(())
}
