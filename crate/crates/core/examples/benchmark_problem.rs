//! Loads a shipped benchmark, solves it exactly and estimates its optimum
//! from sampled observations.

use pac_implicit::bench::{builtin_problem, exact_optimum, sample_dataset, DatasetConfig};
use pac_implicit::optimise::optimise_pac;
use pac_implicit::rational::{ratio, to_f64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "pollution".into());
    let spec = builtin_problem(&name)?;
    print!("{}", spec.render());

    let exact = exact_optimum(&spec.knowledge_base(), &spec.objective, spec.goal)?.ok_or("empty region")?;
    println!("exact optimum: {exact} ({:.6})", to_f64(&exact));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let config = DatasetConfig {
        noise: ratio(1, 10),
        ..DatasetConfig::new(200)
    };
    let observations = sample_dataset(&spec, &config, &mut rng)?.observations();
    let r = optimise_pac(
        &spec.knowledge_base(),
        &spec.objective,
        &ratio(1, 20),
        40,
        &observations,
        spec.goal,
    )?;
    println!(
        "estimate from {} noisy observations: {:.6}",
        observations.len(),
        to_f64(&r.estimate)
    );
    Ok(())
}
