//! Blurs an exact point into intervals, grounds the observation and checks
//! which formulas it witnesses.

use std::collections::BTreeMap;

use pac_implicit::linarith::{parse_atom, Assignment, Vocabulary};
use pac_implicit::pac::{blur, ground, noise_interval_width, witnessed, BlurConfig};
use pac_implicit::rational::int;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut vocab = Vocabulary::new();
    let x = vocab.intern("x");
    let y = vocab.intern("y");
    let point: Assignment = [(x.clone(), int(4)), (y.clone(), int(5))].into_iter().collect();
    let domain: BTreeMap<_, _> = [(x, (int(0), int(10))), (y, (int(0), int(10)))].into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let exact = blur(&point, &BlurConfig::exact(domain.clone()), &mut rng)?;
    println!("exact:  {exact:?} -> {}", ground(&exact));

    let sigma = 0.5;
    let noisy_config = BlurConfig {
        domain: domain.clone(),
        mask_probability: 0.0,
        sigma,
    };
    println!(
        "interval width at d = 2, sigma = {sigma}: {}",
        noise_interval_width(2, sigma)
    );
    let noisy = blur(&point, &noisy_config, &mut rng)?;
    println!("noisy:  {noisy:?} -> {}", ground(&noisy));

    let masked = blur(
        &point,
        &BlurConfig {
            mask_probability: 1.0,
            ..noisy_config
        },
        &mut rng,
    )?;
    println!("masked: {masked:?} -> {}", ground(&masked));

    for q in ["x + y >= 2", "x + y <= 9", "x <= 4"] {
        let psi = [parse_atom(q, &mut vocab)?];
        println!(
            "{q}: exact {} noisy {} masked {}",
            witnessed(&exact, &psi)?,
            witnessed(&noisy, &psi)?,
            witnessed(&masked, &psi)?
        );
    }
    Ok(())
}
