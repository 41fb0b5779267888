//! Samples a labelled dataset for a benchmark and prints it in `.data`
//! format.
//!
//! cargo run --example generate_dataset -- pollution 100 0 > pollution.data

use pac_implicit::bench::{format_dataset, resolve_problems, sample_dataset, DatasetConfig, DEFAULT_SEED};
use pac_implicit::rational::parse_rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let problem = args.first().map_or("pollution", String::as_str);
    let count = args.get(1).map_or(Ok(100), |s| s.parse())?;
    let noise = parse_rational(args.get(2).map_or("0", String::as_str))?;

    let spec = resolve_problems(problem, DEFAULT_SEED)?.remove(0);
    let config = DatasetConfig {
        noise,
        ..DatasetConfig::new(count)
    };
    let dataset = sample_dataset(&spec, &config, &mut ChaCha8Rng::seed_from_u64(DEFAULT_SEED))?;
    print!("{}", format_dataset(&dataset));
    Ok(())
}
