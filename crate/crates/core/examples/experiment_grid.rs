//! Runs a small sample-size by run grid and prints the summary and CSV.

use pac_implicit::bench::{format_summary, run_experiment, summarise, write_csv, ExperimentConfig};
use pac_implicit::rational::ratio;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig {
        sample_sizes: vec![50, 100],
        runs: 3,
        noise: ratio(1, 10),
        ..ExperimentConfig::new(std::env::args().nth(1).unwrap_or_else(|| "simplex2".into()))
    };
    let rows = run_experiment(&config)?;
    print!("{}", format_summary(&summarise(&rows)));
    println!();
    write_csv(&rows, std::io::stdout())?;
    Ok(())
}
