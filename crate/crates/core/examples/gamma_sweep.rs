// A small γ sweep through the experiment harness, written as CSV.

use nandwalk::harness::{sweep, sweep_csv, ExperimentConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = ExperimentConfig::defaults("sweep");
    config.leaves = vec![16];
    config.instances = 8;
    config.gammas = vec![4.0, 8.0, 16.0, 32.0];
    config.seed = 3;

    let outcome = sweep(&config)?;
    print!("{}", String::from_utf8(sweep_csv(&config, &outcome)?)?);
    for s in &outcome.summary.per_gamma {
        println!(
            "gamma {:>4}: error rate {:.3}, mean |p - T0^2| {:.4}",
            s.gamma, s.error_rate, s.mean_abs_dev
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
