// The packet's momentum profile: Parseval, tail mass, the reflected
// component, and how much weight sits near zero energy.

use nandwalk::dynamics::initial_packet;
use nandwalk::lattice::{build_runway, dense_eig};
use nandwalk::spectral::{
    diagnostics, error_budget, parseval_integral, standard_window, tail_bound, tail_mass,
    window_weight,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for len in [16usize, 64, 256] {
        println!(
            "L = {len:>3}: (1/2π)∫|A|² = {:.12}",
            parseval_integral(len)?
        );
        for eps in [0.1, 0.3] {
            println!(
                "    eps {eps}: tail {:.5} < {:.5}",
                tail_mass(len, eps)?,
                tail_bound(len, eps)
            );
        }
    }

    let failed = diagnostics(&[16, 64, 256], &[0.1, 0.3], 256)?
        .into_iter()
        .filter(|r| !r.pass)
        .count();
    println!("diagnostic rows failing: {failed}");

    let runway = build_runway(120)?;
    let eig = dense_eig(&runway)?;
    let psi0 = initial_packet(40, runway.index_map())?;
    for eps in [0.05, 0.1, 0.3, std::f64::consts::PI] {
        println!(
            "free packet L = 40, weight in window eps = {eps:.3}: {:.4}",
            window_weight(&eig, &psi0, eps)?
        );
    }

    for gamma in [4.0, 16.0, 64.0] {
        let n = 16;
        let (eps, d) = standard_window(n);
        println!(
            "gamma {gamma:>4}: error budget {:.3}",
            error_budget(gamma * (n as f64).sqrt(), eps, d)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
