// Chebyshev propagation checked against exact eigenbasis evolution.

use nandwalk::dynamics::{energy_moments, evolve_cheb, evolve_exact, initial_packet, prob_right};
use nandwalk::lattice::{build_full, dense_eig};
use nandwalk::TreeInput;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let input: TreeInput = "10010111".parse()?;
    let packet_len = 24;
    let graph = build_full(&input, 3 * packet_len)?;
    let psi0 = initial_packet(packet_len, graph.index_map())?;
    let (mean, second) = energy_moments(&graph, &psi0)?;
    println!(
        "dim {}, <H> = {mean:.2e}, <H^2> = {second:.12} (5/L = {:.12})",
        graph.dim(),
        5.0 / packet_len as f64
    );

    let eig = dense_eig(&graph)?;
    println!(
        "{:>6} {:>12} {:>12} {:>10}",
        "t", "L2 diff", "norm - 1", "p_right"
    );
    for t in [1.0, 6.0, 12.0, 24.0] {
        let cheb = evolve_cheb(&graph, &psi0, t, 1e-12)?;
        let exact = evolve_exact(&eig, &psi0, t)?;
        println!(
            "{t:>6} {:>12.2e} {:>12.2e} {:>10.5}",
            cheb.distance(&exact),
            cheb.norm() - 1.0,
            prob_right(&cheb, graph.index_map())
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
