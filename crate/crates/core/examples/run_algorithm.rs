// End to end: every instance with four leaves, decided by one wave packet.

use nandwalk::{eval_nand, run_algorithm, RunConfig, TreeInput};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::new(4, 16.0)?;
    println!(
        "L = {}, M = {}, t = {}",
        config.packet_len, config.half_len, config.t_run
    );
    println!(
        "{:>6} {:>5} {:>9} {:>9}",
        "input", "NAND", "p_right", "decision"
    );
    let mut wrong = 0;
    for input in TreeInput::all(2) {
        let verdict = run_algorithm(&input, &config)?;
        let nand = eval_nand(&input);
        wrong += (verdict.decision != nand) as usize;
        println!(
            "{input:>6} {:>5} {:>9.4} {:>9}",
            nand as u8, verdict.p_right, verdict.decision as u8
        );
    }
    println!("{wrong} wrong decisions");

    let verdict = run_algorithm(&"0110".parse()?, &config)?;
    println!("\n{}", serde_json::to_string_pretty(&verdict)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
