// Parity of k bits written as a NAND tree with k² leaves.

use nandwalk::nand::{parity_blocks, parity_layout};
use nandwalk::{embed_parity, eval_nand};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let layout = parity_layout(4)?;
    let labels: Vec<String> = layout
        .iter()
        .map(|l| format!("{}x{}", if l.negated { "!" } else { "" }, l.var))
        .collect();
    println!("k = 4 leaves: {}", labels.join(" "));
    println!("blocks: {:?}", parity_blocks(4)?);

    let vars = [true, false, true, true];
    let tree = embed_parity(&vars)?;
    println!(
        "x = 1011 -> leaves {tree}, tree value {}",
        eval_nand(&tree) as u8
    );

    for k in [2usize, 4, 8] {
        let mut mismatches = 0;
        for mask in 0u32..1 << k {
            let vars: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
            let even = mask.count_ones() % 2 == 0;
            mismatches += (eval_nand(&embed_parity(&vars)?) != even) as usize;
        }
        println!(
            "k = {k}: {} assignments, {mismatches} mismatches",
            1u32 << k
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
