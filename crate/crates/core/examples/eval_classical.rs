// Classical NAND tree evaluation: the exact fold, the randomized
// short-circuit evaluator, and its query count on hard instances.

use nandwalk::nand::{eval_nand, hard_instance, randomized_eval, randomized_eval_with, TreeInput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["01", "11", "0110", "0011", "10010111"] {
        let input: TreeInput = text.parse()?;
        let trace = randomized_eval(&input, 7);
        println!(
            "{text:>10}  value {}  randomized {} after {} queries",
            eval_nand(&input) as u8,
            trace.value as u8,
            trace.queries
        );
    }

    println!("\n depth  leaves  mean queries  exponent");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for depth in [4u32, 6, 8, 10] {
        let trials = 200;
        let mut total = 0usize;
        for _ in 0..trials {
            let input = hard_instance(depth, true, &mut rng);
            let trace = randomized_eval_with(&input, &mut rng);
            assert_eq!(trace.value, eval_nand(&input));
            total += trace.queries;
        }
        let mean = total as f64 / trials as f64;
        let n = (1u64 << depth) as f64;
        println!(
            "{depth:>6}  {:>6}  {mean:>12.1}  {:>8.3}",
            1u64 << depth,
            mean.ln() / n.ln()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
