// Edge ratio y(E) and transmission T(E) near zero energy, and the scan of
// both against the NAND-dependent bounds.

use nandwalk::scattering::{log_grid, scan_bounds, scan_window, scatter, y_at_zero};
use nandwalk::{eval_nand, TreeInput};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["0110", "0011"] {
        let input: TreeInput = text.parse()?;
        println!(
            "instance {text}: NAND = {}, y(0) tag {:?}",
            eval_nand(&input) as u8,
            y_at_zero(&input)
        );
        println!("{:>12} {:>14} {:>12} {:>12}", "E", "y(E)", "|T|", "|R|");
        for energy in [1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0] {
            let p = scatter(&input, energy)?;
            println!(
                "{energy:>12.1e} {:>14.6e} {:>12.6} {:>12.6}",
                p.y.value(),
                p.t.norm(),
                p.r.norm()
            );
        }
        println!();
    }

    let input: TreeInput = "1001011001101001".parse()?;
    let window = scan_window(input.len());
    let report = scan_bounds(&input, &log_grid(1e-8, window, 64))?;
    println!(
        "N = {}: {} energies in (1e-8, {window:.4}), violations {}, smallest margin {:.3e}",
        input.len(),
        report.rows.len(),
        report.violations(),
        report.min_margin()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
