use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nandwalk::dynamics::{energy_moments, evolve_cheb, evolve_exact, initial_packet};
use nandwalk::harness::fit_loglog;
use nandwalk::lattice::{build_full, dense_eig, IndexMap};
use nandwalk::nand::{
    embed_parity, eval_nand, hard_instance, randomized_eval, randomized_eval_with, TreeInput,
};
use nandwalk::scattering::{log_grid, scan_bounds, scan_window, y_at_zero};
use nandwalk::spectral::{
    amplitude_a_sq, b_bound, max_b_sq, parseval_integral, tail_bound, tail_mass,
};
use nandwalk::{run_algorithm, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn nand_correspondence() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = 0;
    for depth in [1, 2] {
        for input in TreeInput::all(depth) {
            bad += (y_at_zero(&input).logical() != eval_nand(&input)) as usize;
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for depth in [4, 6, 8] {
        for _ in 0..512 {
            let input = TreeInput::random(depth, &mut rng);
            bad += (y_at_zero(&input).logical() != eval_nand(&input)) as usize;
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad == 0 && within(elapsed, 1.0),
        format!("{checked} instances, {bad} mismatches, {elapsed:.2?}"),
    )
}

fn bound_table() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut rows = 0;
    let mut violations = 0;
    for depth in [2u32, 4, 6, 8, 10] {
        let grid = log_grid(1e-8, scan_window(1 << depth), 64);
        for _ in 0..32 {
            let report = match scan_bounds(&TreeInput::random(depth, &mut rng), &grid) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("scan failed: {e}")),
            };
            rows += report.rows.len();
            violations += report.violations();
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && within(elapsed, 10.0),
        format!("{rows} points, {violations} violations, {elapsed:.2?}"),
    )
}

fn packet_moments() -> Outcome {
    let mut worst: f64 = 0.0;
    for text in ["0110", "1001011001101001"] {
        let input: TreeInput = text.parse().unwrap();
        for len in [8usize, 32, 128] {
            let full = build_full(&input, 3 * len).unwrap();
            let psi = initial_packet(len, full.index_map()).unwrap();
            let (mean, second) = energy_moments(&full, &psi).unwrap();
            worst = worst.max(mean.abs()).max((second - 5.0 / len as f64).abs());
        }
    }
    outcome(worst < 1e-12, format!("largest deviation {worst:.2e}"))
}

fn end_to_end() -> (Outcome, Vec<(TreeInput, RunConfig, f64)>) {
    let mut runs = Vec::new();
    let mut cases: Vec<TreeInput> = TreeInput::all(2).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    cases.extend((0..32).map(|_| TreeInput::random(4, &mut rng)));
    let mut bad = 0;
    let (mut low1, mut high0) = (f64::INFINITY, 0.0f64);
    for input in cases {
        let config = RunConfig::new(input.len(), 16.0).unwrap();
        let v = match run_algorithm(&input, &config) {
            Ok(v) => v,
            Err(e) => return (outcome(false, format!("{input}: {e}")), runs),
        };
        let nand = eval_nand(&input);
        let margin_ok = if nand {
            v.p_right >= 0.75
        } else {
            v.p_right <= 0.25
        };
        if nand {
            low1 = low1.min(v.p_right);
        } else {
            high0 = high0.max(v.p_right);
        }
        bad += (v.decision != nand || !margin_ok) as usize;
        runs.push((input, config, v.p_right));
    }
    let detail = format!(
        "{} runs, {bad} failures, min p_right|1 = {low1:.4}, max p_right|0 = {high0:.4}",
        runs.len()
    );
    (outcome(bad == 0, detail), runs)
}

fn gamma_scaling() -> Outcome {
    let input: TreeInput = "1111111111111111".parse().unwrap();
    assert!(eval_nand(&input));
    let gammas = [4.0, 8.0, 16.0, 32.0, 64.0];
    let mut errors = Vec::new();
    for &g in &gammas {
        match run_algorithm(&input, &RunConfig::new(16, g).unwrap()) {
            Ok(v) => errors.push((v.p_right - 1.0).abs()),
            Err(e) => return outcome(false, format!("gamma {g}: {e}")),
        }
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let slope = fit_loglog(&gammas, &errors);
    let in_band = slope.is_some_and(|s| (-0.75..=-0.25).contains(&s));
    let listed: Vec<String> = errors.iter().map(|e| format!("{e:.4}")).collect();
    outcome(
        decreasing && in_band,
        format!(
            "|p_right - 1| = [{}] at gamma 4..64, decreasing {decreasing}, slope {} (band [-0.75, -0.25])",
            listed.join(", "),
            slope.map_or("n/a".into(), |s| format!("{s:.3}"))
        ),
    )
}

fn propagator_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_diff, mut worst_drift) = (0.0f64, 0.0f64);
    let mut max_dim = 0;
    for _ in 0..20 {
        let depth = rng.random_range(1..=5u32);
        let input = TreeInput::random(depth, &mut rng);
        let len = rng.random_range(4..=80usize);
        let full = build_full(&input, 3 * len).unwrap();
        if full.dim() > 2000 {
            return outcome(false, format!("dimension {} over 2000", full.dim()));
        }
        max_dim = max_dim.max(full.dim());
        let t = rng.random_range(0.0..=len as f64);
        let psi = initial_packet(len, full.index_map()).unwrap();
        let a = evolve_cheb(&full, &psi, t, 1e-12).unwrap();
        let b = evolve_exact(&dense_eig(&full).unwrap(), &psi, t).unwrap();
        worst_diff = worst_diff.max(a.distance(&b));
        worst_drift = worst_drift
            .max((a.norm() - 1.0).abs())
            .max((b.norm() - 1.0).abs());
    }
    outcome(
        worst_diff <= 1e-8 && worst_drift <= 1e-8,
        format!(
            "20 pairs up to dim {max_dim}, L2 diff {worst_diff:.2e}, norm drift {worst_drift:.2e}"
        ),
    )
}

fn spectral_inequalities() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for len in [16usize, 64, 256] {
        let direct = initial_packet(len, &IndexMap::new(Some(len), None, false))
            .unwrap()
            .norm_sqr();
        let p = parseval_integral(len).unwrap();
        if (p - 1.0).abs() > 1e-10 || (p - direct).abs() > 1e-10 {
            ok = false;
            notes.push(format!("parseval L={len}: {p}"));
        }
        for eps in [0.1, 0.3] {
            let tail = tail_mass(len, eps).unwrap();
            if tail.is_nan() || tail >= tail_bound(len, eps) {
                ok = false;
                notes.push(format!("tail L={len} eps={eps}: {tail}"));
            }
            let b = max_b_sq(len, eps, 1000);
            if b.is_nan() || b >= b_bound(len, eps) {
                ok = false;
                notes.push(format!("B L={len} eps={eps}: {b}"));
            }
            // pointwise check on an independent dense grid
            for i in 0..=1000 {
                let phi = -eps + 2.0 * eps * i as f64 / 1000.0;
                if amplitude_a_sq(len, PI - phi) >= b_bound(len, eps) {
                    ok = false;
                    notes.push(format!("B L={len} eps={eps} phi={phi}"));
                    break;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ok &= within(elapsed, 5.0);
    let detail = if notes.is_empty() {
        format!("18 checks, {elapsed:.2?}")
    } else {
        notes.join("; ")
    };
    outcome(ok, detail)
}

fn parity_embedding() -> Outcome {
    let mut bad = 0;
    let mut total = 0;
    for k in [2usize, 4, 8] {
        for mask in 0u32..1 << k {
            let x: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
            let value = embed_parity(&x).map(|t| eval_nand(&t));
            bad += (value != Ok((1 + mask.count_ones()) % 2 == 1)) as usize;
            total += 1;
        }
    }
    outcome(bad == 0, format!("{total} assignments, {bad} mismatches"))
}

fn classical_baseline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut errors = 0;
    for i in 0..1000 {
        let depth = 1 + i % 10;
        let input = TreeInput::random(depth, &mut rng);
        errors += (randomized_eval(&input, i as u64).value != eval_nand(&input)) as usize;
    }
    let trials = 40_000;
    let mut sizes = Vec::new();
    let mut means = Vec::new();
    for depth in [8u32, 10, 12] {
        let mut total = 0usize;
        for _ in 0..trials {
            let input = hard_instance(depth, true, &mut rng);
            let trace = randomized_eval_with(&input, &mut rng);
            errors += (trace.value != eval_nand(&input)) as usize;
            total += trace.queries;
        }
        sizes.push((1u64 << depth) as f64);
        means.push(total as f64 / trials as f64);
    }
    let exponent = fit_loglog(&sizes, &means);
    let in_band = exponent.is_some_and(|e| (0.70..=0.754).contains(&e));
    outcome(
        errors == 0 && in_band,
        format!(
            "{errors} errors; mean queries {:.1}/{:.1}/{:.1} at n = 8/10/12, exponent {}",
            means[0],
            means[1],
            means[2],
            exponent.map_or("n/a".into(), |e| format!("{e:.4}"))
        ),
    )
}

fn wall_insensitivity(runs: &[(TreeInput, RunConfig, f64)]) -> Outcome {
    if runs.is_empty() {
        return outcome(false, "no end-to-end runs to compare".into());
    }
    let mut worst = 0.0f64;
    for (input, config, p) in runs {
        let wide = config.with_m_factor(6).unwrap();
        match run_algorithm(input, &wide) {
            Ok(v) => worst = worst.max((v.p_right - p).abs()),
            Err(e) => return outcome(false, format!("{input}: {e}")),
        }
    }
    outcome(
        worst < 1e-6,
        format!("{} runs, largest change {worst:.2e}", runs.len()),
    )
}

fn main() -> ExitCode {
    let (e2e, runs) = end_to_end();
    let results = [
        (
            "NAND value matches zero-energy scattering",
            nand_correspondence(),
        ),
        ("near-zero-energy transmission bounds", bound_table()),
        ("packet energy moments", packet_moments()),
        ("end-to-end decisions at gamma = 16", e2e),
        ("error falls as gamma^-1/2", gamma_scaling()),
        (
            "Chebyshev agrees with eigenbasis evolution",
            propagator_equivalence(),
        ),
        ("packet spectrum inequalities", spectral_inequalities()),
        ("parity embedding", parity_embedding()),
        ("classical randomized baseline", classical_baseline()),
        ("runway wall insensitivity", wall_insensitivity(&runs)),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "{} criterion {:>2}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += (!o.pass) as usize;
    }
    println!(
        "{} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
