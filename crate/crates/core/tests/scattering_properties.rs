use nandwalk::nand::{eval_nand, TreeInput};
use nandwalk::scattering::{
    log_grid, scan_bounds, scan_window, scatter, transmission, y_at_zero, y_bottom,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tree(max_depth: u32) -> impl Strategy<Value = TreeInput> {
    (1..=max_depth).prop_flat_map(|d| {
        proptest::collection::vec(any::<bool>(), 1usize << d)
            .prop_map(|bits| TreeInput::from_bits(bits).unwrap())
    })
}

#[test]
fn zero_energy_tag_is_nand() {
    for depth in [1, 2] {
        for input in TreeInput::all(depth) {
            assert_eq!(y_at_zero(&input).logical(), eval_nand(&input));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for depth in [4u32, 6, 8] {
        for _ in 0..512 {
            let input = TreeInput::random(depth, &mut rng);
            let nand = eval_nand(&input);
            assert_eq!(y_at_zero(&input).logical(), nand);
            let y = y_bottom(&input, 1e-9).unwrap();
            assert_eq!(y.abs() < 1.0, nand, "{input}");
        }
    }
}

#[test]
fn bounds_hold_across_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for depth in [2u32, 4, 6, 8, 10] {
        let n = 1usize << depth;
        let grid = log_grid(1e-8, scan_window(n), 64);
        for _ in 0..32 {
            let input = TreeInput::random(depth, &mut rng);
            let report = scan_bounds(&input, &grid).unwrap();
            assert_eq!(report.violations(), 0, "N = {n}, {input}");
            if report.nand {
                // |y|/E stays below 4√N on the whole window
                for row in &report.rows {
                    assert!(row.abs_y / row.energy < 4.0 * (n as f64).sqrt());
                }
            }
        }
    }
}

#[test]
fn deep_tree_recursion_stays_finite() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..3 {
        let input = TreeInput::random(20, &mut rng);
        for energy in [1e-12, 1e-6, 0.3, 1.9] {
            let y = y_bottom(&input, energy).unwrap();
            assert!(y.num().is_finite() && y.den().is_finite());
            assert!(y.num() != 0.0 || y.den() != 0.0);
            assert!((y.num().abs().max(y.den().abs()) - 1.0).abs() < 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn y_is_odd_in_energy(input in tree(8), energy in 1e-6f64..1.99) {
        let plus = y_bottom(&input, energy).unwrap();
        let minus = y_bottom(&input, -energy).unwrap();
        prop_assert!(plus.neg().approx_eq(&minus, 1e-12));
        let (a, b) = (scatter(&input, energy).unwrap(), scatter(&input, -energy).unwrap());
        prop_assert!((a.t.conj() - b.t).norm() < 1e-12);
    }

    #[test]
    fn one_plus_r_is_t(input in tree(8), energy in -1.99f64..1.99) {
        prop_assume!(energy != 0.0);
        let p = scatter(&input, energy).unwrap();
        prop_assert!((1.0 + p.r - p.t).norm() < 1e-12);
        let direct = transmission(energy, p.y).unwrap();
        prop_assert_eq!(direct.t, p.t);
    }

    #[test]
    fn flux_is_conserved(input in tree(6), energy in 1e-4f64..1.99) {
        let p = scatter(&input, energy).unwrap();
        prop_assert!((p.t.norm_sqr() + p.r.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
