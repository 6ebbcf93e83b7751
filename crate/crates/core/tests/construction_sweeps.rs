mod common;

use std::sync::Arc;

use common::{r, random_tree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schelling_core::constructions::{
    binary_grid_layout, construct_2zts_grid, construct_band_grid, construct_binary_grid, construct_tree_equilibrium,
};
use schelling_core::topology::grid;
use schelling_core::{
    best_deviation, is_equilibrium, standard_tolerance, utility, Assignment, GameInstance, Rational, ToleranceKind,
    ToleranceVector,
};

fn binary(lambda: usize, alpha: usize) -> ToleranceVector {
    standard_tolerance(ToleranceKind::AlphaBinary, lambda, Some(alpha)).unwrap()
}

/// Raises every entry after the leading ones by `delta`, capped below 1 and
/// kept monotone.
fn raised(tv: &ToleranceVector, delta: Rational) -> ToleranceVector {
    let one = Rational::from_integer(1);
    let cap = one - delta;
    let values: Vec<Rational> = tv.values().iter().map(|&t| if t == one { t } else { (t + delta).min(cap) }).collect();
    ToleranceVector::new(values).unwrap()
}

#[test]
fn zts_grid_sweep() {
    for m in 2..=6 {
        for cols in m..=6 {
            let topology = Arc::new(grid(m, cols).unwrap());
            for n in (4..m * cols).step_by(2) {
                let tv = standard_tolerance(ToleranceKind::Zero, 2, None).unwrap();
                let g = GameInstance::new(2, n / 2, Arc::clone(&topology), tv).unwrap();
                let a = construct_2zts_grid(&g).unwrap();
                assert!(is_equilibrium(&g, &a).0, "{m}x{cols} n={n}");
            }
        }
    }
}

#[test]
fn binary_grid_sweep() {
    let mut unsettled_layouts = Vec::new();
    for m in 2..=6 {
        for cols in m..=6 {
            let topology = Arc::new(grid(m, cols).unwrap());
            for lambda in 3..=7 {
                for x in (2..).take_while(|x| lambda * x < m * cols) {
                    let g = GameInstance::new(lambda, x, Arc::clone(&topology), binary(lambda, 2)).unwrap();
                    let a = construct_binary_grid(&g).unwrap();
                    assert!(is_equilibrium(&g, &a).0, "{m}x{cols} lambda={lambda} x={x}");
                    let layout = binary_grid_layout(&g).unwrap();
                    if layout == a {
                        check_layout_utilities(&g, &a);
                    } else {
                        unsettled_layouts.push((m, cols, lambda, x));
                    }
                }
            }
        }
    }
    assert_eq!(
        unsettled_layouts,
        [
            (3, 3, 4, 2),
            (3, 4, 5, 2),
            (3, 5, 6, 2),
            (3, 5, 7, 2),
            (3, 6, 7, 2),
            (4, 4, 5, 3),
            (4, 5, 6, 3),
            (4, 6, 7, 3),
            (5, 5, 6, 4),
            (5, 6, 7, 4),
            (6, 6, 7, 5)
        ]
    );
}

/// Every agent has utility at least 1/3, and agents below 2/3 cannot do
/// better by jumping.
fn check_layout_utilities(g: &GameInstance, a: &Assignment) {
    for v in a.occupied_nodes() {
        let u = utility(g, a, v).unwrap().value();
        assert!(u >= r(1, 3));
        if u < r(2, 3) {
            assert_eq!(best_deviation(g, a, v).unwrap(), None);
        }
    }
}

#[test]
fn seven_type_layout_is_the_settled_output() {
    let g = GameInstance::new(7, 2, Arc::new(grid(4, 4).unwrap()), binary(7, 2)).unwrap();
    assert_eq!(binary_grid_layout(&g).unwrap(), construct_binary_grid(&g).unwrap());
}

#[test]
fn band_grid_everyone_content() {
    for (lambda, alpha, x, m, cols) in [(4, 2, 2, 2, 5), (9, 3, 2, 4, 5), (4, 2, 2, 5, 2), (9, 3, 2, 6, 5), (4, 3, 2, 3, 4)] {
        let g = GameInstance::new(lambda, x, Arc::new(grid(m, cols).unwrap()), binary(lambda, alpha)).unwrap();
        let a = construct_band_grid(&g).unwrap();
        for v in a.occupied_nodes() {
            assert_eq!(utility(&g, &a, v).unwrap().value(), Rational::from_integer(1));
        }
        for delta in [r(1, 10), r(1, 3), r(1, 2)] {
            let raised = g.with_tolerance(raised(g.tolerance(), delta)).unwrap();
            assert!(is_equilibrium(&raised, &a).0);
        }
    }
}

#[test]
fn tree_construction_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut built = 0;
    while built < 300 {
        let n = rng.gen_range(8..=30);
        let lambda = rng.gen_range(3..=6);
        let alpha = if lambda == 3 { 2 } else { lambda / 2 };
        let max_x = (n - 1) / lambda;
        if max_x < 2 {
            continue;
        }
        let x = rng.gen_range(2..=max_x);
        let g = GameInstance::new(lambda, x, Arc::new(random_tree(&mut rng, n)), binary(lambda, alpha)).unwrap();
        let a = construct_tree_equilibrium(&g).unwrap();
        assert!(is_equilibrium(&g, &a).0);
        built += 1;
    }
}

#[test]
fn tree_outputs_survive_larger_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut broken = 0;
    while checked < 200 {
        let n = rng.gen_range(8..=30);
        let lambda = rng.gen_range(4..=6);
        let max_x = (n - 1) / lambda;
        if max_x < 2 {
            continue;
        }
        let x = rng.gen_range(2..=max_x);
        let g = GameInstance::new(lambda, x, Arc::new(random_tree(&mut rng, n)), binary(lambda, lambda / 2)).unwrap();
        let a = construct_tree_equilibrium(&g).unwrap();
        let all_content = a.occupied_nodes().all(|v| utility(&g, &a, v).unwrap().value() == Rational::from_integer(1));
        for delta in [r(1, 7), r(1, 3)] {
            let raised = g.with_tolerance(raised(g.tolerance(), delta)).unwrap();
            let stable = is_equilibrium(&raised, &a).0;
            if all_content {
                assert!(stable);
            }
            broken += usize::from(!stable);
        }
        checked += 1;
    }
    assert_eq!(broken, 0, "{broken} of {checked} outputs lost stability");
}
