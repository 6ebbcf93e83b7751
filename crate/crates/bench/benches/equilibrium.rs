use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use schelling_core::constructions::{construct_binary_grid, construct_tree_equilibrium};
use schelling_core::instances::no_equilibrium_tree_game;
use schelling_core::topology::{build_graph, grid};
use schelling_core::{
    best_response_dynamics, enumerate_equilibria, is_equilibrium, standard_tolerance, Assignment, EnumerationConfig,
    GameInstance, Rational, ToleranceKind, ToleranceVector,
};

fn half_tolerance() -> ToleranceVector {
    ToleranceVector::new(vec![Rational::from_integer(1), Rational::new(1, 2)]).unwrap()
}

fn enumeration(c: &mut Criterion) {
    let game = no_equilibrium_tree_game(2, half_tolerance()).unwrap().game;
    let mut group = c.benchmark_group("enumerate_tree_11");
    for workers in [1, 4] {
        let config = EnumerationConfig { workers, ..Default::default() };
        group.bench_with_input(BenchmarkId::from_parameter(workers), &config, |b, config| {
            b.iter(|| enumerate_equilibria(black_box(&game), config).unwrap())
        });
    }
    group.finish();
}

fn checking(c: &mut Criterion) {
    let tv = standard_tolerance(ToleranceKind::AlphaBinary, 7, Some(2)).unwrap();
    let game = GameInstance::new(7, 4, Arc::new(grid(6, 6).unwrap()), tv).unwrap();
    let a = construct_binary_grid(&game).unwrap();
    c.bench_function("is_equilibrium_grid_6x6", |b| b.iter(|| is_equilibrium(black_box(&game), black_box(&a))));
}

fn constructions(c: &mut Criterion) {
    let tv = standard_tolerance(ToleranceKind::AlphaBinary, 7, Some(2)).unwrap();
    let game = GameInstance::new(7, 4, Arc::new(grid(6, 6).unwrap()), tv).unwrap();
    c.bench_function("construct_binary_grid_6x6", |b| b.iter(|| construct_binary_grid(black_box(&game)).unwrap()));

    let edges: Vec<(usize, usize)> = (1..40).map(|v| ((v - 1) / 3, v)).collect();
    let tv = standard_tolerance(ToleranceKind::AlphaBinary, 4, Some(2)).unwrap();
    let game = GameInstance::new(4, 6, Arc::new(build_graph(40, &edges).unwrap()), tv).unwrap();
    c.bench_function("construct_tree_40", |b| b.iter(|| construct_tree_equilibrium(black_box(&game)).unwrap()));
}

fn dynamics(c: &mut Criterion) {
    let tv = standard_tolerance(ToleranceKind::Zero, 2, None).unwrap();
    let game = GameInstance::new(2, 8, Arc::new(grid(5, 5).unwrap()), tv).unwrap();
    let slots: Vec<u8> = (0..25).map(|v| if v < 16 { (v % 2) as u8 + 1 } else { 0 }).collect();
    let start = Assignment::from_slots(&game, slots).unwrap();
    c.bench_function("dynamics_grid_5x5", |b| b.iter(|| best_response_dynamics(black_box(&game), &start, 1000)));
}

criterion_group!(benches, enumeration, checking, constructions, dynamics);
criterion_main!(benches);
