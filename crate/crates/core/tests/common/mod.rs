#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use schelling_core::topology::build_graph;
use schelling_core::{GameInstance, Rational, Topology, ToleranceVector};

pub fn r(p: i128, q: i128) -> Rational {
    Rational::new(p, q)
}

pub fn tv(values: &[(i128, i128)]) -> ToleranceVector {
    ToleranceVector::new(values.iter().map(|&(p, q)| r(p, q)).collect()).unwrap()
}

pub fn game(topology: Topology, lambda: usize, x: usize, tolerance: ToleranceVector) -> GameInstance {
    GameInstance::new(lambda, x, Arc::new(topology), tolerance).unwrap()
}

/// Uniform attachment tree on `n` nodes.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Topology {
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    build_graph(n, &edges).unwrap()
}

/// A random tree plus up to `extra` further edges.
pub fn random_connected(rng: &mut impl Rng, n: usize, extra: usize) -> Topology {
    let mut edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    let mut missing: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|e| !edges.contains(e))
        .collect();
    missing.shuffle(rng);
    edges.extend(missing.into_iter().take(extra));
    build_graph(n, &edges).unwrap()
}

/// A random monotone tolerance vector with denominators up to 6.
pub fn random_tolerance(rng: &mut impl Rng, lambda: usize) -> ToleranceVector {
    let mut values = vec![Rational::from_integer(1)];
    for d in 1..lambda {
        let prev = values[d - 1];
        let candidate = r(rng.gen_range(0..=6), 6).min(prev);
        values.push(if d == lambda - 1 && candidate == Rational::from_integer(1) { r(5, 6) } else { candidate });
    }
    ToleranceVector::new(values).unwrap()
}

/// A uniformly shuffled placement of the game's agents.
pub fn random_slots(rng: &mut impl Rng, game: &GameInstance) -> Vec<u8> {
    let n = game.topology().node_count();
    let mut slots: Vec<u8> = (1..=game.lambda() as u8)
        .flat_map(|t| std::iter::repeat_n(t, game.agents_per_type()))
        .collect();
    slots.resize(n, 0);
    slots.shuffle(rng);
    slots
}
