//! Seeded random graphs, tolerance vectors and placements.

use rand::seq::SliceRandom;
use rand::Rng;

use schelling_core::topology::build_graph;
use schelling_core::{GameInstance, NodeId, Rational, Topology, ToleranceVector};

/// Uniform labelled tree on `n ≥ 2` nodes, decoded from a random Prüfer sequence.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Topology {
    if n == 2 {
        return build_graph(2, &[(0, 1)]).expect("single edge");
    }
    let code: Vec<NodeId> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &code {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &code {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf remains");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<NodeId> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    build_graph(n, &edges).expect("Prüfer decoding yields a tree")
}

/// A random spanning tree plus up to `extra` random chords.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Topology {
    let tree = random_tree(rng, n);
    let mut edges: Vec<(NodeId, NodeId)> = tree.edges().collect();
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && !tree.are_adjacent(u, v) && !edges.contains(&(u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
        }
    }
    build_graph(n, &edges).expect("supergraph of a tree is connected")
}

/// Non-increasing vector with denominators up to 6 and a last entry below 1.
pub fn random_tolerance<R: Rng>(rng: &mut R, lambda: usize) -> ToleranceVector {
    loop {
        let mut values: Vec<Rational> = (1..lambda).map(|_| Rational::new(rng.gen_range(0..=6), 6)).collect();
        values.sort_by(|a, b| b.cmp(a));
        values.insert(0, Rational::from_integer(1));
        if let Ok(tv) = ToleranceVector::new(values) {
            return tv;
        }
    }
}

/// A uniformly shuffled placement of the game's agents.
pub fn random_slots<R: Rng>(rng: &mut R, game: &GameInstance) -> Vec<u8> {
    let n = game.topology().node_count();
    let mut slots = vec![0u8; n];
    for t in 0..game.lambda() {
        for k in 0..game.agents_per_type() {
            slots[t * game.agents_per_type() + k] = t as u8 + 1;
        }
    }
    slots.shuffle(rng);
    slots
}
