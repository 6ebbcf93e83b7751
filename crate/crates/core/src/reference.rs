//! Slow, direct implementations for cross-checking the fast paths.
//!
//! Nothing here shares code with the equilibrium engine: placements are
//! built by recursion over nodes, utilities are recomputed from the edge list
//! with plain rational sums, and every jump is tried by copying the
//! placement.

use crate::game::GameInstance;
use crate::rational::Rational;
use crate::topology::NodeId;

/// Neighbour lists rebuilt from the edge list.
fn neighbor_lists(game: &GameInstance) -> Vec<Vec<NodeId>> {
    let topology = game.topology();
    let mut lists = vec![Vec::new(); topology.node_count()];
    for (u, v) in topology.edges() {
        lists[u].push(v);
        lists[v].push(u);
    }
    lists
}

pub fn utility_of(game: &GameInstance, slots: &[u8], node: NodeId) -> Rational {
    utility_with(game, &neighbor_lists(game), slots, node)
}

fn utility_with(game: &GameInstance, lists: &[Vec<NodeId>], slots: &[u8], node: NodeId) -> Rational {
    let own = slots[node];
    let mut total = Rational::from_integer(0);
    let mut count = 0i128;
    for &u in &lists[node] {
        if slots[u] != 0 {
            total += game.tolerance().values()[own.abs_diff(slots[u]) as usize];
            count += 1;
        }
    }
    if count == 0 {
        total
    } else {
        total / Rational::from_integer(count)
    }
}

pub fn welfare_of(game: &GameInstance, slots: &[u8]) -> Rational {
    let lists = neighbor_lists(game);
    (0..slots.len()).filter(|&v| slots[v] != 0).map(|v| utility_with(game, &lists, slots, v)).sum()
}

pub fn is_stable(game: &GameInstance, slots: &[u8]) -> bool {
    let lists = neighbor_lists(game);
    stable_with(game, &lists, slots)
}

fn stable_with(game: &GameInstance, lists: &[Vec<NodeId>], slots: &[u8]) -> bool {
    for from in 0..slots.len() {
        if slots[from] == 0 {
            continue;
        }
        let now = utility_with(game, lists, slots, from);
        for to in 0..slots.len() {
            if slots[to] != 0 {
                continue;
            }
            let mut moved = slots.to_vec();
            moved[to] = moved[from];
            moved[from] = 0;
            if utility_with(game, lists, &moved, to) > now {
                return false;
            }
        }
    }
    true
}

/// Every type-placement of the game, in lexicographic order.
pub fn all_placements(game: &GameInstance) -> Vec<Vec<u8>> {
    let n = game.topology().node_count();
    let mut left = vec![n - game.agent_count()];
    left.extend(std::iter::repeat_n(game.agents_per_type(), game.lambda()));
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    extend(&mut left, &mut current, n, &mut out);
    out
}

fn extend(left: &mut [usize], current: &mut Vec<u8>, n: usize, out: &mut Vec<Vec<u8>>) {
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    for t in 0..left.len() {
        if left[t] > 0 {
            left[t] -= 1;
            current.push(t as u8);
            extend(left, current, n, out);
            current.pop();
            left[t] += 1;
        }
    }
}

/// Stable placements, in lexicographic order.
pub fn equilibria(game: &GameInstance) -> Vec<Vec<u8>> {
    let lists = neighbor_lists(game);
    all_placements(game).into_iter().filter(|p| stable_with(game, &lists, p)).collect()
}

/// The largest welfare over all placements.
pub fn optimum(game: &GameInstance) -> Rational {
    all_placements(game)
        .iter()
        .map(|p| welfare_of(game, p))
        .max()
        .expect("at least one placement")
}
