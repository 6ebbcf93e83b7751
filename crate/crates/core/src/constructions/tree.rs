use std::collections::BTreeSet;

use crate::game::{Assignment, GameInstance};
use crate::rational::Rational;
use crate::topology::{centroid, NodeId, RootedTree};

use super::{settle, ConstructionError};
use crate::equilibrium::is_equilibrium;

/// Placements made by one bottom-up fill, in the order they were made.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeFill {
    pub placed: Vec<(NodeId, u8)>,
}

impl TreeFill {
    pub fn is_empty(&self) -> bool {
        self.placed.is_empty()
    }
}

struct Subtree<'a> {
    tree: &'a RootedTree,
    nodes: Vec<NodeId>,
    member: BTreeSet<NodeId>,
}

impl<'a> Subtree<'a> {
    fn new(tree: &'a RootedTree, top: NodeId) -> Self {
        let nodes = tree.descendants(top);
        let member = nodes.iter().copied().collect();
        Self { tree, nodes, member }
    }

    fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.tree
            .parent(v)
            .into_iter()
            .chain(self.tree.children(v).iter().copied())
            .filter(|u| self.member.contains(u))
    }

    fn has_occupied_neighbor(&self, slots: &[u8], v: NodeId) -> bool {
        self.neighbors(v).any(|u| slots[u] != 0)
    }

    fn empty_nodes<'s>(&'s self, slots: &'s [u8]) -> impl Iterator<Item = NodeId> + 's {
        self.nodes.iter().copied().filter(move |&v| slots[v] == 0)
    }

    /// Smallest empty node next to an occupied one.
    fn frontier_min(&self, slots: &[u8]) -> Option<NodeId> {
        self.empty_nodes(slots).filter(|&v| self.has_occupied_neighbor(slots, v)).min()
    }

    fn isolated_agents(&self, slots: &[u8]) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .nodes
            .iter()
            .copied()
            .filter(|&v| slots[v] != 0 && !self.has_occupied_neighbor(slots, v))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Fills the subtree under `top` with agents from `pools`, given as
/// `(type, remaining)` pairs in priority order. Counts are decremented as
/// agents are placed. Pools that are empty on entry are skipped.
///
/// The first pool goes in from the deepest level up, finishing a node's
/// siblings before moving on. The second pool first occupies every empty
/// parent of a first-pool agent, then grows the occupied region. Later pools
/// only grow the occupied region. Stops when the pools or the subtree run out.
pub fn bottom_up(tree: &RootedTree, top: NodeId, slots: &mut [u8], pools: &mut [(u8, usize)]) -> TreeFill {
    let sub = Subtree::new(tree, top);
    let mut fill = TreeFill::default();
    let mut active = pools.iter_mut().filter(|p| p.1 > 0);

    let Some(first) = active.next() else { return fill };
    let mut last: Option<NodeId> = None;
    while first.1 > 0 {
        let Some(v) = deepest_slot(&sub, slots, last) else { return fill };
        slots[v] = first.0;
        first.1 -= 1;
        fill.placed.push((v, first.0));
        last = Some(v);
    }
    let first_ty = first.0;

    let Some(second) = active.next() else { return fill };
    while second.1 > 0 {
        let uncovered = sub
            .empty_nodes(slots)
            .filter(|&v| sub.tree.children(v).iter().any(|&c| slots[c] == first_ty && sub.member.contains(&c)))
            .min();
        let Some(v) = uncovered.or_else(|| sub.frontier_min(slots)) else { return fill };
        slots[v] = second.0;
        second.1 -= 1;
        fill.placed.push((v, second.0));
    }

    for pool in active {
        while pool.1 > 0 {
            let Some(v) = sub.frontier_min(slots) else { return fill };
            slots[v] = pool.0;
            pool.1 -= 1;
            fill.placed.push((v, pool.0));
        }
    }
    fill
}

fn deepest_slot(sub: &Subtree<'_>, slots: &[u8], last: Option<NodeId>) -> Option<NodeId> {
    let level = sub.empty_nodes(slots).map(|v| sub.tree.depth(v)).max()?;
    let at_level = |v: &NodeId| sub.tree.depth(*v) == level;
    let sibling = last.and_then(|l| {
        let parent = sub.tree.parent(l)?;
        sub.tree
            .children(parent)
            .iter()
            .copied()
            .filter(|&s| slots[s] == 0 && sub.member.contains(&s))
            .find(at_level)
    });
    sibling.or_else(|| sub.empty_nodes(slots).filter(at_level).min())
}

/// Minimum number of leading ones the tolerance vector needs.
fn required_ones(lambda: usize) -> usize {
    if lambda == 3 {
        2
    } else {
        lambda / 2
    }
}

/// Equilibrium for tree topologies whose tolerance vector starts with at
/// least `⌊λ/2⌋` ones (two for three types): the first of
/// [`tree_layouts`] that is stable, or else the first one settled by
/// improving jumps.
pub fn construct_tree_equilibrium(game: &GameInstance) -> Result<Assignment, ConstructionError> {
    settle_candidates(game, tree_layouts(game)?)
}

/// Candidate layouts for tree games, preferred one first. None of them is
/// checked.
///
/// The tree is hung from its centroid, which stays empty, and its subtrees
/// are filled largest first: low types from the bottom of the first subtrees,
/// high types from the bottom of the next ones, and whatever is left in the
/// middle of the type range after that. A last pass gives isolated agents a
/// neighbour.
pub fn tree_layouts(game: &GameInstance) -> Result<Vec<Assignment>, ConstructionError> {
    let topology = game.topology();
    if !topology.is_tree() {
        return Err(ConstructionError::NotATree);
    }
    let lambda = game.lambda();
    let needed = required_ones(lambda);
    if lambda < 3 || game.tolerance().leading_ones() < needed {
        return Err(ConstructionError::WrongGameClass(format!("needs t_d = 1 for every d < {needed}")));
    }
    let root = centroid(topology)?;
    let tree = RootedTree::new(topology, root)?;
    let sizes = tree.subtree_sizes();
    let mut tops: Vec<(usize, NodeId, NodeId)> = tree
        .children(root)
        .iter()
        .map(|&c| (sizes[c], c, tree.descendants(c).into_iter().min().unwrap_or(c)))
        .collect();
    tops.sort_by(|a, b| b.0.cmp(&a.0).then(a.2.cmp(&b.2)));
    let tops: Vec<NodeId> = tops.into_iter().map(|t| t.1).collect();

    let mut slots = vec![0u8; topology.node_count()];
    let mut remaining = vec![game.agents_per_type(); lambda + 1];
    remaining[0] = 0;
    let mut next = 0;
    let mut last_used = None;

    let mut run = |types: Vec<u8>, until_empty: u8, slots: &mut Vec<u8>, remaining: &mut Vec<usize>| {
        while remaining[until_empty as usize] > 0 {
            let Some(&top) = tops.get(next) else {
                return Err(ConstructionError::OutOfSpace(remaining.iter().sum()));
            };
            let mut pools: Vec<(u8, usize)> = types.iter().map(|&t| (t, remaining[t as usize])).collect();
            bottom_up(&tree, top, slots, &mut pools);
            for (t, left) in pools {
                remaining[t as usize] = left;
            }
            last_used = Some(top);
            next += 1;
        }
        Ok(())
    };

    let lambda_ty = lambda as u8;
    let low_end = lambda.div_ceil(2) as u8;
    let high_end = (lambda + 1).div_ceil(2) as u8;
    run((1..=low_end).collect(), 1, &mut slots, &mut remaining)?;
    run((high_end..=lambda_ty).rev().collect(), lambda_ty, &mut slots, &mut remaining)?;
    loop {
        let Some(a) = (1..=lambda_ty).find(|&t| remaining[t as usize] > 0) else { break };
        let b = (1..=lambda_ty).rev().find(|&t| remaining[t as usize] > 0).unwrap_or(a);
        run((a..=b).collect(), a, &mut slots, &mut remaining)?;
    }

    let candidates = match last_used {
        Some(top) => repair_isolated(game, &tree, top, slots),
        None => vec![slots],
    };
    candidates.into_iter().map(|c| Ok(Assignment::from_slots(game, c)?)).collect()
}

/// Returns the first candidate that is an equilibrium, or else settles the
/// first one by improving jumps.
fn settle_candidates(game: &GameInstance, candidates: Vec<Assignment>) -> Result<Assignment, ConstructionError> {
    let mut first = None;
    for a in candidates {
        if is_equilibrium(game, &a).0 {
            return Ok(a);
        }
        first.get_or_insert(a);
    }
    settle(game, first.expect("at least one candidate"))
}

/// Placements that give the isolated agents of the last filled subtree a
/// neighbour, preferred one first. Several of them, or one sharing the
/// subtree with other agents, are moved inside the subtree. A lone agent
/// moves to the root, or else to an empty node next to an occupied one,
/// best spot first.
fn repair_isolated(game: &GameInstance, tree: &RootedTree, top: NodeId, mut slots: Vec<u8>) -> Vec<Vec<u8>> {
    let sub = Subtree::new(tree, top);
    let isolated = sub.isolated_agents(&slots);
    let occupied = sub.nodes.iter().filter(|&&v| slots[v] != 0).count();
    if isolated.is_empty() {
        return vec![slots];
    }
    if isolated.len() == 1 && occupied == 1 {
        let v = isolated[0];
        let ty = slots[v];
        slots[v] = 0;
        let mut spots = vec![tree.root()];
        spots.extend(ranked_spots(game, &slots, ty, 0..slots.len()).into_iter().filter(|&u| u != tree.root()));
        return spots
            .into_iter()
            .map(|u| {
                let mut out = slots.clone();
                out[u] = ty;
                out
            })
            .collect();
    }
    let mut movers: Vec<u8> = isolated.iter().map(|&v| slots[v]).collect();
    movers.sort_unstable();
    for &v in &isolated {
        slots[v] = 0;
    }
    for ty in movers {
        let mut nodes = sub.nodes.clone();
        nodes.sort_unstable();
        let spot = ranked_spots(game, &slots, ty, nodes.into_iter()).first().copied();
        slots[spot.unwrap_or(top)] = ty;
    }
    vec![slots]
}

/// Empty nodes with an occupied neighbour, ranked by the utility an agent of
/// type `ty` would get there; candidate order breaks ties.
fn ranked_spots(game: &GameInstance, slots: &[u8], ty: u8, candidates: impl Iterator<Item = NodeId>) -> Vec<NodeId> {
    let topology = game.topology();
    let tv = game.tolerance();
    let mut scored: Vec<(Rational, usize, NodeId)> = Vec::new();
    for (rank, v) in candidates.enumerate() {
        if slots[v] != 0 {
            continue;
        }
        let occupied: Vec<u8> = topology.neighbors(v).iter().map(|&u| slots[u]).filter(|&t| t != 0).collect();
        if occupied.is_empty() {
            continue;
        }
        let total: Rational = occupied.iter().map(|&t| tv.between(ty, t)).sum();
        scored.push((total / Rational::from_integer(occupied.len() as i128), rank, v));
    }
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.into_iter().map(|s| s.2).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::game::utility;
    use crate::tolerance::{standard_tolerance, ToleranceKind};
    use crate::topology::{build_graph, standard_graph, GraphKind, Topology};

    fn tree_game(t: Topology, lambda: usize, x: usize, alpha: usize) -> GameInstance {
        let tv = standard_tolerance(ToleranceKind::AlphaBinary, lambda, Some(alpha)).unwrap();
        GameInstance::new(lambda, x, Arc::new(t), tv).unwrap()
    }

    #[test]
    fn star_leaves_then_parent() {
        let star = standard_graph(GraphKind::Star, 4).unwrap();
        let tree = RootedTree::new(&star, 0).unwrap();
        let mut slots = vec![0; 4];
        let mut pools = vec![(1, 2), (2, 1)];
        let fill = bottom_up(&tree, 0, &mut slots, &mut pools);
        assert_eq!(fill.placed, vec![(1, 1), (2, 1), (0, 2)]);
        assert_eq!(pools, vec![(1, 0), (2, 0)]);
    }

    #[test]
    fn path_fills_upward() {
        let path = standard_graph(GraphKind::Path, 4).unwrap();
        let tree = RootedTree::new(&path, 0).unwrap();
        let mut slots = vec![0; 4];
        let mut pools = vec![(1, 1), (2, 3)];
        bottom_up(&tree, 0, &mut slots, &mut pools);
        assert_eq!(slots, vec![2, 2, 2, 1]);
    }

    #[test]
    fn no_pools_no_change() {
        let path = standard_graph(GraphKind::Path, 3).unwrap();
        let tree = RootedTree::new(&path, 0).unwrap();
        let mut slots = vec![0; 3];
        assert!(bottom_up(&tree, 0, &mut slots, &mut []).is_empty());
        assert!(bottom_up(&tree, 0, &mut slots, &mut [(1, 0)]).is_empty());
        assert_eq!(slots, vec![0; 3]);
    }

    #[test]
    fn star_uses_the_centre_for_the_last_agent() {
        let game = tree_game(standard_graph(GraphKind::Star, 8).unwrap(), 3, 2, 2);
        let a = construct_tree_equilibrium(&game).unwrap();
        assert_ne!(a.type_at(0), 0);
        assert!(is_equilibrium(&game, &a).0);
    }

    #[test]
    fn spider_tree_with_four_types() {
        // Centre 0 with three legs of length 7.
        let mut edges = Vec::new();
        for leg in 0..3 {
            let mut prev = 0;
            for k in 0..7 {
                let v = 1 + leg * 7 + k;
                edges.push((prev, v));
                prev = v;
            }
        }
        let game = tree_game(build_graph(22, &edges).unwrap(), 4, 3, 2);
        let a = construct_tree_equilibrium(&game).unwrap();
        assert_eq!(a.type_at(0), 0);
        for v in a.occupied_nodes() {
            assert_eq!(utility(&game, &a, v).unwrap().value(), Rational::from_integer(1));
        }
    }

    #[test]
    fn rejects_wrong_inputs() {
        let cycle = standard_graph(GraphKind::Cycle, 8).unwrap();
        assert_eq!(construct_tree_equilibrium(&tree_game(cycle, 3, 2, 2)), Err(ConstructionError::NotATree));
        let path = standard_graph(GraphKind::Path, 10).unwrap();
        assert!(matches!(
            construct_tree_equilibrium(&tree_game(path, 4, 2, 1)),
            Err(ConstructionError::WrongGameClass(_))
        ));
    }
}
