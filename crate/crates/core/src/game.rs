//! Game instances, type-placements, and exact utility and welfare.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::rational::Rational;
use crate::tolerance::ToleranceVector;
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("lambda = {lambda} does not match a tolerance vector of length {tolerance}")]
    LambdaMismatch { lambda: usize, tolerance: usize },
    #[error("each type needs at least two agents, got {0}")]
    TooFewAgents(usize),
    #[error("the topology must have more nodes ({nodes}) than agents ({agents})")]
    NoEmptyNode { nodes: usize, agents: usize },
    #[error("at most 255 types are supported")]
    TooManyTypes,
    #[error("placement covers {got} nodes but the topology has {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("type index {0} is outside 1..=lambda")]
    TypeOutOfRange(u8),
    #[error("type {ty} is placed {got} times, expected {expected}")]
    WrongCount { ty: u8, expected: usize, got: usize },
    #[error("node {0} is listed twice")]
    DuplicateNode(NodeId),
    #[error("node {0} is empty")]
    NodeEmpty(NodeId),
    #[error("node {0} does not exist")]
    NodeUnknown(NodeId),
}

/// A balanced `λ`-type tolerance Schelling game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameInstance {
    topology: Arc<Topology>,
    agents_per_type: usize,
    tolerance: ToleranceVector,
    weights: Vec<i64>,
    scale: i64,
}

impl GameInstance {
    pub fn new(
        lambda: usize,
        agents_per_type: usize,
        topology: Arc<Topology>,
        tolerance: ToleranceVector,
    ) -> Result<Self, GameError> {
        if tolerance.lambda() != lambda {
            return Err(GameError::LambdaMismatch { lambda, tolerance: tolerance.lambda() });
        }
        if lambda > u8::MAX as usize {
            return Err(GameError::TooManyTypes);
        }
        if agents_per_type < 2 {
            return Err(GameError::TooFewAgents(agents_per_type));
        }
        let agents = lambda * agents_per_type;
        if topology.node_count() <= agents {
            return Err(GameError::NoEmptyNode { nodes: topology.node_count(), agents });
        }
        let (weights, scale) = tolerance.scaled_weights();
        Ok(Self { topology, agents_per_type, tolerance, weights, scale })
    }

    pub fn lambda(&self) -> usize {
        self.tolerance.lambda()
    }

    pub fn agents_per_type(&self) -> usize {
        self.agents_per_type
    }

    /// Total number of agents `n = λ·x`.
    pub fn agent_count(&self) -> usize {
        self.lambda() * self.agents_per_type
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn shared_topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    pub fn tolerance(&self) -> &ToleranceVector {
        &self.tolerance
    }

    /// Same board and agents under another tolerance vector.
    pub fn with_tolerance(&self, tolerance: ToleranceVector) -> Result<Self, GameError> {
        Self::new(tolerance.lambda(), self.agents_per_type, Arc::clone(&self.topology), tolerance)
    }

    /// Integer tolerance weights; `t_d = weights[d] / scale`.
    pub(crate) fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub(crate) fn scale(&self) -> i64 {
        self.scale
    }

    /// Checks a raw node → type vector (0 = empty) against this game.
    pub fn validate_slots(&self, slots: &[u8]) -> Result<(), GameError> {
        let n = self.topology.node_count();
        if slots.len() != n {
            return Err(GameError::WrongLength { expected: n, got: slots.len() });
        }
        let mut counts = vec![0usize; self.lambda() + 1];
        for &ty in slots {
            if ty as usize > self.lambda() {
                return Err(GameError::TypeOutOfRange(ty));
            }
            counts[ty as usize] += 1;
        }
        for ty in 1..=self.lambda() {
            if counts[ty] != self.agents_per_type {
                return Err(GameError::WrongCount {
                    ty: ty as u8,
                    expected: self.agents_per_type,
                    got: counts[ty],
                });
            }
        }
        Ok(())
    }
}

/// A type-placement: which type, if any, sits on each node. Agents of one
/// type are interchangeable, so this is the canonical form of an assignment.
/// Ordering is lexicographic over nodes with empty (0) first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    slots: Vec<u8>,
}

impl Assignment {
    /// `slots[v]` is the 1-based type at node `v`, or 0 when `v` is empty.
    pub fn from_slots(game: &GameInstance, slots: Vec<u8>) -> Result<Self, GameError> {
        game.validate_slots(&slots)?;
        Ok(Self { slots })
    }

    pub fn from_pairs(game: &GameInstance, pairs: &[(NodeId, u8)]) -> Result<Self, GameError> {
        let n = game.topology().node_count();
        let mut slots = vec![0u8; n];
        for &(node, ty) in pairs {
            if node >= n {
                return Err(GameError::NodeUnknown(node));
            }
            if ty == 0 {
                return Err(GameError::TypeOutOfRange(0));
            }
            if slots[node] != 0 {
                return Err(GameError::DuplicateNode(node));
            }
            slots[node] = ty;
        }
        Self::from_slots(game, slots)
    }

    pub(crate) fn from_slots_unchecked(slots: Vec<u8>) -> Self {
        Self { slots }
    }

    pub fn slots(&self) -> &[u8] {
        &self.slots
    }

    /// Type at `node`, 0 when empty.
    pub fn type_at(&self, node: NodeId) -> u8 {
        self.slots[node]
    }

    pub fn is_occupied(&self, node: NodeId) -> bool {
        self.slots[node] != 0
    }

    /// `(node, type)` for every occupied node, ascending.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, u8)> + '_ {
        self.slots.iter().enumerate().filter(|(_, &t)| t != 0).map(|(v, &t)| (v, t))
    }

    pub fn occupied_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.pairs().map(|(v, _)| v)
    }

    pub fn empty_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.slots.iter().enumerate().filter(|(_, &t)| t == 0).map(|(v, _)| v)
    }

    /// The assignment after the agent on `from` jumps to the empty `to`.
    pub fn with_jump(&self, from: NodeId, to: NodeId) -> Self {
        debug_assert!(self.slots[from] != 0 && self.slots[to] == 0);
        let mut slots = self.slots.clone();
        slots.swap(from, to);
        Self { slots }
    }

    /// Occupied neighbours of `node`, by type; index 0 is unused.
    pub fn neighbor_type_counts(&self, topology: &Topology, node: NodeId, lambda: usize) -> Vec<usize> {
        let mut counts = vec![0; lambda + 1];
        for &u in topology.neighbors(node) {
            counts[self.slots[u] as usize] += 1;
        }
        counts[0] = 0;
        counts
    }

    /// Agent-labelled view: agents of type `ℓ` are numbered in ascending
    /// node order, and the result maps agent index to node.
    pub fn agent_nodes(&self, lambda: usize) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); lambda];
        for (v, t) in self.pairs() {
            out[t as usize - 1].push(v);
        }
        out
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &t) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if t == 0 {
                write!(f, "_")?;
            } else {
                write!(f, "{t}")?;
            }
        }
        Ok(())
    }
}

/// An agent's utility, a rational in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Utility(Rational);

impl Utility {
    pub fn value(&self) -> Rational {
        self.0
    }
}

impl From<Utility> for Rational {
    fn from(u: Utility) -> Self {
        u.0
    }
}

/// Utility as `numerator / (neighbours · scale)`, compared without division.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledUtility {
    pub weighted: i64,
    pub neighbors: i64,
}

impl ScaledUtility {
    pub fn to_rational(self, scale: i64) -> Rational {
        if self.neighbors == 0 {
            Rational::zero()
        } else {
            Rational::new(self.weighted as i128, (self.neighbors * scale) as i128)
        }
    }
}

impl PartialEq for ScaledUtility {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ScaledUtility {}

impl PartialOrd for ScaledUtility {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScaledUtility {
    fn cmp(&self, other: &Self) -> Ordering {
        // An isolated agent has utility 0, i.e. 0 / 1.
        let (a, an) = if self.neighbors == 0 { (0, 1) } else { (self.weighted, self.neighbors) };
        let (b, bn) = if other.neighbors == 0 { (0, 1) } else { (other.weighted, other.neighbors) };
        (a as i128 * bn as i128).cmp(&(b as i128 * an as i128))
    }
}

/// Scaled utility of a type-`ty` agent whose occupied neighbours are
/// `counts` (index = type).
pub(crate) fn scaled_from_counts(game: &GameInstance, ty: u8, counts: &[usize]) -> ScaledUtility {
    let weights = game.weights();
    let mut weighted = 0i64;
    let mut neighbors = 0i64;
    for (k, &c) in counts.iter().enumerate().skip(1) {
        if c > 0 {
            weighted += weights[(ty as usize).abs_diff(k)] * c as i64;
            neighbors += c as i64;
        }
    }
    ScaledUtility { weighted, neighbors }
}

/// Utility of the agent on `node`: the tolerance-weighted share of her
/// occupied neighbours, or 0 when she has none.
pub fn utility(game: &GameInstance, a: &Assignment, node: NodeId) -> Result<Utility, GameError> {
    if node >= game.topology().node_count() || node >= a.slots.len() {
        return Err(GameError::NodeUnknown(node));
    }
    let ty = a.type_at(node);
    if ty == 0 {
        return Err(GameError::NodeEmpty(node));
    }
    let counts = a.neighbor_type_counts(game.topology(), node, game.lambda());
    Ok(Utility(scaled_from_counts(game, ty, &counts).to_rational(game.scale())))
}

/// Sum of all agents' utilities.
pub fn social_welfare(game: &GameInstance, a: &Assignment) -> Rational {
    a.occupied_nodes()
        .map(|v| utility(game, a, v).expect("occupied node").value())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::{standard_tolerance, ToleranceKind};
    use crate::topology::{build_graph, standard_graph, GraphKind};

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    fn half_game(topology: Topology, x: usize) -> GameInstance {
        let tv = standard_tolerance(ToleranceKind::Proportional, 3, None).unwrap();
        GameInstance::new(3, x, Arc::new(topology), tv).unwrap()
    }

    #[test]
    fn game_validation() {
        let tv = standard_tolerance(ToleranceKind::Zero, 2, None).unwrap();
        let p4 = Arc::new(standard_graph(GraphKind::Path, 4).unwrap());
        assert_eq!(
            GameInstance::new(2, 2, Arc::clone(&p4), tv.clone()),
            Err(GameError::NoEmptyNode { nodes: 4, agents: 4 })
        );
        let p5 = Arc::new(standard_graph(GraphKind::Path, 5).unwrap());
        assert_eq!(GameInstance::new(2, 1, Arc::clone(&p5), tv.clone()), Err(GameError::TooFewAgents(1)));
        assert_eq!(
            GameInstance::new(3, 2, p5, tv),
            Err(GameError::LambdaMismatch { lambda: 3, tolerance: 2 })
        );
    }

    #[test]
    fn assignment_validation() {
        let game = half_game(standard_graph(GraphKind::Path, 7).unwrap(), 2);
        assert!(Assignment::from_slots(&game, vec![1, 1, 2, 2, 3, 3, 0]).is_ok());
        assert_eq!(
            Assignment::from_slots(&game, vec![1, 1, 1, 2, 3, 3, 0]),
            Err(GameError::WrongCount { ty: 1, expected: 2, got: 3 })
        );
        assert_eq!(Assignment::from_slots(&game, vec![1, 1]), Err(GameError::WrongLength { expected: 7, got: 2 }));
        assert_eq!(
            Assignment::from_pairs(&game, &[(0, 1), (0, 2)]),
            Err(GameError::DuplicateNode(0))
        );
        assert_eq!(Assignment::from_slots(&game, vec![1, 1, 2, 2, 3, 4, 0]), Err(GameError::TypeOutOfRange(4)));
    }

    #[test]
    fn tolerant_utilities() {
        // Node 0 is adjacent to nodes 1 and 2 only.
        let topology = build_graph(
            9,
            &[(0, 1), (0, 2), (1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 8)],
        )
        .unwrap();
        let game = half_game(topology, 2);
        let a = Assignment::from_slots(&game, vec![1, 1, 3, 0, 2, 2, 3, 0, 0]).unwrap();
        assert_eq!(utility(&game, &a, 0).unwrap().value(), r(1, 2));
        let b = Assignment::from_slots(&game, vec![1, 1, 2, 0, 3, 3, 2, 0, 0]).unwrap();
        assert_eq!(utility(&game, &b, 0).unwrap().value(), r(3, 4));
        assert_eq!(utility(&game, &a, 3), Err(GameError::NodeEmpty(3)));
        assert_eq!(utility(&game, &a, 42), Err(GameError::NodeUnknown(42)));
    }

    #[test]
    fn isolation_and_segregation() {
        let tv = standard_tolerance(ToleranceKind::Zero, 2, None).unwrap();
        let game = GameInstance::new(2, 2, Arc::new(standard_graph(GraphKind::Path, 6).unwrap()), tv).unwrap();
        let seg = Assignment::from_slots(&game, vec![1, 1, 0, 0, 2, 2]).unwrap();
        assert_eq!(social_welfare(&game, &seg), r(4, 1));
        let isolated = Assignment::from_slots(&game, vec![1, 0, 1, 2, 2, 0]).unwrap();
        assert_eq!(utility(&game, &isolated, 0).unwrap().value(), r(0, 1));
        // 0 (isolated) + 0 + 1/2 + 1
        assert_eq!(social_welfare(&game, &isolated), r(3, 2));
    }
}
