//! Named instances: the tree without equilibria, the clique gadgets behind the
//! price-of-anarchy and price-of-stability lower bounds, the seven-type grid,
//! and closed-form bound evaluators.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::constructions::{construct_binary_grid, ConstructionError};
use crate::game::{Assignment, GameError, GameInstance};
use crate::rational::{format_rational, Rational};
use crate::tolerance::{standard_tolerance, tolerance_sums, ToleranceError, ToleranceKind, ToleranceVector};
use crate::topology::{build_graph, grid, NodeId, TopologyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("the tree without equilibria needs t_1 < 1")]
    T1IsOne,
    #[error("b must be even, at least 2 and not a multiple of 3, got {0}")]
    BadB(usize),
    #[error("denominator is not positive")]
    DegenerateDenominator,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Tolerance(#[from] ToleranceError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// A generated game together with its labelled placements, its parameters
/// and named groups of nodes.
#[derive(Debug, Clone)]
pub struct NamedInstance {
    pub name: String,
    pub game: GameInstance,
    pub assignments: BTreeMap<String, Assignment>,
    pub metadata: BTreeMap<String, String>,
    pub groups: BTreeMap<String, Vec<NodeId>>,
}

impl NamedInstance {
    fn new(name: &str, game: GameInstance) -> Self {
        Self {
            name: name.to_string(),
            game,
            assignments: BTreeMap::new(),
            metadata: BTreeMap::new(),
            groups: BTreeMap::new(),
        }
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn group(&self, name: &str) -> &[NodeId] {
        self.groups.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn assignment(&self, label: &str) -> Option<&Assignment> {
        self.assignments.get(label)
    }
}

fn range(start: usize, len: usize) -> Vec<NodeId> {
    (start..start + len).collect()
}

fn clique_edges(nodes: &[NodeId], edges: &mut Vec<(NodeId, NodeId)>) {
    for (i, &u) in nodes.iter().enumerate() {
        for &v in &nodes[i + 1..] {
            edges.push((u, v));
        }
    }
}

/// A four-level tree with `λ(2λ+1)` agents and one empty node on which no
/// placement is stable when `t_1 < 1`: root `alpha`, its single child
/// `beta`, `2λ−1` children of `beta` (`gamma`), each with `λ` leaves
/// (`delta_1`, `delta_2`, ...).
pub fn no_equilibrium_tree_game(lambda: usize, tv: ToleranceVector) -> Result<NamedInstance, InstanceError> {
    if tv.lambda() != lambda {
        return Err(InstanceError::Game(GameError::LambdaMismatch { lambda, tolerance: tv.lambda() }));
    }
    if tv.at(1).is_one() {
        return Err(InstanceError::T1IsOne);
    }
    let gamma = range(2, 2 * lambda - 1);
    let mut edges = vec![(0, 1)];
    let mut next = 2 + gamma.len();
    let mut deltas = Vec::new();
    for &g in &gamma {
        edges.push((1, g));
        let leaves = range(next, lambda);
        edges.extend(leaves.iter().map(|&d| (g, d)));
        next += lambda;
        deltas.push(leaves);
    }
    let topology = build_graph(next, &edges)?;
    let game = GameInstance::new(lambda, 2 * lambda + 1, Arc::new(topology), tv)?;
    let mut inst = NamedInstance::new("no-eq-tree", game);
    inst.meta("lambda", lambda);
    inst.meta("tolerance", inst.game.tolerance().clone());
    inst.groups.insert("alpha".into(), vec![0]);
    inst.groups.insert("beta".into(), vec![1]);
    inst.groups.insert("gamma".into(), gamma);
    for (i, leaves) in deltas.into_iter().enumerate() {
        inst.groups.insert(format!("delta_{}", i + 1), leaves);
    }
    Ok(inst)
}

/// Centre `c`, `λ` large cliques of `2λμ+1` nodes, chains of `2μ` small
/// cliques of `λ` nodes hanging off `c`, and a final small clique `K` where
/// all chains end. Every small-clique node has exactly one neighbour outside
/// its clique.
///
/// `optimal` fills large clique `ℓ` with type `ℓ`. `equilibrium_v` puts one
/// agent of every type in each small clique so that linked nodes share a type
/// and the nodes next to `c` have distinct types.
pub fn poa_lb_game(lambda: usize, mu: usize, tv: ToleranceVector) -> Result<NamedInstance, InstanceError> {
    if lambda < 2 || mu < 1 {
        return Err(InstanceError::InvalidParams(format!("need lambda >= 2 and mu >= 1, got {lambda}, {mu}")));
    }
    let x = 2 * lambda * mu + 1;
    let chain = 2 * mu;
    let mut edges = Vec::new();
    let mut groups = BTreeMap::new();
    groups.insert("c".to_string(), vec![0]);

    let mut large = Vec::new();
    for i in 0..lambda {
        let nodes = range(1 + i * x, x);
        clique_edges(&nodes, &mut edges);
        edges.push((0, nodes[0]));
        large.push(nodes);
    }
    let small_start = 1 + lambda * x;
    let small = |i: usize, j: usize| range(small_start + (i * chain + j) * lambda, lambda);
    let last = range(small_start + lambda * chain * lambda, lambda);
    clique_edges(&last, &mut edges);
    for i in 0..lambda {
        for j in 0..chain {
            let here = small(i, j);
            clique_edges(&here, &mut edges);
            if j == 0 {
                edges.push((0, here[0]));
            }
            // Position p links to position p of the next clique: positions
            // 1.. leave odd cliques, position 0 leaves even ones.
            if j + 1 < chain {
                let there = small(i, j + 1);
                if j % 2 == 0 {
                    edges.extend((1..lambda).map(|p| (here[p], there[p])));
                } else {
                    edges.push((here[0], there[0]));
                }
            } else {
                edges.push((here[0], last[i]));
            }
            groups.insert(format!("K_{}_{}", i + 1, j + 1), here);
        }
    }
    for (i, nodes) in large.into_iter().enumerate() {
        groups.insert(format!("K_{}", i + 1), nodes);
    }
    groups.insert("K".to_string(), last.clone());
    let node_count = small_start + (lambda * chain + 1) * lambda;
    let topology = build_graph(node_count, &edges)?;
    let game = GameInstance::new(lambda, x, Arc::new(topology), tv)?;

    let mut optimal = vec![0u8; node_count];
    for i in 0..lambda {
        for &v in &groups[&format!("K_{}", i + 1)] {
            optimal[v] = i as u8 + 1;
        }
    }
    let mut eq = vec![0u8; node_count];
    for i in 0..lambda {
        let own = i as u8 + 1;
        let order: Vec<u8> = std::iter::once(own).chain((1..=lambda as u8).filter(|&t| t != own)).collect();
        for j in 0..chain {
            for (p, v) in small(i, j).into_iter().enumerate() {
                eq[v] = order[p];
            }
        }
        eq[last[i]] = own;
    }

    let mut inst = NamedInstance::new("poa-lb", game);
    inst.assignments.insert("optimal".into(), Assignment::from_slots(&inst.game, optimal)?);
    inst.assignments.insert("equilibrium_v".into(), Assignment::from_slots(&inst.game, eq)?);
    inst.meta("lambda", lambda);
    inst.meta("mu", mu);
    inst.meta("tolerance", inst.game.tolerance().clone());
    inst.groups = groups;
    Ok(inst)
}

/// Side lengths of the two-type stability gadget for parameter `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PosSizes {
    pub b: usize,
    pub z: usize,
    pub c: usize,
    pub agents: usize,
}

impl PosSizes {
    pub fn new(b: usize) -> Result<Self, InstanceError> {
        if b < 2 || b % 2 != 0 || b % 3 == 0 {
            return Err(InstanceError::BadB(b));
        }
        let z = 2 * b + 1;
        let c = b * z;
        Ok(Self { b, z, c, agents: 2 * c * (z + 1) })
    }
}

/// Two-type gadget whose only equilibrium has low welfare. Node sets: `I`
/// (`cz/2`), `J` (`c`), clique `K` (`cz/2`), `X_1..X_z` (`b` each),
/// `Y_1..Y_z` (`c` each) and `s`. `I` is matched into `K`, `K` is complete to
/// `X`, `X_i` to `Y_i`, and `s` to `Y ∪ J`.
pub fn pos_game(b: usize, t1: Rational) -> Result<NamedInstance, InstanceError> {
    let sizes = PosSizes::new(b)?;
    if t1 < Rational::zero() || t1 >= Rational::one() {
        return Err(InstanceError::InvalidParams(format!("t1 must lie in [0, 1), got {}", format_rational(&t1))));
    }
    let PosSizes { z, c, .. } = sizes;
    let half = c * z / 2;
    let i_set = range(0, half);
    let j_set = range(half, c);
    let k_set = range(half + c, half);
    let x_start = 2 * half + c;
    let x_blocks: Vec<Vec<NodeId>> = (0..z).map(|i| range(x_start + i * b, b)).collect();
    let y_start = x_start + z * b;
    let y_blocks: Vec<Vec<NodeId>> = (0..z).map(|i| range(y_start + i * c, c)).collect();
    let s = y_start + z * c;
    let node_count = s + 1;

    let mut edges = Vec::new();
    clique_edges(&k_set, &mut edges);
    edges.extend(i_set.iter().zip(&k_set).map(|(&u, &v)| (u, v)));
    for (xb, yb) in x_blocks.iter().zip(&y_blocks) {
        for &xv in xb {
            edges.extend(k_set.iter().map(|&k| (k, xv)));
            edges.extend(yb.iter().map(|&y| (xv, y)));
        }
    }
    edges.extend(y_blocks.iter().flatten().map(|&y| (y, s)));
    edges.extend(j_set.iter().map(|&j| (j, s)));
    let topology = build_graph(node_count, &edges)?;
    let tv = ToleranceVector::new(vec![Rational::one(), t1])?;
    let game = GameInstance::new(2, c * (z + 1), Arc::new(topology), tv)?;

    const RED: u8 = 1;
    const BLUE: u8 = 2;
    let x_all: Vec<NodeId> = x_blocks.iter().flatten().copied().collect();
    let y_all: Vec<NodeId> = y_blocks.iter().flatten().copied().collect();

    let mut eq = vec![0u8; node_count];
    for &v in i_set.iter().chain(&k_set).chain(&x_all) {
        eq[v] = RED;
    }
    for &v in j_set.iter().chain(std::iter::once(&s)).chain(&y_all[1..]) {
        eq[v] = BLUE;
    }
    let mut star = vec![0u8; node_count];
    for &v in i_set.iter().chain(&k_set).chain(&j_set) {
        star[v] = RED;
    }
    for &v in y_all.iter().chain(std::iter::once(&s)).chain(&x_all[1..]) {
        star[v] = BLUE;
    }

    let mut inst = NamedInstance::new("pos", game);
    inst.assignments.insert("equilibrium_v".into(), Assignment::from_slots(&inst.game, eq)?);
    inst.assignments.insert("v_star".into(), Assignment::from_slots(&inst.game, star)?);
    inst.meta("b", b);
    inst.meta("z", z);
    inst.meta("c", c);
    inst.meta("t1", format_rational(&t1));
    inst.groups.insert("I".into(), i_set);
    inst.groups.insert("J".into(), j_set);
    inst.groups.insert("K".into(), k_set);
    inst.groups.insert("S".into(), vec![s]);
    for (i, (xb, yb)) in x_blocks.into_iter().zip(y_blocks).enumerate() {
        inst.groups.insert(format!("X_{}", i + 1), xb);
        inst.groups.insert(format!("Y_{}", i + 1), yb);
    }
    inst.groups.insert("X".into(), x_all);
    inst.groups.insert("Y".into(), y_all);
    Ok(inst)
}

/// The 4×4 grid with seven types of two agents and the placement built by the
/// 2-binary grid construction. Stable under the 2-binary vector, unstable
/// once `t_2 = 3/5`.
pub fn seven_type_grid_example() -> Result<NamedInstance, InstanceError> {
    let tv = standard_tolerance(ToleranceKind::AlphaBinary, 7, Some(2))?;
    let game = GameInstance::new(7, 2, Arc::new(grid(4, 4)?), tv)?;
    let a = construct_binary_grid(&game)?;
    let mut inst = NamedInstance::new("seven-type-grid", game);
    inst.assignments.insert("equilibrium_v".into(), a);
    inst.meta("tolerance", inst.game.tolerance().clone());
    inst.meta("tolerance_alt", seven_type_alt_tolerance());
    Ok(inst)
}

/// `[1, 1, 3/5, 0, 0, 0, 0]`.
pub fn seven_type_alt_tolerance() -> ToleranceVector {
    let mut values = vec![Rational::zero(); 7];
    values[0] = Rational::one();
    values[1] = Rational::one();
    values[2] = Rational::new(3, 5);
    ToleranceVector::new(values).expect("valid vector")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    PoaUpper,
    PoaLower,
    ZtsPoa,
    PosLower,
    ProportionalPoaUpper,
    InversePoaUpper,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::PoaUpper,
        BoundKind::PoaLower,
        BoundKind::ZtsPoa,
        BoundKind::PosLower,
        BoundKind::ProportionalPoaUpper,
        BoundKind::InversePoaUpper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::PoaUpper => "poa-upper",
            BoundKind::PoaLower => "poa-lower",
            BoundKind::ZtsPoa => "zts-poa",
            BoundKind::PosLower => "pos-lower",
            BoundKind::ProportionalPoaUpper => "proportional-poa-upper",
            BoundKind::InversePoaUpper => "inverse-poa-upper",
        }
    }

    pub fn needs_tolerance(self) -> bool {
        matches!(self, BoundKind::PoaUpper | BoundKind::PoaLower | BoundKind::PosLower)
    }
}

impl std::str::FromStr for BoundKind {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.replace('_', "-");
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| InstanceError::InvalidParams(format!("unknown bound kind {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct BoundParams {
    pub lambda: usize,
    pub n: usize,
    pub tolerance: Option<ToleranceVector>,
}

fn ratio(num: Rational, den: Rational) -> Result<Rational, InstanceError> {
    if den <= Rational::zero() {
        return Err(InstanceError::DegenerateDenominator);
    }
    Ok(num / den)
}

fn int(v: usize) -> Rational {
    Rational::from_integer(v as i128)
}

fn harmonic(lambda: usize) -> Rational {
    (1..=lambda).map(|k| Rational::new(1, k as i128)).sum()
}

/// Evaluates a closed-form price bound for `n` agents of `λ` types.
pub fn evaluate_bound(kind: BoundKind, params: &BoundParams) -> Result<Rational, InstanceError> {
    let BoundParams { lambda, n, .. } = *params;
    if lambda < 2 || n == 0 || n % lambda != 0 {
        return Err(InstanceError::InvalidParams(format!("n = {n} must be a positive multiple of lambda = {lambda}")));
    }
    let tv = match (kind.needs_tolerance(), &params.tolerance) {
        (true, Some(tv)) if tv.lambda() == lambda => Some(tv),
        (true, Some(tv)) => {
            return Err(InstanceError::Game(GameError::LambdaMismatch { lambda, tolerance: tv.lambda() }));
        }
        (true, None) => return Err(InstanceError::InvalidParams(format!("{} needs a tolerance vector", kind.name()))),
        (false, _) => None,
    };
    let (l, nr) = (int(lambda), int(n));
    let upper = |tau: Rational| ratio(l * nr, tau * nr - l);
    match kind {
        BoundKind::PoaUpper => upper(tolerance_sums(tv.expect("checked")).0),
        BoundKind::ProportionalPoaUpper => upper(l / int(2)),
        BoundKind::InversePoaUpper => upper(harmonic(lambda)),
        BoundKind::ZtsPoa => ratio(l * nr, nr - l),
        BoundKind::PoaLower => {
            let sum: Rational = tolerance_sums(tv.expect("checked")).1.into_iter().sum();
            ratio(l * nr, sum / l * nr - (l * l - sum) / (l - Rational::one()))
        }
        BoundKind::PosLower => {
            if lambda != 2 {
                return Err(InstanceError::InvalidParams("pos-lower is defined for two types".into()));
            }
            ratio(int(2), tolerance_sums(tv.expect("checked")).0)
        }
    }
}

/// Welfare of the balanced small-clique equilibrium of [`poa_lb_game`]:
/// `(Στ_ℓ/λ²)·n + (Στ_ℓ − λ²)/(λ(λ−1))`.
pub fn poa_lb_equilibrium_welfare(lambda: usize, n: usize, tv: &ToleranceVector) -> Rational {
    let sum: Rational = tolerance_sums(tv).1.into_iter().sum();
    let l = int(lambda);
    sum / (l * l) * int(n) + (sum - l * l) / (l * (l - Rational::one()))
}

/// Welfare of `equilibrium_v` in [`pos_game`], summed group by group.
pub fn pos_equilibrium_welfare(sizes: PosSizes, t1: Rational) -> Rational {
    let PosSizes { b, z, c, .. } = sizes;
    let (b, z, c) = (int(b), int(z), int(c));
    let one = Rational::one();
    let half = c * z / int(2);
    c * z
        + b * (z - one) * (half + t1 * c) / (half + c)
        + b * (half + t1 * (c - one)) / (half + c - one)
        + (c * z - one) * (one + t1 * b) / (b + one)
        + c
        + one
}

/// The published expression for the welfare of `v_star` in [`pos_game`]. It
/// leaves out the `J` agents and the cross-type share of `s`, so it is exact
/// only when `t1 = 0`.
pub fn pos_v_star_welfare_stated(sizes: PosSizes, t1: Rational) -> Rational {
    let PosSizes { z, c, .. } = sizes;
    let (z, c) = (int(z), int(c));
    let one = Rational::one();
    let half = c * z / int(2);
    half * (one + (half + t1 * (c - one)) / (half + c - one)) + (c - one) * (c + t1 * half) / (half + c)
        + c * z
        + c * z / (c * z + c)
}

/// Exact welfare of `v_star` in [`pos_game`].
pub fn pos_v_star_welfare(sizes: PosSizes, t1: Rational) -> Rational {
    let (z, c) = (int(sizes.z), int(sizes.c));
    pos_v_star_welfare_stated(sizes, t1) + c * t1 + t1 * c / (c * z + c)
}

/// Lower estimate `cz(2z+3+t1)/(z+2)` for the welfare of `v_star`.
pub fn pos_v_star_lower_estimate(sizes: PosSizes, t1: Rational) -> Rational {
    let (z, c) = (int(sizes.z), int(sizes.c));
    c * z * (int(2) * z + int(3) + t1) / (z + int(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{enumerate_equilibria, is_equilibrium, EnumerationConfig};
    use crate::game::{social_welfare, utility};
    use crate::topology::GridShape;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    fn half_tolerance() -> ToleranceVector {
        ToleranceVector::new(vec![r(1, 1), r(1, 2)]).unwrap()
    }

    #[test]
    fn tree_without_equilibria_shape() {
        let inst = no_equilibrium_tree_game(2, half_tolerance()).unwrap();
        assert_eq!(inst.game.topology().node_count(), 11);
        assert_eq!(inst.game.agent_count(), 10);
        assert!(inst.game.topology().is_tree());
        assert_eq!(inst.group("gamma").len(), 3);
        let tv3 = standard_tolerance(ToleranceKind::Zero, 3, None).unwrap();
        let inst = no_equilibrium_tree_game(3, tv3).unwrap();
        assert_eq!((inst.game.topology().node_count(), inst.game.agent_count()), (22, 21));
        assert_eq!(inst.group("gamma").len(), 5);
        assert!(inst.groups.iter().filter(|(k, _)| k.starts_with("delta")).all(|(_, v)| v.len() == 3));
    }

    #[test]
    fn tree_without_equilibria_has_none() {
        let inst = no_equilibrium_tree_game(2, half_tolerance()).unwrap();
        assert!(enumerate_equilibria(&inst.game, &EnumerationConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn tree_without_equilibria_needs_imperfect_tolerance() {
        let tv = standard_tolerance(ToleranceKind::AlphaBinary, 3, Some(2)).unwrap();
        assert_eq!(no_equilibrium_tree_game(3, tv).unwrap_err(), InstanceError::T1IsOne);
    }

    #[test]
    fn clique_gadget_zero_tolerance() {
        let tv = standard_tolerance(ToleranceKind::Zero, 3, None).unwrap();
        let inst = poa_lb_game(3, 1, tv).unwrap();
        let game = &inst.game;
        assert_eq!((game.topology().node_count(), game.agent_count()), (43, 21));
        let eq = inst.assignment("equilibrium_v").unwrap();
        assert!(is_equilibrium(game, eq).0);
        assert_eq!(social_welfare(game, eq), r(6, 1));
        assert_eq!(social_welfare(game, inst.assignment("optimal").unwrap()), r(21, 1));
        // Every small-clique node has exactly one neighbour outside its clique.
        for (name, nodes) in inst.groups.iter().filter(|(k, _)| k.matches('_').count() == 2 || *k == "K") {
            for &v in nodes {
                let outside = game.topology().neighbors(v).iter().filter(|u| !nodes.contains(u)).count();
                assert_eq!(outside, 1, "{name} node {v}");
            }
        }
    }

    #[test]
    fn clique_gadget_utilities() {
        let tv = standard_tolerance(ToleranceKind::InverseProportional, 3, None).unwrap();
        let (_, per_type) = tolerance_sums(&tv);
        let inst = poa_lb_game(3, 2, tv.clone()).unwrap();
        let game = &inst.game;
        let eq = inst.assignment("equilibrium_v").unwrap();
        let centre: Vec<_> = game.topology().neighbors(0).to_vec();
        for v in eq.occupied_nodes() {
            let t = eq.type_at(v) as usize;
            let expected = if centre.contains(&v) {
                (per_type[t - 1] - r(1, 1)) / r(2, 1)
            } else {
                per_type[t - 1] / r(3, 1)
            };
            assert_eq!(utility(game, eq, v).unwrap().value(), expected);
        }
        assert!(is_equilibrium(game, eq).0);
        assert_eq!(social_welfare(game, eq), poa_lb_equilibrium_welfare(3, game.agent_count(), &tv));
    }

    #[test]
    fn stability_gadget_sizes() {
        let inst = pos_game(2, r(1, 2)).unwrap();
        assert_eq!(inst.game.topology().node_count(), 121);
        assert_eq!(inst.game.agent_count(), 120);
        let sizes: Vec<usize> = ["I", "J", "K", "X", "Y", "S"].iter().map(|g| inst.group(g).len()).collect();
        assert_eq!(sizes, vec![25, 10, 25, 10, 50, 1]);
        for b in [1, 3, 6, 9, 12] {
            assert_eq!(pos_game(b, r(0, 1)).unwrap_err(), InstanceError::BadB(b));
        }
    }

    #[test]
    fn stability_gadget_welfare() {
        for t1 in [r(0, 1), r(1, 2), r(1, 3)] {
            let inst = pos_game(2, t1).unwrap();
            let sizes = PosSizes::new(2).unwrap();
            let eq = inst.assignment("equilibrium_v").unwrap();
            let star = inst.assignment("v_star").unwrap();
            assert!(is_equilibrium(&inst.game, eq).0);
            assert_eq!(social_welfare(&inst.game, eq), pos_equilibrium_welfare(sizes, t1));
            assert_eq!(social_welfare(&inst.game, star), pos_v_star_welfare(sizes, t1));
            assert!(pos_v_star_welfare(sizes, t1) > pos_v_star_lower_estimate(sizes, t1));
        }
        let sizes = PosSizes::new(2).unwrap();
        assert_eq!(pos_v_star_welfare_stated(sizes, r(0, 1)), pos_v_star_welfare(sizes, r(0, 1)));
    }

    #[test]
    fn seven_type_witness() {
        let inst = seven_type_grid_example().unwrap();
        let a = inst.assignment("equilibrium_v").unwrap();
        assert!(is_equilibrium(&inst.game, a).0);
        let alt = inst.game.with_tolerance(seven_type_alt_tolerance()).unwrap();
        let (stable, witness) = is_equilibrium(&alt, a);
        assert!(!stable);
        let w = witness.unwrap();
        let shape = GridShape { rows: 4, cols: 4 };
        assert_eq!(shape.coords(w.from_node), (2, 4));
        assert_eq!(a.type_at(w.from_node), 4);
        assert_eq!((w.old_utility, w.new_utility), (r(2, 3), r(11, 15)));
    }

    #[test]
    fn bounds() {
        let p = |lambda, n, tolerance| BoundParams { lambda, n, tolerance };
        assert_eq!(evaluate_bound(BoundKind::ZtsPoa, &p(3, 21, None)).unwrap(), r(7, 2));
        let prop2 = standard_tolerance(ToleranceKind::Proportional, 2, None).unwrap();
        assert_eq!(evaluate_bound(BoundKind::PoaUpper, &p(2, 10, Some(prop2.clone()))).unwrap(), r(20, 8));
        assert_eq!(evaluate_bound(BoundKind::ProportionalPoaUpper, &p(2, 10, None)).unwrap(), r(20, 8));
        assert_eq!(evaluate_bound(BoundKind::PosLower, &p(2, 10, Some(prop2))).unwrap(), r(2, 1));
        let zero3 = standard_tolerance(ToleranceKind::Zero, 3, None).unwrap();
        assert_eq!(evaluate_bound(BoundKind::PoaLower, &p(3, 21, Some(zero3))).unwrap(), r(7, 2));
        assert_eq!(evaluate_bound(BoundKind::ZtsPoa, &p(2, 2, None)), Err(InstanceError::DegenerateDenominator));
        assert!(matches!(evaluate_bound(BoundKind::ZtsPoa, &p(3, 20, None)), Err(InstanceError::InvalidParams(_))));
        assert_eq!("zts_poa".parse::<BoundKind>().unwrap(), BoundKind::ZtsPoa);
    }
}
