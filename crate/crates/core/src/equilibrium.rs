//! Jump deviations, equilibrium checks, best-response dynamics, and
//! exhaustive enumeration of type-placements.

use std::collections::HashSet;

use num_traits::Zero;
use rayon::prelude::*;

use crate::game::{scaled_from_counts, Assignment, GameInstance, ScaledUtility};
use crate::rational::Rational;
use crate::topology::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquilibriumError {
    #[error("node {0} is empty")]
    NodeEmpty(NodeId),
    #[error("enumeration needs {required} placements, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("the game has no equilibrium")]
    NoEquilibrium,
    #[error("the worst equilibrium has zero welfare, so the price of anarchy is undefined")]
    ZeroWelfareEquilibrium,
    #[error("could not build a worker pool: {0}")]
    WorkerPool(String),
}

/// A strictly improving jump.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeviationWitness {
    pub from_node: NodeId,
    pub to_node: NodeId,
    pub old_utility: Rational,
    pub new_utility: Rational,
}

/// Occupied-neighbour counts by type for every node of one placement.
struct NeighborCounts {
    stride: usize,
    counts: Vec<usize>,
}

impl NeighborCounts {
    fn new(game: &GameInstance, slots: &[u8]) -> Self {
        let stride = game.lambda() + 1;
        let topology = game.topology();
        let mut counts = vec![0; slots.len() * stride];
        for (v, row) in counts.chunks_exact_mut(stride).enumerate() {
            for &u in topology.neighbors(v) {
                row[slots[u] as usize] += 1;
            }
            row[0] = 0;
        }
        Self { stride, counts }
    }

    fn at(&self, node: NodeId) -> &[usize] {
        &self.counts[node * self.stride..(node + 1) * self.stride]
    }
}

/// For every empty node and type, the scaled utility an outside agent of that
/// type would get by jumping there.
struct JumpTable {
    lambda: usize,
    empties: Vec<NodeId>,
    values: Vec<ScaledUtility>,
}

impl JumpTable {
    fn new(game: &GameInstance, slots: &[u8], counts: &NeighborCounts) -> Self {
        let lambda = game.lambda();
        let empties: Vec<_> = (0..slots.len()).filter(|&v| slots[v] == 0).collect();
        let mut values = Vec::with_capacity(empties.len() * lambda);
        for &v in &empties {
            for ty in 1..=lambda as u8 {
                values.push(scaled_from_counts(game, ty, counts.at(v)));
            }
        }
        Self { lambda, empties, values }
    }

    /// Utility for the agent of type `ty` on `from` jumping to the `idx`-th
    /// empty node. Her vacated node no longer counts as a neighbour.
    fn value(&self, game: &GameInstance, idx: usize, ty: u8, from: NodeId) -> ScaledUtility {
        let mut value = self.values[idx * self.lambda + ty as usize - 1];
        if game.topology().are_adjacent(from, self.empties[idx]) {
            value.weighted -= game.weights()[0];
            value.neighbors -= 1;
        }
        value
    }
}

/// Best strict improvement for the agent on `node`: `(target, old, new)`.
fn best_jump(
    game: &GameInstance,
    slots: &[u8],
    counts: &NeighborCounts,
    table: &JumpTable,
    node: NodeId,
) -> Option<(NodeId, ScaledUtility, ScaledUtility)> {
    let ty = slots[node];
    let current = scaled_from_counts(game, ty, counts.at(node));
    let mut best: Option<(NodeId, ScaledUtility)> = None;
    for (idx, &target) in table.empties.iter().enumerate() {
        let value = table.value(game, idx, ty, node);
        if value > current && best.is_none_or(|(_, b)| value > b) {
            best = Some((target, value));
        }
    }
    best.map(|(target, value)| (target, current, value))
}

fn witness(game: &GameInstance, from: NodeId, jump: (NodeId, ScaledUtility, ScaledUtility)) -> DeviationWitness {
    DeviationWitness {
        from_node: from,
        to_node: jump.0,
        old_utility: jump.1.to_rational(game.scale()),
        new_utility: jump.2.to_rational(game.scale()),
    }
}

/// The strictly best strictly improving jump for the agent on `node`, ties
/// broken by the smallest target id.
pub fn best_deviation(
    game: &GameInstance,
    a: &Assignment,
    node: NodeId,
) -> Result<Option<DeviationWitness>, EquilibriumError> {
    if node >= a.slots().len() || !a.is_occupied(node) {
        return Err(EquilibriumError::NodeEmpty(node));
    }
    let counts = NeighborCounts::new(game, a.slots());
    let table = JumpTable::new(game, a.slots(), &counts);
    Ok(best_jump(game, a.slots(), &counts, &table, node).map(|j| witness(game, node, j)))
}

fn first_deviation(game: &GameInstance, slots: &[u8]) -> Option<DeviationWitness> {
    let counts = NeighborCounts::new(game, slots);
    let table = JumpTable::new(game, slots, &counts);
    (0..slots.len())
        .filter(|&v| slots[v] != 0)
        .find_map(|v| best_jump(game, slots, &counts, &table, v).map(|j| witness(game, v, j)))
}

/// Cheaper than [`first_deviation`]: stops at the first improving jump.
fn is_stable(game: &GameInstance, slots: &[u8]) -> bool {
    let counts = NeighborCounts::new(game, slots);
    let table = JumpTable::new(game, slots, &counts);
    (0..slots.len()).filter(|&v| slots[v] != 0).all(|v| {
        let ty = slots[v];
        let current = scaled_from_counts(game, ty, counts.at(v));
        (0..table.empties.len()).all(|idx| table.value(game, idx, ty, v) <= current)
    })
}

/// Whether no agent has a strictly improving jump. On failure the witness is
/// the best deviation of the smallest occupied node that has one.
pub fn is_equilibrium(game: &GameInstance, a: &Assignment) -> (bool, Option<DeviationWitness>) {
    match first_deviation(game, a.slots()) {
        None => (true, None),
        Some(w) => (false, Some(w)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DynamicsOutcome {
    Converged,
    CycleDetected,
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsResult {
    pub outcome: DynamicsOutcome,
    pub final_assignment: Assignment,
    pub steps: usize,
    /// `(from, to)` for every jump taken.
    pub trace: Vec<(NodeId, NodeId)>,
}

/// Repeatedly lets the smallest-id agent with an improving jump take her best
/// jump, until no one wants to move, a placement repeats, or `max_steps`
/// jumps have been made.
pub fn best_response_dynamics(game: &GameInstance, initial: &Assignment, max_steps: usize) -> DynamicsResult {
    let mut current = initial.clone();
    let mut seen: HashSet<Assignment> = HashSet::from([current.clone()]);
    let mut trace = Vec::new();
    loop {
        let Some(w) = first_deviation(game, current.slots()) else {
            return DynamicsResult {
                outcome: DynamicsOutcome::Converged,
                steps: trace.len(),
                final_assignment: current,
                trace,
            };
        };
        if trace.len() == max_steps {
            return DynamicsResult {
                outcome: DynamicsOutcome::StepLimit,
                steps: trace.len(),
                final_assignment: current,
                trace,
            };
        }
        current = current.with_jump(w.from_node, w.to_node);
        trace.push((w.from_node, w.to_node));
        if !seen.insert(current.clone()) {
            return DynamicsResult {
                outcome: DynamicsOutcome::CycleDetected,
                steps: trace.len(),
                final_assignment: current,
                trace,
            };
        }
    }
}

/// Limits for exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    /// Maximum number of type-placements to visit.
    pub budget: u128,
    /// Worker threads; 1 runs on the calling thread.
    pub workers: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self { budget: 10_000_000, workers: 1 }
    }
}

/// Number of type-placements, `|V|! / (x!^λ (|V|-n)!)`, or `None` if it
/// does not fit in 128 bits.
pub fn placement_count(game: &GameInstance) -> Option<u128> {
    let mut remaining = game.topology().node_count() as u128;
    let mut total: u128 = 1;
    let groups = std::iter::repeat_n(game.agents_per_type(), game.lambda());
    for size in groups {
        total = total.checked_mul(binomial(remaining, size as u128)?)?;
        remaining -= size as u128;
    }
    Some(total)
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn check_budget(game: &GameInstance, config: &EnumerationConfig) -> Result<(), EquilibriumError> {
    match placement_count(game) {
        Some(c) if c <= config.budget => Ok(()),
        other => Err(EquilibriumError::BudgetExceeded {
            required: other.unwrap_or(u128::MAX),
            budget: config.budget,
        }),
    }
}

/// Rearranges `slice` into the next permutation in lexicographic order;
/// false once the last one has been reached.
fn next_permutation(slice: &mut [u8]) -> bool {
    let Some(i) = slice.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = slice.iter().rposition(|&x| x > slice[i]).expect("pivot has a successor");
    slice.swap(i, j);
    slice[i + 1..].reverse();
    true
}

/// All distinct prefixes of length `len` over the multiset `counts`, in
/// lexicographic order.
fn prefixes(counts: &[usize], len: usize) -> Vec<Vec<u8>> {
    fn walk(counts: &mut [usize], len: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for ty in 0..counts.len() {
            if counts[ty] > 0 {
                counts[ty] -= 1;
                current.push(ty as u8);
                walk(counts, len, current, out);
                current.pop();
                counts[ty] += 1;
            }
        }
    }
    let mut out = Vec::new();
    walk(&mut counts.to_vec(), len, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Visits every type-placement in lexicographic order, split into
/// independent chunks that may run on separate workers. Each chunk folds into
/// its own state; the states come back in placement order, so the outcome
/// does not depend on the worker count.
fn fold_placements<S, I, F>(
    game: &GameInstance,
    config: &EnumerationConfig,
    init: I,
    visit: F,
) -> Result<Vec<S>, EquilibriumError>
where
    S: Send,
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &[u8]) + Sync,
{
    check_budget(game, config)?;
    let n = game.topology().node_count();
    let mut counts = vec![game.agents_per_type(); game.lambda() + 1];
    counts[0] = n - game.agent_count();
    let mut prefix_len = 0;
    while prefix_len < n && prefixes(&counts, prefix_len).len() < 64 {
        prefix_len += 1;
    }
    let chunks = prefixes(&counts, prefix_len);
    let run_chunk = |prefix: &Vec<u8>| {
        let mut rest = counts.clone();
        for &t in prefix {
            rest[t as usize] -= 1;
        }
        let mut slots = prefix.clone();
        for (t, &c) in rest.iter().enumerate() {
            slots.extend(std::iter::repeat_n(t as u8, c));
        }
        let mut state = init();
        loop {
            visit(&mut state, &slots);
            if !next_permutation(&mut slots[prefix_len..]) {
                break;
            }
        }
        state
    };
    if config.workers <= 1 {
        return Ok(chunks.iter().map(run_chunk).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| EquilibriumError::WorkerPool(e.to_string()))?;
    Ok(pool.install(|| chunks.par_iter().map(run_chunk).collect()))
}

/// Every equilibrium type-placement, in lexicographic order.
pub fn enumerate_equilibria(
    game: &GameInstance,
    config: &EnumerationConfig,
) -> Result<Vec<Assignment>, EquilibriumError> {
    let chunks = fold_placements(game, config, Vec::new, |found: &mut Vec<Assignment>, slots| {
        if is_stable(game, slots) {
            found.push(Assignment::from_slots_unchecked(slots.to_vec()));
        }
    })?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Exact welfare of a raw placement using one common denominator when it
/// fits, falling back to rational sums otherwise.
struct WelfareMeter {
    /// `scale · lcm(1..=max_degree)`.
    denominator: Option<i128>,
}

impl WelfareMeter {
    fn new(game: &GameInstance) -> Self {
        let topology = game.topology();
        let max_degree = (0..topology.node_count()).map(|v| topology.degree(v)).max().unwrap_or(1);
        let mut acc: Option<i128> = Some(1);
        for d in 1..=max_degree as i128 {
            acc = acc.and_then(|a| {
                let g = num_integer::gcd(a, d);
                a.checked_mul(d / g)
            });
        }
        let acc = acc.and_then(|a| a.checked_mul(game.scale() as i128));
        // Leave headroom for summing n terms of size weighted·(L / k).
        let headroom = (game.agent_count() as i128) * (max_degree as i128) * (game.scale() as i128);
        let denominator = acc.filter(|l| l.checked_mul(headroom.max(1)).is_some());
        Self { denominator }
    }

    fn welfare(&self, game: &GameInstance, slots: &[u8], counts: &NeighborCounts) -> Rational {
        let occupied = (0..slots.len()).filter(|&v| slots[v] != 0);
        match self.denominator {
            Some(l) => {
                let scale = game.scale() as i128;
                let mut total: i128 = 0;
                for v in occupied {
                    let u = scaled_from_counts(game, slots[v], counts.at(v));
                    if u.neighbors > 0 {
                        total += u.weighted as i128 * (l / (u.neighbors as i128 * scale));
                    }
                }
                Rational::new(total, l)
            }
            None => occupied
                .map(|v| scaled_from_counts(game, slots[v], counts.at(v)).to_rational(game.scale()))
                .sum(),
        }
    }
}

#[derive(Default)]
struct WelfareSummary {
    best: Option<(Rational, Vec<u8>)>,
    worst_eq: Option<Rational>,
    best_eq: Option<Rational>,
    equilibria: usize,
}

impl WelfareSummary {
    /// Folds `other`, which covers placements after all of `self`'s.
    fn merge(mut self, other: WelfareSummary) -> Self {
        if let Some((w, slots)) = other.best {
            if self.best.as_ref().is_none_or(|(b, _)| w > *b) {
                self.best = Some((w, slots));
            }
        }
        self.worst_eq = match (self.worst_eq, other.worst_eq) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.best_eq = match (self.best_eq, other.best_eq) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.equilibria += other.equilibria;
        self
    }
}

fn summarize(
    game: &GameInstance,
    config: &EnumerationConfig,
    with_equilibria: bool,
) -> Result<WelfareSummary, EquilibriumError> {
    let meter = WelfareMeter::new(game);
    let chunks = fold_placements(game, config, WelfareSummary::default, |acc: &mut WelfareSummary, slots| {
        let counts = NeighborCounts::new(game, slots);
        let welfare = meter.welfare(game, slots, &counts);
        if acc.best.as_ref().is_none_or(|(b, _)| welfare > *b) {
            acc.best = Some((welfare, slots.to_vec()));
        }
        if with_equilibria && is_stable(game, slots) {
            acc.equilibria += 1;
            acc.worst_eq = Some(acc.worst_eq.map_or(welfare, |w| w.min(welfare)));
            acc.best_eq = Some(acc.best_eq.map_or(welfare, |w| w.max(welfare)));
        }
    })?;
    Ok(chunks.into_iter().fold(WelfareSummary::default(), WelfareSummary::merge))
}

/// A welfare-maximising placement (the lexicographically smallest one) and
/// its welfare.
pub fn optimal_welfare(
    game: &GameInstance,
    config: &EnumerationConfig,
) -> Result<(Assignment, Rational), EquilibriumError> {
    let summary = summarize(game, config, false)?;
    let (welfare, slots) = summary.best.expect("at least one placement exists");
    Ok((Assignment::from_slots_unchecked(slots), welfare))
}

/// Optimum, worst and best equilibrium welfare, and the resulting price of
/// anarchy and stability of a single game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceReport {
    pub opt: Rational,
    pub optimal: Assignment,
    pub worst_eq: Rational,
    pub best_eq: Rational,
    pub poa: Rational,
    pub pos: Rational,
    pub equilibrium_count: usize,
}

pub fn price_ratios(game: &GameInstance, config: &EnumerationConfig) -> Result<PriceReport, EquilibriumError> {
    let summary = summarize(game, config, true)?;
    let (opt, slots) = summary.best.expect("at least one placement exists");
    let (Some(worst_eq), Some(best_eq)) = (summary.worst_eq, summary.best_eq) else {
        return Err(EquilibriumError::NoEquilibrium);
    };
    if worst_eq.is_zero() {
        return Err(EquilibriumError::ZeroWelfareEquilibrium);
    }
    Ok(PriceReport {
        opt,
        optimal: Assignment::from_slots_unchecked(slots),
        worst_eq,
        best_eq,
        poa: opt / worst_eq,
        pos: opt / best_eq,
        equilibrium_count: summary.equilibria,
    })
}
