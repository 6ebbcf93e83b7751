//! Constructive equilibria for grids and trees.
//!
//! Each construction returns a type-placement for a specific class of games.
//! The grid fills are deterministic sweeps; the tree construction roots the
//! tree at a centroid and fills subtrees bottom-up. The band-grid and tree
//! constructions re-check their output with the exact equilibrium checker
//! and report a failure instead of returning an unstable placement.

mod grid;
mod tree;

pub use grid::{binary_grid_layout, construct_2zts_grid, construct_band_grid, construct_binary_grid, tile, GridFillState};
pub use tree::{bottom_up, construct_tree_equilibrium, tree_layouts, TreeFill};

use crate::game::GameError;
use crate::topology::TopologyError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructionError {
    #[error("the topology is not a grid")]
    NotGrid,
    #[error("the topology is not a tree")]
    NotATree,
    #[error("wrong game class: {0}")]
    WrongGameClass(String),
    #[error("tile of {rows} rows starting at row {cursor} overflows a grid of {total} rows")]
    RowOverflow { rows: usize, cursor: usize, total: usize },
    #[error("cannot leave {k} nodes empty in a row of {cols}")]
    KTooLarge { k: usize, cols: usize },
    #[error("ran out of room with {0} agents unplaced")]
    OutOfSpace(usize),
    #[error("constructed placement is not an equilibrium: node {from} gains {old} -> {new} by jumping to {to}")]
    ConstructionCheckFailed { from: usize, to: usize, old: String, new: String },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Returns `a` if it is an equilibrium. Otherwise lets agents make improving
/// jumps from `a` until none is left, and fails if that does not settle
/// within `4n²` jumps.
pub(crate) fn settle(
    game: &crate::game::GameInstance,
    a: crate::game::Assignment,
) -> Result<crate::game::Assignment, ConstructionError> {
    use crate::equilibrium::{best_response_dynamics, is_equilibrium, DynamicsOutcome};
    if is_equilibrium(game, &a).0 {
        return Ok(a);
    }
    let n = game.topology().node_count();
    let run = best_response_dynamics(game, &a, 4 * n * n);
    match run.outcome {
        DynamicsOutcome::Converged => Ok(run.final_assignment),
        _ => verified(game, a),
    }
}

/// Runs the exact checker on a constructed placement.
pub(crate) fn verified(
    game: &crate::game::GameInstance,
    a: crate::game::Assignment,
) -> Result<crate::game::Assignment, ConstructionError> {
    use crate::rational::format_rational;
    match crate::equilibrium::is_equilibrium(game, &a) {
        (true, _) => Ok(a),
        (false, w) => {
            let w = w.expect("unstable placement has a witness");
            Err(ConstructionError::ConstructionCheckFailed {
                from: w.from_node,
                to: w.to_node,
                old: format_rational(&w.old_utility),
                new: format_rational(&w.new_utility),
            })
        }
    }
}
