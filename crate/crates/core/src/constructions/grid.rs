use crate::game::{Assignment, GameInstance};
use crate::topology::{GridShape, NodeId};

use super::{settle, verified, ConstructionError};

/// Working view of a grid with at most as many rows as columns. Taller grids
/// are handled through their transpose.
#[derive(Debug, Clone, Copy)]
struct Frame {
    shape: GridShape,
    transposed: bool,
}

impl Frame {
    fn of(game: &GameInstance) -> Result<Self, ConstructionError> {
        let shape = game.topology().grid_shape().ok_or(ConstructionError::NotGrid)?;
        Ok(Self { shape, transposed: shape.rows > shape.cols })
    }

    /// Rows `m` of the working grid.
    fn rows(&self) -> usize {
        self.shape.rows.min(self.shape.cols)
    }

    /// Columns `M` of the working grid.
    fn cols(&self) -> usize {
        self.shape.rows.max(self.shape.cols)
    }

    /// Node at working cell `(i, j)`, 1-based.
    fn node(&self, i: usize, j: usize) -> NodeId {
        if self.transposed {
            self.shape.node(j, i)
        } else {
            self.shape.node(i, j)
        }
    }
}

/// State of a row-band fill over an `m × M` grid (`m ≤ M`): the rows already
/// consumed, the placement so far, and the agents still waiting, drawn in
/// increasing type order.
#[derive(Debug, Clone)]
pub struct GridFillState {
    frame: Frame,
    cursor: usize,
    slots: Vec<u8>,
    remaining: Vec<usize>,
}

impl GridFillState {
    pub fn new(game: &GameInstance) -> Result<Self, ConstructionError> {
        let frame = Frame::of(game)?;
        Ok(Self {
            frame,
            cursor: 0,
            slots: vec![0; game.topology().node_count()],
            remaining: vec![game.agents_per_type(); game.lambda()],
        })
    }

    /// Rows `m` of the working grid.
    pub fn rows(&self) -> usize {
        self.frame.rows()
    }

    /// Columns `M` of the working grid.
    pub fn cols(&self) -> usize {
        self.frame.cols()
    }

    /// Rows consumed so far.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn unplaced(&self) -> usize {
        self.remaining.iter().sum()
    }

    pub fn slots(&self) -> &[u8] {
        &self.slots
    }

    /// Type at working cell `(i, j)` (1-based, absolute rows).
    pub fn type_at(&self, i: usize, j: usize) -> u8 {
        self.slots[self.frame.node(i, j)]
    }

    /// Leaves the next `count` rows empty.
    pub fn skip_rows(&mut self, count: usize) -> Result<(), ConstructionError> {
        if self.cursor + count > self.rows() {
            return Err(ConstructionError::RowOverflow { rows: count, cursor: self.cursor + 1, total: self.rows() });
        }
        self.cursor += count;
        Ok(())
    }

    fn next_agent(&mut self) -> Option<u8> {
        let idx = self.remaining.iter().position(|&c| c > 0)?;
        self.remaining[idx] -= 1;
        Some(idx as u8 + 1)
    }

    fn into_assignment(self, game: &GameInstance) -> Result<Assignment, ConstructionError> {
        if self.unplaced() > 0 {
            return Err(ConstructionError::OutOfSpace(self.unplaced()));
        }
        Ok(Assignment::from_slots(game, self.slots)?)
    }
}

/// Fills the next `r` rows: the leftmost `k` cells of the first of them stay
/// empty, and the rest are filled column by column, top to bottom, with the
/// next agents in type order until agents run out.
pub fn tile(mut state: GridFillState, r: usize, k: usize) -> Result<GridFillState, ConstructionError> {
    let cols = state.cols();
    if k > cols {
        return Err(ConstructionError::KTooLarge { k, cols });
    }
    if state.cursor + r > state.rows() {
        return Err(ConstructionError::RowOverflow { rows: r, cursor: state.cursor + 1, total: state.rows() });
    }
    let top = state.cursor + 1;
    'fill: for j in 1..=cols {
        for i in top..top + r {
            if i == top && j <= k {
                continue;
            }
            let Some(ty) = state.next_agent() else { break 'fill };
            let node = state.frame.node(i, j);
            state.slots[node] = ty;
        }
    }
    state.cursor += r;
    Ok(state)
}

/// Two types with zero tolerance on a grid: column by column, top to
/// bottom, place every red agent, then leave all empty cells, then place every
/// blue agent.
pub fn construct_2zts_grid(game: &GameInstance) -> Result<Assignment, ConstructionError> {
    if game.lambda() != 2 || !game.tolerance().is_zero_tolerance() {
        return Err(ConstructionError::WrongGameClass("needs two types with zero tolerance".into()));
    }
    let frame = Frame::of(game)?;
    let x = game.agents_per_type();
    let empties = frame.rows() * frame.cols() - game.agent_count();
    let mut slots = vec![0u8; game.topology().node_count()];
    let sequence = std::iter::repeat_n(1u8, x)
        .chain(std::iter::repeat_n(0, empties))
        .chain(std::iter::repeat_n(2, x));
    let cells = (1..=frame.cols()).flat_map(|j| (1..=frame.rows()).map(move |i| (i, j)));
    for ((i, j), ty) in cells.zip(sequence) {
        slots[frame.node(i, j)] = ty;
    }
    Ok(Assignment::from_slots(game, slots)?)
}

/// Equilibrium for 2-binary games on grids: the band layout of
/// [`binary_grid_layout`], settled by improving jumps on the small grids
/// where the layout is not yet stable.
pub fn construct_binary_grid(game: &GameInstance) -> Result<Assignment, ConstructionError> {
    settle(game, binary_grid_layout(game)?)
}

/// Band layout for 2-binary games on grids, built from bands of `x` rows.
///
/// While a full band and a spare row fit, fill a band and leave the next row
/// empty. Otherwise the remaining `m = αx + β` rows are tiled so that the
/// leftover empty cells sit at the left of one row. The result is not
/// checked.
pub fn binary_grid_layout(game: &GameInstance) -> Result<Assignment, ConstructionError> {
    if game.lambda() < 3 || !game.tolerance().is_alpha_binary(2) {
        return Err(ConstructionError::WrongGameClass("needs the 2-binary tolerance vector".into()));
    }
    let mut state = GridFillState::new(game)?;
    let x = game.agents_per_type();
    let cols = state.cols();
    let mut m = state.rows();
    let mut e = m * cols - game.agent_count();

    while x <= m && e >= cols {
        state = tile(state, x, 0)?;
        if state.unplaced() == 0 {
            return state.into_assignment(game);
        }
        state.skip_rows(1)?;
        m -= x + 1;
        e -= cols;
    }
    if x > m {
        state = tile(state, m, 0)?;
        return state.into_assignment(game);
    }
    // Here e < M and x <= m.
    let alpha = m / x;
    let beta = m % x;
    for _ in 1..alpha {
        if state.unplaced() == 0 {
            return state.into_assignment(game);
        }
        state = tile(state, x, 0)?;
    }
    let steps: &[(usize, usize)] = match beta {
        0 => &[(x, e)],
        1 => &[(1, e), (x, 0)],
        _ => &[(x, 0), (beta, e)],
    };
    for &(rows, empties) in steps {
        if state.unplaced() == 0 {
            break;
        }
        state = tile(state, rows, empties)?;
    }
    state.into_assignment(game)
}

/// Equilibrium for games that tolerate every type within distance
/// `⌈√λ⌉ - 1`: a column-major sweep in type order over a band of about `√n`
/// rows, which keeps neighbouring types close enough that every agent has
/// utility 1.
pub fn construct_band_grid(game: &GameInstance) -> Result<Assignment, ConstructionError> {
    let lambda = game.lambda();
    let needed = ceil_sqrt(lambda);
    if lambda < 3 || game.tolerance().leading_ones() < needed {
        return Err(ConstructionError::WrongGameClass(format!(
            "needs t_d = 1 for every d < {needed}"
        )));
    }
    let frame = Frame::of(game)?;
    let n = game.agent_count();
    let band = frame.rows().min(floor_sqrt(n).max(n.div_ceil(frame.cols())));
    let mut slots = vec![0u8; game.topology().node_count()];
    let mut types = (1..=lambda as u8).flat_map(|t| std::iter::repeat_n(t, game.agents_per_type()));
    'fill: for j in 1..=frame.cols() {
        for i in 1..=band {
            let Some(ty) = types.next() else { break 'fill };
            slots[frame.node(i, j)] = ty;
        }
    }
    verified(game, Assignment::from_slots(game, slots)?)
}

fn floor_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn ceil_sqrt(n: usize) -> usize {
    let r = floor_sqrt(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::equilibrium::is_equilibrium;
    use crate::game::{social_welfare, utility};
    use crate::rational::Rational;
    use crate::tolerance::{standard_tolerance, ToleranceKind};
    use crate::topology::grid;

    fn grid_game(rows: usize, cols: usize, lambda: usize, x: usize, kind: ToleranceKind, alpha: Option<usize>) -> GameInstance {
        let tv = standard_tolerance(kind, lambda, alpha).unwrap();
        GameInstance::new(lambda, x, Arc::new(grid(rows, cols).unwrap()), tv).unwrap()
    }

    fn rows_of(game: &GameInstance, a: &Assignment) -> Vec<Vec<u8>> {
        let shape = game.topology().grid_shape().unwrap();
        (1..=shape.rows).map(|i| (1..=shape.cols).map(|j| a.type_at(shape.node(i, j))).collect()).collect()
    }

    #[test]
    fn zts_grid_two_by_three() {
        let game = grid_game(2, 3, 2, 2, ToleranceKind::Zero, None);
        let a = construct_2zts_grid(&game).unwrap();
        assert_eq!(rows_of(&game, &a), vec![vec![1, 0, 2], vec![1, 0, 2]]);
        assert!(is_equilibrium(&game, &a).0);
        assert_eq!(social_welfare(&game, &a), Rational::from_integer(4));
    }

    #[test]
    fn zts_grid_three_by_three() {
        let game = grid_game(3, 3, 2, 4, ToleranceKind::Zero, None);
        let a = construct_2zts_grid(&game).unwrap();
        assert_eq!(rows_of(&game, &a), vec![vec![1, 1, 2], vec![1, 0, 2], vec![1, 2, 2]]);
        assert!(is_equilibrium(&game, &a).0);
    }

    #[test]
    fn zts_grid_rejects_other_classes() {
        let tv = crate::tolerance::ToleranceVector::new(vec![Rational::from_integer(1), Rational::new(1, 2)]).unwrap();
        let game = GameInstance::new(2, 2, Arc::new(grid(3, 3).unwrap()), tv).unwrap();
        assert!(matches!(construct_2zts_grid(&game), Err(ConstructionError::WrongGameClass(_))));
    }

    #[test]
    fn tall_grids_are_transposed() {
        let game = grid_game(5, 2, 2, 3, ToleranceKind::Zero, None);
        let a = construct_2zts_grid(&game).unwrap();
        // Working grid is 2x5; column-major there is row-major here.
        assert_eq!(rows_of(&game, &a), vec![vec![1, 1], vec![1, 0], vec![0, 0], vec![0, 2], vec![2, 2]]);
        assert!(is_equilibrium(&game, &a).0);
    }

    #[test]
    fn single_tile_fills_two_rows_in_type_order() {
        let game = grid_game(4, 4, 7, 2, ToleranceKind::AlphaBinary, Some(2));
        let state = tile(GridFillState::new(&game).unwrap(), 2, 0).unwrap();
        assert_eq!(state.cursor(), 2);
        for row in 1..=2 {
            assert_eq!((1..=4).map(|j| state.type_at(row, j)).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        }
        assert_eq!(state.unplaced(), 6);
    }

    #[test]
    fn tile_with_empties_and_errors() {
        let game = grid_game(2, 4, 3, 2, ToleranceKind::AlphaBinary, Some(2));
        let state = tile(GridFillState::new(&game).unwrap(), 2, 2).unwrap();
        assert_eq!((1..=4).map(|j| state.type_at(1, j)).collect::<Vec<_>>(), vec![0, 0, 2, 3]);
        assert_eq!((1..=4).map(|j| state.type_at(2, j)).collect::<Vec<_>>(), vec![1, 1, 2, 3]);
        assert_eq!(state.unplaced(), 0);

        let empty_row = tile(GridFillState::new(&game).unwrap(), 1, 4).unwrap();
        assert_eq!(empty_row.unplaced(), 6);
        assert!(matches!(
            tile(GridFillState::new(&game).unwrap(), 3, 0),
            Err(ConstructionError::RowOverflow { .. })
        ));
        assert!(matches!(
            tile(GridFillState::new(&game).unwrap(), 1, 5),
            Err(ConstructionError::KTooLarge { k: 5, cols: 4 })
        ));
    }

    #[test]
    fn seven_type_example_layout() {
        let game = grid_game(4, 4, 7, 2, ToleranceKind::AlphaBinary, Some(2));
        let a = construct_binary_grid(&game).unwrap();
        assert_eq!(
            rows_of(&game, &a),
            vec![vec![1, 2, 3, 4], vec![1, 2, 3, 4], vec![0, 0, 6, 7], vec![5, 5, 6, 7]]
        );
        assert!(is_equilibrium(&game, &a).0);
    }

    #[test]
    fn while_loop_placement_gives_everyone_utility_one() {
        // x = 2 rows per band plus a spare row; everyone fits in the loop.
        let game = grid_game(6, 6, 3, 2, ToleranceKind::AlphaBinary, Some(2));
        let a = construct_binary_grid(&game).unwrap();
        for v in a.occupied_nodes() {
            assert_eq!(utility(&game, &a, v).unwrap().value(), Rational::from_integer(1));
        }
    }

    #[test]
    fn band_grid_examples() {
        let game = grid_game(2, 5, 4, 2, ToleranceKind::AlphaBinary, Some(2));
        let a = construct_band_grid(&game).unwrap();
        assert_eq!(rows_of(&game, &a), vec![vec![1, 2, 3, 4, 0], vec![1, 2, 3, 4, 0]]);

        let game = grid_game(4, 5, 9, 2, ToleranceKind::AlphaBinary, Some(3));
        let a = construct_band_grid(&game).unwrap();
        for v in a.occupied_nodes() {
            assert_eq!(utility(&game, &a, v).unwrap().value(), Rational::from_integer(1));
        }
    }

    #[test]
    fn band_grid_ignores_rows_beyond_the_band() {
        let short = grid_game(2, 6, 4, 2, ToleranceKind::AlphaBinary, Some(2));
        let tall = grid_game(5, 6, 4, 2, ToleranceKind::AlphaBinary, Some(2));
        let a = construct_band_grid(&short).unwrap();
        let b = construct_band_grid(&tall).unwrap();
        assert_eq!(rows_of(&short, &a), rows_of(&tall, &b)[..2].to_vec());
        assert!(rows_of(&tall, &b)[2..].iter().flatten().all(|&t| t == 0));
    }

    #[test]
    fn non_grid_is_rejected() {
        let tv = standard_tolerance(ToleranceKind::Zero, 2, None).unwrap();
        let path = crate::topology::standard_graph(crate::topology::GraphKind::Path, 6).unwrap();
        let game = GameInstance::new(2, 2, Arc::new(path), tv).unwrap();
        assert_eq!(construct_2zts_grid(&game), Err(ConstructionError::NotGrid));
    }
}
