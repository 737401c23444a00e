//! Go under Tromp-Taylor rules: suicide allowed (configurable), positional
//! superko, area scoring with komi.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stone {
    Empty,
    Black,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    pub fn stone(self) -> Stone {
        match self {
            Color::Black => Stone::Black,
            Color::White => Stone::White,
        }
    }

    pub fn gtp_name(self) -> &'static str {
        match self {
            Color::Black => "black",
            Color::White => "white",
        }
    }
}

/// A Go move. Points are row-major indices with row 0 at the bottom edge
/// (GTP row 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GoMove {
    Play(usize),
    Pass,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum GoError {
    #[error("point {0} is occupied")]
    Occupied(usize),
    #[error("point {0} is off the board")]
    OffBoard(usize),
    #[error("move recreates an earlier position")]
    Superko,
    #[error("suicide is disabled")]
    Suicide,
    #[error("game is over")]
    GameOver,
}

impl GoError {
    /// Rule violations as opposed to misuse of a finished board.
    pub fn is_illegal_move(self) -> bool {
        !matches!(self, GoError::GameOver)
    }
}

pub const DEFAULT_KOMI: f64 = 5.5;
pub const DEFAULT_BOARD_SIZE: usize = 7;
pub const MIN_BOARD_SIZE: usize = 5;
pub const MAX_BOARD_SIZE: usize = 19;

/// Zobrist key for `stone` at point `i`; a fixed function of its inputs.
fn zobrist(i: usize, stone: Stone) -> u64 {
    let lane = match stone {
        Stone::Empty => return 0,
        Stone::Black => 1u64,
        Stone::White => 2u64,
    };
    // splitmix64 finalizer
    let mut z = (i as u64)
        .wrapping_mul(4)
        .wrapping_add(lane)
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoBoard {
    size: usize,
    cells: Vec<Stone>,
    to_move: Color,
    hash: u64,
    position_history: HashSet<u64>,
    consecutive_passes: u32,
    komi: f64,
    allow_suicide: bool,
    moves: Vec<(Color, GoMove)>,
}

impl GoBoard {
    /// Empty board, Black to move. Panics if `size` is outside 5..=19.
    pub fn new(size: usize, komi: f64) -> Self {
        assert!(
            (MIN_BOARD_SIZE..=MAX_BOARD_SIZE).contains(&size),
            "board size {size} outside {MIN_BOARD_SIZE}..={MAX_BOARD_SIZE}"
        );
        let mut position_history = HashSet::new();
        position_history.insert(0);
        Self {
            size,
            cells: vec![Stone::Empty; size * size],
            to_move: Color::Black,
            hash: 0,
            position_history,
            consecutive_passes: 0,
            komi,
            allow_suicide: true,
            moves: Vec::new(),
        }
    }

    pub fn with_suicide(mut self, allow: bool) -> Self {
        self.allow_suicide = allow;
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cells(&self) -> &[Stone] {
        &self.cells
    }

    pub fn at(&self, i: usize) -> Stone {
        self.cells[i]
    }

    pub fn to_move(&self) -> Color {
        self.to_move
    }

    pub fn komi(&self) -> f64 {
        self.komi
    }

    pub fn consecutive_passes(&self) -> u32 {
        self.consecutive_passes
    }

    pub fn moves(&self) -> &[(Color, GoMove)] {
        &self.moves
    }

    pub fn position_hash(&self) -> u64 {
        self.hash
    }

    pub fn position_history(&self) -> &HashSet<u64> {
        &self.position_history
    }

    pub fn is_over(&self) -> bool {
        self.consecutive_passes >= 2
    }

    pub fn point(&self, col: usize, row: usize) -> usize {
        row * self.size + col
    }

    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i % self.size, i / self.size)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> {
        let n = self.size;
        let (c, r) = (i % n, i / n);
        let mut out = [usize::MAX; 4];
        if c > 0 {
            out[0] = i - 1;
        }
        if c + 1 < n {
            out[1] = i + 1;
        }
        if r > 0 {
            out[2] = i - n;
        }
        if r + 1 < n {
            out[3] = i + n;
        }
        out.into_iter().filter(|&j| j != usize::MAX)
    }

    pub fn apply(&self, mv: GoMove) -> Result<GoBoard, GoError> {
        if self.is_over() {
            return Err(GoError::GameOver);
        }
        let mut next = self.clone();
        match mv {
            GoMove::Pass => {
                next.consecutive_passes += 1;
            }
            GoMove::Play(p) => {
                let (cells, hash) = self.try_play(p)?;
                next.cells = cells;
                next.hash = hash;
                next.position_history.insert(hash);
                next.consecutive_passes = 0;
            }
        }
        next.moves.push((self.to_move, mv));
        next.to_move = self.to_move.other();
        Ok(next)
    }

    /// Resulting cells and position hash of placing a stone at `p`, without
    /// touching `self`.
    fn try_play(&self, p: usize) -> Result<(Vec<Stone>, u64), GoError> {
        if p >= self.cells.len() {
            return Err(GoError::OffBoard(p));
        }
        if self.cells[p] != Stone::Empty {
            return Err(GoError::Occupied(p));
        }
        let me = self.to_move.stone();
        let them = self.to_move.other().stone();
        let mut cells = self.cells.clone();
        let mut hash = self.hash ^ zobrist(p, me);
        cells[p] = me;
        let mut scratch = Scratch::new(cells.len());
        for q in self.neighbors(p) {
            if cells[q] == them && !group_has_liberty(self, &cells, q, &mut scratch) {
                hash = remove_group(self, &mut cells, q, hash);
            }
        }
        if !group_has_liberty(self, &cells, p, &mut scratch) {
            if !self.allow_suicide {
                return Err(GoError::Suicide);
            }
            hash = remove_group(self, &mut cells, p, hash);
        }
        if self.position_history.contains(&hash) {
            return Err(GoError::Superko);
        }
        Ok((cells, hash))
    }

    pub fn is_legal(&self, mv: GoMove) -> bool {
        if self.is_over() {
            return false;
        }
        match mv {
            GoMove::Pass => true,
            GoMove::Play(p) => self.try_play(p).is_ok(),
        }
    }

    /// Every legal placement followed by `Pass`; empty once the game is over.
    pub fn legal_moves(&self) -> Vec<GoMove> {
        if self.is_over() {
            return Vec::new();
        }
        let mut out: Vec<GoMove> = (0..self.cells.len())
            .filter(|&p| self.cells[p] == Stone::Empty && self.try_play(p).is_ok())
            .map(GoMove::Play)
            .collect();
        out.push(GoMove::Pass);
        out
    }

    /// Recomputes the position hash from scratch.
    pub fn recompute_hash(cells: &[Stone]) -> u64 {
        cells.iter().enumerate().fold(0, |h, (i, &s)| h ^ zobrist(i, s))
    }

    /// Stones of each color: (black, white).
    pub fn stone_counts(&self) -> (usize, usize) {
        let b = self.cells.iter().filter(|&&s| s == Stone::Black).count();
        let w = self.cells.iter().filter(|&&s| s == Stone::White).count();
        (b, w)
    }

    /// Liberties of the group containing `p` (which must hold a stone).
    pub fn liberties(&self, p: usize) -> usize {
        let color = self.cells[p];
        assert_ne!(color, Stone::Empty);
        let mut seen = vec![false; self.cells.len()];
        let mut libs = vec![false; self.cells.len()];
        let mut stack = vec![p];
        seen[p] = true;
        while let Some(q) = stack.pop() {
            for r in self.neighbors(q) {
                if self.cells[r] == Stone::Empty {
                    libs[r] = true;
                } else if self.cells[r] == color && !seen[r] {
                    seen[r] = true;
                    stack.push(r);
                }
            }
        }
        libs.iter().filter(|&&l| l).count()
    }
}

struct Scratch {
    seen: Vec<u32>,
    epoch: u32,
    stack: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self { seen: vec![0; n], epoch: 0, stack: Vec::new() }
    }
}

fn group_has_liberty(board: &GoBoard, cells: &[Stone], p: usize, s: &mut Scratch) -> bool {
    s.epoch += 1;
    let color = cells[p];
    s.stack.clear();
    s.stack.push(p);
    s.seen[p] = s.epoch;
    while let Some(q) = s.stack.pop() {
        for r in board.neighbors(q) {
            if cells[r] == Stone::Empty {
                return true;
            }
            if cells[r] == color && s.seen[r] != s.epoch {
                s.seen[r] = s.epoch;
                s.stack.push(r);
            }
        }
    }
    false
}

fn remove_group(board: &GoBoard, cells: &mut [Stone], p: usize, mut hash: u64) -> u64 {
    let color = cells[p];
    let mut stack = vec![p];
    hash ^= zobrist(p, color);
    cells[p] = Stone::Empty;
    while let Some(q) = stack.pop() {
        for r in board.neighbors(q) {
            if cells[r] == color {
                hash ^= zobrist(r, color);
                cells[r] = Stone::Empty;
                stack.push(r);
            }
        }
    }
    hash
}

pub fn go_apply(board: &GoBoard, mv: GoMove) -> Result<GoBoard, GoError> {
    board.apply(mv)
}

pub fn go_legal_moves(board: &GoBoard) -> Vec<GoMove> {
    board.legal_moves()
}

/// Tromp-Taylor area score, positive when Black leads.
///
/// A point counts for a color when it holds that color's stone or when it
/// is empty and every stone reachable through empty points has that color.
pub fn tromp_taylor_score(board: &GoBoard, komi: f64) -> f64 {
    let (black, white) = area(board);
    black as f64 - white as f64 - komi
}

/// Area of each color: (black, white).
pub fn area(board: &GoBoard) -> (usize, usize) {
    let cells = board.cells();
    let (mut black, mut white) = board.stone_counts();
    let mut seen = vec![false; cells.len()];
    let mut region = Vec::new();
    for start in 0..cells.len() {
        if cells[start] != Stone::Empty || seen[start] {
            continue;
        }
        region.clear();
        region.push(start);
        seen[start] = true;
        let (mut touches_black, mut touches_white) = (false, false);
        let mut k = 0;
        while k < region.len() {
            let q = region[k];
            k += 1;
            for r in board.neighbors(q) {
                match cells[r] {
                    Stone::Black => touches_black = true,
                    Stone::White => touches_white = true,
                    Stone::Empty if !seen[r] => {
                        seen[r] = true;
                        region.push(r);
                    }
                    Stone::Empty => {}
                }
            }
        }
        match (touches_black, touches_white) {
            (true, false) => black += region.len(),
            (false, true) => white += region.len(),
            _ => {}
        }
    }
    (black, white)
}

impl fmt::Display for GoBoard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in (0..self.size).rev() {
            for col in 0..self.size {
                let ch = match self.cells[self.point(col, row)] {
                    Stone::Empty => '.',
                    Stone::Black => 'X',
                    Stone::White => 'O',
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn play(board: &GoBoard, moves: &[(usize, usize)]) -> GoBoard {
        moves.iter().fold(board.clone(), |b, &(c, r)| {
            let p = b.point(c, r);
            b.apply(GoMove::Play(p)).unwrap()
        })
    }

    #[test]
    fn capture_single_stone() {
        let b = GoBoard::new(7, DEFAULT_KOMI);
        // White at (1,1) surrounded by black on three sides, then the fourth.
        let b = play(&b, &[(1, 0), (1, 1), (0, 1), (6, 6), (2, 1)]);
        assert_eq!(b.at(b.point(1, 1)), Stone::White);
        let b = b.apply(GoMove::Pass).unwrap();
        let b = play(&b, &[(1, 2)]);
        assert_eq!(b.at(b.point(1, 1)), Stone::Empty);
    }

    #[test]
    fn ko_recapture_is_superko() {
        let b = GoBoard::new(7, DEFAULT_KOMI);
        // Smallest ko: black at (1,0),(0,1),(2,1)... white at (2,0),(3,1),(2,2)
        let b = play(
            &b,
            &[(1, 0), (2, 0), (0, 1), (3, 1), (1, 2), (2, 2), (6, 6), (1, 1)],
        );
        // White played (1,1) into the ko shape; black (2,1) captures it.
        let cap = b.point(2, 1);
        let b = b.apply(GoMove::Play(cap)).unwrap();
        assert_eq!(b.at(b.point(1, 1)), Stone::Empty);
        // White retaking at (1,1) would recreate the earlier position.
        let retake = b.point(1, 1);
        assert_eq!(b.apply(GoMove::Play(retake)), Err(GoError::Superko));
        assert!(!b.legal_moves().contains(&GoMove::Play(retake)));
    }

    #[test]
    fn two_passes_end_the_game() {
        let b = GoBoard::new(7, DEFAULT_KOMI);
        let b = b.apply(GoMove::Pass).unwrap().apply(GoMove::Pass).unwrap();
        assert!(b.is_over());
        assert!(b.legal_moves().is_empty());
        assert_eq!(b.apply(GoMove::Pass), Err(GoError::GameOver));
    }

    #[test]
    fn empty_board_moves_and_score() {
        let b = GoBoard::new(7, DEFAULT_KOMI);
        assert_eq!(b.legal_moves().len(), 50);
        assert_eq!(tromp_taylor_score(&b, 5.5), -5.5);
    }

    #[test]
    fn single_stone_owns_board() {
        let b = GoBoard::new(7, DEFAULT_KOMI);
        let b = b.apply(GoMove::Play(24)).unwrap();
        assert_eq!(tromp_taylor_score(&b, 5.5), 43.5);
    }

    #[test]
    fn single_stone_suicide_is_superko_and_group_suicide_is_legal() {
        let b = GoBoard::new(5, 0.0);
        // White surrounds the corner point (0,0).
        let b = play(&b, &[(4, 4), (1, 0), (4, 3), (0, 1)]);
        let corner = b.point(0, 0);
        assert_eq!(b.apply(GoMove::Play(corner)), Err(GoError::Superko));
        let strict = b.clone().with_suicide(false);
        assert_eq!(strict.apply(GoMove::Play(corner)), Err(GoError::Suicide));
    }

    #[test]
    fn hash_matches_recomputation() {
        let b = GoBoard::new(7, DEFAULT_KOMI);
        let b = play(&b, &[(1, 0), (1, 1), (0, 1), (6, 6), (2, 1), (5, 5), (1, 2)]);
        assert_eq!(b.position_hash(), GoBoard::recompute_hash(b.cells()));
    }
}
