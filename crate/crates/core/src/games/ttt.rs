use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mark {
    Empty,
    X,
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TttPlayer {
    X,
    O,
}

impl TttPlayer {
    pub fn other(self) -> TttPlayer {
        match self {
            TttPlayer::X => TttPlayer::O,
            TttPlayer::O => TttPlayer::X,
        }
    }

    pub fn mark(self) -> Mark {
        match self {
            TttPlayer::X => Mark::X,
            TttPlayer::O => Mark::O,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TttOutcome {
    XWins,
    OWins,
    Draw,
    Ongoing,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum TttError {
    #[error("cell {0} is occupied")]
    Occupied(usize),
    #[error("cell {0} is off the board")]
    OutOfRange(usize),
    #[error("game is already decided")]
    GameOver,
}

pub const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

/// Tic-tac-toe position; cells are row-major, X always moves first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TttBoard {
    pub cells: [Mark; 9],
    pub to_move: TttPlayer,
}

impl Default for TttBoard {
    fn default() -> Self {
        Self {
            cells: [Mark::Empty; 9],
            to_move: TttPlayer::X,
        }
    }
}

impl TttBoard {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn apply(&self, cell: usize) -> Result<TttBoard, TttError> {
        if cell >= 9 {
            return Err(TttError::OutOfRange(cell));
        }
        if self.outcome() != TttOutcome::Ongoing {
            return Err(TttError::GameOver);
        }
        if self.cells[cell] != Mark::Empty {
            return Err(TttError::Occupied(cell));
        }
        let mut next = *self;
        next.cells[cell] = self.to_move.mark();
        next.to_move = self.to_move.other();
        Ok(next)
    }

    pub fn outcome(&self) -> TttOutcome {
        for line in LINES {
            let [a, b, c] = line.map(|i| self.cells[i]);
            if a != Mark::Empty && a == b && b == c {
                return if a == Mark::X { TttOutcome::XWins } else { TttOutcome::OWins };
            }
        }
        if self.cells.iter().all(|&m| m != Mark::Empty) {
            TttOutcome::Draw
        } else {
            TttOutcome::Ongoing
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.outcome() != TttOutcome::Ongoing
    }

    pub fn legal_moves(&self) -> Vec<usize> {
        if self.is_terminal() {
            return Vec::new();
        }
        (0..9).filter(|&i| self.cells[i] == Mark::Empty).collect()
    }

    /// Base-3 encoding of the cells (the side to move follows from the counts).
    pub fn key(&self) -> u32 {
        self.cells.iter().fold(0, |k, m| k * 3 + *m as u32)
    }
}

pub fn ttt_apply(board: &TttBoard, cell: usize) -> Result<TttBoard, TttError> {
    board.apply(cell)
}

pub fn ttt_outcome(board: &TttBoard) -> TttOutcome {
    board.outcome()
}
