//! Expert and random abstract planners, the ε-randomized opponent and the
//! GTP client for external Go engines.

mod epsilon;
mod go_expert;
mod gtp;
mod minimax;
mod random;
mod sokoban_solver;

use std::collections::VecDeque;

use thiserror::Error;

pub use epsilon::{epsilon_opponent, OpponentConfig};
pub use go_expert::{fallback_go_move, go_expert_move, go_opponent_move, GoEngine};
pub use gtp::{
    engine_command_with_level, format_move, format_vertex, gtp_connect, gtp_send, parse_vertex, GtpError,
    GtpSession, Vertex, VertexError, DEFAULT_GTP_TIMEOUT,
};
pub use minimax::{ttt_minimax, ttt_value};
pub use random::random_planner;
pub use sokoban_solver::{solve_sokoban, walk_path};

use crate::digest::Digest;
use crate::games::{Direction, GoBoard, GoMove, Mark, SokobanState, Stone, TttBoard};
use crate::physics::PadMove;

/// Node budget for expert Sokoban plans.
pub const EXPERT_SOLVER_BUDGET: usize = 200_000;

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("position is terminal")]
    Terminal,
    #[error("no legal successor")]
    NoSuccessor,
    #[error("epsilon {0} outside [0, 1]")]
    BadEpsilon(f64),
    #[error(transparent)]
    Gtp(#[from] GtpError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AbstractState {
    Sokoban(SokobanState),
    Ttt(TttBoard),
    Go(GoBoard),
}

impl AbstractState {
    /// Digest of the position. Board digests cover the stones, side to move
    /// and pass count, not the move history, so transpositions match.
    pub fn digest(&self) -> u64 {
        let mut d = Digest::new();
        match self {
            AbstractState::Sokoban(s) => return s.digest(),
            AbstractState::Ttt(b) => {
                d.u64(1);
                for m in b.cells {
                    d.u64(m as u64);
                }
                d.u64(b.to_move as u64);
            }
            AbstractState::Go(b) => {
                d.u64(2).u64(b.size() as u64);
                for &s in b.cells() {
                    d.u64(s as u64);
                }
                d.u64(b.to_move() as u64).u64(u64::from(b.consecutive_passes()));
            }
        }
        d.finish()
    }

    pub fn same_position(&self, other: &AbstractState) -> bool {
        self.digest() == other.digest()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerTarget {
    pub current: u64,
    pub target: AbstractState,
    /// Sokoban only.
    pub action_hint: Option<Direction>,
}

/// The board move leading from `current` to `target`, when they are one
/// placement (or pass) apart.
pub fn infer_board_move(current: &AbstractState, target: &AbstractState) -> Option<PadMove> {
    match (current, target) {
        (AbstractState::Ttt(a), AbstractState::Ttt(b)) => {
            let mover = a.to_move.mark();
            let changed: Vec<usize> = (0..9).filter(|&i| a.cells[i] != b.cells[i]).collect();
            match changed[..] {
                [i] if a.cells[i] == Mark::Empty && b.cells[i] == mover => Some(PadMove::Point(i)),
                _ => None,
            }
        }
        (AbstractState::Go(a), AbstractState::Go(b)) => {
            let mover = a.to_move().stone();
            let placed: Vec<usize> = (0..a.cells().len())
                .filter(|&i| a.at(i) == Stone::Empty && b.at(i) == mover)
                .collect();
            match placed[..] {
                [p] => Some(PadMove::Point(p)),
                [] if b.consecutive_passes() == a.consecutive_passes() + 1 && a.cells() == b.cells() => {
                    Some(PadMove::Pass)
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// Expert Sokoban planner that keeps its last plan while the game follows it.
#[derive(Debug, Default, Clone)]
pub struct SokobanExpert {
    plan: VecDeque<Direction>,
    expected: Option<u64>,
}

impl SokobanExpert {
    pub fn new() -> Self {
        Self::default()
    }

    /// Next move on an optimal-cost path to a solution, or `None` when the
    /// solver finds no plan within budget.
    pub fn next_move(&mut self, state: &SokobanState) -> Option<Direction> {
        if self.expected != Some(state.digest()) || self.plan.is_empty() {
            self.plan = solve_sokoban(state, EXPERT_SOLVER_BUDGET)?.into();
        }
        let d = self.plan.pop_front()?;
        self.expected = Some(state.apply(d).ok()?.digest());
        Some(d)
    }

    pub fn target(&mut self, state: &SokobanState) -> Option<PlannerTarget> {
        let d = self.next_move(state)?;
        Some(PlannerTarget {
            current: state.digest(),
            target: AbstractState::Sokoban(state.apply(d).expect("planned move is legal")),
            action_hint: Some(d),
        })
    }
}

/// Board target from the minimax expert.
pub fn ttt_expert_target(board: &TttBoard) -> Result<PlannerTarget, PlannerError> {
    let (m, _) = ttt_minimax(board)?;
    Ok(PlannerTarget {
        current: AbstractState::Ttt(*board).digest(),
        target: AbstractState::Ttt(board.apply(m).expect("minimax move is legal")),
        action_hint: None,
    })
}

/// Board target from the Go expert.
pub fn go_expert_target(board: &GoBoard, engine: GoEngine<'_>) -> Result<PlannerTarget, PlannerError> {
    if board.is_over() {
        return Err(PlannerError::Terminal);
    }
    let mv: GoMove = go_expert_move(board, engine)?;
    Ok(PlannerTarget {
        current: AbstractState::Go(board.clone()).digest(),
        target: AbstractState::Go(board.apply(mv).expect("expert move is legal")),
        action_hint: None,
    })
}
