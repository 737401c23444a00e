//! Exhaustive tic-tac-toe minimax over the full (memoized) game tree.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::PlannerError;
use crate::games::{TttBoard, TttOutcome};

fn table() -> &'static HashMap<u32, i8> {
    static TABLE: OnceLock<HashMap<u32, i8>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut memo = HashMap::with_capacity(6000);
        value(&TttBoard::new(), &mut memo);
        memo
    })
}

/// Game value for the side to move under perfect play.
fn value(board: &TttBoard, memo: &mut HashMap<u32, i8>) -> i8 {
    if let Some(&v) = memo.get(&board.key()) {
        return v;
    }
    let v = match board.outcome() {
        // The side that just moved completed a line.
        TttOutcome::XWins | TttOutcome::OWins => -1,
        TttOutcome::Draw => 0,
        TttOutcome::Ongoing => board
            .legal_moves()
            .into_iter()
            .map(|m| -value(&board.apply(m).expect("legal move"), memo))
            .max()
            .expect("ongoing board has moves"),
    };
    memo.insert(board.key(), v);
    v
}

/// Game-theoretic value of `board` for its side to move.
pub fn ttt_value(board: &TttBoard) -> i8 {
    match table().get(&board.key()) {
        Some(&v) => v,
        None => value(board, &mut HashMap::new()),
    }
}

/// Optimal move and its value for the side to move; ties go to the lowest cell.
pub fn ttt_minimax(board: &TttBoard) -> Result<(usize, i8), PlannerError> {
    if board.is_terminal() {
        return Err(PlannerError::Terminal);
    }
    let mut best: Option<(usize, i8)> = None;
    for m in board.legal_moves() {
        let v = -ttt_value(&board.apply(m).expect("legal move"));
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((m, v));
        }
    }
    Ok(best.expect("non-terminal board has moves"))
}
