use rand::Rng;

use super::epsilon::{epsilon_opponent, OpponentConfig};
use super::gtp::{parse_vertex, GtpError, GtpSession};
use crate::games::{tromp_taylor_score, Color, GoBoard, GoMove};

/// Where Go expert moves come from.
pub enum GoEngine<'a> {
    /// Built-in heuristic policy only.
    Fallback,
    /// External GTP engine; with `fallback` set, engine failures and
    /// unusable replies fall back to the built-in policy.
    Gtp { session: &'a mut GtpSession, fallback: bool },
}

/// Built-in policy: the largest capture if any (lowest point on ties), else
/// the placement maximizing the mover's Tromp-Taylor score one ply ahead,
/// else pass when nothing beats passing.
pub fn fallback_go_move(board: &GoBoard) -> GoMove {
    let me = board.to_move();
    let theirs = |b: &GoBoard| {
        let (black, white) = b.stone_counts();
        if me == Color::Black { white } else { black }
    };
    let sign = if me == Color::Black { 1.0 } else { -1.0 };
    let before = theirs(board);
    let mut best_capture: Option<(usize, GoMove)> = None;
    let mut best_score: Option<(f64, GoMove)> = None;
    for mv in board.legal_moves() {
        if mv == GoMove::Pass {
            continue;
        }
        let next = board.apply(mv).expect("legal move");
        let captured = before - theirs(&next);
        if captured > 0 && best_capture.is_none_or(|(c, _)| captured > c) {
            best_capture = Some((captured, mv));
        }
        let score = sign * tromp_taylor_score(&next, board.komi());
        if best_score.is_none_or(|(s, _)| score > s) {
            best_score = Some((score, mv));
        }
    }
    if let Some((_, mv)) = best_capture {
        return mv;
    }
    let pass_score = sign * tromp_taylor_score(board, board.komi());
    match best_score {
        Some((s, mv)) if s > pass_score => mv,
        _ => GoMove::Pass,
    }
}

/// Expert move for the side to move, without randomization.
pub fn go_expert_move(board: &GoBoard, engine: GoEngine<'_>) -> Result<GoMove, GtpError> {
    let (session, fallback) = match engine {
        GoEngine::Fallback => return Ok(fallback_go_move(board)),
        GoEngine::Gtp { session, fallback } => (session, fallback),
    };
    let reply = match session.genmove(board) {
        Ok(r) => r,
        Err(_) if fallback => return Ok(fallback_go_move(board)),
        Err(e) => return Err(e),
    };
    let text = reply.trim();
    if text.eq_ignore_ascii_case("resign") {
        return Ok(GoMove::Pass);
    }
    let mv = parse_vertex(text, board.size()).map(|v| v.to_move(board.size()));
    match mv {
        Ok(mv) if board.is_legal(mv) => Ok(mv),
        _ if fallback => Ok(fallback_go_move(board)),
        Ok(_) => Err(GtpError::Malformed(format!("illegal engine move {text}"))),
        Err(e) => Err(e.into()),
    }
}

/// Opponent move: uniform random legal move with probability epsilon,
/// otherwise the expert move.
pub fn go_opponent_move<R: Rng + ?Sized>(
    board: &GoBoard,
    config: &OpponentConfig,
    engine: GoEngine<'_>,
    rng: &mut R,
) -> Result<GoMove, GtpError> {
    let legal = board.legal_moves();
    epsilon_opponent(&legal, config.epsilon, rng, || go_expert_move(board, engine))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fallback_captures() {
        // Black at A1 with one liberty left at B1 once White holds A2.
        let mut b = GoBoard::new(7, 5.5);
        for mv in [GoMove::Play(0), GoMove::Play(7), GoMove::Pass] {
            b = b.apply(mv).unwrap();
        }
        assert_eq!(b.to_move(), Color::White);
        assert_eq!(fallback_go_move(&b), GoMove::Play(1));
    }

    #[test]
    fn fallback_passes_when_nothing_gains() {
        let mut b = GoBoard::new(5, 0.5);
        // Black owns the whole board bar one eye-like point.
        for p in 0..25 {
            if p != 12 {
                b = b.apply(GoMove::Play(p)).unwrap();
                b = b.apply(GoMove::Pass).unwrap();
            }
        }
        assert_eq!(b.to_move(), Color::Black);
        assert_eq!(fallback_go_move(&b), GoMove::Pass);
    }
}
