use rand::Rng;

use super::{AbstractState, PlannerError, PlannerTarget};
use crate::games::GoMove;

/// Uniformly random one-move successor. Board games choose among the legal
/// placements; Go passes only when no placement is legal.
pub fn random_planner<R: Rng + ?Sized>(state: &AbstractState, rng: &mut R) -> Result<PlannerTarget, PlannerError> {
    let current = state.digest();
    match state {
        AbstractState::Sokoban(s) => {
            let moves = s.legal_actions();
            if moves.is_empty() {
                return Err(PlannerError::NoSuccessor);
            }
            let d = moves[rng.random_range(0..moves.len())];
            Ok(PlannerTarget {
                current,
                target: AbstractState::Sokoban(s.apply(d).expect("legal action")),
                action_hint: Some(d),
            })
        }
        AbstractState::Ttt(b) => {
            let moves = b.legal_moves();
            if moves.is_empty() {
                return Err(PlannerError::NoSuccessor);
            }
            let m = moves[rng.random_range(0..moves.len())];
            Ok(PlannerTarget {
                current,
                target: AbstractState::Ttt(b.apply(m).expect("legal move")),
                action_hint: None,
            })
        }
        AbstractState::Go(b) => {
            let legal = b.legal_moves();
            if legal.is_empty() {
                return Err(PlannerError::NoSuccessor);
            }
            let plays: Vec<GoMove> = legal.iter().copied().filter(|&m| m != GoMove::Pass).collect();
            let mv = if plays.is_empty() { GoMove::Pass } else { plays[rng.random_range(0..plays.len())] };
            Ok(PlannerTarget {
                current,
                target: AbstractState::Go(b.apply(mv).expect("legal move")),
                action_hint: None,
            })
        }
    }
}
