use serde::{Deserialize, Serialize};

use crate::planners::{AbstractState, PlannerTarget};

/// An auxiliary sub-goal episode: reach `target` by step `deadline`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxEpisode {
    pub target: PlannerTarget,
    pub issued_at: u64,
    pub deadline: u64,
}

impl AuxEpisode {
    pub fn new(target: PlannerTarget, issued_at: u64, time_limit: u64) -> Self {
        Self { target, issued_at, deadline: issued_at + time_limit }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuxOutcome {
    /// Target reached; a new target is due.
    Matched,
    /// Deadline passed without a match; a new target is due.
    Expired,
    Continue,
}

/// Scores one step of an auxiliary episode. A match on or before the
/// deadline pays `reward_scale`; reaching the deadline unmatched pays
/// nothing. Either way the caller issues a fresh target.
pub fn aux_episode_update(
    aux: &AuxEpisode,
    estimated: &AbstractState,
    step_index: u64,
    reward_scale: f64,
) -> (f64, AuxOutcome) {
    if step_index <= aux.deadline && estimated.same_position(&aux.target.target) {
        (reward_scale, AuxOutcome::Matched)
    } else if step_index >= aux.deadline {
        (0.0, AuxOutcome::Expired)
    } else {
        (0.0, AuxOutcome::Continue)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::TttBoard;

    fn aux() -> (AuxEpisode, AbstractState, AbstractState) {
        let start = AbstractState::Ttt(TttBoard::new());
        let goal = AbstractState::Ttt(TttBoard::new().apply(4).unwrap());
        let t = PlannerTarget { current: start.digest(), target: goal.clone(), action_hint: None };
        (AuxEpisode::new(t, 10, 50), start, goal)
    }

    #[test]
    fn match_before_deadline_pays() {
        let (a, _, goal) = aux();
        assert_eq!(aux_episode_update(&a, &goal, 59, 1.0), (1.0, AuxOutcome::Matched));
    }

    #[test]
    fn deadline_expires() {
        let (a, start, _) = aux();
        assert_eq!(aux_episode_update(&a, &start, 59, 1.0), (0.0, AuxOutcome::Continue));
        assert_eq!(aux_episode_update(&a, &start, 60, 1.0), (0.0, AuxOutcome::Expired));
    }
}
