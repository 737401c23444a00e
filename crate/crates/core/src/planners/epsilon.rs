use rand::Rng;
use serde::{Deserialize, Serialize};

use super::PlannerError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpponentConfig {
    pub epsilon: f64,
    /// Engine strength, Go only.
    pub level: u32,
    pub seed: u64,
}

impl Default for OpponentConfig {
    fn default() -> Self {
        Self { epsilon: 0.0, level: 10, seed: 0 }
    }
}

impl OpponentConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(PlannerError::BadEpsilon(self.epsilon));
        }
        Ok(())
    }
}

/// With probability `epsilon` a uniformly random entry of `legal`, otherwise
/// the move from `base`. The coin is always drawn first, so `base` is only
/// consulted when its move is used.
pub fn epsilon_opponent<M: Clone, R: Rng + ?Sized, E>(
    legal: &[M],
    epsilon: f64,
    rng: &mut R,
    base: impl FnOnce() -> Result<M, E>,
) -> Result<M, E> {
    assert!(!legal.is_empty(), "no legal moves");
    let coin: f64 = rng.random();
    if coin < epsilon {
        Ok(legal[rng.random_range(0..legal.len())].clone())
    } else {
        base()
    }
}
