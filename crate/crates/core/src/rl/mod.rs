//! Learning-rule numerics: V-trace targets for the environment and
//! auxiliary reward streams, the per-step policy-gradient coefficients of
//! both objectives, a squashed diagonal Gaussian policy head, and a linear
//! reference agent for smoke training.

mod gaussian;
mod linear;
mod vtrace;

use thiserror::Error;

pub use gaussian::{gaussian_head, gaussian_logp, gaussian_logp_grad, gaussian_sample, Gaussian, GaussianHeadParams};
pub use linear::{
    linear_reference_agent, sgd_update, value_loss, value_loss_grad, AgentOutput, LinearParams, Sample, TrainConfig,
};
pub use vtrace::{dual_pg_coefficients, vtrace_targets, DualCoefficients, Stream, Trajectory, VtraceOutput};

use crate::env::Game;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RlError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("length mismatch: {0}")]
    Length(String),
    #[error("truncation levels must satisfy rho_bar >= c_bar > 0 (got {rho_bar}, {c_bar})")]
    Truncation { rho_bar: f64, c_bar: f64 },
    #[error("discount {0} outside [0, 1)")]
    Discount(f64),
}

/// Default (env, abs) discounts per game.
pub fn domain_discounts(game: Game) -> (f64, f64) {
    match game {
        Game::Mujoban => (0.99, 0.9),
        Game::Mujoxo | Game::Mujogo => (0.99, 0.98),
    }
}
