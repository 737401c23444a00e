//! Physically embedded planning problems.
//!
//! Three symbolic games (Sokoban, tic-tac-toe and 7x7 Go) are embedded in a
//! deterministic planar physics scene. A walker disc pushes boxes around a
//! maze, and a planar arm touches pads on a board to register moves. The crate
//! also carries the abstract rule engines, expert and random planners, the
//! auxiliary sub-goal reward machinery, dual-stream V-trace math, and scripted
//! controllers that play the embodied games end to end.

pub mod control;
pub mod digest;
pub mod env;
pub mod games;
pub mod physics;
pub mod planners;
pub mod rl;
pub mod train;

pub use env::{EnvConfig, Environment, Game, Observation, PlannerMode, StepResult};
