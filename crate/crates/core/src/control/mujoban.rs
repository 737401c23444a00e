//! Walker motor primitives for Mujoban.

use thiserror::Error;

use crate::env::mujoban::{cell_center, BOX_HALF, WALKER_RADIUS};
use crate::env::MujobanBodies;
use crate::games::{Cell, Direction, SokobanState};
use crate::physics::{PhysicsWorld, Vec2};
use crate::planners::{AbstractState, PlannerTarget};

/// Position gain: control units per meter of error.
const KP: f64 = 2.5;
/// Velocity damping: control units per m/s.
const KD: f64 = 0.25;
/// Lateral gain used to stay on a corridor's center line.
const KP_LATERAL: f64 = 4.0;
/// A box counts as centered within this distance of its cell center.
pub const BOX_CENTER_TOLERANCE: f64 = 0.05;
/// The walker counts as arrived within this distance of a cell center.
pub const ARRIVAL_TOLERANCE: f64 = 0.12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimitiveError {
    #[error("target is not one legal move away")]
    NotOneMove,
    #[error("no free path to {0:?}")]
    NoPath(Cell),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrimitiveStatus {
    Running([f64; 2]),
    Done,
    Failed(PrimitiveError),
}

fn axis(d: Direction) -> Vec2 {
    let (dx, dy) = d.delta();
    Vec2::new(dx as f64, dy as f64)
}

fn clamp2(v: Vec2) -> [f64; 2] {
    [v.x.clamp(-1.0, 1.0), v.y.clamp(-1.0, 1.0)]
}

/// PD control toward `goal`, staying on the line through `goal` along `d`.
/// With `full_speed` the along-axis command saturates instead.
fn seek(pos: Vec2, vel: Vec2, goal: Vec2, d: Direction, full_speed: bool) -> [f64; 2] {
    let a = axis(d);
    let lat = a.perp();
    let err = goal - pos;
    let u_along = if full_speed { 1.0 } else { KP * err.dot(a) - KD * vel.dot(a) };
    let u_across = KP_LATERAL * err.dot(lat) - KD * vel.dot(lat);
    clamp2(a * u_along + lat * u_across)
}

/// Drives the walker toward `goal` along direction `d`; `carry_on` keeps full
/// speed because the next segment continues the same way.
pub fn navigate_control(world: &PhysicsWorld, bodies: &MujobanBodies, goal: Cell, d: Direction, carry_on: bool) -> [f64; 2] {
    let w = &world.bodies[bodies.walker];
    seek(w.position, w.velocity, cell_center(goal), d, carry_on)
}

/// Pushes the box at `box_body` toward the center of `goal` along `d`.
pub fn push_control(world: &PhysicsWorld, bodies: &MujobanBodies, box_body: usize, goal: Cell, d: Direction) -> [f64; 2] {
    let w = &world.bodies[bodies.walker];
    let b = &world.bodies[box_body];
    let a = axis(d);
    let standoff = cell_center(goal) - a * (BOX_HALF + WALKER_RADIUS);
    // Keep the walker behind the box's center line so the push stays axial.
    let line = b.position.dot(a.perp());
    let mut goal_pos = standoff;
    goal_pos = goal_pos + a.perp() * (line - goal_pos.dot(a.perp()));
    seek(w.position, w.velocity, goal_pos, d, false)
}

/// Whether the box resting in `cell` is centered along `d`.
pub fn box_centered(world: &PhysicsWorld, box_body: usize, cell: Cell, d: Direction) -> bool {
    let off = world.bodies[box_body].position - cell_center(cell);
    off.dot(axis(d)).abs() < BOX_CENTER_TOLERANCE
}

fn same_dynamic(a: &SokobanState, b: &SokobanState) -> bool {
    a.player() == b.player() && a.boxes() == b.boxes()
}

/// Controls realizing one abstract move from `estimated` to `target`.
///
/// Walks head for the target cell. Pushes drive the box until it sits
/// centered in its new cell, which may be a few steps after the estimate
/// already shows the move. `box_cells` are the per-body box estimates.
pub fn mujoban_primitive(
    world: &PhysicsWorld,
    bodies: &MujobanBodies,
    box_cells: &[Cell],
    estimated: &SokobanState,
    target: &PlannerTarget,
) -> PrimitiveStatus {
    let AbstractState::Sokoban(goal) = &target.target else {
        return PrimitiveStatus::Failed(PrimitiveError::NotOneMove);
    };
    let Some(d) = target.action_hint.or_else(|| Direction::between(estimated.player(), goal.player())) else {
        return PrimitiveStatus::Failed(PrimitiveError::NotOneMove);
    };
    if same_dynamic(estimated, goal) {
        let ahead = goal.player().step(d);
        if let Some(k) = box_cells.iter().position(|&c| c == ahead) {
            let body = bodies.boxes[k];
            let lag = (cell_center(ahead) - world.bodies[body].position).dot(axis(d));
            if lag > BOX_CENTER_TOLERANCE {
                return PrimitiveStatus::Running(push_control(world, bodies, body, ahead, d));
            }
        }
        return PrimitiveStatus::Done;
    }
    match estimated.apply(d) {
        Ok(s) if same_dynamic(&s, goal) => {}
        _ => return PrimitiveStatus::Failed(PrimitiveError::NotOneMove),
    }
    let pushed = estimated.player().step(d);
    match box_cells.iter().position(|&c| c == pushed) {
        Some(k) => PrimitiveStatus::Running(push_control(world, bodies, bodies.boxes[k], pushed.step(d), d)),
        None => PrimitiveStatus::Running(navigate_control(world, bodies, goal.player(), d, false)),
    }
}
