//! Deterministic fixed-timestep planar physics.
//!
//! The scene holds a walker disc, axis-aligned boxes that never rotate,
//! static walls and pegs, and optionally a kinematic planar arm with touch
//! pads. Each control step is split into equal substeps; contacts are
//! resolved by positional projection with velocity zeroing along the normal.
//! Boxes are quasi-static: they only move while something pushes them.

mod arm;
mod collide;
mod raster;
mod touch;
mod vec2;

pub use arm::{arm_forward_kinematics, wrap_angle, Arm, ArmConfig};
pub use collide::{overlap, Contact};
pub use raster::{rasterize_topdown, RgbImage, DEFAULT_IMAGE_SIZE};
pub use touch::{detect_pad_touch, PadMove, TouchPad};
pub use vec2::Vec2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest::Digest;

#[derive(Debug, Error, PartialEq)]
pub enum PhysicsError {
    #[error("control vector has {got} components, actuated body expects {expected}")]
    ControlDimension { expected: usize, got: usize },
    #[error("control component {0} is not finite")]
    NonFiniteControl(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BodyKind {
    WalkerDisc,
    Box,
    Peg,
    Wall,
}

impl BodyKind {
    pub fn movable(self) -> bool {
        matches!(self, BodyKind::WalkerDisc | BodyKind::Box)
    }

    pub fn is_round(self) -> bool {
        matches!(self, BodyKind::WalkerDisc | BodyKind::Peg)
    }
}

/// A solid body. `half_extent` is the radius for discs and pegs and the
/// half-width for boxes and walls. Only the walker carries a heading.
#[derive(Debug, Clone, PartialEq)]
pub struct Body {
    pub id: usize,
    pub kind: BodyKind,
    pub position: Vec2,
    pub velocity: Vec2,
    pub half_extent: f64,
    pub heading: f64,
}

impl Body {
    pub fn new(id: usize, kind: BodyKind, position: Vec2, half_extent: f64) -> Self {
        assert!(half_extent > 0.0, "half_extent must be positive");
        Self {
            id,
            kind,
            position,
            velocity: Vec2::ZERO,
            half_extent,
            heading: 0.0,
        }
    }

    pub fn movable(&self) -> bool {
        self.kind.movable()
    }
}

/// Non-solid decoration drawn by the rasterizer (targets and board pieces).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkerKind {
    Target,
    BlackStone,
    WhiteStone,
    Cross,
    Nought,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub kind: MarkerKind,
    pub position: Vec2,
    pub radius: f64,
}

/// Actuator gains and integration settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicsParams {
    pub control_dt: f64,
    pub substeps: u32,
    /// Walker velocity at full control deflection (m/s).
    pub walker_max_speed: f64,
    /// First-order lag of the walker velocity toward its command (s).
    pub walker_response_time: f64,
    /// Heading slew limit (rad/s).
    pub walker_turn_rate: f64,
    /// Joint speed at full deflection (rad/s).
    pub arm_joint_speed: f64,
    pub press_threshold: f64,
    pub tolerance: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self {
            control_dt: 0.05,
            substeps: 10,
            walker_max_speed: 3.0,
            walker_response_time: 0.1,
            walker_turn_rate: 12.0,
            arm_joint_speed: 2.0,
            press_threshold: 0.5,
            tolerance: 1e-6,
        }
    }
}

/// Readings gathered for the walker during the last control step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WalkerSensors {
    /// Mean commanded acceleration (the walker's actuation effort).
    pub actuation: Vec2,
    pub acceleration: Vec2,
    pub yaw_rate: f64,
    /// Summed contact depth resolved against the walker.
    pub touch: f64,
}

/// Axis-aligned view rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

#[derive(Debug, Clone)]
pub struct PhysicsWorld {
    pub bodies: Vec<Body>,
    pub markers: Vec<Marker>,
    pub arm: Option<Arm>,
    pub pads: Vec<TouchPad>,
    pub time_step_index: u64,
    pub params: PhysicsParams,
    pub bounds: Bounds,
    pub sensors: WalkerSensors,
    statics: collide::StaticIndex,
}

impl PhysicsWorld {
    pub fn new(bodies: Vec<Body>, bounds: Bounds, params: PhysicsParams) -> Self {
        let statics = collide::StaticIndex::build(&bodies, bounds);
        Self {
            bodies,
            markers: Vec::new(),
            arm: None,
            pads: Vec::new(),
            time_step_index: 0,
            params,
            bounds,
            sensors: WalkerSensors::default(),
            statics,
        }
    }

    pub fn with_arm(mut self, arm: Arm, pads: Vec<TouchPad>) -> Self {
        self.arm = Some(arm);
        self.pads = pads;
        self
    }

    pub fn walker_index(&self) -> Option<usize> {
        self.bodies.iter().position(|b| b.kind == BodyKind::WalkerDisc)
    }

    pub fn walker(&self) -> Option<&Body> {
        self.walker_index().map(|i| &self.bodies[i])
    }

    /// Number of control components the actuated body expects.
    pub fn control_dim(&self) -> usize {
        if self.walker_index().is_some() {
            2
        } else if self.arm.is_some() {
            4
        } else {
            0
        }
    }

    /// Advances the world by exactly one control step.
    pub fn step(&mut self, controls: &[f64]) -> Result<(), PhysicsError> {
        let expected = self.control_dim();
        if controls.len() != expected {
            return Err(PhysicsError::ControlDimension {
                expected,
                got: controls.len(),
            });
        }
        if let Some(i) = controls.iter().position(|c| !c.is_finite()) {
            return Err(PhysicsError::NonFiniteControl(i));
        }
        let u: Vec<f64> = controls.iter().map(|c| c.clamp(-1.0, 1.0)).collect();
        let dt = self.params.control_dt / self.params.substeps as f64;

        let walker = self.walker_index();
        let start_velocity = walker.map(|w| self.bodies[w].velocity);
        let start_heading = walker.map(|w| self.bodies[w].heading);
        let mut sensors = WalkerSensors::default();

        let mut start = Vec::with_capacity(self.bodies.len());
        for _ in 0..self.params.substeps {
            start.clear();
            start.extend(self.bodies.iter().map(|b| b.position));
            if let Some(w) = walker {
                let target = Vec2::new(u[0], u[1]) * self.params.walker_max_speed;
                let gain = (dt / self.params.walker_response_time).min(1.0);
                let body = &mut self.bodies[w];
                let dv = (target - body.velocity) * gain;
                sensors.actuation += dv / dt;
                body.velocity += dv;
                body.position += body.velocity * dt;
                if body.velocity.length() > 0.05 {
                    let desired = body.velocity.angle();
                    let delta = wrap_angle(desired - body.heading);
                    let max_turn = self.params.walker_turn_rate * dt;
                    body.heading = wrap_angle(body.heading + delta.clamp(-max_turn, max_turn));
                }
            }
            if let Some(arm) = self.arm.as_mut() {
                let cfg = &mut arm.config;
                for j in 0..3 {
                    cfg.joint_velocities[j] = u[j] * self.params.arm_joint_speed;
                    cfg.joint_angles[j] = wrap_angle(cfg.joint_angles[j] + cfg.joint_velocities[j] * dt);
                }
                cfg.press = u[3].clamp(0.0, 1.0);
            }
            sensors.touch += collide::resolve(self, Some(&start), dt);
        }

        if let (Some(w), Some(v0), Some(h0)) = (walker, start_velocity, start_heading) {
            let body = &self.bodies[w];
            sensors.actuation = sensors.actuation / self.params.substeps as f64;
            sensors.acceleration = (body.velocity - v0) / self.params.control_dt;
            sensors.yaw_rate = wrap_angle(body.heading - h0) / self.params.control_dt;
        }
        self.sensors = sensors;
        self.time_step_index += 1;
        Ok(())
    }

    /// Separates any overlapping solid bodies without an integration step.
    pub fn resolve_collisions(&mut self) {
        let dt = self.params.control_dt / self.params.substeps as f64;
        collide::resolve(self, None, dt);
    }

    /// Largest overlap depth between any pair of solid bodies where at least
    /// one is movable.
    pub fn max_penetration(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.bodies.iter().enumerate() {
            if !a.movable() {
                continue;
            }
            for (j, b) in self.bodies.iter().enumerate() {
                if i == j || (b.movable() && j < i) {
                    continue;
                }
                if let Some(c) = overlap(a, b) {
                    worst = worst.max(c.depth);
                }
            }
        }
        worst
    }

    /// Bit-exact digest of the dynamic state.
    pub fn digest(&self) -> u64 {
        let mut d = Digest::new();
        d.u64(self.time_step_index);
        for b in &self.bodies {
            d.u64(b.id as u64)
                .f64(b.position.x)
                .f64(b.position.y)
                .f64(b.velocity.x)
                .f64(b.velocity.y)
                .f64(b.heading);
        }
        if let Some(arm) = &self.arm {
            d.f64s(&arm.config.joint_angles)
                .f64s(&arm.config.joint_velocities)
                .f64(arm.config.press);
        }
        for m in &self.markers {
            d.u64(m.kind as u64).f64(m.position.x).f64(m.position.y);
        }
        d.finish()
    }
}

/// Pure stepping: returns the successor world and leaves the input untouched.
pub fn step_world(world: &PhysicsWorld, controls: &[f64]) -> Result<PhysicsWorld, PhysicsError> {
    let mut next = world.clone();
    next.step(controls)?;
    Ok(next)
}
