//! Touch-board scenes for MujoXo and MujoGo.
//!
//! The arm base sits at the world origin and the board lies south of it
//! (y grows southward). Each board point has an invisible touch pad; Go
//! adds two pass pads, one on each side of the board.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::physics::{Arm, ArmConfig, Bounds, Marker, MarkerKind, PadMove, PhysicsParams, PhysicsWorld, TouchPad, Vec2};

pub const LINK_LENGTHS: [f64; 3] = [0.3, 0.3, 0.1];
pub const XO_SPACING: f64 = 0.1;
pub const XO_CENTER: Vec2 = Vec2::new(0.0, 0.4);
pub const GO_CENTER: Vec2 = Vec2::new(0.0, 0.38);
/// Board width between the outer lines of a Go board, for any size.
pub const GO_SPAN: f64 = 0.36;
pub const PASS_PAD_X: f64 = 0.28;
pub const PASS_PAD_HALF: Vec2 = Vec2::new(0.05, 0.15);
/// Pads cover this fraction of the half spacing, leaving gaps between them.
const PAD_FILL: f64 = 0.9;

/// Geometry of a square board of touch pads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoardGeometry {
    pub size: usize,
    pub spacing: f64,
    pub center: Vec2,
    /// Row 0 drawn at the bottom (Go) or at the top (tic-tac-toe).
    pub row0_bottom: bool,
}

impl BoardGeometry {
    pub fn tic_tac_toe() -> Self {
        Self { size: 3, spacing: XO_SPACING, center: XO_CENTER, row0_bottom: false }
    }

    pub fn go(size: usize) -> Self {
        Self { size, spacing: GO_SPAN / (size - 1) as f64, center: GO_CENTER, row0_bottom: true }
    }

    /// World position of row-major point `p`.
    pub fn point_position(&self, p: usize) -> Vec2 {
        let (col, row) = ((p % self.size) as f64, (p / self.size) as f64);
        let mid = (self.size - 1) as f64 / 2.0;
        let dy = if self.row0_bottom { mid - row } else { row - mid };
        self.center + Vec2::new((col - mid) * self.spacing, dy * self.spacing)
    }

    pub fn pads(&self, with_pass: bool) -> Vec<TouchPad> {
        let half = Vec2::new(0.5, 0.5) * (self.spacing * PAD_FILL);
        let mut pads: Vec<TouchPad> = (0..self.size * self.size)
            .map(|p| TouchPad { id: p, center: self.point_position(p), half_extent: half, bound_move: PadMove::Point(p) })
            .collect();
        if with_pass {
            for x in [-PASS_PAD_X, PASS_PAD_X] {
                pads.push(TouchPad {
                    id: pads.len(),
                    center: Vec2::new(x, self.center.y),
                    half_extent: PASS_PAD_HALF,
                    bound_move: PadMove::Pass,
                });
            }
        }
        pads
    }

    /// Piece position: point center plus Gaussian noise of `sigma` cells,
    /// clipped to the point's cell.
    pub fn noisy_position<R: Rng + ?Sized>(&self, p: usize, sigma: f64, rng: &mut R) -> Vec2 {
        let c = self.point_position(p);
        if sigma <= 0.0 {
            return c;
        }
        let n = Normal::new(0.0, sigma * self.spacing).expect("finite sigma");
        let clip = 0.5 * self.spacing;
        let dx: f64 = n.sample(rng);
        let dy: f64 = n.sample(rng);
        c + Vec2::new(dx.clamp(-clip, clip), dy.clamp(-clip, clip))
    }
}

/// A random arm pose hovering over the board, press released.
pub fn random_arm_config<R: Rng + ?Sized>(rng: &mut R) -> ArmConfig {
    let mut cfg = ArmConfig::new(LINK_LENGTHS);
    cfg.joint_angles = [
        rng.random_range(FRAC_PI_4..=3.0 * FRAC_PI_4),
        rng.random_range(-FRAC_PI_2..=FRAC_PI_2),
        rng.random_range(-FRAC_PI_2..=FRAC_PI_2),
    ];
    cfg
}

pub fn build_board_world<R: Rng + ?Sized>(
    geometry: &BoardGeometry,
    with_pass: bool,
    params: PhysicsParams,
    rng: &mut R,
) -> PhysicsWorld {
    let bounds = Bounds { min: Vec2::new(-0.4, -0.1), max: Vec2::new(0.4, 0.7) };
    let arm = Arm { base: Vec2::ZERO, config: random_arm_config(rng) };
    PhysicsWorld::new(Vec::new(), bounds, params).with_arm(arm, geometry.pads(with_pass))
}

pub fn piece_marker(kind: MarkerKind, position: Vec2, spacing: f64) -> Marker {
    Marker { kind, position, radius: 0.4 * spacing }
}

/// Points sampled along the arm, end effector first and then inward along
/// each link, used when any part of the arm may touch a pad.
pub fn arm_probe_points(arm: &Arm, per_link: usize) -> Vec<Vec2> {
    let joints = arm.world_joints();
    let mut out = vec![joints[3]];
    for link in (0..3).rev() {
        let (a, b) = (joints[link], joints[link + 1]);
        for k in 1..=per_link {
            let t = k as f64 / per_link as f64;
            out.push(b + (a - b) * t);
        }
    }
    out
}
