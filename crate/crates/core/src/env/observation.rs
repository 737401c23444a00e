use crate::digest::Digest;
use crate::games::{GoBoard, Mark, SokobanState, Stone, TttBoard, PADDED_SIZE};
use crate::physics::{Arm, PhysicsWorld, RgbImage, Vec2};
use crate::planners::AbstractState;

/// Dense height x width x channels tensor in row-major, channel-last order.
#[derive(Debug, Clone, PartialEq)]
pub struct Planes {
    pub shape: [usize; 3],
    pub data: Vec<f64>,
}

impl Planes {
    pub fn zeros(h: usize, w: usize, c: usize) -> Self {
        Self { shape: [h, w, c], data: vec![0.0; h * w * c] }
    }

    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.shape[1] + x) * self.shape[2] + c]
    }

    fn set(&mut self, y: usize, x: usize, c: usize) {
        let [_, w, ch] = self.shape;
        self.data[(y * w + x) * ch + c] = 1.0;
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Stacks along the channel axis.
    pub fn concat(&self, other: &Planes) -> Planes {
        assert_eq!(self.shape[..2], other.shape[..2], "plane grids differ");
        let [h, w, a] = self.shape;
        let b = other.shape[2];
        let mut out = Planes::zeros(h, w, a + b);
        for i in 0..h * w {
            out.data[i * (a + b)..i * (a + b) + a].copy_from_slice(&self.data[i * a..(i + 1) * a]);
            out.data[i * (a + b) + a..(i + 1) * (a + b)].copy_from_slice(&other.data[i * b..(i + 1) * b]);
        }
        out
    }
}

/// Channels: wall, target, box, player. Levels are placed in the top-left of
/// a `PADDED_SIZE` grid (generated levels are already padded to it).
pub fn sokoban_planes(s: &SokobanState) -> Planes {
    let n = PADDED_SIZE.max(s.width() as usize).max(s.height() as usize);
    let mut p = Planes::zeros(n, n, 4);
    for c in s.layout().cells() {
        let (x, y) = (c.x as usize, c.y as usize);
        if s.is_wall(c) {
            p.set(y, x, 0);
        }
        if s.is_target(c) {
            p.set(y, x, 1);
        }
        if s.has_box(c) {
            p.set(y, x, 2);
        }
    }
    p.set(s.player().y as usize, s.player().x as usize, 3);
    p
}

/// Channels: empty, X, O. Row 0 is the top row.
pub fn ttt_planes(b: &TttBoard) -> Planes {
    let mut p = Planes::zeros(3, 3, 3);
    for (i, m) in b.cells.iter().enumerate() {
        let ch = match m {
            Mark::Empty => 0,
            Mark::X => 1,
            Mark::O => 2,
        };
        p.set(i / 3, i % 3, ch);
    }
    p
}

/// Channels: empty, black, white. Plane row 0 is board row 0 (GTP row 1).
pub fn go_planes(b: &GoBoard) -> Planes {
    let n = b.size();
    let mut p = Planes::zeros(n, n, 3);
    for (i, s) in b.cells().iter().enumerate() {
        let ch = match s {
            Stone::Empty => 0,
            Stone::Black => 1,
            Stone::White => 2,
        };
        p.set(i / n, i % n, ch);
    }
    p
}

pub fn abstract_planes(s: &AbstractState) -> Planes {
    match s {
        AbstractState::Sokoban(s) => sokoban_planes(s),
        AbstractState::Ttt(b) => ttt_planes(b),
        AbstractState::Go(b) => go_planes(b),
    }
}

/// Everything an agent sees after a step.
///
/// Walker proprioception (14): position (2), velocity (2), heading cos and
/// sin (2), actuation (2), touch (1), accelerometer (2), gyro yaw rate (1),
/// body-frame velocity (2).
///
/// Arm proprioception (9): joint angles (3), joint velocities (3), press (1),
/// end-effector position (2).
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub proprio: Vec<f64>,
    /// Board games only.
    pub board_planes: Option<Planes>,
    pub topdown_image: Option<RgbImage>,
    /// Current and target abstract states stacked on channels (Expert and
    /// Random planner modes, while a target is active).
    pub planner_planes: Option<Planes>,
    /// One-hot N, E, S, W hint for Sokoban targets; zeros otherwise.
    pub planner_action: Option<[f64; 4]>,
}

pub const WALKER_PROPRIO_DIM: usize = 14;
pub const ARM_PROPRIO_DIM: usize = 9;

pub fn walker_proprio(world: &PhysicsWorld) -> Vec<f64> {
    let w = world.walker().expect("walker present");
    let s = &world.sensors;
    let (c, sn) = (w.heading.cos(), w.heading.sin());
    // Rotate world velocity into the walker frame (forward, left).
    let forward = Vec2::new(c, sn);
    let body_v = Vec2::new(w.velocity.dot(forward), w.velocity.dot(Vec2::new(sn, -c)));
    vec![
        w.position.x,
        w.position.y,
        w.velocity.x,
        w.velocity.y,
        c,
        sn,
        s.actuation.x,
        s.actuation.y,
        s.touch,
        s.acceleration.x,
        s.acceleration.y,
        s.yaw_rate,
        body_v.x,
        body_v.y,
    ]
}

pub fn arm_proprio(arm: &Arm) -> Vec<f64> {
    let cfg = &arm.config;
    let e = arm.effector();
    let mut v = Vec::with_capacity(ARM_PROPRIO_DIM);
    v.extend_from_slice(&cfg.joint_angles);
    v.extend_from_slice(&cfg.joint_velocities);
    v.push(cfg.press);
    v.push(e.x);
    v.push(e.y);
    v
}

impl Observation {
    pub fn digest(&self) -> u64 {
        let mut d = Digest::new();
        d.f64s(&self.proprio);
        for planes in [&self.board_planes, &self.planner_planes] {
            match planes {
                Some(p) => {
                    d.u64(1).u64(p.shape[0] as u64).u64(p.shape[1] as u64).u64(p.shape[2] as u64).f64s(&p.data);
                }
                None => {
                    d.u64(0);
                }
            }
        }
        match &self.topdown_image {
            Some(img) => d.u64(img.width as u64).u64(img.height as u64).bytes(&img.data),
            None => d.u64(0),
        };
        match &self.planner_action {
            Some(a) => d.f64s(a),
            None => d.u64(0),
        };
        d.finish()
    }
}
