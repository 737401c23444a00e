//! Scripted closed-loop agents: the planner-driven oracle and a uniform
//! random baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arm::arm_reach;
use super::mujoban::{box_centered, navigate_control, push_control, ARRIVAL_TOLERANCE};
use crate::env::log::Agent;
use crate::env::mujoban::{cell_center, nearest_cell};
use crate::env::{derive_seed, Environment, Observation};
use crate::games::{Cell, Direction, GoMove, SokobanState};
use crate::physics::PadMove;
use crate::planners::{fallback_go_move, solve_sokoban, ttt_minimax, AbstractState, EXPERT_SOLVER_BUDGET};

/// Control steps the oracle may spend without any change in the estimated
/// state before it replans.
pub const PRIMITIVE_TIMEOUT: u32 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Navigate,
    Push,
    Reach,
    Press,
}

/// The motion segment currently executed: a straight walk or a straight
/// run of pushes on one box, or a reach toward a pad.
#[derive(Debug, Clone, PartialEq)]
pub struct MotorPlan {
    pub phase: Phase,
    pub direction: Option<Direction>,
    /// Walker goal cell (walks) or final box cell (pushes).
    pub goal: Cell,
    /// Box body being pushed.
    pub body: Option<usize>,
    /// Keep full speed at the goal because the next segment continues straight.
    pub carry_on: bool,
    /// Plan indices covered: states `start..=end`.
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
struct SokobanPlan {
    states: Vec<SokobanState>,
    moves: Vec<Direction>,
}

impl SokobanPlan {
    fn solve(from: &SokobanState) -> Option<Self> {
        let moves = solve_sokoban(from, EXPERT_SOLVER_BUDGET)?;
        let mut states = vec![from.clone()];
        for &d in &moves {
            let next = states.last().expect("non-empty").apply(d).expect("plan is legal");
            states.push(next);
        }
        Some(Self { states, moves })
    }

    fn find(&self, s: &SokobanState, from: usize) -> Option<usize> {
        (from..self.states.len()).find(|&i| {
            let p = &self.states[i];
            p.player() == s.player() && p.boxes() == s.boxes()
        })
    }

    fn is_push(&self, i: usize) -> bool {
        let s = &self.states[i];
        s.has_box(s.player().step(self.moves[i]))
    }
}

/// Closed-loop expert: plans abstract moves with its own expert planners and
/// executes them with the motor primitives.
#[derive(Debug, Default)]
pub struct OracleAgent {
    plan: Option<SokobanPlan>,
    segment: Option<MotorPlan>,
    last_digest: Option<u64>,
    stalled: u32,
    /// Board position the current pad choice was made for.
    board_key: Option<u64>,
    pad: Option<usize>,
}

impl OracleAgent {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn motor_plan(&self) -> Option<&MotorPlan> {
        self.segment.as_ref()
    }

    fn mujoban(&mut self, env: &Environment) -> Vec<f64> {
        let AbstractState::Sokoban(est) = env.abstract_state() else { unreachable!("mujoban") };
        let world = env.world();
        let bodies = env.mujoban_bodies().expect("mujoban bodies");
        let digest = est.digest();
        if self.last_digest == Some(digest) {
            self.stalled += 1;
        } else {
            self.stalled = 0;
            self.last_digest = Some(digest);
        }
        if self.stalled > PRIMITIVE_TIMEOUT {
            self.plan = None;
            self.segment = None;
            self.stalled = 0;
        }

        // Drop the segment once finished or once the state left it.
        if let (Some(seg), Some(plan)) = (&self.segment, &self.plan) {
            let at = plan.find(&est, seg.start).filter(|&i| i <= seg.end);
            let finished = match (at, seg.phase) {
                (None, _) => true,
                (Some(i), Phase::Navigate) => {
                    let w = world.bodies[bodies.walker].position;
                    i == seg.end && (seg.carry_on || (w - cell_center(seg.goal)).length() < ARRIVAL_TOLERANCE)
                }
                (Some(i), _) => {
                    let body = seg.body.expect("push segment has a body");
                    i == seg.end && box_centered(world, body, seg.goal, seg.direction.expect("direction"))
                }
            };
            if finished {
                self.segment = None;
            }
        }

        if self.segment.is_none() {
            let idx = match self.plan.as_ref().and_then(|p| p.find(&est, 0)) {
                Some(i) => i,
                None => {
                    self.plan = SokobanPlan::solve(&est);
                    0
                }
            };
            let Some(plan) = &self.plan else { return vec![0.0, 0.0] };
            if idx >= plan.moves.len() {
                return vec![0.0, 0.0];
            }
            self.segment = Some(segment_at(plan, idx, env));
        }

        let seg = self.segment.as_ref().expect("segment");
        let d = seg.direction.expect("mujoban segments have a direction");
        let u = match seg.phase {
            Phase::Navigate => navigate_control(world, bodies, seg.goal, d, seg.carry_on),
            _ => push_control(world, bodies, seg.body.expect("push body"), seg.goal, d),
        };
        u.to_vec()
    }

    fn board(&mut self, env: &Environment) -> Vec<f64> {
        let state = env.abstract_state();
        let key = state.digest();
        if self.board_key != Some(key) {
            self.board_key = Some(key);
            let mv = match &state {
                AbstractState::Ttt(b) => ttt_minimax(b).ok().map(|(m, _)| PadMove::Point(m)),
                AbstractState::Go(b) if !b.is_over() => Some(match fallback_go_move(b) {
                    GoMove::Play(p) => PadMove::Point(p),
                    GoMove::Pass => PadMove::Pass,
                }),
                _ => None,
            };
            self.pad = mv.and_then(|m| env.world().pads.iter().find(|p| p.bound_move == m).map(|p| p.id));
        }
        let world = env.world();
        let (Some(pad), Some(arm)) = (self.pad, world.arm.as_ref()) else {
            return vec![0.0; 4];
        };
        let pad = &world.pads[pad];
        match arm_reach(arm, pad, &world.params) {
            Ok(u) => {
                self.segment = Some(MotorPlan {
                    phase: if u[3] > 0.0 { Phase::Press } else { Phase::Reach },
                    direction: None,
                    goal: nearest_cell(pad.center),
                    body: None,
                    carry_on: false,
                    start: 0,
                    end: 0,
                });
                u.to_vec()
            }
            Err(_) => vec![0.0; 4],
        }
    }
}

fn segment_at(plan: &SokobanPlan, idx: usize, env: &Environment) -> MotorPlan {
    let d = plan.moves[idx];
    let push = plan.is_push(idx);
    let mut end = idx + 1;
    while end < plan.moves.len() && plan.moves[end] == d && plan.is_push(end) == push {
        end += 1;
    }
    if push {
        let start_box = plan.states[idx].player().step(d);
        let goal = plan.states[end].player().step(d);
        let bodies = env.mujoban_bodies().expect("mujoban bodies");
        let world = env.world();
        let body = bodies
            .boxes
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let da = (world.bodies[a].position - cell_center(start_box)).length_squared();
                let db = (world.bodies[b].position - cell_center(start_box)).length_squared();
                da.total_cmp(&db)
            })
            .expect("a box to push");
        MotorPlan { phase: Phase::Push, direction: Some(d), goal, body: Some(body), carry_on: false, start: idx, end }
    } else {
        let carry_on = end < plan.moves.len() && plan.moves[end] == d;
        MotorPlan {
            phase: Phase::Navigate,
            direction: Some(d),
            goal: plan.states[end].player(),
            body: None,
            carry_on,
            start: idx,
            end,
        }
    }
}

impl Agent for OracleAgent {
    fn begin_episode(&mut self, _env: &Environment) {
        *self = Self::default();
    }

    fn act(&mut self, env: &Environment, _obs: &Observation) -> Vec<f64> {
        if env.mujoban_bodies().is_some() {
            self.mujoban(env)
        } else {
            self.board(env)
        }
    }
}

/// Uniform random controls, seeded from the episode seed.
#[derive(Debug)]
pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl Default for RandomAgent {
    fn default() -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(0) }
    }
}

impl RandomAgent {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Agent for RandomAgent {
    fn begin_episode(&mut self, env: &Environment) {
        self.rng = ChaCha8Rng::seed_from_u64(derive_seed(env.seed(), 7));
    }

    fn act(&mut self, env: &Environment, _obs: &Observation) -> Vec<f64> {
        (0..env.action_dim()).map(|_| self.rng.random_range(-1.0..=1.0)).collect()
    }
}
