//! The three embedded environments: scene construction, rewards, time
//! limits, move registration, abstract-state estimation and auxiliary
//! sub-goal episodes.

mod aux;
mod boards;
mod config;
mod curriculum;
pub mod log;
pub mod mujoban;
mod observation;
mod vec_env;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aux::{aux_episode_update, AuxEpisode, AuxOutcome};
pub use boards::{
    arm_probe_points, build_board_world, random_arm_config, BoardGeometry, GO_CENTER, LINK_LENGTHS, XO_CENTER,
};
pub use config::{EnvConfig, Game, PlannerMode};
pub use curriculum::curriculum_sample;
pub use mujoban::{estimate_abstract_state, MujobanBodies};
pub use observation::{
    abstract_planes, arm_proprio, go_planes, sokoban_planes, ttt_planes, walker_proprio, Observation, Planes,
    ARM_PROPRIO_DIM, WALKER_PROPRIO_DIM,
};
pub use vec_env::VecEnv;

use crate::games::{
    generate_level, pad_level, tromp_taylor_score, Cell, GoBoard, GoMove, LevelError, LevelSpec, SokobanState, TttBoard,
    TttOutcome, PADDED_SIZE,
};
use crate::physics::{rasterize_topdown, MarkerKind, PadMove, PhysicsError, PhysicsWorld, Vec2};
use crate::planners::{
    engine_command_with_level, epsilon_opponent, go_expert_target, go_opponent_move, gtp_connect, random_planner,
    ttt_expert_target, ttt_minimax, AbstractState, GoEngine, GtpError, GtpSession, PlannerError, PlannerTarget,
    SokobanExpert,
};

/// Touch probes per arm link when the whole arm can register moves.
const PROBES_PER_LINK: usize = 8;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error("go engine: {0}")]
    Engine(#[from] GtpError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error("step called after the episode ended")]
    EpisodeDone,
}

impl From<PlannerError> for EnvError {
    fn from(e: PlannerError) -> Self {
        match e {
            PlannerError::Gtp(g) => EnvError::Engine(g),
            other => EnvError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    TimedOut,
    Win,
    Draw,
    Loss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    BoxOnTarget { body: usize },
    BoxOffTarget { body: usize },
    /// Estimated Sokoban state changed by something other than one legal move.
    IllegalTransition,
    AgentMove { mv: PadMove },
    IllegalTouch { pad: usize },
    OpponentMove { mv: PadMove },
    GameOver { outcome: Outcome },
    AuxMatched,
    AuxExpired,
    AuxIssued { target: String },
    /// The planner had no target to offer.
    PlannerIdle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    pub abstract_state: AbstractState,
    pub outcome: Option<Outcome>,
    pub illegal_touch_count: u32,
    pub illegal_transition_count: u32,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward_env: f64,
    pub reward_abs: f64,
    pub episode_done: bool,
    pub aux_done: bool,
    pub info: StepInfo,
}

#[derive(Debug, Clone)]
enum GameState {
    Mujoban { state: SokobanState, box_cells: Vec<Cell>, bodies: MujobanBodies, difficulty: u8 },
    Ttt { board: TttBoard },
    Go { board: GoBoard },
}

/// Independent random stream `k` derived from `seed`.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub struct Environment {
    config: EnvConfig,
    seed: u64,
    rng: ChaCha8Rng,
    opponent_rng: ChaCha8Rng,
    world: PhysicsWorld,
    game: GameState,
    geometry: Option<BoardGeometry>,
    /// Rendered piece position per board point.
    pieces: Vec<Option<Vec2>>,
    last_touch: Option<usize>,
    aux: Option<AuxEpisode>,
    expert: SokobanExpert,
    engine: Option<GtpSession>,
    step_index: u64,
    done: bool,
    outcome: Option<Outcome>,
    illegal_touches: u32,
    illegal_transitions: u32,
}

impl Environment {
    /// Validates `config`, connects the Go engine if one is configured, and
    /// resets with `config.seed`.
    pub fn new(config: EnvConfig) -> Result<Self, EnvError> {
        config.validate()?;
        let engine = match (&config.game, &config.engine_cmd) {
            (Game::Mujogo, Some(cmd)) => {
                let mut session = gtp_connect(&engine_command_with_level(cmd, config.opponent.level))?;
                session.send("protocol_version")?;
                Some(session)
            }
            _ => None,
        };
        let seed = config.seed;
        let placeholder = PhysicsWorld::new(
            Vec::new(),
            crate::physics::Bounds { min: Vec2::ZERO, max: Vec2::new(1.0, 1.0) },
            config.physics.clone(),
        );
        let mut env = Self {
            config,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            opponent_rng: ChaCha8Rng::seed_from_u64(seed),
            world: placeholder,
            game: GameState::Ttt { board: TttBoard::new() },
            geometry: None,
            pieces: Vec::new(),
            last_touch: None,
            aux: None,
            expert: SokobanExpert::new(),
            engine,
            step_index: 0,
            done: false,
            outcome: None,
            illegal_touches: 0,
            illegal_transitions: 0,
        };
        env.reset(seed)?;
        Ok(env)
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn world(&self) -> &PhysicsWorld {
        &self.world
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn aux(&self) -> Option<&AuxEpisode> {
        self.aux.as_ref()
    }

    pub fn time_limit(&self) -> u64 {
        self.config.time_limit()
    }

    pub fn action_dim(&self) -> usize {
        self.world.control_dim()
    }

    pub fn board_geometry(&self) -> Option<&BoardGeometry> {
        self.geometry.as_ref()
    }

    /// Mujoban difficulty of the current level.
    pub fn difficulty(&self) -> Option<u8> {
        match &self.game {
            GameState::Mujoban { difficulty, .. } => Some(*difficulty),
            _ => None,
        }
    }

    pub fn mujoban_bodies(&self) -> Option<&MujobanBodies> {
        match &self.game {
            GameState::Mujoban { bodies, .. } => Some(bodies),
            _ => None,
        }
    }

    pub fn abstract_state(&self) -> AbstractState {
        match &self.game {
            GameState::Mujoban { state, .. } => AbstractState::Sokoban(state.clone()),
            GameState::Ttt { board } => AbstractState::Ttt(*board),
            GameState::Go { board } => AbstractState::Go(board.clone()),
        }
    }

    /// Starts a new episode. Mujoban levels are generated from the seed.
    pub fn reset(&mut self, seed: u64) -> Result<Observation, EnvError> {
        self.begin(seed);
        match self.config.game {
            Game::Mujoban => {
                let difficulty = match self.config.difficulty {
                    Some(d) => d,
                    None => curriculum_sample(&self.config.curriculum, &mut self.rng)?,
                };
                let spec = LevelSpec::for_difficulty(difficulty)?;
                let level = pad_level(&generate_level(self.rng.random(), &spec)?, PADDED_SIZE);
                self.load_level(level, difficulty);
            }
            Game::Mujoxo => {
                let geometry = BoardGeometry::tic_tac_toe();
                self.world = build_board_world(&geometry, false, self.config.physics.clone(), &mut self.rng);
                self.pieces = vec![None; 9];
                self.geometry = Some(geometry);
                self.game = GameState::Ttt { board: TttBoard::new() };
            }
            Game::Mujogo => {
                let geometry = BoardGeometry::go(self.config.board_size);
                self.world = build_board_world(&geometry, true, self.config.physics.clone(), &mut self.rng);
                self.pieces = vec![None; self.config.board_size * self.config.board_size];
                self.geometry = Some(geometry);
                self.game = GameState::Go { board: GoBoard::new(self.config.board_size, self.config.komi) };
            }
        }
        self.issue_target(&mut Vec::new())?;
        Ok(self.observe())
    }

    /// Starts a Mujoban episode on a given level (padded like generated ones).
    pub fn reset_with_level(&mut self, seed: u64, level: &SokobanState) -> Result<Observation, EnvError> {
        if self.config.game != Game::Mujoban {
            return Err(EnvError::Config("fixed levels need the mujoban game".into()));
        }
        level.validate().map_err(|e| EnvError::Config(e.to_string()))?;
        self.begin(seed);
        self.load_level(pad_level(level, PADDED_SIZE), 0);
        self.issue_target(&mut Vec::new())?;
        Ok(self.observe())
    }

    fn begin(&mut self, seed: u64) {
        self.seed = seed;
        self.rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
        self.opponent_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ self.config.opponent.seed, 1));
        self.geometry = None;
        self.pieces.clear();
        self.last_touch = None;
        self.aux = None;
        self.expert = SokobanExpert::new();
        self.step_index = 0;
        self.done = false;
        self.outcome = None;
        self.illegal_touches = 0;
        self.illegal_transitions = 0;
    }

    fn load_level(&mut self, level: SokobanState, difficulty: u8) {
        let (world, bodies) = mujoban::build_world(&level, self.config.pegs, self.config.physics.clone());
        self.world = world;
        let box_cells = bodies.boxes.iter().map(|&b| mujoban::nearest_cell(self.world.bodies[b].position)).collect();
        self.game = GameState::Mujoban { state: level, box_cells, bodies, difficulty };
    }

    /// Advances one control step.
    pub fn step(&mut self, action: &[f64]) -> Result<StepResult, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeDone);
        }
        self.world.step(action)?;
        self.step_index += 1;
        let mut events = Vec::new();
        let mut reward_env = 0.0;
        // Abstract state the aux target is checked against this step.
        let mut aux_view: Option<AbstractState> = None;

        match self.config.game {
            Game::Mujoban => reward_env += self.update_mujoban(&mut events),
            Game::Mujoxo | Game::Mujogo => aux_view = self.update_board(&mut events)?,
        }

        if !self.done && self.step_index >= self.time_limit() {
            self.finish(Outcome::TimedOut, &mut events);
        }
        if self.done && self.config.game != Game::Mujoban {
            reward_env += match self.outcome {
                Some(Outcome::Win) => 1.0,
                Some(Outcome::Draw) => 0.5,
                _ => 0.0,
            };
        }

        let mut reward_abs = 0.0;
        let mut aux_done = false;
        if self.config.planner_mode != PlannerMode::None {
            let view = aux_view.unwrap_or_else(|| self.abstract_state());
            if let Some(aux) = &self.aux {
                let (r, out) = aux_episode_update(aux, &view, self.step_index, self.config.aux_reward_scale);
                reward_abs = r;
                match out {
                    AuxOutcome::Matched => events.push(Event::AuxMatched),
                    AuxOutcome::Expired => events.push(Event::AuxExpired),
                    AuxOutcome::Continue => {}
                }
                if out != AuxOutcome::Continue {
                    aux_done = true;
                    self.aux = None;
                }
            }
            if self.done {
                aux_done |= self.aux.take().is_some();
            } else if self.aux.is_none() {
                self.issue_target(&mut events)?;
            }
        }

        Ok(StepResult {
            observation: self.observe(),
            reward_env,
            reward_abs,
            episode_done: self.done,
            aux_done,
            info: StepInfo {
                abstract_state: self.abstract_state(),
                outcome: self.outcome,
                illegal_touch_count: self.illegal_touches,
                illegal_transition_count: self.illegal_transitions,
                events,
            },
        })
    }

    fn finish(&mut self, outcome: Outcome, events: &mut Vec<Event>) {
        self.done = true;
        self.outcome = Some(outcome);
        events.push(Event::GameOver { outcome });
    }

    fn update_mujoban(&mut self, events: &mut Vec<Event>) -> f64 {
        let GameState::Mujoban { state, box_cells, bodies, .. } = &mut self.game else {
            unreachable!("mujoban state")
        };
        let (cells, next) = estimate_abstract_state(state, box_cells, &self.world, bodies);
        let mut reward = 0.0;
        for (k, (old, new)) in box_cells.iter().zip(&cells).enumerate() {
            match (state.is_target(*old), state.is_target(*new)) {
                (false, true) => {
                    reward += 1.0;
                    events.push(Event::BoxOnTarget { body: bodies.boxes[k] });
                }
                (true, false) => {
                    reward -= 1.0;
                    events.push(Event::BoxOffTarget { body: bodies.boxes[k] });
                }
                _ => {}
            }
        }
        let changed = next.player() != state.player() || next.boxes() != state.boxes();
        if changed && !mujoban::is_single_legal_move(state, &next) {
            self.illegal_transitions += 1;
            events.push(Event::IllegalTransition);
        }
        let solved = next.is_solved();
        *state = next;
        *box_cells = cells;
        if solved {
            reward += 10.0;
            self.finish(Outcome::Solved, events);
        }
        reward
    }

    /// Registers at most one pad touch. Returns the board right after the
    /// agent's move (before the reply) when a move was registered.
    fn update_board(&mut self, events: &mut Vec<Event>) -> Result<Option<AbstractState>, EnvError> {
        let arm = self.world.arm.as_ref().expect("board worlds have an arm");
        let touched = if arm.config.press < self.world.params.press_threshold {
            None
        } else {
            let probes = match self.config.game {
                Game::Mujogo => vec![arm.effector()],
                _ => arm_probe_points(arm, PROBES_PER_LINK),
            };
            probes.iter().find_map(|&p| self.world.pads.iter().find(|pad| pad.contains(p)).map(|pad| pad.id))
        };
        let fresh = touched.filter(|&t| self.last_touch != Some(t));
        self.last_touch = touched;
        let Some(pad) = fresh else { return Ok(None) };
        self.register_move(pad, events)
    }

    /// Applies the move bound to `pad` if legal, renders the piece, answers
    /// with the opponent's move, and resets the arm.
    pub fn register_move(&mut self, pad: usize, events: &mut Vec<Event>) -> Result<Option<AbstractState>, EnvError> {
        let mv = self.world.pads[pad].bound_move;
        let geometry = self.geometry.expect("board geometry");
        let sigma = self.config.placement_noise;
        let after_agent = match (&mut self.game, mv) {
            (GameState::Ttt { board }, PadMove::Point(p)) => match board.apply(p) {
                Ok(next) => {
                    *board = next;
                    AbstractState::Ttt(next)
                }
                Err(_) => return Ok(self.illegal(pad, events)),
            },
            (GameState::Go { board }, _) => {
                let gm = match mv {
                    PadMove::Point(p) => GoMove::Play(p),
                    PadMove::Pass => GoMove::Pass,
                };
                match board.apply(gm) {
                    Ok(next) => {
                        *board = next;
                        AbstractState::Go(board.clone())
                    }
                    Err(_) => return Ok(self.illegal(pad, events)),
                }
            }
            (GameState::Ttt { .. }, PadMove::Pass) | (GameState::Mujoban { .. }, _) => {
                unreachable!("no such pad")
            }
        };
        events.push(Event::AgentMove { mv });
        if let PadMove::Point(p) = mv {
            self.pieces[p] = Some(geometry.noisy_position(p, sigma, &mut self.rng));
        }
        self.sync_pieces();

        if let Some(outcome) = self.board_outcome() {
            self.finish(outcome, events);
            return Ok(Some(after_agent));
        }

        let reply = match &mut self.game {
            GameState::Ttt { board } => {
                let legal = board.legal_moves();
                let b = *board;
                let m = epsilon_opponent(&legal, self.config.opponent.epsilon, &mut self.opponent_rng, || {
                    ttt_minimax(&b).map(|(m, _)| m)
                })?;
                *board = board.apply(m).expect("opponent move is legal");
                PadMove::Point(m)
            }
            GameState::Go { board } => {
                let engine = match self.engine.as_mut() {
                    Some(session) => GoEngine::Gtp { session, fallback: self.config.engine_fallback },
                    None => GoEngine::Fallback,
                };
                let m = go_opponent_move(board, &self.config.opponent, engine, &mut self.opponent_rng)?;
                *board = board.apply(m).expect("opponent move is legal");
                match m {
                    GoMove::Play(p) => PadMove::Point(p),
                    GoMove::Pass => PadMove::Pass,
                }
            }
            GameState::Mujoban { .. } => unreachable!("board game"),
        };
        events.push(Event::OpponentMove { mv: reply });
        if let PadMove::Point(p) = reply {
            self.pieces[p] = Some(geometry.noisy_position(p, sigma, &mut self.rng));
        }
        self.sync_pieces();
        if let Some(outcome) = self.board_outcome() {
            self.finish(outcome, events);
        }
        if self.config.arm_reset && !self.done {
            let arm = self.world.arm.as_mut().expect("board worlds have an arm");
            arm.config = random_arm_config(&mut self.rng);
            self.last_touch = None;
        }
        Ok(Some(after_agent))
    }

    fn illegal(&mut self, pad: usize, events: &mut Vec<Event>) -> Option<AbstractState> {
        self.illegal_touches += 1;
        events.push(Event::IllegalTouch { pad });
        None
    }

    /// Outcome for the agent (X, or Black) once the board game has ended.
    fn board_outcome(&self) -> Option<Outcome> {
        match &self.game {
            GameState::Ttt { board } => match board.outcome() {
                TttOutcome::XWins => Some(Outcome::Win),
                TttOutcome::OWins => Some(Outcome::Loss),
                TttOutcome::Draw => Some(Outcome::Draw),
                TttOutcome::Ongoing => None,
            },
            GameState::Go { board } if board.is_over() => {
                let score = tromp_taylor_score(board, board.komi());
                Some(if score > 0.0 {
                    Outcome::Win
                } else if score < 0.0 {
                    Outcome::Loss
                } else {
                    Outcome::Draw
                })
            }
            _ => None,
        }
    }

    /// Drops pieces of captured stones and rebuilds the piece markers.
    fn sync_pieces(&mut self) {
        let spacing = self.geometry.expect("board geometry").spacing;
        let kinds: Vec<Option<MarkerKind>> = match &self.game {
            GameState::Ttt { board } => board
                .cells
                .iter()
                .map(|m| match m {
                    crate::games::Mark::Empty => None,
                    crate::games::Mark::X => Some(MarkerKind::Cross),
                    crate::games::Mark::O => Some(MarkerKind::Nought),
                })
                .collect(),
            GameState::Go { board } => board
                .cells()
                .iter()
                .map(|s| match s {
                    crate::games::Stone::Empty => None,
                    crate::games::Stone::Black => Some(MarkerKind::BlackStone),
                    crate::games::Stone::White => Some(MarkerKind::WhiteStone),
                })
                .collect(),
            GameState::Mujoban { .. } => return,
        };
        self.world.markers.clear();
        for (p, kind) in kinds.into_iter().enumerate() {
            match kind {
                None => self.pieces[p] = None,
                Some(kind) => {
                    let at = self.pieces[p].expect("every stone has a rendered piece");
                    self.world.markers.push(boards::piece_marker(kind, at, spacing));
                }
            }
        }
    }

    /// Issues a new aux episode from the current state, if a planner is on.
    fn issue_target(&mut self, events: &mut Vec<Event>) -> Result<(), EnvError> {
        if self.config.planner_mode == PlannerMode::None || self.done {
            return Ok(());
        }
        let target = self.plan()?;
        match target {
            Some(t) => {
                events.push(Event::AuxIssued { target: crate::digest::hex(t.target.digest()) });
                self.aux = Some(AuxEpisode::new(t, self.step_index, self.config.aux_time_limit));
            }
            None => events.push(Event::PlannerIdle),
        }
        Ok(())
    }

    fn plan(&mut self) -> Result<Option<PlannerTarget>, EnvError> {
        let current = self.abstract_state();
        if self.config.planner_mode == PlannerMode::Random {
            return Ok(random_planner(&current, &mut self.rng).ok());
        }
        Ok(match &self.game {
            GameState::Mujoban { state, .. } => match self.expert.target(state) {
                Some(t) => Some(t),
                // No solution from here (or none within budget): fall back to
                // a random legal move so an aux episode stays active.
                None => random_planner(&current, &mut self.rng).ok(),
            },
            GameState::Ttt { board } => ttt_expert_target(board).ok(),
            GameState::Go { board } => {
                let engine = match self.engine.as_mut() {
                    Some(session) => GoEngine::Gtp { session, fallback: self.config.engine_fallback },
                    None => GoEngine::Fallback,
                };
                match go_expert_target(board, engine) {
                    Ok(t) => Some(t),
                    Err(PlannerError::Terminal) => None,
                    Err(e) => return Err(e.into()),
                }
            }
        })
    }

    pub fn observe(&self) -> Observation {
        let (proprio, board_planes) = match &self.game {
            GameState::Mujoban { .. } => (walker_proprio(&self.world), None),
            _ => {
                let arm = self.world.arm.as_ref().expect("board worlds have an arm");
                (arm_proprio(arm), Some(abstract_planes(&self.abstract_state())))
            }
        };
        let (planner_planes, planner_action) = match &self.aux {
            Some(aux) => {
                let planes = abstract_planes(&self.abstract_state()).concat(&abstract_planes(&aux.target.target));
                let mut hint = [0.0; 4];
                if let Some(d) = aux.target.action_hint {
                    hint[d.index()] = 1.0;
                }
                (Some(planes), Some(hint))
            }
            None => (None, None),
        };
        Observation {
            proprio,
            board_planes,
            topdown_image: self.config.image_size.map(|s| rasterize_topdown(&self.world, s)),
            planner_planes,
            planner_action,
        }
    }
}
