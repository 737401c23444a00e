//! Desk-scale training of the linear reference agent on Mujoban.
//!
//! Each iteration collects a batch of on-policy episodes in parallel, turns
//! every episode into a two-stream trajectory, and applies one averaged
//! update of the summed policy gradient plus both value regressions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

use crate::env::log::Agent;
use crate::env::{derive_seed, EnvError, Outcome};
use crate::planners::AbstractState;
use crate::rl::{
    domain_discounts, dual_pg_coefficients, gaussian_logp, gaussian_sample, linear_reference_agent, sgd_update,
    LinearParams, RlError, Sample, TrainConfig, Trajectory,
};
use crate::{EnvConfig, Environment, Game, Observation, PlannerMode};

/// [bias, hint one-hot (4), walker offset from its cell (2), walker velocity (2)]
pub const FEATURE_DIM: usize = 9;

/// Seeds of evaluation episodes start here, away from training seeds.
const EVAL_SEED_BASE: u64 = 1 << 40;

pub fn mujoban_features(env: &Environment, obs: &Observation) -> Vec<f64> {
    let mut f = Vec::with_capacity(FEATURE_DIM);
    f.push(1.0);
    f.extend(obs.planner_action.unwrap_or([0.0; 4]));
    let walker = env.world().walker().expect("mujoban has a walker");
    let cell = match env.abstract_state() {
        AbstractState::Sokoban(s) => s.player(),
        _ => panic!("features are defined for mujoban only"),
    };
    f.push(walker.position.x - cell.x as f64);
    f.push(walker.position.y - cell.y as f64);
    f.push(walker.velocity.x / env.world().params.walker_max_speed);
    f.push(walker.velocity.y / env.world().params.walker_max_speed);
    f
}

#[derive(Debug, Clone)]
struct Recorded {
    features: Vec<f64>,
    action: Vec<f64>,
    logp: f64,
    value_env: f64,
    value_abs: f64,
}

/// Samples from the linear Gaussian policy and records what an update needs.
#[derive(Debug, Clone)]
pub struct LinearAgent {
    pub params: LinearParams,
    rng: ChaCha8Rng,
    steps: Vec<Recorded>,
}

impl LinearAgent {
    pub fn new(params: LinearParams) -> Self {
        Self { params, rng: ChaCha8Rng::seed_from_u64(0), steps: Vec::new() }
    }
}

impl Agent for LinearAgent {
    fn begin_episode(&mut self, env: &Environment) {
        self.rng = ChaCha8Rng::seed_from_u64(derive_seed(env.seed(), 11));
        self.steps.clear();
    }

    fn act(&mut self, env: &Environment, obs: &Observation) -> Vec<f64> {
        let features = mujoban_features(env, obs);
        let out = linear_reference_agent(&features, &self.params).expect("feature width matches params");
        let action = gaussian_sample(&out.policy, &mut self.rng);
        let logp = gaussian_logp(&out.policy, &action);
        self.steps.push(Recorded { features, action: action.clone(), logp, value_env: out.value_env, value_abs: out.value_abs });
        action
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainDemoConfig {
    pub seed: u64,
    pub difficulty: u8,
    pub pegs: bool,
    pub iterations: usize,
    pub episodes_per_iteration: usize,
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub learning_rate: f64,
    /// Initial raw variance bias; negative values start near the minimum
    /// variance.
    pub raw_var_bias: f64,
    /// Stop once an evaluation reaches this solve rate.
    pub stop_at: Option<f64>,
    /// Wall-clock budget in seconds, checked after each iteration.
    pub max_seconds: Option<f64>,
}

impl Default for TrainDemoConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            difficulty: 1,
            pegs: false,
            iterations: 200,
            episodes_per_iteration: 32,
            eval_every: 10,
            eval_episodes: 100,
            learning_rate: 0.05,
            raw_var_bias: -4.0,
            stop_at: None,
            max_seconds: Some(7200.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalPoint {
    pub iteration: usize,
    pub env_steps: u64,
    pub solve_rate: f64,
    pub mean_return_env: f64,
    pub mean_return_abs: f64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    pub config: TrainDemoConfig,
    pub initial: EvalPoint,
    pub last: EvalPoint,
    pub evaluations: Vec<EvalPoint>,
}

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Rl(#[from] RlError),
}

fn env_config(cfg: &TrainDemoConfig) -> EnvConfig {
    let mut env = EnvConfig::for_game(Game::Mujoban);
    env.difficulty = Some(cfg.difficulty);
    env.pegs = cfg.pegs;
    env.planner_mode = PlannerMode::Expert;
    env
}

struct EpisodeData {
    steps: Vec<Recorded>,
    rewards_env: Vec<f64>,
    rewards_abs: Vec<f64>,
    done_abs: Vec<bool>,
    solved: bool,
}

fn collect(config: &EnvConfig, params: &LinearParams, seed: u64) -> Result<EpisodeData, EnvError> {
    let mut env = Environment::new(config.clone())?;
    let mut agent = LinearAgent::new(params.clone());
    let mut obs = env.reset(seed)?;
    agent.begin_episode(&env);
    let (mut rewards_env, mut rewards_abs, mut done_abs) = (Vec::new(), Vec::new(), Vec::new());
    while !env.is_done() {
        let action = agent.act(&env, &obs);
        let r = env.step(&action)?;
        rewards_env.push(r.reward_env);
        rewards_abs.push(r.reward_abs);
        done_abs.push(r.aux_done || r.episode_done);
        obs = r.observation;
    }
    Ok(EpisodeData {
        steps: agent.steps,
        rewards_env,
        rewards_abs,
        done_abs,
        solved: env.outcome() == Some(Outcome::Solved),
    })
}

fn samples(ep: &EpisodeData, gammas: (f64, f64)) -> Result<Vec<Sample>, RlError> {
    let n = ep.steps.len();
    let logp: Vec<f64> = ep.steps.iter().map(|s| s.logp).collect();
    let mut values_env: Vec<f64> = ep.steps.iter().map(|s| s.value_env).collect();
    let mut values_abs: Vec<f64> = ep.steps.iter().map(|s| s.value_abs).collect();
    values_env.push(0.0);
    values_abs.push(0.0);
    let mut done_env = vec![false; n];
    if let Some(last) = done_env.last_mut() {
        *last = true;
    }
    let traj = Trajectory {
        rewards_env: ep.rewards_env.clone(),
        rewards_abs: ep.rewards_abs.clone(),
        behavior_logp: logp.clone(),
        target_logp: logp,
        values_env,
        values_abs,
        done_env,
        done_abs: ep.done_abs.clone(),
        gamma_env: gammas.0,
        gamma_abs: gammas.1,
    };
    let coef = dual_pg_coefficients(&traj, 1.0, 1.0)?;
    let total = coef.total();
    Ok(ep
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| Sample {
            features: s.features.clone(),
            action: s.action.clone(),
            pg_coefficient: total[i],
            target_env: coef.vs_env[i],
            target_abs: coef.vs_abs[i],
        })
        .collect())
}

fn evaluate(
    config: &EnvConfig,
    params: &LinearParams,
    episodes: usize,
    iteration: usize,
    env_steps: u64,
    start: Instant,
) -> Result<EvalPoint, EnvError> {
    let eps: Vec<EpisodeData> = (0..episodes as u64)
        .into_par_iter()
        .map(|i| collect(config, params, EVAL_SEED_BASE + i))
        .collect::<Result<_, _>>()?;
    let n = episodes.max(1) as f64;
    Ok(EvalPoint {
        iteration,
        env_steps,
        solve_rate: eps.iter().filter(|e| e.solved).count() as f64 / n,
        mean_return_env: eps.iter().map(|e| e.rewards_env.iter().sum::<f64>()).sum::<f64>() / n,
        mean_return_abs: eps.iter().map(|e| e.rewards_abs.iter().sum::<f64>()).sum::<f64>() / n,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Trains from zero weights, evaluating the sampling policy on a fixed set of
/// held-out levels before training and every `eval_every` iterations.
pub fn train_demo(cfg: &TrainDemoConfig, mut on_eval: impl FnMut(&EvalPoint)) -> Result<TrainReport, TrainError> {
    let start = Instant::now();
    let config = env_config(cfg);
    let gammas = domain_discounts(Game::Mujoban);
    let update = TrainConfig { learning_rate: cfg.learning_rate, ..Default::default() };
    let mut params = LinearParams::zeros(FEATURE_DIM, 2, cfg.raw_var_bias);
    let mut env_steps = 0u64;

    let initial = evaluate(&config, &params, cfg.eval_episodes, 0, 0, start)?;
    on_eval(&initial);
    let mut evaluations = vec![initial.clone()];
    let done = |p: &EvalPoint| cfg.stop_at.is_some_and(|t| p.solve_rate >= t);
    let mut stop = done(&initial);

    let mut iteration = 0;
    while !stop && iteration < cfg.iterations {
        iteration += 1;
        let base = derive_seed(cfg.seed, iteration as u64);
        let eps: Vec<EpisodeData> = (0..cfg.episodes_per_iteration as u64)
            .into_par_iter()
            .map(|i| collect(&config, &params, derive_seed(base, i)))
            .collect::<Result<_, _>>()?;
        let mut batch = Vec::new();
        for ep in &eps {
            env_steps += ep.steps.len() as u64;
            batch.extend(samples(ep, gammas)?);
        }
        params = sgd_update(&params, &batch, &update)?;

        let out_of_time = cfg.max_seconds.is_some_and(|t| start.elapsed().as_secs_f64() >= t);
        if iteration % cfg.eval_every.max(1) == 0 || iteration == cfg.iterations || out_of_time {
            let point = evaluate(&config, &params, cfg.eval_episodes, iteration, env_steps, start)?;
            on_eval(&point);
            stop = done(&point);
            evaluations.push(point);
        }
        stop |= out_of_time;
    }
    Ok(TrainReport { config: cfg.clone(), initial, last: evaluations.last().expect("initial eval").clone(), evaluations })
}
