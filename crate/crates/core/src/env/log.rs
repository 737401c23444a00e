//! Episode logs: one JSON record per line, a header with the full config and
//! seed, one record per step, and a footer with the trace digest. A log is
//! enough to replay the episode bit for bit.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EnvConfig, EnvError, Environment, Event, Observation, Outcome, StepResult};
use crate::digest::{hex, Digest};
use crate::games::{parse_level, SokobanState};

/// Bumped on any change to the record fields.
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogRecord {
    Header {
        version: u32,
        episode: u64,
        seed: u64,
        config: EnvConfig,
        /// Boxoban text when the episode ran on a fixed level.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<String>,
    },
    Step {
        step: u64,
        action: Vec<f64>,
        reward_env: f64,
        reward_abs: f64,
        state: String,
        obs: String,
        events: Vec<Event>,
    },
    Footer(EpisodeSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub episode: u64,
    pub seed: u64,
    pub length: u64,
    pub return_env: f64,
    pub return_abs: f64,
    pub outcome: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub difficulty: Option<u8>,
    pub illegal_touches: u32,
    pub illegal_transitions: u32,
    pub trace: String,
}

/// Running digest over the step records of an episode.
#[derive(Default)]
pub struct TraceDigest(Digest);

impl TraceDigest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, action: &[f64], result: &StepResult) {
        self.0
            .f64s(action)
            .f64(result.reward_env)
            .f64(result.reward_abs)
            .u64(result.info.abstract_state.digest())
            .u64(result.observation.digest())
            .u64(u64::from(result.episode_done))
            .u64(u64::from(result.aux_done));
    }

    pub fn hex(&self) -> String {
        hex(self.0.finish())
    }
}

/// Chooses controls from what the environment exposes.
pub trait Agent {
    fn begin_episode(&mut self, _env: &Environment) {}
    fn act(&mut self, env: &Environment, obs: &Observation) -> Vec<f64>;
}

/// Runs one episode from `seed` (on `level` if given), optionally recording
/// every record into `log`.
pub fn run_episode(
    env: &mut Environment,
    agent: &mut dyn Agent,
    episode: u64,
    seed: u64,
    level: Option<&SokobanState>,
    mut log: Option<&mut Vec<LogRecord>>,
) -> Result<EpisodeSummary, EnvError> {
    let mut obs = match level {
        Some(l) => env.reset_with_level(seed, l)?,
        None => env.reset(seed)?,
    };
    if let Some(log) = log.as_deref_mut() {
        let mut config = env.config().clone();
        config.seed = seed;
        log.push(LogRecord::Header {
            version: LOG_VERSION,
            episode,
            seed,
            config,
            level: level.map(|l| l.to_text()),
        });
    }
    agent.begin_episode(env);
    let mut trace = TraceDigest::new();
    let (mut return_env, mut return_abs) = (0.0, 0.0);
    let mut last = None;
    while !env.is_done() {
        let action = agent.act(env, &obs);
        let result = env.step(&action)?;
        trace.add(&action, &result);
        return_env += result.reward_env;
        return_abs += result.reward_abs;
        if let Some(log) = log.as_deref_mut() {
            log.push(step_record(env.step_index(), action, &result));
        }
        obs = result.observation.clone();
        last = Some(result);
    }
    let info = last.map(|r| r.info);
    let summary = EpisodeSummary {
        episode,
        seed,
        length: env.step_index(),
        return_env,
        return_abs,
        outcome: env.outcome(),
        difficulty: env.difficulty().filter(|&d| d > 0),
        illegal_touches: info.as_ref().map_or(0, |i| i.illegal_touch_count),
        illegal_transitions: info.as_ref().map_or(0, |i| i.illegal_transition_count),
        trace: trace.hex(),
    };
    if let Some(log) = log {
        log.push(LogRecord::Footer(summary.clone()));
    }
    Ok(summary)
}

fn step_record(step: u64, action: Vec<f64>, r: &StepResult) -> LogRecord {
    LogRecord::Step {
        step,
        action,
        reward_env: r.reward_env,
        reward_abs: r.reward_abs,
        state: hex(r.info.abstract_state.digest()),
        obs: hex(r.observation.digest()),
        events: r.info.events.clone(),
    }
}

pub fn write_log<W: Write>(records: &[LogRecord], out: &mut W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_log<R: BufRead>(input: R) -> Result<Vec<LogRecord>, ReplayError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| ReplayError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| ReplayError::Parse { line: i + 1, message: e.to_string() })?);
    }
    Ok(out)
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("read failed: {0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("log structure: {0}")]
    Structure(String),
    #[error("unsupported log version {0}")]
    Version(u32),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("episode {episode} diverges at step {step}: {what}")]
    Mismatch { episode: u64, step: u64, what: String },
}

/// Re-runs every episode in `records` and checks each step and the final
/// trace digest. Returns the recomputed summaries.
pub fn replay(records: &[LogRecord]) -> Result<Vec<EpisodeSummary>, ReplayError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < records.len() {
        let LogRecord::Header { version, episode, seed, config, level } = &records[i] else {
            return Err(ReplayError::Structure(format!("record {} is not a header", i + 1)));
        };
        if *version != LOG_VERSION {
            return Err(ReplayError::Version(*version));
        }
        let level = match level {
            Some(text) => Some(parse_level(text).map_err(|e| ReplayError::Structure(e.to_string()))?),
            None => None,
        };
        let mut env = Environment::new(config.clone())?;
        match &level {
            Some(l) => env.reset_with_level(*seed, l)?,
            None => env.reset(*seed)?,
        };
        i += 1;
        let mut trace = TraceDigest::new();
        let (mut return_env, mut return_abs) = (0.0, 0.0);
        let mismatch = |step, what: &str| ReplayError::Mismatch { episode: *episode, step, what: what.to_string() };
        loop {
            match records.get(i) {
                Some(LogRecord::Step { step, action, .. }) => {
                    let result = env.step(action).map_err(|e| mismatch(*step, &e.to_string()))?;
                    if step_record(env.step_index(), action.clone(), &result) != records[i] {
                        return Err(mismatch(*step, "step record differs"));
                    }
                    trace.add(action, &result);
                    return_env += result.reward_env;
                    return_abs += result.reward_abs;
                    i += 1;
                }
                Some(LogRecord::Footer(summary)) => {
                    if !env.is_done() {
                        return Err(mismatch(env.step_index(), "episode not finished at footer"));
                    }
                    if summary.trace != trace.hex() {
                        return Err(mismatch(env.step_index(), "trace digest differs"));
                    }
                    if summary.length != env.step_index()
                        || summary.return_env.to_bits() != return_env.to_bits()
                        || summary.return_abs.to_bits() != return_abs.to_bits()
                        || summary.outcome != env.outcome()
                    {
                        return Err(mismatch(env.step_index(), "summary differs"));
                    }
                    out.push(summary.clone());
                    i += 1;
                    break;
                }
                _ => return Err(ReplayError::Structure(format!("episode {episode} has no footer"))),
            }
        }
    }
    Ok(out)
}
