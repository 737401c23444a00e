use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};

use embodied::control::{OracleAgent, RandomAgent};
use embodied::env::log::{run_episode, write_log, Agent, EpisodeSummary, LogRecord};
use embodied::env::{EnvError, Outcome};
use embodied::{EnvConfig, Environment};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::{AgentKind, CliError, RunArgs, BUILD_ID};

pub struct EpisodeRun {
    pub summary: EpisodeSummary,
    pub log: Vec<LogRecord>,
}

fn make_agent(kind: AgentKind) -> Box<dyn Agent> {
    match kind {
        AgentKind::Oracle => Box::new(OracleAgent::new()),
        AgentKind::Random => Box::new(RandomAgent::new()),
    }
}

fn run_shard(config: &EnvConfig, kind: AgentKind, episodes: &[(u64, u64)], keep_log: bool) -> Result<Vec<EpisodeRun>, EnvError> {
    let mut env = Environment::new(config.clone())?;
    let mut agent = make_agent(kind);
    let mut out = Vec::with_capacity(episodes.len());
    for &(episode, seed) in episodes {
        let mut log = Vec::new();
        let summary = run_episode(&mut env, agent.as_mut(), episode, seed, None, keep_log.then_some(&mut log))?;
        out.push(EpisodeRun { summary, log });
    }
    Ok(out)
}

/// Runs `count` episodes with seeds `seed + i`, split into contiguous shards
/// over `workers` threads. Results come back in episode order.
pub fn run_episodes(
    config: &EnvConfig,
    kind: AgentKind,
    count: u64,
    seed: u64,
    workers: usize,
    keep_log: bool,
) -> Result<Vec<EpisodeRun>, EnvError> {
    let episodes: Vec<(u64, u64)> = (0..count).map(|i| (i, seed.wrapping_add(i))).collect();
    if workers <= 1 || episodes.len() <= 1 {
        return run_shard(config, kind, &episodes, keep_log);
    }
    let shard = episodes.len().div_ceil(workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| EnvError::Config(e.to_string()))?;
    let shards: Vec<Vec<EpisodeRun>> = pool.install(|| {
        episodes
            .par_chunks(shard)
            .map(|chunk| run_shard(config, kind, chunk, keep_log))
            .collect::<Result<_, _>>()
    })?;
    Ok(shards.into_iter().flatten().collect())
}

#[derive(Debug, Serialize)]
pub struct Aggregate {
    pub episodes: usize,
    pub mean_length: f64,
    pub mean_return_env: f64,
    pub mean_return_abs: f64,
    pub outcomes: BTreeMap<String, usize>,
    /// Solved (Mujoban) or won (boards) fraction.
    pub success_rate: f64,
    pub draw_rate: f64,
    pub loss_rate: f64,
    pub illegal_touches: u64,
    pub illegal_transitions: u64,
    /// Success rate per Mujoban difficulty.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub success_by_difficulty: BTreeMap<u8, f64>,
}

fn outcome_name(o: Option<Outcome>) -> String {
    match o {
        Some(o) => serde_json::to_value(o).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        None => "none".into(),
    }
}

fn is_success(o: Option<Outcome>) -> bool {
    matches!(o, Some(Outcome::Solved | Outcome::Win))
}

pub fn aggregate(summaries: &[&EpisodeSummary]) -> Aggregate {
    let n = summaries.len();
    let denom = n.max(1) as f64;
    let mean = |f: &dyn Fn(&EpisodeSummary) -> f64| summaries.iter().map(|s| f(s)).sum::<f64>() / denom;
    let count = |o: Outcome| summaries.iter().filter(|s| s.outcome == Some(o)).count() as f64 / denom;
    let mut outcomes = BTreeMap::new();
    let mut by_difficulty: BTreeMap<u8, (usize, usize)> = BTreeMap::new();
    for s in summaries {
        *outcomes.entry(outcome_name(s.outcome)).or_insert(0) += 1;
        if let Some(d) = s.difficulty {
            let e = by_difficulty.entry(d).or_default();
            e.0 += is_success(s.outcome) as usize;
            e.1 += 1;
        }
    }
    Aggregate {
        episodes: n,
        mean_length: mean(&|s| s.length as f64),
        mean_return_env: mean(&|s| s.return_env),
        mean_return_abs: mean(&|s| s.return_abs),
        outcomes,
        success_rate: summaries.iter().filter(|s| is_success(s.outcome)).count() as f64 / denom,
        draw_rate: count(Outcome::Draw),
        loss_rate: count(Outcome::Loss),
        illegal_touches: summaries.iter().map(|s| s.illegal_touches as u64).sum(),
        illegal_transitions: summaries.iter().map(|s| s.illegal_transitions as u64).sum(),
        success_by_difficulty: by_difficulty.into_iter().map(|(d, (ok, all))| (d, ok as f64 / all as f64)).collect(),
    }
}

pub fn tagged<T: Serialize>(kind: &str, value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("summary serializes");
    if let Value::Object(map) = &mut v {
        map.insert("type".into(), Value::String(kind.into()));
    }
    v
}

#[derive(Serialize)]
struct Manifest<'a> {
    build: &'a str,
    command: &'a str,
    agent: String,
    seed: u64,
    episodes: u64,
    config: &'a EnvConfig,
    summaries: Vec<&'a EpisodeSummary>,
    aggregate: &'a Aggregate,
}

pub fn run_cmd(args: &RunArgs, eval: bool) -> Result<(), CliError> {
    let config = args.env.config()?;
    let log_path = args.log.clone().or_else(|| args.out_dir.as_ref().map(|d| d.join("episodes.jsonl")));
    let runs = run_episodes(&config, args.agent, args.episodes, args.seed, args.parallel as usize, log_path.is_some())?;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for r in &runs {
        writeln!(out, "{}", tagged("episode", &r.summary))?;
    }
    let summaries: Vec<&EpisodeSummary> = runs.iter().map(|r| &r.summary).collect();
    let agg = aggregate(&summaries);
    writeln!(out, "{}", tagged("aggregate", &agg))?;
    out.flush()?;

    if let Some(path) = &log_path {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(fs::File::create(path)?);
        for r in &runs {
            write_log(&r.log, &mut w)?;
        }
        w.flush()?;
    }
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
        let manifest = Manifest {
            build: BUILD_ID,
            command: if eval { "eval" } else { "run" },
            agent: format!("{:?}", args.agent).to_lowercase(),
            seed: args.seed,
            episodes: args.episodes,
            config: &config,
            summaries: summaries.clone(),
            aggregate: &agg,
        };
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    }
    if eval {
        eprintln!("{}", table(&config, &agg));
    }
    Ok(())
}

fn table(config: &EnvConfig, agg: &Aggregate) -> String {
    let mut s = format!("{:<12}{:>10}{:>10}{:>10}{:>10}{:>12}\n", "game", "episodes", "success", "draw", "loss", "mean len");
    s += &format!(
        "{:<12}{:>10}{:>10.3}{:>10.3}{:>10.3}{:>12.1}",
        config.game.to_string(),
        agg.episodes,
        agg.success_rate,
        agg.draw_rate,
        agg.loss_rate,
        agg.mean_length
    );
    for (d, rate) in &agg.success_by_difficulty {
        s += &format!("\n{:<12}{:>10}{:>10.3}", format!("  level {d}"), "", rate);
    }
    s
}
