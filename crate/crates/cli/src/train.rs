use clap::Args;
use embodied::train::{train_demo, TrainDemoConfig, TrainError};

use crate::episodes::tagged;
use crate::CliError;

#[derive(Args)]
pub struct TrainArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub difficulty: u8,
    #[arg(long)]
    pub pegs: bool,
    #[arg(long, default_value_t = 200)]
    pub iterations: usize,
    /// Episodes collected per update.
    #[arg(long, default_value_t = 32)]
    pub episodes: usize,
    #[arg(long, default_value_t = 10)]
    pub eval_every: usize,
    #[arg(long, default_value_t = 100)]
    pub eval_episodes: usize,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    /// Stop once an evaluation reaches this solve rate.
    #[arg(long)]
    pub stop_at: Option<f64>,
    #[arg(long, default_value_t = 7200.0)]
    pub max_seconds: f64,
    /// Worker threads for episode collection (all cores by default).
    #[arg(long)]
    pub parallel: Option<usize>,
}

pub fn train_cmd(args: &TrainArgs) -> Result<(), CliError> {
    let cfg = TrainDemoConfig {
        seed: args.seed,
        difficulty: args.difficulty,
        pegs: args.pegs,
        iterations: args.iterations,
        episodes_per_iteration: args.episodes,
        eval_every: args.eval_every,
        eval_episodes: args.eval_episodes,
        learning_rate: args.learning_rate,
        stop_at: args.stop_at,
        max_seconds: Some(args.max_seconds),
        ..TrainDemoConfig::default()
    };
    let run = || train_demo(&cfg, |p| println!("{}", tagged("eval", p)));
    let report = match args.parallel {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Failed(e.to_string()))?
            .install(run),
        None => run(),
    };
    let report = report.map_err(|e| match e {
        TrainError::Env(e) => CliError::from(e),
        TrainError::Rl(e) => CliError::Failed(e.to_string()),
    })?;
    println!(
        "{}",
        serde_json::json!({
            "type": "aggregate",
            "initial_solve_rate": report.initial.solve_rate,
            "final_solve_rate": report.last.solve_rate,
            "best_solve_rate": report.evaluations.iter().map(|p| p.solve_rate).fold(0.0, f64::max),
            "env_steps": report.last.env_steps,
            "seconds": report.last.elapsed_seconds,
        })
    );
    Ok(())
}
