use std::time::Instant;

use clap::Args;
use embodied::{EnvConfig, Environment, Game, PlannerMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;

#[derive(Args)]
pub struct BenchArgs {
    /// Total control steps.
    #[arg(long, default_value_t = 200_000)]
    pub steps: u64,
    /// Print a progress line every n steps.
    #[arg(long, default_value_t = 50_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub report_every: u64,
    #[arg(long, default_value_t = 1)]
    pub difficulty: u8,
    #[arg(long)]
    pub pegs: bool,
    #[arg(long, value_parser = crate::parse_planner, default_value = "none")]
    pub planner: PlannerMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Single-threaded Mujoban stepping with uniform random controls and no
/// rendering. Episodes reset with seeds seed, seed + 1, ...
pub fn bench_cmd(args: &BenchArgs) -> Result<(), CliError> {
    let mut cfg = EnvConfig::for_game(Game::Mujoban);
    cfg.difficulty = Some(args.difficulty);
    cfg.pegs = args.pegs;
    cfg.planner_mode = args.planner;
    let mut env = Environment::new(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut episode = 0u64;
    env.reset(args.seed)?;

    let start = Instant::now();
    let mut steps = 0u64;
    let mut episodes = 0u64;
    while steps < args.steps {
        if env.is_done() {
            episode += 1;
            episodes += 1;
            env.reset(args.seed.wrapping_add(episode))?;
        }
        let u = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
        env.step(&u)?;
        steps += 1;
        if steps.is_multiple_of(args.report_every) && steps < args.steps {
            let secs = start.elapsed().as_secs_f64();
            println!(
                "{}",
                serde_json::json!({"type": "progress", "steps": steps, "seconds": secs, "steps_per_second": steps as f64 / secs})
            );
        }
    }
    let secs = start.elapsed().as_secs_f64();
    println!(
        "{}",
        serde_json::json!({
            "type": "aggregate",
            "steps": steps,
            "episodes_completed": episodes,
            "seconds": secs,
            "steps_per_second": steps as f64 / secs.max(1e-9),
        })
    );
    Ok(())
}
