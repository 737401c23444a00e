use std::fs;
use std::path::PathBuf;

use clap::Args;
use embodied::env::log::{read_log, LogRecord};
use embodied::games::parse_level;
use embodied::physics::{rasterize_topdown, DEFAULT_IMAGE_SIZE};
use embodied::Environment;

use crate::CliError;

#[derive(Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Only render this episode.
    #[arg(long)]
    pub episode: Option<u64>,
    /// Image side in pixels.
    #[arg(long, default_value_t = DEFAULT_IMAGE_SIZE as u64, value_parser = clap::value_parser!(u64).range(16..=4096))]
    pub size: u64,
    /// Write every n-th frame.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub every: u64,
}

/// Re-simulates each logged episode and writes `ep{episode}_{step}.ppm`
/// frames, frame 0 being the state after reset.
pub fn render_cmd(args: &RenderArgs) -> Result<(), CliError> {
    let file = fs::File::open(&args.log).map_err(|e| CliError::Usage(format!("{}: {e}", args.log.display())))?;
    let records = read_log(std::io::BufReader::new(file)).map_err(|e| CliError::Failed(e.to_string()))?;
    fs::create_dir_all(&args.out_dir)?;
    let size = args.size as usize;

    let mut current: Option<(u64, Environment, u64)> = None;
    for r in &records {
        match r {
            LogRecord::Header { episode, seed, config, level, .. } => {
                current = None;
                if args.episode.is_some_and(|e| e != *episode) {
                    continue;
                }
                let mut env = Environment::new(config.clone())?;
                match level {
                    Some(text) => {
                        let l = parse_level(text).map_err(|e| CliError::Failed(e.to_string()))?;
                        env.reset_with_level(*seed, &l)?;
                    }
                    None => {
                        env.reset(*seed)?;
                    }
                }
                write_frame(args, *episode, 0, &env, size)?;
                current = Some((*episode, env, 1));
            }
            LogRecord::Step { action, .. } => {
                if let Some((episode, env, frames)) = current.as_mut() {
                    env.step(action)?;
                    if env.step_index() % args.every == 0 {
                        write_frame(args, *episode, env.step_index(), env, size)?;
                        *frames += 1;
                    }
                }
            }
            LogRecord::Footer(_) => {
                if let Some((episode, _, frames)) = current.take() {
                    println!(
                        "{}",
                        serde_json::json!({"type": "rendered", "episode": episode, "frames": frames, "dir": args.out_dir.display().to_string()})
                    );
                }
            }
        }
    }
    Ok(())
}

fn write_frame(args: &RenderArgs, episode: u64, step: u64, env: &Environment, size: usize) -> Result<(), CliError> {
    let img = rasterize_topdown(env.world(), size);
    fs::write(args.out_dir.join(format!("ep{episode:04}_{step:05}.ppm")), img.to_ppm())?;
    Ok(())
}
