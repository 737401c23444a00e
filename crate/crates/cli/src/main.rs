mod bench;
mod episodes;
mod levels;
mod render;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use embodied::env::EnvError;
use embodied::{EnvConfig, Game, PlannerMode};

/// Build identifier recorded in run manifests.
pub const BUILD_ID: &str = concat!(env!("CARGO_PKG_VERSION"), "+", env!("EMBODIED_BUILD_ID"));

#[derive(Parser)]
#[command(name = "embodied", version = BUILD_ID, about = "Physically embedded Sokoban, tic-tac-toe and Go")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run episodes with a scripted agent and print one summary per episode.
    Run(RunArgs),
    /// Like `run`, plus a success/win-rate table on stderr.
    Eval(RunArgs),
    /// Print generated Sokoban levels in Boxoban text.
    GenLevels(levels::GenLevelsArgs),
    /// Replay a log and write one PPM image per control step.
    Render(render::RenderArgs),
    /// Re-run a log and check every step against it.
    Replay(ReplayArgs),
    /// Measure Mujoban control steps per second with random controls.
    Bench(bench::BenchArgs),
    /// Train the linear reference agent on Mujoban.
    TrainDemo(train::TrainArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AgentKind {
    Oracle,
    Random,
}

#[derive(Args, Clone)]
pub struct EnvArgs {
    /// mujoban, mujoxo, mujogo (or go_7x7).
    #[arg(long, value_parser = parse_game)]
    pub game: Option<Game>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mujoban: add pegs at grid intersections.
    #[arg(long)]
    pub pegs: bool,
    /// Mujoban difficulty 1-5; sampled from the curriculum when omitted.
    #[arg(long)]
    pub difficulty: Option<u8>,
    /// Opponent's probability of a uniformly random move.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Opponent engine level.
    #[arg(long)]
    pub level: Option<u32>,
    /// MujoGo: external GTP engine command line.
    #[arg(long, env = "EMBODIED_ENGINE_CMD")]
    pub engine_cmd: Option<String>,
    #[arg(long, value_parser = parse_planner)]
    pub planner: Option<PlannerMode>,
}

#[derive(Args, Clone)]
pub struct RunArgs {
    #[command(flatten)]
    pub env: EnvArgs,
    #[arg(long, value_enum, default_value = "oracle")]
    pub agent: AgentKind,
    #[arg(long, default_value_t = 1)]
    pub episodes: u64,
    /// Episode i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output order does not depend on it.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub parallel: u64,
    /// Write the episode log here.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Write manifest.json (and episodes.jsonl unless --log is given) here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    log: PathBuf,
}

fn parse_game(s: &str) -> Result<Game, String> {
    s.parse().map_err(|e: EnvError| e.to_string())
}

fn parse_planner(s: &str) -> Result<PlannerMode, String> {
    s.parse().map_err(|e: EnvError| e.to_string())
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Engine(String),
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Engine(_) => 3,
        }
    }
}

impl From<EnvError> for CliError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::Engine(_) => CliError::Engine(e.to_string()),
            EnvError::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl EnvArgs {
    pub fn config(&self) -> Result<EnvConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                let mut table: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                if let Some(g) = self.game {
                    table.insert("game".into(), toml::Value::String(g.to_string()));
                }
                EnvConfig::from_toml(&table.to_string())?
            }
            None => EnvConfig::for_game(self.game.unwrap_or(Game::Mujoban)),
        };
        if self.pegs {
            cfg.pegs = true;
        }
        if let Some(d) = self.difficulty {
            cfg.difficulty = Some(d);
        }
        if let Some(e) = self.epsilon {
            cfg.opponent.epsilon = e;
        }
        if let Some(l) = self.level {
            cfg.opponent.level = l;
        }
        if let Some(cmd) = &self.engine_cmd {
            if cfg.game == Game::Mujogo && !cmd.trim().is_empty() {
                cfg.engine_cmd = Some(cmd.clone());
            }
        }
        if let Some(p) = self.planner {
            cfg.planner_mode = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn replay_cmd(args: &ReplayArgs) -> Result<(), CliError> {
    let file = std::fs::File::open(&args.log).map_err(|e| CliError::Usage(format!("{}: {e}", args.log.display())))?;
    let records = embodied::env::log::read_log(std::io::BufReader::new(file)).map_err(|e| CliError::Failed(e.to_string()))?;
    match embodied::env::log::replay(&records) {
        Ok(summaries) => {
            for s in &summaries {
                println!("{}", serde_json::json!({"type": "replayed", "episode": s.episode, "trace": s.trace, "ok": true}));
            }
            println!("{}", serde_json::json!({"type": "aggregate", "episodes": summaries.len(), "ok": true}));
            Ok(())
        }
        Err(embodied::env::log::ReplayError::Env(e @ EnvError::Engine(_))) => Err(CliError::Engine(e.to_string())),
        Err(e) => {
            println!("{}", serde_json::json!({"type": "aggregate", "ok": false, "error": e.to_string()}));
            Err(CliError::Failed(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => episodes::run_cmd(a, false),
        Command::Eval(a) => episodes::run_cmd(a, true),
        Command::GenLevels(a) => levels::gen_levels_cmd(a),
        Command::Render(a) => render::render_cmd(a),
        Command::Replay(a) => replay_cmd(a),
        Command::Bench(a) => bench::bench_cmd(a),
        Command::TrainDemo(a) => train::train_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(m) | CliError::Engine(m) | CliError::Failed(m)) = &e;
            eprintln!("embodied: {m}");
            ExitCode::from(e.code())
        }
    }
}
