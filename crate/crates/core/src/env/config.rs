use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EnvError;
use crate::games::{CURRICULUM, DEFAULT_BOARD_SIZE, DEFAULT_KOMI, MAX_BOARD_SIZE, MAX_DIFFICULTY, MIN_BOARD_SIZE};
use crate::physics::PhysicsParams;
use crate::planners::OpponentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Game {
    Mujoban,
    Mujoxo,
    Mujogo,
}

impl FromStr for Game {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mujoban" => Ok(Game::Mujoban),
            "mujoxo" => Ok(Game::Mujoxo),
            "mujogo" | "go_7x7" => Ok(Game::Mujogo),
            _ => Err(EnvError::Config(format!("unknown game {s:?}"))),
        }
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Game::Mujoban => "mujoban",
            Game::Mujoxo => "mujoxo",
            Game::Mujogo => "mujogo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerMode {
    Expert,
    Random,
    None,
}

impl FromStr for PlannerMode {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "expert" => Ok(PlannerMode::Expert),
            "random" => Ok(PlannerMode::Random),
            "none" => Ok(PlannerMode::None),
            _ => Err(EnvError::Config(format!("unknown planner mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub game: Game,
    /// Mujoban: static pegs at grid intersections.
    pub pegs: bool,
    /// Mujoban: fixed difficulty; `None` samples from `curriculum`.
    pub difficulty: Option<u8>,
    /// Mujoban: sampling ratios for difficulties 1 to 5.
    pub curriculum: Vec<f64>,
    /// MujoGo board size.
    pub board_size: usize,
    pub komi: f64,
    pub opponent: OpponentConfig,
    /// MujoGo: external GTP engine command; the built-in policy is used when unset.
    pub engine_cmd: Option<String>,
    /// MujoGo: fall back to the built-in policy when the engine misbehaves.
    pub engine_fallback: bool,
    /// Overrides the per-game default limit.
    pub time_limit_steps: Option<u64>,
    pub planner_mode: PlannerMode,
    pub aux_time_limit: u64,
    pub aux_reward_scale: f64,
    /// MujoGo: evaluation episodes get a longer limit.
    pub eval_mode: bool,
    /// Boards: teleport the arm to a random configuration after every move.
    pub arm_reset: bool,
    /// Boards: standard deviation of piece placement noise, in cells.
    pub placement_noise: f64,
    /// Side of the top-down observation image; `None` disables it.
    pub image_size: Option<usize>,
    pub seed: u64,
    pub physics: PhysicsParams,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self::for_game(Game::Mujoban)
    }
}

impl EnvConfig {
    pub fn for_game(game: Game) -> Self {
        let epsilon = if game == Game::Mujoxo { 0.25 } else { 0.0 };
        Self {
            game,
            pegs: false,
            difficulty: None,
            curriculum: CURRICULUM.iter().map(|s| s.training_ratio).collect(),
            board_size: DEFAULT_BOARD_SIZE,
            komi: DEFAULT_KOMI,
            opponent: OpponentConfig { epsilon, level: 10, seed: 0 },
            engine_cmd: None,
            engine_fallback: true,
            time_limit_steps: None,
            planner_mode: PlannerMode::Expert,
            aux_time_limit: 50,
            aux_reward_scale: 1.0,
            eval_mode: false,
            arm_reset: true,
            placement_noise: 0.1,
            image_size: None,
            seed: 0,
            physics: PhysicsParams::default(),
        }
    }

    pub fn time_limit(&self) -> u64 {
        self.time_limit_steps.unwrap_or(match self.game {
            Game::Mujoban => 900,
            Game::Mujoxo => 600,
            Game::Mujogo if self.eval_mode => 1200,
            Game::Mujogo => 900,
        })
    }

    /// Discounts (env, abs) for the configured game.
    pub fn discounts(&self) -> (f64, f64) {
        crate::rl::domain_discounts(self.game)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |m: String| Err(EnvError::Config(m));
        if let Some(d) = self.difficulty {
            if d == 0 || d > MAX_DIFFICULTY {
                return bad(format!("difficulty {d} outside 1..={MAX_DIFFICULTY}"));
            }
        } else if self.game == Game::Mujoban {
            super::curriculum::check_ratios(&self.curriculum)?;
        }
        if !(MIN_BOARD_SIZE..=MAX_BOARD_SIZE).contains(&self.board_size) {
            return bad(format!("board size {} outside {MIN_BOARD_SIZE}..={MAX_BOARD_SIZE}", self.board_size));
        }
        if !self.komi.is_finite() {
            return bad("komi must be finite".into());
        }
        self.opponent.validate().map_err(|e| EnvError::Config(e.to_string()))?;
        if self.time_limit() == 0 {
            return bad("time limit must be positive".into());
        }
        if self.aux_time_limit == 0 {
            return bad("aux time limit must be positive".into());
        }
        if !self.aux_reward_scale.is_finite() {
            return bad("aux reward scale must be finite".into());
        }
        if !(self.placement_noise >= 0.0 && self.placement_noise.is_finite()) {
            return bad("placement noise must be non-negative".into());
        }
        if self.image_size.is_some_and(|s| s < 16) {
            return bad("image size must be at least 16".into());
        }
        let p = &self.physics;
        if !(p.control_dt > 0.0) || p.substeps == 0 || !(p.walker_response_time > 0.0) {
            return bad("physics step settings must be positive".into());
        }
        Ok(())
    }

    /// Parses a TOML config. Missing fields take the defaults of the game
    /// named in the file (Mujoban when absent).
    pub fn from_toml(text: &str) -> Result<Self, EnvError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| EnvError::Config(e.to_string()))?;
        let game = match table.get("game") {
            Some(toml::Value::String(s)) => s.parse()?,
            Some(_) => return Err(EnvError::Config("game must be a string".into())),
            None => Game::Mujoban,
        };
        let base = match toml::Value::try_from(EnvConfig::for_game(game)) {
            Ok(toml::Value::Table(t)) => t,
            _ => unreachable!("config serializes to a table"),
        };
        let merged = toml::Value::Table(merge(base, table));
        let cfg: EnvConfig = merged.try_into().map_err(|e: toml::de::Error| EnvError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn merge(mut base: toml::Table, over: toml::Table) -> toml::Table {
    for (k, v) in over {
        match (base.remove(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                base.insert(k, toml::Value::Table(merge(b, o)));
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
    base
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_limits() {
        assert_eq!(EnvConfig::for_game(Game::Mujoban).time_limit(), 900);
        assert_eq!(EnvConfig::for_game(Game::Mujoxo).time_limit(), 600);
        let mut go = EnvConfig::for_game(Game::Mujogo);
        assert_eq!(go.time_limit(), 900);
        go.eval_mode = true;
        assert_eq!(go.time_limit(), 1200);
    }

    #[test]
    fn toml_overlays_game_defaults() {
        let cfg = EnvConfig::from_toml("game = \"mujoxo\"\n[opponent]\nseed = 4\n").unwrap();
        assert_eq!(cfg.game, Game::Mujoxo);
        assert_eq!(cfg.opponent.epsilon, 0.25);
        assert_eq!(cfg.opponent.seed, 4);
        assert_eq!(cfg.aux_time_limit, 50);
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = EnvConfig::for_game(Game::Mujogo);
        cfg.engine_cmd = Some("gnugo --mode gtp".into());
        cfg.difficulty = Some(3);
        assert_eq!(EnvConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(EnvConfig::from_toml("difficulty = 9").is_err());
        assert!(EnvConfig::from_toml("board_size = 4").is_err());
        assert!(EnvConfig::from_toml("[opponent]\nepsilon = 2.0").is_err());
        assert!(EnvConfig::from_toml("game = \"chess\"").is_err());
    }
}
