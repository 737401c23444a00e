//! Exact rule engines for the abstract games.

mod go;
mod level;
mod sgf;
mod sokoban;
mod ttt;

pub use go::{
    area, go_apply, go_legal_moves, tromp_taylor_score, Color, GoBoard, GoError, GoMove, Stone,
    DEFAULT_BOARD_SIZE, DEFAULT_KOMI, MAX_BOARD_SIZE, MIN_BOARD_SIZE,
};
pub use level::{
    format_levels, generate_level, pad_level, parse_level, parse_levels, LevelError,
    LevelParseError, LevelSpec, CURRICULUM, GENERATION_SOLVER_BUDGET, MAX_DIFFICULTY, PADDED_SIZE,
};
pub use sgf::to_sgf;
pub use sokoban::{Cell, Direction, IllegalMove, Layout, SokobanAction, SokobanError, SokobanState};
pub use ttt::{ttt_apply, ttt_outcome, Mark, TttBoard, TttError, TttOutcome, TttPlayer, LINES};
