//! Boxoban level text, the difficulty curriculum table and the reverse-play
//! level generator.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::sokoban::{Cell, Direction, SokobanState};
use crate::planners::solve_sokoban;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelParseError {
    #[error("line {line}, column {column}: unknown character {ch:?}")]
    UnknownChar { line: usize, column: usize, ch: char },
    #[error("line {line}: expected {expected} columns, found {found}")]
    NotRectangular { line: usize, expected: usize, found: usize },
    #[error("line {line}, column {column}: second player")]
    DuplicatePlayer { line: usize, column: usize },
    #[error("level has no player")]
    MissingPlayer,
    #[error("level has {boxes} boxes but {targets} targets")]
    CountMismatch { boxes: usize, targets: usize },
    #[error("line {line}, column {column}: boundary cell is not a wall")]
    OpenBoundary { line: usize, column: usize },
    #[error("empty level")]
    Empty,
}

/// Parses one level in Boxoban notation. Lines and columns in errors are 1-based.
pub fn parse_level(text: &str) -> Result<SokobanState, LevelParseError> {
    let rows: Vec<&str> = text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .skip_while(|l| l.trim().is_empty())
        .collect();
    let end = rows.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |i| i + 1);
    let rows = &rows[..end];
    if rows.is_empty() {
        return Err(LevelParseError::Empty);
    }
    let width = rows[0].chars().count();
    let (mut walls, mut targets, mut boxes) = (Vec::new(), Vec::new(), Vec::new());
    let mut player: Option<Cell> = None;
    for (y, row) in rows.iter().enumerate() {
        let found = row.chars().count();
        if found != width {
            return Err(LevelParseError::NotRectangular {
                line: y + 1,
                expected: width,
                found,
            });
        }
        for (x, ch) in row.chars().enumerate() {
            let c = Cell::new(x as i32, y as i32);
            let (wall, target, bx, pl) = match ch {
                '#' => (true, false, false, false),
                '.' => (false, true, false, false),
                '$' => (false, false, true, false),
                '@' => (false, false, false, true),
                '*' => (false, true, true, false),
                '+' => (false, true, false, true),
                ' ' => (false, false, false, false),
                _ => {
                    return Err(LevelParseError::UnknownChar {
                        line: y + 1,
                        column: x + 1,
                        ch,
                    })
                }
            };
            if wall {
                walls.push(c);
            }
            if target {
                targets.push(c);
            }
            if bx {
                boxes.push(c);
            }
            if pl {
                if player.is_some() {
                    return Err(LevelParseError::DuplicatePlayer {
                        line: y + 1,
                        column: x + 1,
                    });
                }
                player = Some(c);
            }
            let edge = x == 0 || y == 0 || x == width - 1 || y == rows.len() - 1;
            if edge && !wall {
                return Err(LevelParseError::OpenBoundary {
                    line: y + 1,
                    column: x + 1,
                });
            }
        }
    }
    let player = player.ok_or(LevelParseError::MissingPlayer)?;
    if boxes.len() != targets.len() {
        return Err(LevelParseError::CountMismatch {
            boxes: boxes.len(),
            targets: targets.len(),
        });
    }
    Ok(SokobanState::new(width as i32, rows.len() as i32, &walls, &targets, &boxes, player)
        .expect("parsed level satisfies invariants"))
}

/// Parses a level file: blocks separated by lines starting with `;`.
pub fn parse_levels(text: &str) -> Vec<Result<SokobanState, LevelParseError>> {
    let mut blocks = vec![String::new()];
    for line in text.lines() {
        if line.starts_with(';') {
            blocks.push(String::new());
        } else {
            let b = blocks.last_mut().expect("non-empty");
            b.push_str(line);
            b.push('\n');
        }
    }
    blocks
        .into_iter()
        .filter(|b| !b.trim().is_empty())
        .map(|b| parse_level(&b))
        .collect()
}

/// Writes levels in Boxoban file format with `; index` separators.
pub fn format_levels(levels: &[SokobanState]) -> String {
    let mut out = String::new();
    for (i, l) in levels.iter().enumerate() {
        out.push_str(&format!("; {i}\n"));
        out.push_str(&l.to_text());
        out.push('\n');
    }
    out
}

/// One row of the difficulty curriculum. `grid_size` includes the wall border.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub difficulty: u8,
    pub grid_size: usize,
    pub num_boxes: usize,
    pub training_ratio: f64,
}

pub const MAX_DIFFICULTY: u8 = 5;

/// Side length every level is padded to with walls.
pub const PADDED_SIZE: usize = 10;

pub const CURRICULUM: [LevelSpec; 5] = [
    LevelSpec { difficulty: 1, grid_size: 5, num_boxes: 1, training_ratio: 0.25 },
    LevelSpec { difficulty: 2, grid_size: 7, num_boxes: 1, training_ratio: 0.25 },
    LevelSpec { difficulty: 3, grid_size: 7, num_boxes: 2, training_ratio: 0.2 },
    LevelSpec { difficulty: 4, grid_size: 8, num_boxes: 3, training_ratio: 0.2 },
    LevelSpec { difficulty: 5, grid_size: 10, num_boxes: 4, training_ratio: 0.1 },
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("difficulty {0} is outside 1..=5")]
    UnknownDifficulty(u8),
    #[error("no solvable level after {0} attempts")]
    GenerationFailed(usize),
}

impl LevelSpec {
    pub fn for_difficulty(difficulty: u8) -> Result<LevelSpec, LevelError> {
        CURRICULUM
            .iter()
            .find(|s| s.difficulty == difficulty)
            .copied()
            .ok_or(LevelError::UnknownDifficulty(difficulty))
    }

    /// Interior walls sprinkled into the room, as an inclusive range.
    fn interior_walls(&self) -> (usize, usize) {
        match self.difficulty {
            1 => (0, 1),
            2 => (2, 4),
            3 => (2, 4),
            4 => (3, 6),
            _ => (6, 12),
        }
    }

    /// Reverse-play length; longer walks scatter boxes further from targets.
    fn reverse_steps(&self) -> usize {
        match self.difficulty {
            1 => 12,
            2 => 30,
            3 => 50,
            4 => 70,
            _ => 100,
        }
    }
}

const MAX_ATTEMPTS: usize = 200;
const ROLLOUTS_PER_ROOM: usize = 6;
/// Node budget for the solvability check at generation time.
pub const GENERATION_SOLVER_BUDGET: usize = 200_000;

/// Generates a solvable level for `spec`, deterministic in `seed`.
///
/// Rooms get random interior walls (keeping the floor connected), boxes start
/// on their targets, and random reverse play (moves and pulls) scatters them.
/// The candidate with the largest box displacement is kept and must pass the
/// solver within [`GENERATION_SOLVER_BUDGET`].
pub fn generate_level(seed: u64, spec: &LevelSpec) -> Result<SokobanState, LevelError> {
    LevelSpec::for_difficulty(spec.difficulty)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let Some(candidate) = attempt(&mut rng, spec) else {
            continue;
        };
        if solve_sokoban(&candidate, GENERATION_SOLVER_BUDGET).is_some() {
            return Ok(candidate);
        }
    }
    Err(LevelError::GenerationFailed(MAX_ATTEMPTS))
}

fn attempt(rng: &mut ChaCha8Rng, spec: &LevelSpec) -> Option<SokobanState> {
    let n = spec.grid_size as i32;
    let mut wall = vec![false; (n * n) as usize];
    let idx = |c: Cell| (c.y * n + c.x) as usize;
    for c in (0..n).flat_map(|y| (0..n).map(move |x| Cell::new(x, y))) {
        if c.x == 0 || c.y == 0 || c.x == n - 1 || c.y == n - 1 {
            wall[idx(c)] = true;
        }
    }
    let interior: Vec<Cell> = (1..n - 1)
        .flat_map(|y| (1..n - 1).map(move |x| Cell::new(x, y)))
        .collect();
    let (lo, hi) = spec.interior_walls();
    let want = rng.random_range(lo..=hi);
    let mut placed = 0;
    for _ in 0..want * 8 {
        if placed == want {
            break;
        }
        let c = *interior.choose(rng)?;
        if wall[idx(c)] {
            continue;
        }
        wall[idx(c)] = true;
        let floor: Vec<Cell> = interior.iter().copied().filter(|&c| !wall[idx(c)]).collect();
        if floor.len() < spec.num_boxes + 2 || !connected(&floor, &wall, n) {
            wall[idx(c)] = false;
        } else {
            placed += 1;
        }
    }
    let floor: Vec<Cell> = interior.iter().copied().filter(|&c| !wall[idx(c)]).collect();
    let mut picks = floor.clone();
    picks.shuffle(rng);
    let targets: Vec<Cell> = picks[..spec.num_boxes].to_vec();
    let player_start = picks[spec.num_boxes];
    let walls: Vec<Cell> = (0..n * n)
        .map(|i| Cell::new(i % n, i / n))
        .filter(|&c| wall[idx(c)])
        .collect();

    let mut best: Option<(u32, Vec<Cell>, Cell)> = None;
    for _ in 0..ROLLOUTS_PER_ROOM {
        let (boxes, player) = reverse_play(rng, &wall, n, &targets, player_start, spec.reverse_steps());
        let off_target = boxes.iter().filter(|b| !targets.contains(b)).count();
        if off_target == 0 {
            continue;
        }
        let displacement: u32 = boxes.iter().zip(&targets).map(|(b, t)| b.manhattan(*t)).sum();
        let score = displacement * (1 + off_target as u32);
        if best.as_ref().is_none_or(|(s, ..)| score > *s) {
            best = Some((score, boxes, player));
        }
    }
    let (_, boxes, player) = best?;
    SokobanState::new(n, n, &walls, &targets, &boxes, player).ok()
}

/// Random walk with pulls. `boxes[i]` starts on `targets[i]`.
fn reverse_play(
    rng: &mut ChaCha8Rng,
    wall: &[bool],
    n: i32,
    targets: &[Cell],
    start: Cell,
    steps: usize,
) -> (Vec<Cell>, Cell) {
    let idx = |c: Cell| (c.y * n + c.x) as usize;
    let mut boxes = targets.to_vec();
    let mut player = start;
    for _ in 0..steps {
        let d = *Direction::ALL.choose(rng).expect("four directions");
        let next = player.step(d);
        if wall[idx(next)] || boxes.contains(&next) {
            continue;
        }
        let behind = player.step(d.opposite());
        let pull = rng.random_bool(0.8);
        if let Some(k) = boxes.iter().position(|&b| b == behind).filter(|_| pull) {
            boxes[k] = player;
        }
        player = next;
    }
    (boxes, player)
}

fn connected(floor: &[Cell], wall: &[bool], n: i32) -> bool {
    let idx = |c: Cell| (c.y * n + c.x) as usize;
    let Some(&first) = floor.first() else {
        return false;
    };
    let mut seen = vec![false; wall.len()];
    let mut stack = vec![first];
    seen[idx(first)] = true;
    let mut count = 1;
    while let Some(c) = stack.pop() {
        for d in Direction::ALL {
            let m = c.step(d);
            if !wall[idx(m)] && !seen[idx(m)] {
                seen[idx(m)] = true;
                count += 1;
                stack.push(m);
            }
        }
    }
    count == floor.len()
}

/// Centers a level inside a wall grid of at least `size` x `size`.
pub fn pad_level(level: &SokobanState, size: usize) -> SokobanState {
    let (w, h) = (level.width(), level.height());
    let size = size as i32;
    if w >= size && h >= size {
        return level.clone();
    }
    let (nw, nh) = (w.max(size), h.max(size));
    let (ox, oy) = ((nw - w) / 2, (nh - h) / 2);
    let shift = |c: Cell| Cell::new(c.x + ox, c.y + oy);
    let inside = |c: Cell| c.x >= ox && c.y >= oy && c.x < ox + w && c.y < oy + h;
    let walls: Vec<Cell> = (0..nh)
        .flat_map(|y| (0..nw).map(move |x| Cell::new(x, y)))
        .filter(|&c| !inside(c) || level.is_wall(Cell::new(c.x - ox, c.y - oy)))
        .collect();
    let targets: Vec<Cell> = level.layout().targets().into_iter().map(shift).collect();
    let boxes: Vec<Cell> = level.boxes().iter().copied().map(shift).collect();
    SokobanState::new(nw, nh, &walls, &targets, &boxes, shift(level.player()))
        .expect("padding preserves invariants")
}
