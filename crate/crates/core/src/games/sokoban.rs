//! Abstract Sokoban: grid state, push-only moves, solved test.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest::Digest;

/// Grid cell; `x` is the column, `y` the row counted from the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn step(self, d: Direction) -> Cell {
        let (dx, dy) = d.delta();
        Cell::new(self.x + dx, self.y + dy)
    }

    pub fn manhattan(self, o: Cell) -> u32 {
        self.x.abs_diff(o.x) + self.y.abs_diff(o.y)
    }
}

/// One abstract Sokoban action. North is toward row 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    North,
    East,
    South,
    West,
}

pub type SokobanAction = Direction;

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::East, Direction::South, Direction::West];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::North => (0, -1),
            Direction::East => (1, 0),
            Direction::South => (0, 1),
            Direction::West => (-1, 0),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::East => Direction::West,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn between(from: Cell, to: Cell) -> Option<Direction> {
        Direction::ALL.into_iter().find(|&d| from.step(d) == to)
    }
}

/// Walls and targets never change during play, so states share them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layout {
    width: i32,
    height: i32,
    walls: Vec<bool>,
    targets: Vec<bool>,
}

impl Layout {
    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }

    pub fn index(&self, c: Cell) -> usize {
        (c.y * self.width + c.x) as usize
    }

    pub fn cell(&self, i: usize) -> Cell {
        Cell::new(i as i32 % self.width, i as i32 / self.width)
    }

    pub fn is_wall(&self, c: Cell) -> bool {
        !self.in_bounds(c) || self.walls[self.index(c)]
    }

    pub fn is_target(&self, c: Cell) -> bool {
        self.in_bounds(c) && self.targets[self.index(c)]
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Cell::new(x, y)))
    }

    pub fn targets(&self) -> Vec<Cell> {
        self.cells().filter(|&c| self.is_target(c)).collect()
    }

    pub fn walls(&self) -> Vec<Cell> {
        self.cells().filter(|&c| self.is_wall(c)).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SokobanError {
    #[error("cell ({}, {}) is out of bounds", .0.x, .0.y)]
    OutOfBounds(Cell),
    #[error("cell ({}, {}) holds more than one of wall, box and player", .0.x, .0.y)]
    Overlap(Cell),
    #[error("{boxes} boxes but {targets} targets")]
    CountMismatch { boxes: usize, targets: usize },
    #[error("boundary cell ({}, {}) is not a wall", .0.x, .0.y)]
    OpenBoundary(Cell),
}

/// A move was blocked; the state is unchanged.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("illegal move {0:?}")]
pub struct IllegalMove(pub Direction);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SokobanState {
    layout: Arc<Layout>,
    boxes: Vec<Cell>,
    player: Cell,
}

impl SokobanState {
    pub fn new(
        width: i32,
        height: i32,
        walls: &[Cell],
        targets: &[Cell],
        boxes: &[Cell],
        player: Cell,
    ) -> Result<Self, SokobanError> {
        let n = (width * height) as usize;
        let mut layout = Layout {
            width,
            height,
            walls: vec![false; n],
            targets: vec![false; n],
        };
        for &c in walls.iter().chain(targets).chain(boxes).chain([&player]) {
            if !layout.in_bounds(c) {
                return Err(SokobanError::OutOfBounds(c));
            }
        }
        for &w in walls {
            let i = layout.index(w);
            layout.walls[i] = true;
        }
        for &t in targets {
            let i = layout.index(t);
            layout.targets[i] = true;
        }
        let state = Self::from_layout(Arc::new(layout), boxes.to_vec(), player);
        state.validate()?;
        Ok(state)
    }

    pub(crate) fn from_layout(layout: Arc<Layout>, mut boxes: Vec<Cell>, player: Cell) -> Self {
        boxes.sort_unstable();
        Self { layout, boxes, player }
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), SokobanError> {
        let l = &self.layout;
        for c in l.cells() {
            let edge = c.x == 0 || c.y == 0 || c.x == l.width - 1 || c.y == l.height - 1;
            if edge && !l.is_wall(c) {
                return Err(SokobanError::OpenBoundary(c));
            }
        }
        let mut seen = vec![false; (l.width * l.height) as usize];
        for &c in self.boxes.iter().chain([&self.player]) {
            if !l.in_bounds(c) {
                return Err(SokobanError::OutOfBounds(c));
            }
            let i = l.index(c);
            if l.walls[i] || seen[i] {
                return Err(SokobanError::Overlap(c));
            }
            seen[i] = true;
        }
        let targets = l.targets.iter().filter(|&&t| t).count();
        if targets != self.boxes.len() {
            return Err(SokobanError::CountMismatch {
                boxes: self.boxes.len(),
                targets,
            });
        }
        Ok(())
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn width(&self) -> i32 {
        self.layout.width
    }

    pub fn height(&self) -> i32 {
        self.layout.height
    }

    pub fn player(&self) -> Cell {
        self.player
    }

    /// Box cells in sorted order.
    pub fn boxes(&self) -> &[Cell] {
        &self.boxes
    }

    pub fn is_wall(&self, c: Cell) -> bool {
        self.layout.is_wall(c)
    }

    pub fn is_target(&self, c: Cell) -> bool {
        self.layout.is_target(c)
    }

    pub fn has_box(&self, c: Cell) -> bool {
        self.boxes.binary_search(&c).is_ok()
    }

    pub fn is_free(&self, c: Cell) -> bool {
        !self.is_wall(c) && !self.has_box(c)
    }

    pub fn boxes_on_target(&self) -> usize {
        self.boxes.iter().filter(|&&b| self.is_target(b)).count()
    }

    /// Moves the player one cell, pushing a box when one is in the way.
    pub fn apply(&self, d: Direction) -> Result<SokobanState, IllegalMove> {
        let next = self.player.step(d);
        if self.is_wall(next) {
            return Err(IllegalMove(d));
        }
        match self.boxes.binary_search(&next) {
            Err(_) => Ok(Self {
                layout: self.layout.clone(),
                boxes: self.boxes.clone(),
                player: next,
            }),
            Ok(k) => {
                let beyond = next.step(d);
                if !self.is_free(beyond) {
                    return Err(IllegalMove(d));
                }
                let mut boxes = self.boxes.clone();
                boxes[k] = beyond;
                boxes.sort_unstable();
                Ok(Self {
                    layout: self.layout.clone(),
                    boxes,
                    player: next,
                })
            }
        }
    }

    pub fn is_push(&self, d: Direction) -> bool {
        self.has_box(self.player.step(d))
    }

    pub fn legal_actions(&self) -> Vec<Direction> {
        Direction::ALL
            .into_iter()
            .filter(|&d| self.apply(d).is_ok())
            .collect()
    }

    pub fn is_solved(&self) -> bool {
        self.boxes.iter().all(|&b| self.is_target(b))
    }

    /// Same layout, different dynamic part.
    pub fn with_dynamic(&self, boxes: Vec<Cell>, player: Cell) -> Self {
        Self::from_layout(self.layout.clone(), boxes, player)
    }

    /// Digest of the full state (layout included).
    pub fn digest(&self) -> u64 {
        let mut d = Digest::new();
        d.u64(self.layout.width as u64).u64(self.layout.height as u64);
        for c in self.layout.cells() {
            let code = u64::from(self.layout.is_wall(c)) | (u64::from(self.layout.is_target(c)) << 1);
            d.u64(code);
        }
        for b in &self.boxes {
            d.i64(b.x as i64).i64(b.y as i64);
        }
        d.i64(self.player.x as i64).i64(self.player.y as i64);
        d.finish()
    }

    /// Boxoban text, one line per row.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for y in 0..self.height() {
            for x in 0..self.width() {
                let c = Cell::new(x, y);
                let ch = match (self.is_wall(c), self.has_box(c), self.player == c, self.is_target(c)) {
                    (true, ..) => '#',
                    (_, true, _, true) => '*',
                    (_, true, _, false) => '$',
                    (_, _, true, true) => '+',
                    (_, _, true, false) => '@',
                    (_, _, _, true) => '.',
                    _ => ' ',
                };
                s.push(ch);
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for SokobanState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
