//! A* Sokoban solver over push transitions.
//!
//! Nodes are (box set, player region) pairs: the player position is
//! normalized to the smallest reachable cell, so walking is folded into the
//! edge cost. Edge cost is walk length plus one push, which keeps plans
//! short in moves. The heuristic sums each box's Manhattan distance to its
//! nearest target. Boxes on dead squares (no push sequence can bring them
//! to any target, which covers non-target corners) are pruned.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use crate::games::{Cell, Direction, SokobanState};

struct Board {
    width: i32,
    walls: Vec<bool>,
    targets: Vec<usize>,
    dead: Vec<bool>,
}

impl Board {
    fn new(state: &SokobanState) -> Self {
        let layout = state.layout();
        let width = layout.width();
        let n = (width * layout.height()) as usize;
        let walls: Vec<bool> = (0..n).map(|i| layout.is_wall(layout.cell(i))).collect();
        let targets: Vec<usize> = (0..n).filter(|&i| layout.is_target(layout.cell(i))).collect();
        let mut board = Self {
            width,
            walls,
            targets,
            dead: vec![true; n],
        };
        board.mark_live_squares();
        board
    }

    fn step(&self, i: usize, d: Direction) -> Option<usize> {
        let (dx, dy) = d.delta();
        let x = (i as i32 % self.width) + dx;
        let y = (i as i32 / self.width) + dy;
        if x < 0 || y < 0 || x >= self.width || (y * self.width + x) as usize >= self.walls.len() {
            return None;
        }
        Some((y * self.width + x) as usize)
    }

    fn open(&self, i: usize) -> bool {
        !self.walls[i]
    }

    /// A square is live when a lone box there can be pushed onto some target.
    /// Computed backward from the targets with pulls.
    fn mark_live_squares(&mut self) {
        let mut queue: VecDeque<usize> = self.targets.iter().copied().collect();
        for &t in &self.targets {
            self.dead[t] = false;
        }
        while let Some(c) = queue.pop_front() {
            for d in Direction::ALL {
                // Box reached c by a push in direction d from c - d; the
                // pusher stood at c - 2d.
                let Some(from) = self.step(c, d.opposite()) else { continue };
                let Some(pusher) = self.step(from, d.opposite()) else { continue };
                if self.open(from) && self.open(pusher) && self.dead[from] {
                    self.dead[from] = false;
                    queue.push_back(from);
                }
            }
        }
    }

    fn heuristic(&self, boxes: &[usize]) -> u32 {
        let w = self.width;
        boxes
            .iter()
            .map(|&b| {
                let bc = Cell::new(b as i32 % w, b as i32 / w);
                self.targets
                    .iter()
                    .map(|&t| bc.manhattan(Cell::new(t as i32 % w, t as i32 / w)))
                    .min()
                    .unwrap_or(0)
            })
            .sum()
    }

    fn solved(&self, boxes: &[usize]) -> bool {
        boxes.iter().all(|b| self.targets.binary_search(b).is_ok())
    }

    /// BFS distances from `from` over cells free of walls and boxes.
    fn distances(&self, from: usize, boxes: &[usize], dist: &mut Vec<u32>) {
        dist.clear();
        dist.resize(self.walls.len(), u32::MAX);
        let mut queue = VecDeque::new();
        dist[from] = 0;
        queue.push_back(from);
        while let Some(c) = queue.pop_front() {
            for d in Direction::ALL {
                if let Some(m) = self.step(c, d) {
                    if self.open(m) && dist[m] == u32::MAX && boxes.binary_search(&m).is_err() {
                        dist[m] = dist[c] + 1;
                        queue.push_back(m);
                    }
                }
            }
        }
    }
}

struct Node {
    boxes: Vec<usize>,
    player: usize,
    g: u32,
    parent: Option<(usize, usize, Direction)>,
}

/// Finds a move sequence solving `state`, expanding at most `node_budget`
/// nodes. `None` means the budget ran out or the level is unsolvable.
pub fn solve_sokoban(state: &SokobanState, node_budget: usize) -> Option<Vec<Direction>> {
    let board = Board::new(state);
    let layout = state.layout();
    let mut start_boxes: Vec<usize> = state.boxes().iter().map(|&c| layout.index(c)).collect();
    start_boxes.sort_unstable();
    let start_player = layout.index(state.player());
    if board.solved(&start_boxes) {
        return Some(Vec::new());
    }
    if start_boxes.iter().any(|&b| board.dead[b]) {
        return None;
    }

    let mut dist = Vec::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut best: HashMap<(Vec<usize>, usize), usize> = HashMap::new();
    let mut open = BinaryHeap::new();
    let mut counter = 0u64;

    board.distances(start_player, &start_boxes, &mut dist);
    let region = region_key(&dist);
    nodes.push(Node {
        boxes: start_boxes.clone(),
        player: start_player,
        g: 0,
        parent: None,
    });
    best.insert((start_boxes.clone(), region), 0);
    open.push(Reverse((board.heuristic(&start_boxes), 0u32, counter, 0usize)));

    let mut expanded = 0;
    while let Some(Reverse((_, g, _, id))) = open.pop() {
        if g > nodes[id].g {
            continue;
        }
        if board.solved(&nodes[id].boxes) {
            return Some(reconstruct(&board, &nodes, id));
        }
        expanded += 1;
        if expanded > node_budget {
            return None;
        }
        let boxes = nodes[id].boxes.clone();
        board.distances(nodes[id].player, &boxes, &mut dist);
        for (k, &b) in boxes.iter().enumerate() {
            for d in Direction::ALL {
                let (Some(pusher), Some(dest)) = (board.step(b, d.opposite()), board.step(b, d)) else {
                    continue;
                };
                if dist[pusher] == u32::MAX || !board.open(dest) || board.dead[dest] {
                    continue;
                }
                if boxes.binary_search(&dest).is_ok() {
                    continue;
                }
                let mut next = boxes.clone();
                next[k] = dest;
                next.sort_unstable();
                if freeze_deadlock(&board, &next, dest) {
                    continue;
                }
                let ng = nodes[id].g + dist[pusher] + 1;
                let key_region = {
                    let mut d2 = Vec::new();
                    board.distances(b, &next, &mut d2);
                    region_key(&d2)
                };
                let key = (next.clone(), key_region);
                let child = match best.entry(key) {
                    Entry::Occupied(e) => {
                        let cid = *e.get();
                        if nodes[cid].g <= ng {
                            continue;
                        }
                        nodes[cid].g = ng;
                        nodes[cid].player = b;
                        nodes[cid].parent = Some((id, pusher, d));
                        cid
                    }
                    Entry::Vacant(e) => {
                        nodes.push(Node {
                            boxes: next.clone(),
                            player: b,
                            g: ng,
                            parent: Some((id, pusher, d)),
                        });
                        *e.insert(nodes.len() - 1)
                    }
                };
                counter += 1;
                open.push(Reverse((ng + board.heuristic(&next), ng, counter, child)));
            }
        }
    }
    None
}

/// Smallest reachable cell; identifies the player's region.
fn region_key(dist: &[u32]) -> usize {
    dist.iter().position(|&d| d != u32::MAX).unwrap_or(0)
}

/// A 2x2 block of walls and boxes containing an off-target box can never move.
fn freeze_deadlock(board: &Board, boxes: &[usize], moved: usize) -> bool {
    let solid = |i: Option<usize>| i.is_none_or(|i| board.walls[i] || boxes.binary_search(&i).is_ok());
    let off_target_box =
        |i: Option<usize>| i.is_some_and(|i| boxes.binary_search(&i).is_ok() && board.targets.binary_search(&i).is_err());
    let pairs = [
        (Direction::North, Direction::East),
        (Direction::East, Direction::South),
        (Direction::South, Direction::West),
        (Direction::West, Direction::North),
    ];
    pairs.into_iter().any(|(a, b)| {
        let pa = board.step(moved, a);
        let pb = board.step(moved, b);
        let pab = pa.and_then(|p| board.step(p, b));
        let cells = [Some(moved), pa, pb, pab];
        cells.iter().all(|&c| solid(c)) && cells.iter().any(|&c| off_target_box(c))
    })
}

fn reconstruct(board: &Board, nodes: &[Node], goal: usize) -> Vec<Direction> {
    let mut pushes = Vec::new();
    let mut id = goal;
    while let Some((parent, pusher, d)) = nodes[id].parent {
        pushes.push((parent, pusher, d));
        id = parent;
    }
    pushes.reverse();
    let mut moves = Vec::new();
    for (parent, pusher, d) in pushes {
        let node = &nodes[parent];
        moves.extend(walk(board, node.player, pusher, &node.boxes).expect("pusher reachable"));
        moves.push(d);
    }
    moves
}

fn walk(board: &Board, from: usize, to: usize, boxes: &[usize]) -> Option<Vec<Direction>> {
    let mut prev: Vec<Option<(usize, Direction)>> = vec![None; board.walls.len()];
    let mut seen = vec![false; board.walls.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(c) = queue.pop_front() {
        if c == to {
            let mut path = Vec::new();
            let mut cur = to;
            while let Some((p, d)) = prev[cur] {
                path.push(d);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for d in Direction::ALL {
            if let Some(m) = board.step(c, d) {
                if board.open(m) && !seen[m] && boxes.binary_search(&m).is_err() {
                    seen[m] = true;
                    prev[m] = Some((c, d));
                    queue.push_back(m);
                }
            }
        }
    }
    None
}

/// Shortest player walk from the current position to `to` that touches no box.
pub fn walk_path(state: &SokobanState, to: Cell) -> Option<Vec<Direction>> {
    let board = Board::new(state);
    let layout = state.layout();
    if !layout.in_bounds(to) || layout.is_wall(to) || state.has_box(to) {
        return None;
    }
    let mut boxes: Vec<usize> = state.boxes().iter().map(|&c| layout.index(c)).collect();
    boxes.sort_unstable();
    walk(&board, layout.index(state.player()), layout.index(to), &boxes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::parse_level;

    fn replay(state: &SokobanState, plan: &[Direction]) -> SokobanState {
        plan.iter().fold(state.clone(), |s, &d| s.apply(d).expect("plan step legal"))
    }

    #[test]
    fn single_push() {
        let s = parse_level("#####\n#@$.#\n#####\n").unwrap();
        assert_eq!(solve_sokoban(&s, 100), Some(vec![Direction::East]));
    }

    #[test]
    fn already_solved() {
        let s = parse_level("####\n#@*#\n####\n").unwrap();
        assert_eq!(solve_sokoban(&s, 10), Some(vec![]));
    }

    #[test]
    fn cornered_box_is_dead() {
        let s = parse_level("######\n#$   #\n#  @.#\n######\n").unwrap();
        assert_eq!(solve_sokoban(&s, 10_000), None);
    }

    #[test]
    fn needs_walk_around() {
        let s = parse_level("#######\n#     #\n# $ @ #\n#  .  #\n#######\n").unwrap();
        let plan = solve_sokoban(&s, 10_000).unwrap();
        assert!(replay(&s, &plan).is_solved());
    }

    #[test]
    fn box_order_differs_from_index_order() {
        // Boxes sorted by column put (3,6) before (5,5), the reverse of
        // their row-major indices.
        let s = parse_level(
            "##########\n###    ###\n##  #  ###\n##  @* ###\n## $.  ###\n##########\n",
        )
        .unwrap();
        let plan = solve_sokoban(&s, 200_000).unwrap();
        assert!(replay(&s, &plan).is_solved());
    }

    #[test]
    fn walk_avoids_boxes() {
        let s = parse_level("#####\n#@$ #\n#  .#\n#####\n").unwrap();
        let path = walk_path(&s, Cell::new(3, 1)).unwrap();
        assert_eq!(path.len(), 4);
        assert!(walk_path(&s, Cell::new(2, 1)).is_none());
    }
}
