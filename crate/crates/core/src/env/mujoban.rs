//! Mujoban scene construction and abstract-state estimation.
//!
//! Cell (x, y) is centered at world (x, y) with unit spacing; y grows
//! southward (row 0 is the top of the level).

use crate::games::{Cell, SokobanState};
use crate::physics::{Body, BodyKind, Bounds, Marker, MarkerKind, PhysicsParams, PhysicsWorld, Vec2};

pub const WALL_HALF: f64 = 0.5;
pub const BOX_HALF: f64 = 0.35;
pub const WALKER_RADIUS: f64 = 0.25;
pub const PEG_RADIUS: f64 = 0.08;
pub const TARGET_RADIUS: f64 = 0.3;

pub fn cell_center(c: Cell) -> Vec2 {
    Vec2::new(c.x as f64, c.y as f64)
}

/// Nearest cell to a world position.
pub fn nearest_cell(p: Vec2) -> Cell {
    Cell::new(p.x.round() as i32, p.y.round() as i32)
}

/// Body indices of the dynamic Mujoban bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct MujobanBodies {
    /// One per box, in the level's initial box order.
    pub boxes: Vec<usize>,
    pub walker: usize,
}

/// Builds the physical scene for `level`: wall blocks, optional pegs at
/// interior grid intersections, boxes centered on their cells and the walker
/// on the player cell.
pub fn build_world(level: &SokobanState, pegs: bool, params: PhysicsParams) -> (PhysicsWorld, MujobanBodies) {
    let layout = level.layout();
    let mut bodies = Vec::new();
    for c in layout.walls() {
        bodies.push(Body::new(bodies.len(), BodyKind::Wall, cell_center(c), WALL_HALF));
    }
    if pegs {
        for y in 0..level.height() - 1 {
            for x in 0..level.width() - 1 {
                let quad = [Cell::new(x, y), Cell::new(x + 1, y), Cell::new(x, y + 1), Cell::new(x + 1, y + 1)];
                if quad.iter().all(|&c| !layout.is_wall(c)) {
                    let at = Vec2::new(x as f64 + 0.5, y as f64 + 0.5);
                    bodies.push(Body::new(bodies.len(), BodyKind::Peg, at, PEG_RADIUS));
                }
            }
        }
    }
    let mut boxes = Vec::new();
    for &b in level.boxes() {
        boxes.push(bodies.len());
        bodies.push(Body::new(bodies.len(), BodyKind::Box, cell_center(b), BOX_HALF));
    }
    let walker = bodies.len();
    bodies.push(Body::new(walker, BodyKind::WalkerDisc, cell_center(level.player()), WALKER_RADIUS));
    let bounds = Bounds {
        min: Vec2::new(-0.5, -0.5),
        max: Vec2::new(level.width() as f64 - 0.5, level.height() as f64 - 0.5),
    };
    let mut world = PhysicsWorld::new(bodies, bounds, params);
    world.markers = layout
        .targets()
        .into_iter()
        .map(|c| Marker { kind: MarkerKind::Target, position: cell_center(c), radius: TARGET_RADIUS })
        .collect();
    (world, MujobanBodies { boxes, walker })
}

/// Snaps the physical scene onto the grid.
///
/// Boxes are estimated first, in body order. A box keeps its previous cell
/// when its nearest cell is a wall or already claimed by an earlier box; if
/// that cell is taken too, it goes to the closest unclaimed floor cell. The
/// player then snaps to its nearest cell unless that cell holds a wall or a
/// box, in which case it keeps its previous cell (or, if a box now sits
/// there, moves to the closest free floor cell).
///
/// Returns the per-body box cells and the estimated state.
pub fn estimate_abstract_state(
    prev: &SokobanState,
    prev_box_cells: &[Cell],
    world: &PhysicsWorld,
    bodies: &MujobanBodies,
) -> (Vec<Cell>, SokobanState) {
    let layout = prev.layout();
    let floor = |c: Cell| layout.in_bounds(c) && !layout.is_wall(c);
    let mut claimed: Vec<Cell> = Vec::with_capacity(bodies.boxes.len());
    for (k, &bi) in bodies.boxes.iter().enumerate() {
        let p = world.bodies[bi].position;
        let near = nearest_cell(p);
        let cell = if floor(near) && !claimed.contains(&near) {
            near
        } else if !claimed.contains(&prev_box_cells[k]) {
            prev_box_cells[k]
        } else {
            closest_free(layout.cells().filter(|&c| floor(c) && !claimed.contains(&c)), p)
                .expect("more floor cells than boxes")
        };
        claimed.push(cell);
    }
    let wp = world.bodies[bodies.walker].position;
    let near = nearest_cell(wp);
    let player = if floor(near) && !claimed.contains(&near) {
        near
    } else if !claimed.contains(&prev.player()) {
        prev.player()
    } else {
        closest_free(layout.cells().filter(|&c| floor(c) && !claimed.contains(&c)), wp)
            .expect("a free floor cell remains")
    };
    let state = prev.with_dynamic(claimed.clone(), player);
    (claimed, state)
}

fn closest_free(cells: impl Iterator<Item = Cell>, p: Vec2) -> Option<Cell> {
    cells.min_by(|a, b| {
        let da = (cell_center(*a) - p).length_squared();
        let db = (cell_center(*b) - p).length_squared();
        da.total_cmp(&db).then(a.cmp(b))
    })
}

/// Whether `next` follows from `prev` by one legal Sokoban move.
pub fn is_single_legal_move(prev: &SokobanState, next: &SokobanState) -> bool {
    prev.legal_actions().into_iter().any(|d| {
        let s = prev.apply(d).expect("legal action");
        s.player() == next.player() && s.boxes() == next.boxes()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::parse_level;

    fn level() -> SokobanState {
        parse_level("######\n#    #\n# @$.#\n#    #\n######\n").unwrap()
    }

    #[test]
    fn identity_on_centers() {
        let l = level();
        let (world, bodies) = build_world(&l, true, PhysicsParams::default());
        let (cells, est) = estimate_abstract_state(&l, l.boxes(), &world, &bodies);
        assert_eq!(cells, l.boxes());
        assert_eq!(est, l);
    }

    #[test]
    fn rounds_boxes() {
        let l = level();
        let (mut world, bodies) = build_world(&l, false, PhysicsParams::default());
        world.bodies[bodies.boxes[0]].position = Vec2::new(1.9, 3.1);
        let (cells, _) = estimate_abstract_state(&l, l.boxes(), &world, &bodies);
        assert_eq!(cells[0], Cell::new(2, 3));
    }

    #[test]
    fn player_on_box_keeps_previous() {
        let l = level();
        let (mut world, bodies) = build_world(&l, false, PhysicsParams::default());
        world.bodies[bodies.walker].position = Vec2::new(2.8, 2.0);
        let (_, est) = estimate_abstract_state(&l, l.boxes(), &world, &bodies);
        assert_eq!(est.player(), l.player());
    }

    #[test]
    fn pegs_only_at_open_intersections() {
        let l = level();
        let (world, _) = build_world(&l, true, PhysicsParams::default());
        let pegs = world.bodies.iter().filter(|b| b.kind == BodyKind::Peg).count();
        // Interior is 4x3 cells, so 3x2 intersections.
        assert_eq!(pegs, 6);
    }
}
