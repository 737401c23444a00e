use super::{Body, Bounds, PhysicsWorld, Vec2};

/// Separation needed to pull two bodies apart. `normal` points from the
/// first body toward the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub normal: Vec2,
    pub depth: f64,
}

/// Overlap between two solid bodies, or `None` when they are apart or
/// merely touching.
pub fn overlap(a: &Body, b: &Body) -> Option<Contact> {
    match (a.kind.is_round(), b.kind.is_round()) {
        (true, true) => circle_circle(a.position, a.half_extent, b.position, b.half_extent),
        (true, false) => circle_square(a.position, a.half_extent, b.position, b.half_extent),
        (false, true) => circle_square(b.position, b.half_extent, a.position, a.half_extent)
            .map(|c| Contact { normal: -c.normal, depth: c.depth }),
        (false, false) => square_square(a.position, a.half_extent, b.position, b.half_extent),
    }
}

fn circle_circle(c1: Vec2, r1: f64, c2: Vec2, r2: f64) -> Option<Contact> {
    let d = c2 - c1;
    let dist = d.length();
    let depth = r1 + r2 - dist;
    (depth > 0.0).then(|| Contact {
        normal: d.normalized_or(Vec2::new(1.0, 0.0)),
        depth,
    })
}

fn circle_square(c: Vec2, r: f64, b: Vec2, h: f64) -> Option<Contact> {
    let rel = c - b;
    let clamped = Vec2::new(rel.x.clamp(-h, h), rel.y.clamp(-h, h));
    if clamped != rel {
        // Center outside the square: push along the closest-point direction.
        let away = rel - clamped;
        let dist = away.length();
        let depth = r - dist;
        return (depth > 0.0).then(|| Contact {
            normal: -(away / dist),
            depth,
        });
    }
    let px = h - rel.x.abs();
    let py = h - rel.y.abs();
    if px < py {
        let s = if rel.x >= 0.0 { 1.0 } else { -1.0 };
        Some(Contact { normal: Vec2::new(-s, 0.0), depth: r + px })
    } else {
        let s = if rel.y >= 0.0 { 1.0 } else { -1.0 };
        Some(Contact { normal: Vec2::new(0.0, -s), depth: r + py })
    }
}

fn square_square(a: Vec2, ha: f64, b: Vec2, hb: f64) -> Option<Contact> {
    let d = b - a;
    let px = ha + hb - d.x.abs();
    let py = ha + hb - d.y.abs();
    if px <= 0.0 || py <= 0.0 {
        return None;
    }
    if px < py {
        let s = if d.x >= 0.0 { 1.0 } else { -1.0 };
        Some(Contact { normal: Vec2::new(s, 0.0), depth: px })
    } else {
        let s = if d.y >= 0.0 { 1.0 } else { -1.0 };
        Some(Contact { normal: Vec2::new(0.0, s), depth: py })
    }
}

/// Uniform grid over the world bounds listing the static bodies that touch
/// each cell. Statics never move, so it is built once.
#[derive(Debug, Clone, Default)]
pub(super) struct StaticIndex {
    origin: Vec2,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
}

const INDEX_CELL: f64 = 1.0;

impl StaticIndex {
    pub(super) fn build(bodies: &[Body], bounds: Bounds) -> Self {
        let origin = bounds.min;
        let cols = (((bounds.max.x - bounds.min.x) / INDEX_CELL).ceil() as usize).max(1);
        let rows = (((bounds.max.y - bounds.min.y) / INDEX_CELL).ceil() as usize).max(1);
        let mut index = Self {
            origin,
            cols,
            rows,
            cells: vec![Vec::new(); cols * rows],
        };
        for (i, b) in bodies.iter().enumerate() {
            if b.movable() {
                continue;
            }
            let (c0, r0, c1, r1) = index.span(b.position, b.half_extent);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    index.cells[r * cols + c].push(i as u32);
                }
            }
        }
        index
    }

    fn span(&self, p: Vec2, h: f64) -> (usize, usize, usize, usize) {
        let to_cell = |v: f64, o: f64, n: usize| -> usize {
            (((v - o) / INDEX_CELL).floor().max(0.0) as usize).min(n - 1)
        };
        (
            to_cell(p.x - h, self.origin.x, self.cols),
            to_cell(p.y - h, self.origin.y, self.rows),
            to_cell(p.x + h, self.origin.x, self.cols),
            to_cell(p.y + h, self.origin.y, self.rows),
        )
    }

    /// Static bodies whose cells intersect the square around `p`, deduplicated
    /// and in ascending index order.
    fn near(&self, p: Vec2, h: f64, out: &mut Vec<u32>) {
        out.clear();
        if self.cells.is_empty() {
            return;
        }
        let (c0, r0, c1, r1) = self.span(p, h);
        for r in r0..=r1 {
            for c in c0..=c1 {
                out.extend_from_slice(&self.cells[r * self.cols + c]);
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

const PUSH_ITERATIONS: usize = 4;
const YIELD_ITERATIONS: usize = 4;

fn yield_walker(body: &mut Body, c: Contact) {
    body.position -= c.normal * c.depth;
    let into = body.velocity.dot(c.normal);
    if into > 0.0 {
        body.velocity -= c.normal * into;
    }
}

/// One substep of contact resolution. Returns the summed contact depth
/// resolved against the walker.
///
/// When `start` holds the (valid) positions from the beginning of the
/// substep, any body still overlapping after projection is reverted to its
/// start position, which restores the non-penetration invariant exactly.
pub(super) fn resolve(world: &mut PhysicsWorld, start: Option<&[Vec2]>, dt: f64) -> f64 {
    let tol = world.params.tolerance;
    let walker = world.walker_index();
    let boxes: Vec<usize> = (0..world.bodies.len())
        .filter(|&i| world.bodies[i].kind == super::BodyKind::Box)
        .collect();
    let mut pushed = vec![false; world.bodies.len()];
    let mut near = Vec::new();
    let mut touch = 0.0;

    for iter in 0..PUSH_ITERATIONS {
        let mut any = false;
        if let Some(w) = walker {
            for &b in &boxes {
                if let Some(c) = overlap(&world.bodies[w], &world.bodies[b]) {
                    any = true;
                    if iter == 0 {
                        touch += c.depth;
                    }
                    if world.bodies[w].velocity.dot(c.normal) > 0.0 {
                        world.bodies[b].position += c.normal * c.depth;
                        pushed[b] = true;
                    } else {
                        yield_walker(&mut world.bodies[w], c);
                    }
                }
            }
        }
        for (k, &i) in boxes.iter().enumerate() {
            for &j in &boxes[k + 1..] {
                if let Some(c) = overlap(&world.bodies[i], &world.bodies[j]) {
                    any = true;
                    match (pushed[i], pushed[j]) {
                        (true, false) => world.bodies[j].position += c.normal * c.depth,
                        (false, true) => world.bodies[i].position -= c.normal * c.depth,
                        _ => {
                            world.bodies[i].position -= c.normal * (0.5 * c.depth);
                            world.bodies[j].position += c.normal * (0.5 * c.depth);
                        }
                    }
                    pushed[i] = true;
                    pushed[j] = true;
                }
            }
        }
        for &b in &boxes {
            let (p, h) = (world.bodies[b].position, world.bodies[b].half_extent);
            world.statics.near(p, h, &mut near);
            for &s in &near {
                if let Some(c) = overlap(&world.bodies[b], &world.bodies[s as usize]) {
                    any = true;
                    world.bodies[b].position -= c.normal * c.depth;
                }
            }
        }
        if let Some(w) = walker {
            any |= walker_vs_statics(world, w, &mut near, iter == 0, &mut touch);
        }
        if !any {
            break;
        }
    }

    if let Some(w) = walker {
        for _ in 0..YIELD_ITERATIONS {
            let mut any = false;
            for &b in &boxes {
                if let Some(c) = overlap(&world.bodies[w], &world.bodies[b]) {
                    if c.depth > 0.0 {
                        any = true;
                        yield_walker(&mut world.bodies[w], c);
                    }
                }
            }
            any |= walker_vs_statics(world, w, &mut near, false, &mut touch);
            if !any {
                break;
            }
        }
    }

    if let Some(start) = start {
        revert_violations(world, start, tol, &mut near);
        for &b in &boxes {
            let moved = world.bodies[b].position - start[b];
            world.bodies[b].velocity = moved / dt;
        }
    }
    touch
}

fn walker_vs_statics(
    world: &mut PhysicsWorld,
    w: usize,
    near: &mut Vec<u32>,
    count_touch: bool,
    touch: &mut f64,
) -> bool {
    let mut any = false;
    let (p, h) = (world.bodies[w].position, world.bodies[w].half_extent);
    world.statics.near(p, h, near);
    for &s in near.iter() {
        if let Some(c) = overlap(&world.bodies[w], &world.bodies[s as usize]) {
            any = true;
            if count_touch {
                *touch += c.depth;
            }
            yield_walker(&mut world.bodies[w], c);
        }
    }
    any
}

fn revert_violations(world: &mut PhysicsWorld, start: &[Vec2], tol: f64, near: &mut Vec<u32>) {
    let movers: Vec<usize> = (0..world.bodies.len())
        .filter(|&i| world.bodies[i].movable())
        .collect();
    loop {
        let mut changed = false;
        for (k, &i) in movers.iter().enumerate() {
            let (p, h) = (world.bodies[i].position, world.bodies[i].half_extent);
            world.statics.near(p, h, near);
            let hits_static = near.iter().any(|&s| {
                overlap(&world.bodies[i], &world.bodies[s as usize]).is_some_and(|c| c.depth > tol)
            });
            if hits_static && world.bodies[i].position != start[i] {
                world.bodies[i].position = start[i];
                world.bodies[i].velocity = Vec2::ZERO;
                changed = true;
            }
            for &j in &movers[k + 1..] {
                let bad = overlap(&world.bodies[i], &world.bodies[j]).is_some_and(|c| c.depth > tol);
                if !bad {
                    continue;
                }
                for m in [i, j] {
                    if world.bodies[m].position != start[m] {
                        world.bodies[m].position = start[m];
                        world.bodies[m].velocity = Vec2::ZERO;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}
