//! Software top-down orthographic renderer with a fixed palette.

use super::{BodyKind, MarkerKind, PhysicsWorld, Vec2};

pub const DEFAULT_IMAGE_SIZE: usize = 96;

pub const FLOOR: [u8; 3] = [214, 206, 188];
pub const WALL: [u8; 3] = [128, 128, 128];
pub const AGENT: [u8; 3] = [40, 90, 230];
pub const LEFT_EAR: [u8; 3] = [0, 0, 140];
pub const RIGHT_EAR: [u8; 3] = [230, 20, 20];
pub const BOX: [u8; 3] = [235, 200, 30];
pub const TARGET: [u8; 3] = [200, 40, 40];
pub const PEG: [u8; 3] = [60, 60, 60];
pub const BLACK_STONE: [u8; 3] = [15, 15, 15];
pub const WHITE_STONE: [u8; 3] = [250, 250, 250];
pub const CROSS: [u8; 3] = [120, 20, 120];
pub const NOUGHT: [u8; 3] = [20, 120, 60];
pub const ARM: [u8; 3] = [240, 140, 30];

const EAR_OFFSET: f64 = 0.72;
const EAR_RADIUS: f64 = 0.28;

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&color);
        }
        Self { width, height, data }
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    fn set(&mut self, x: usize, y: usize, c: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&c);
    }

    /// Binary PPM (P6) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    /// Pixel coordinates holding `color`.
    pub fn pixels_of(&self, color: [u8; 3]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) == color {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

struct Canvas {
    img: RgbImage,
    origin: Vec2,
    scale: f64,
}

impl Canvas {
    fn world_of(&self, px: usize, py: usize) -> Vec2 {
        self.origin + Vec2::new((px as f64 + 0.5) / self.scale, (py as f64 + 0.5) / self.scale)
    }

    fn fill(&mut self, center: Vec2, reach: f64, color: [u8; 3], inside: impl Fn(Vec2) -> bool) {
        let lo = (center - Vec2::new(reach, reach) - self.origin) * self.scale;
        let hi = (center + Vec2::new(reach, reach) - self.origin) * self.scale;
        let x0 = lo.x.floor().max(0.0) as usize;
        let y0 = lo.y.floor().max(0.0) as usize;
        let x1 = (hi.x.ceil().max(0.0) as usize).min(self.img.width);
        let y1 = (hi.y.ceil().max(0.0) as usize).min(self.img.height);
        for py in y0..y1 {
            for px in x0..x1 {
                if inside(self.world_of(px, py) - center) {
                    self.img.set(px, py, color);
                }
            }
        }
    }

    fn disc(&mut self, c: Vec2, r: f64, color: [u8; 3]) {
        self.fill(c, r, color, |d| d.length_squared() <= r * r);
    }

    fn square(&mut self, c: Vec2, h: f64, color: [u8; 3]) {
        self.fill(c, h, color, |d| d.x.abs() <= h && d.y.abs() <= h);
    }

    fn segment(&mut self, a: Vec2, b: Vec2, half_width: f64, color: [u8; 3]) {
        let mid = (a + b) * 0.5;
        let reach = (b - a).length() * 0.5 + half_width;
        let (ra, rb) = (a - mid, b - mid);
        self.fill(mid, reach, color, |d| {
            let ab = rb - ra;
            let t = ((d - ra).dot(ab) / ab.length_squared().max(1e-12)).clamp(0.0, 1.0);
            (d - (ra + ab * t)).length() <= half_width
        });
    }
}

/// Renders the world seen from above into a `size` x `size` image.
///
/// Panics if `size < 16`.
pub fn rasterize_topdown(world: &PhysicsWorld, size: usize) -> RgbImage {
    assert!(size >= 16, "image size must be at least 16 pixels");
    let span = world.bounds.max - world.bounds.min;
    let extent = span.x.max(span.y).max(1e-9);
    let mut cv = Canvas {
        img: RgbImage::filled(size, size, FLOOR),
        origin: world.bounds.min,
        scale: size as f64 / extent,
    };

    for b in world.bodies.iter().filter(|b| b.kind == BodyKind::Wall) {
        cv.square(b.position, b.half_extent, WALL);
    }
    for m in world.markers.iter().filter(|m| m.kind == MarkerKind::Target) {
        cv.square(m.position, m.radius, TARGET);
    }
    for b in world.bodies.iter().filter(|b| b.kind == BodyKind::Peg) {
        cv.disc(b.position, b.half_extent, PEG);
    }
    for b in world.bodies.iter().filter(|b| b.kind == BodyKind::Box) {
        cv.square(b.position, b.half_extent, BOX);
    }
    for b in world.bodies.iter().filter(|b| b.kind == BodyKind::WalkerDisc) {
        cv.disc(b.position, b.half_extent, AGENT);
        let forward = Vec2::from_angle(b.heading);
        // Image y points south, so the walker's left is the negative quarter turn.
        let left = Vec2::new(forward.y, -forward.x);
        let offset = b.half_extent * EAR_OFFSET;
        let r = b.half_extent * EAR_RADIUS;
        cv.disc(b.position + left * offset, r, LEFT_EAR);
        cv.disc(b.position - left * offset, r, RIGHT_EAR);
    }
    for m in &world.markers {
        let r = m.radius;
        match m.kind {
            MarkerKind::Target => {}
            MarkerKind::BlackStone => cv.disc(m.position, r, BLACK_STONE),
            MarkerKind::WhiteStone => cv.disc(m.position, r, WHITE_STONE),
            MarkerKind::Cross => {
                let w = r * 0.25;
                cv.fill(m.position, r, CROSS, move |d| {
                    d.x.abs() <= r && d.y.abs() <= r && (d.x - d.y).abs().min((d.x + d.y).abs()) <= w
                });
            }
            MarkerKind::Nought => {
                let inner = r * 0.6;
                cv.fill(m.position, r, NOUGHT, move |d| {
                    let l = d.length_squared();
                    l <= r * r && l >= inner * inner
                });
            }
        }
    }
    if let Some(arm) = &world.arm {
        let joints = arm.world_joints();
        let w = 0.008;
        for k in 0..3 {
            cv.segment(joints[k], joints[k + 1], w, ARM);
        }
        cv.disc(joints[3], w * 2.5, ARM);
    }
    cv.img
}
