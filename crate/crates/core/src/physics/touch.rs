use serde::{Deserialize, Serialize};

use super::Vec2;

/// Abstract move a pad is bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PadMove {
    /// Board point in row-major order.
    Point(usize),
    Pass,
}

/// Invisible axis-aligned touch region on the board.
#[derive(Debug, Clone, PartialEq)]
pub struct TouchPad {
    pub id: usize,
    pub center: Vec2,
    pub half_extent: Vec2,
    pub bound_move: PadMove,
}

impl TouchPad {
    /// Min edges inclusive, max edges exclusive, so adjacent pads never both match.
    pub fn contains(&self, p: Vec2) -> bool {
        let min = self.center - self.half_extent;
        let max = self.center + self.half_extent;
        p.x >= min.x && p.x < max.x && p.y >= min.y && p.y < max.y
    }
}

/// Returns the pad containing `effector` if the press level reaches the threshold.
pub fn detect_pad_touch(
    effector: Vec2,
    press: f64,
    pads: &[TouchPad],
    press_threshold: f64,
) -> Option<usize> {
    if press < press_threshold {
        return None;
    }
    pads.iter().find(|p| p.contains(effector)).map(|p| p.id)
}
