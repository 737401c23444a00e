//! Damped-least-squares reaching for the planar arm.

use thiserror::Error;

use crate::physics::{Arm, PhysicsParams, TouchPad, Vec2};

pub const DLS_DAMPING: f64 = 0.1;
/// Fraction of the remaining error removed per control step.
const REACH_GAIN: f64 = 0.6;
/// Press only once the effector is this deep inside the pad (fraction of
/// the half extent), leaving room for drift during the step.
const PRESS_MARGIN: f64 = 0.6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReachError {
    #[error("pad {pad} at distance {distance:.3} is beyond reach {reach:.3}")]
    Unreachable { pad: usize, distance: f64, reach: f64 },
}

/// Joint deltas moving the effector by `e`: J^T (J J^T + lambda^2 I)^-1 e.
pub fn dls_step(arm: &Arm, e: Vec2, damping: f64) -> [f64; 3] {
    let j = arm.config.jacobian();
    let l2 = damping * damping;
    // J J^T is 2x2 symmetric.
    let (mut a, mut b, mut d) = (l2, 0.0, l2);
    for c in &j {
        a += c.x * c.x;
        b += c.x * c.y;
        d += c.y * c.y;
    }
    let det = a * d - b * b;
    let y = Vec2::new((d * e.x - b * e.y) / det, (a * e.y - b * e.x) / det);
    [j[0].dot(y), j[1].dot(y), j[2].dot(y)]
}

fn inside(pad: &TouchPad, p: Vec2, margin: f64) -> bool {
    let o = p - pad.center;
    o.x.abs() < pad.half_extent.x * margin && o.y.abs() < pad.half_extent.y * margin
}

/// One control step toward `pad`: three joint commands plus press.
pub fn arm_reach(arm: &Arm, pad: &TouchPad, params: &PhysicsParams) -> Result<[f64; 4], ReachError> {
    let reach = arm.config.reach();
    let distance = (pad.center - arm.base).length();
    if distance > reach {
        return Err(ReachError::Unreachable { pad: pad.id, distance, reach });
    }
    let ee = arm.effector();
    let e = (pad.center - ee) * REACH_GAIN;
    let dq = dls_step(arm, e, DLS_DAMPING);
    let full = params.arm_joint_speed * params.control_dt;
    let peak = dq.iter().fold(0.0f64, |m, q| m.max(q.abs()));
    let scale = if peak > full { full / peak } else { 1.0 };
    let mut u = [0.0; 4];
    for k in 0..3 {
        u[k] = (dq[k] * scale / full).clamp(-1.0, 1.0);
    }
    if inside(pad, ee, PRESS_MARGIN) {
        u[3] = 1.0;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{ArmConfig, PadMove};

    fn arm() -> Arm {
        let mut cfg = ArmConfig::new([0.3, 0.3, 0.1]);
        cfg.joint_angles = [1.2, 0.4, -0.3];
        Arm { base: Vec2::ZERO, config: cfg }
    }

    fn pad(center: Vec2) -> TouchPad {
        TouchPad { id: 0, center, half_extent: Vec2::new(0.045, 0.045), bound_move: PadMove::Point(0) }
    }

    #[test]
    fn press_only_when_over_pad() {
        let a = arm();
        let u = arm_reach(&a, &pad(a.effector()), &PhysicsParams::default()).unwrap();
        assert_eq!(u[3], 1.0);
        assert!(u[..3].iter().all(|q| q.abs() < 1e-9));
        let far = arm_reach(&a, &pad(Vec2::new(0.0, 0.3)), &PhysicsParams::default()).unwrap();
        assert_eq!(far[3], 0.0);
    }

    #[test]
    fn unreachable_pad_fails() {
        assert!(arm_reach(&arm(), &pad(Vec2::new(0.0, 0.9)), &PhysicsParams::default()).is_err());
    }

    #[test]
    fn dls_moves_effector_toward_goal() {
        let a = arm();
        let e = Vec2::new(0.01, -0.02);
        let dq = dls_step(&a, e, DLS_DAMPING);
        let mut b = a.clone();
        for k in 0..3 {
            b.config.joint_angles[k] += dq[k];
        }
        let moved = b.effector() - a.effector();
        assert!(moved.dot(e) > 0.0);
        assert!((moved - e).length() < e.length());
    }
}
