//! Kinematic planar arm: three revolute joints plus a press actuator.
//!
//! The press stands in for vertical reach: a touch only counts while the
//! press level is at or above the world's press threshold.

use std::f64::consts::PI;

use super::Vec2;

/// Joint state of the arm. Angles are relative to the previous link.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmConfig {
    pub joint_angles: [f64; 3],
    pub joint_velocities: [f64; 3],
    pub press: f64,
    pub link_lengths: [f64; 3],
}

impl ArmConfig {
    pub fn new(link_lengths: [f64; 3]) -> Self {
        Self {
            joint_angles: [0.0; 3],
            joint_velocities: [0.0; 3],
            press: 0.0,
            link_lengths,
        }
    }

    pub fn reach(&self) -> f64 {
        self.link_lengths.iter().sum()
    }

    /// Positions of shoulder, elbow, wrist and end effector relative to the base.
    pub fn joint_positions(&self) -> [Vec2; 4] {
        let mut out = [Vec2::ZERO; 4];
        let mut angle = 0.0;
        for i in 0..3 {
            angle += self.joint_angles[i];
            out[i + 1] = out[i] + Vec2::from_angle(angle) * self.link_lengths[i];
        }
        out
    }

    /// Columns of the 2x3 positional Jacobian of the end effector.
    pub fn jacobian(&self) -> [Vec2; 3] {
        let joints = self.joint_positions();
        let ee = joints[3];
        [
            (ee - joints[0]).perp(),
            (ee - joints[1]).perp(),
            (ee - joints[2]).perp(),
        ]
    }
}

/// End-effector position relative to the arm base: cumulative angle sums
/// times link lengths, summed along the chain.
pub fn arm_forward_kinematics(arm: &ArmConfig) -> Vec2 {
    arm.joint_positions()[3]
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

/// Arm mounted at a fixed base in the world.
#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub base: Vec2,
    pub config: ArmConfig,
}

impl Arm {
    pub fn effector(&self) -> Vec2 {
        self.base + arm_forward_kinematics(&self.config)
    }

    pub fn world_joints(&self) -> [Vec2; 4] {
        self.config.joint_positions().map(|p| p + self.base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec2, b: Vec2) -> bool {
        (a - b).length() < 1e-12
    }

    #[test]
    fn straight_arm_reaches_sum_of_links() {
        let arm = ArmConfig::new([0.3, 0.3, 0.1]);
        assert!(close(arm_forward_kinematics(&arm), Vec2::new(0.7, 0.0)));
    }

    #[test]
    fn shoulder_quarter_turn() {
        let mut arm = ArmConfig::new([0.3, 0.3, 0.1]);
        arm.joint_angles[0] = PI / 2.0;
        assert!(close(arm_forward_kinematics(&arm), Vec2::new(0.0, 0.7)));
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(0.25) - 0.25).abs() < 1e-15);
    }
}
