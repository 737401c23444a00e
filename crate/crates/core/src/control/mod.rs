//! Scripted controllers: motor primitives that realize abstract moves in the
//! physical scenes, and closed-loop agents built on them.

mod arm;
mod mujoban;
mod oracle;

pub use arm::{arm_reach, dls_step, ReachError, DLS_DAMPING};
pub use mujoban::{
    box_centered, mujoban_primitive, navigate_control, push_control, PrimitiveError, PrimitiveStatus,
    ARRIVAL_TOLERANCE, BOX_CENTER_TOLERANCE,
};
pub use oracle::{MotorPlan, OracleAgent, Phase, RandomAgent, PRIMITIVE_TIMEOUT};
