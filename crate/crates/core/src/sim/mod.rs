//! Finger chain kinematics, pressure lag and the quasi-static grasp sequence.

pub mod dynamics;
pub mod kinematics;
pub mod sequence;

pub use dynamics::{pressure_step, rise_time_10_90, PressureTrace, StepError};
pub use kinematics::{
    forward_kinematics, joint_limit_check, wrap_pose, BendAxis, ChainPoses, JointState, LimitViolation,
    LimitViolations, LockState, WrapError,
};
pub use sequence::{
    lock_state_update, simulate_grasp_sequence, JointStatus, Phase, PhaseKind, SimError, SimParams, SimState,
    SlipEvent, Timeline, TimelineEntry,
};
