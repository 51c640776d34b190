//! Load model for grasping a cylinder by wrapping.
//!
//! Each finger bends its proximal half by 90° out of plane and wraps its
//! distal half around the object with bend radius `R = L / π`. The object
//! weight is shared evenly by `n` fingers and spread uniformly over the
//! wrapped length, giving a line load `p = 2 m g / (n L)` acting at lever
//! distances `R ..= R + L/2` from the finger root.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::lock::{LockAssessment, LockStatus};
use crate::types::GraspScenario;
use crate::units::STANDARD_GRAVITY;

/// Rounded root-moment target for the 1.5 kg, three-finger, 200 mm case. The
/// exact closed form gives 0.5573 N·m; both are reported.
pub const DESIGN_TARGET_MOMENT: f64 = 0.6;

/// Share of the margin below which a feasible grasp is flagged as marginal.
pub const MARGINAL_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspRequirement {
    /// N/m.
    pub line_load: f64,
    /// N·m at the root joint.
    pub required_moment: f64,
    pub wrap_radius: f64,
}

/// p = 2 m g / (n L).
pub fn line_load(scenario: &GraspScenario) -> f64 {
    2.0 * scenario.mass * STANDARD_GRAVITY / (f64::from(scenario.finger_count) * scenario.finger_length)
}

/// R = L / π.
pub fn wrap_radius(finger_length: f64) -> f64 {
    finger_length / PI
}

/// m g L / n · (1/π + 1/4), the moment at the finger root.
pub fn required_root_moment(scenario: &GraspScenario) -> f64 {
    scenario.mass * STANDARD_GRAVITY * scenario.finger_length / f64::from(scenario.finger_count)
        * (1.0 / PI + 0.25)
}

pub fn requirement(scenario: &GraspScenario) -> GraspRequirement {
    GraspRequirement {
        line_load: line_load(scenario),
        required_moment: required_root_moment(scenario),
        wrap_radius: wrap_radius(scenario.finger_length),
    }
}

/// Moment of the wrap load about a point `position` metres from the root,
/// counting only load beyond that point: ∫ p (x − s) dx over
/// `max(R, s) ..= R + L/2`. Equals [`required_root_moment`] at `s = 0`.
pub fn moment_about(scenario: &GraspScenario, position: f64) -> f64 {
    let r = wrap_radius(scenario.finger_length);
    let end = r + 0.5 * scenario.finger_length;
    let start = r.max(position);
    if start >= end {
        return 0.0;
    }
    let p = line_load(scenario);
    0.5 * p * ((end - position) * (end - position) - (start - position) * (start - position))
}

/// Fraction of the root moment carried by joints at the given positions.
///
/// Zero-mass scenarios get the geometric shares of a unit load.
pub fn moment_shares(scenario: &GraspScenario, positions: &[f64]) -> Vec<f64> {
    let unit = GraspScenario {
        mass: 1.0,
        ..*scenario
    };
    let root = moment_about(&unit, 0.0);
    positions.iter().map(|&s| moment_about(&unit, s) / root).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// m_max − required moment; negative when infeasible.
    pub margin: f64,
    pub required_moment: f64,
    /// Feasible, but with less than [`MARGINAL_FRACTION`] of the requirement
    /// to spare.
    pub marginal: bool,
}

/// Compares lock capacity with the root moment the scenario needs.
/// `m_max == required` is feasible.
pub fn grasp_feasible(scenario: &GraspScenario, assessment: &LockAssessment) -> Feasibility {
    let required = required_root_moment(scenario);
    let margin = if assessment.status == LockStatus::AlwaysLocked {
        f64::INFINITY
    } else {
        assessment.m_max - required
    };
    let feasible = margin >= 0.0;
    Feasibility {
        feasible,
        margin,
        required_moment: required,
        marginal: feasible && margin < MARGINAL_FRACTION * required,
    }
}
