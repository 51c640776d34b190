//! Forward kinematics, joint limits and the wrap pose of the finger chain.
//!
//! The finger starts at the origin pointing along +z. Unit `i` translates by
//! one segment along its local z, then rotates about its local y (in-plane
//! bend), then about its local x (out-of-plane twist). Swapping the two
//! rotations in [`unit_transform`] changes the convention.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};

use crate::types::FingerSpec;

/// Angle slack used when comparing summed bends with a limit, rad.
pub const LIMIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LockState {
    #[default]
    Free,
    Engaged,
}

impl LockState {
    pub fn as_str(self) -> &'static str {
        match self {
            LockState::Free => "free",
            LockState::Engaged => "engaged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JointState {
    /// Rotation about the unit's y axis, rad.
    pub in_plane: f64,
    /// Rotation about the unit's x axis, rad.
    pub out_of_plane: f64,
    pub lock: LockState,
}

impl JointState {
    pub fn new(in_plane: f64, out_of_plane: f64) -> Self {
        Self {
            in_plane,
            out_of_plane,
            lock: LockState::Free,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KinematicsError {
    #[error("expected {expected} joint states, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}

/// Frames after each joint unit, base to tip.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPoses {
    pub frames: Vec<Isometry3<f64>>,
}

impl ChainPoses {
    /// Pose of the last frame.
    pub fn tip(&self) -> Isometry3<f64> {
        self.frames.last().copied().unwrap_or_else(Isometry3::identity)
    }
}

pub fn unit_transform(segment_length: f64, joint: &JointState) -> Isometry3<f64> {
    let translation = Translation3::new(0.0, 0.0, segment_length);
    let bend = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), joint.in_plane);
    let twist = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), joint.out_of_plane);
    Isometry3::from_parts(translation, bend * twist)
}

pub fn forward_kinematics(spec: &FingerSpec, joints: &[JointState]) -> Result<ChainPoses, KinematicsError> {
    if joints.len() != spec.joint_count {
        return Err(KinematicsError::LengthMismatch {
            expected: spec.joint_count,
            actual: joints.len(),
        });
    }
    let seg = spec.segment_length();
    let mut pose = Isometry3::identity();
    let frames = joints
        .iter()
        .map(|j| {
            pose *= unit_transform(seg, j);
            pose
        })
        .collect();
    Ok(ChainPoses { frames })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BendAxis {
    InPlane,
    OutOfPlane,
}

impl fmt::Display for BendAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BendAxis::InPlane => "in-plane",
            BendAxis::OutOfPlane => "out-of-plane",
        })
    }
}

/// Total bend about one axis exceeds its limit. `joint` is the first joint at
/// which the running sum crosses the limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitViolation {
    pub axis: BendAxis,
    pub joint: usize,
    pub total: f64,
    pub limit: f64,
}

impl fmt::Display for LimitViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} bend {:.4} deg exceeds limit {:.4} deg at joint {}",
            self.axis,
            self.total.to_degrees(),
            self.limit.to_degrees(),
            self.joint
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LimitViolations(pub Vec<LimitViolation>);

impl fmt::Display for LimitViolations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_axis(axis: BendAxis, limit: f64, angles: impl Iterator<Item = f64>) -> Option<LimitViolation> {
    let mut total = 0.0;
    let mut first_over = None;
    for (i, a) in angles.enumerate() {
        total += a.abs();
        if first_over.is_none() && total > limit + LIMIT_TOLERANCE {
            first_over = Some(i);
        }
    }
    first_over.map(|joint| LimitViolation {
        axis,
        joint,
        total,
        limit,
    })
}

/// Sums |in-plane| and |out-of-plane| angles over the chain and compares each
/// total with its limit. The bound is closed.
pub fn joint_limit_check(spec: &FingerSpec, joints: &[JointState]) -> Result<(), LimitViolations> {
    let v: Vec<_> = [
        check_axis(
            BendAxis::InPlane,
            spec.in_plane_limit,
            joints.iter().map(|j| j.in_plane),
        ),
        check_axis(
            BendAxis::OutOfPlane,
            spec.out_of_plane_limit,
            joints.iter().map(|j| j.out_of_plane),
        ),
    ]
    .into_iter()
    .flatten()
    .collect();
    if v.is_empty() {
        Ok(())
    } else {
        Err(LimitViolations(v))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WrapError {
    #[error("object radius {0} m must be positive")]
    NonPositiveRadius(f64),
    #[error("a wrap pose needs at least 2 joints, the finger has {0}")]
    TooFewJoints(usize),
    #[error("wrap pose exceeds joint limits: {violations}")]
    Infeasible {
        joints: Vec<JointState>,
        violations: LimitViolations,
    },
}

/// Number of proximal joints that take the out-of-plane bend; the rest wrap.
pub fn proximal_joint_count(joint_count: usize) -> usize {
    joint_count / 2
}

/// Joint angles for the wrap configuration: the proximal half of the joints
/// share a 90° out-of-plane bend and the distal half share the in-plane arc
/// that bends half the finger length around `object_radius`.
///
/// The distal arc subtends `(L/2) / object_radius` in total, split evenly so
/// it is exact for odd joint counts too.
pub fn wrap_pose(spec: &FingerSpec, object_radius: f64) -> Result<Vec<JointState>, WrapError> {
    if !(object_radius > 0.0) {
        return Err(WrapError::NonPositiveRadius(object_radius));
    }
    let k = spec.joint_count;
    if k < 2 {
        return Err(WrapError::TooFewJoints(k));
    }
    let proximal = proximal_joint_count(k);
    let distal = k - proximal;
    let twist = core::f64::consts::FRAC_PI_2 / proximal as f64;
    let arc = 0.5 * spec.total_length / object_radius / distal as f64;
    let joints: Vec<JointState> = (0..k)
        .map(|i| {
            if i < proximal {
                JointState::new(0.0, twist)
            } else {
                JointState::new(arc, 0.0)
            }
        })
        .collect();
    match joint_limit_check(spec, &joints) {
        Ok(()) => Ok(joints),
        Err(violations) => Err(WrapError::Infeasible { joints, violations }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::deg_to_rad;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn spec(k: usize) -> FingerSpec {
        FingerSpec {
            joint_count: k,
            ..FingerSpec::reference()
        }
    }

    #[test]
    fn straight_finger_reaches_total_length() {
        let s = spec(8);
        let p = forward_kinematics(&s, &[JointState::default(); 8]).unwrap();
        let t = p.tip().translation.vector;
        assert!((t - Vector3::new(0.0, 0.0, s.total_length)).norm() < 1e-15);
    }

    #[test]
    fn single_in_plane_quarter_turn() {
        let s = spec(1);
        let p = forward_kinematics(&s, &[JointState::new(FRAC_PI_2, 0.0)]).unwrap();
        let dir = p.tip().rotation * Vector3::z();
        assert!((dir - Vector3::x()).norm() < 1e-15);
        assert!(dir.y.abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert_eq!(
            forward_kinematics(&spec(3), &[JointState::default()]),
            Err(KinematicsError::LengthMismatch {
                expected: 3,
                actual: 1
            })
        );
    }

    #[test]
    fn limits_are_closed_bounds() {
        let s = spec(6);
        let at = |deg: f64| vec![JointState::new(deg_to_rad(deg / 6.0), 0.0); 6];
        assert_eq!(joint_limit_check(&s, &at(135.0)), Ok(()));
        let err = joint_limit_check(&s, &at(136.0)).unwrap_err();
        assert_eq!(err.0[0].axis, BendAxis::InPlane);
        assert_eq!(err.0[0].joint, 5);

        let twist = |deg: f64| vec![JointState::new(0.0, deg_to_rad(deg / 6.0)); 6];
        assert_eq!(joint_limit_check(&s, &twist(115.0)), Ok(()));
        let err = joint_limit_check(&s, &twist(120.0)).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].axis, BendAxis::OutOfPlane);
        assert_eq!(joint_limit_check(&s, &[JointState::default(); 6]), Ok(()));
    }

    #[test]
    fn negative_angles_count_by_magnitude() {
        let s = spec(2);
        let j = [
            JointState::new(deg_to_rad(-70.0), 0.0),
            JointState::new(deg_to_rad(70.0), 0.0),
        ];
        assert!(joint_limit_check(&s, &j).is_err());
    }

    #[test]
    fn wrap_at_natural_radius_is_a_quarter_arc() {
        for k in [2, 5, 8] {
            let s = spec(k);
            let joints = wrap_pose(&s, s.total_length / PI).unwrap();
            let arc: f64 = joints.iter().map(|j| j.in_plane).sum();
            let twist: f64 = joints.iter().map(|j| j.out_of_plane).sum();
            assert!((arc - FRAC_PI_2).abs() < 1e-12, "k={k}");
            assert!((twist - FRAC_PI_2).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn wrap_around_infinite_radius_is_straight() {
        let joints = wrap_pose(&spec(8), f64::INFINITY).unwrap();
        assert!(joints[4..].iter().all(|j| j.in_plane == 0.0));
    }

    #[test]
    fn tight_wrap_is_infeasible() {
        match wrap_pose(&spec(8), 0.01) {
            Err(WrapError::Infeasible { violations, .. }) => {
                assert_eq!(violations.0[0].axis, BendAxis::InPlane);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(wrap_pose(&spec(8), 0.0), Err(WrapError::NonPositiveRadius(0.0)));
        assert_eq!(wrap_pose(&spec(1), 0.1), Err(WrapError::TooFewJoints(1)));
    }
}
