//! Domain value types shared by the analysis modules, and their validation.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use crate::units::{deg_to_rad, mm_to_m, mpa_to_pa};

/// A single failed invariant.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("{field} = {value} violates {requirement}")]
    OutOfRange {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    /// cos θ − μ sin θ ≤ 0: the interlock never releases, whatever the
    /// pressing force.
    #[error("always locked: cos(theta) - mu*sin(theta) = {locking_margin} is not positive")]
    AlwaysLocked { locking_margin: f64 },
}

impl Violation {
    pub fn is_always_locked(&self) -> bool {
        matches!(self, Violation::AlwaysLocked { .. })
    }
}

/// Every invariant a value failed, in field order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Violations(pub Vec<Violation>);

impl Violations {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Violation> {
        self.0.iter()
    }

    /// True when the only problems are the always-locked condition.
    pub fn only_always_locked(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(Violation::is_always_locked)
    }

    fn check(&mut self, ok: bool, field: &'static str, requirement: &'static str, value: f64) {
        if !ok {
            self.0.push(Violation::OutOfRange {
                field,
                requirement,
                value,
            });
        }
    }

    fn into_result(self) -> Result<(), Violations> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for Violations {
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

impl core::error::Error for Violations {}

/// Protrusion geometry and friction of one joint unit's locking interface.
///
/// `a` and `b` are the width and height of the protrusion top surface, `r1`
/// the offset from the joint axis to the surface's local origin and `theta`
/// the protrusion inclination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockGeometry {
    pub theta: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub r1: f64,
    pub protrusion_count: u32,
}

impl LockGeometry {
    /// Illustrative geometry used by the example configs. These are not
    /// measured values of any built joint.
    pub fn placeholder() -> Self {
        Self {
            theta: deg_to_rad(30.0),
            mu: 0.55,
            a: mm_to_m(4.0),
            b: mm_to_m(3.0),
            r1: mm_to_m(5.0),
            protrusion_count: 4,
        }
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    /// cos θ − μ sin θ. Positive for a releasable lock.
    pub fn locking_margin(&self) -> f64 {
        locking_margin(self.theta, self.mu)
    }
}

pub(crate) fn locking_margin(theta: f64, mu: f64) -> f64 {
    libm::cos(theta) - mu * libm::sin(theta)
}

/// Range checks only, without the always-locked condition.
pub(crate) fn geometry_range_violations(geom: &LockGeometry) -> Violations {
    let mut v = Violations::default();
    v.check(
        geom.theta > 0.0 && geom.theta < FRAC_PI_2,
        "theta",
        "0 < theta < pi/2",
        geom.theta,
    );
    v.check(geom.mu > 0.0 && geom.mu.is_finite(), "mu", "mu > 0", geom.mu);
    v.check(geom.a > 0.0 && geom.a.is_finite(), "a", "a > 0", geom.a);
    v.check(geom.b > 0.0 && geom.b.is_finite(), "b", "b > 0", geom.b);
    v.check(geom.r1 >= 0.0 && geom.r1.is_finite(), "r1", "r1 >= 0", geom.r1);
    v.check(
        geom.protrusion_count >= 1,
        "protrusion_count",
        "protrusion_count >= 1",
        f64::from(geom.protrusion_count),
    );
    v
}

/// Checks the geometry invariants plus the releasability condition
/// cos θ − μ sin θ > 0.
///
/// Range failures and the always-locked condition are reported separately so
/// callers can tell a malformed geometry from a valid but unusable one.
pub fn validate_geometry(geom: &LockGeometry) -> Result<(), Violations> {
    let mut v = geometry_range_violations(geom);
    let margin = geom.locking_margin();
    if geom.theta.is_finite() && geom.mu.is_finite() && margin <= 0.0 {
        v.0.push(Violation::AlwaysLocked {
            locking_margin: margin,
        });
    }
    v.into_result()
}

/// Serial-chain description of the finger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerSpec {
    pub total_length: f64,
    pub joint_count: usize,
    /// Lever from the first joint unit to the fingertip.
    pub root_to_tip: f64,
    /// Total in-plane bend the chain allows.
    pub in_plane_limit: f64,
    /// Total out-of-plane bend the chain allows.
    pub out_of_plane_limit: f64,
}

impl FingerSpec {
    /// Dimensions and bend limits of the built finger. `joint_count` is not
    /// documented for that finger; 8 is an assumed value.
    pub fn reference() -> Self {
        Self {
            total_length: mm_to_m(193.5),
            joint_count: 8,
            root_to_tip: mm_to_m(142.0),
            in_plane_limit: deg_to_rad(135.0),
            out_of_plane_limit: deg_to_rad(115.0),
        }
    }

    pub fn segment_length(&self) -> f64 {
        self.total_length / self.joint_count as f64
    }

    /// Fingertip force that produces `moment` about the first joint unit.
    pub fn tip_force(&self, moment: f64) -> f64 {
        moment / self.root_to_tip
    }

    pub fn validate(&self) -> Result<(), Violations> {
        let mut v = Violations::default();
        v.check(
            self.total_length > 0.0 && self.total_length.is_finite(),
            "total_length",
            "total_length > 0",
            self.total_length,
        );
        v.check(
            self.joint_count >= 1,
            "joint_count",
            "joint_count >= 1",
            self.joint_count as f64,
        );
        v.check(
            self.root_to_tip > 0.0 && self.root_to_tip.is_finite(),
            "root_to_tip",
            "root_to_tip > 0",
            self.root_to_tip,
        );
        v.check(
            self.in_plane_limit > 0.0 && self.in_plane_limit < PI,
            "in_plane_limit",
            "0 < in_plane_limit < pi",
            self.in_plane_limit,
        );
        v.check(
            self.out_of_plane_limit > 0.0 && self.out_of_plane_limit < PI,
            "out_of_plane_limit",
            "0 < out_of_plane_limit < pi",
            self.out_of_plane_limit,
        );
        v.into_result()
    }
}

/// Object and hand parameters for a wrap grasp.
///
/// `finger_count` is the number of fingers sharing the load, unrelated to
/// [`LockGeometry::protrusion_count`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspScenario {
    pub mass: f64,
    pub finger_count: u32,
    pub finger_length: f64,
    pub object_radius: f64,
    /// Drive pressure while grasping, Pa.
    pub operating_pressure: f64,
}

impl GraspScenario {
    /// 1.5 kg object, three 200 mm fingers, 1.5 MPa drive pressure, wrap
    /// radius L/π.
    pub fn cabbage_target() -> Self {
        let finger_length = 0.2;
        Self {
            mass: 1.5,
            finger_count: 3,
            finger_length,
            object_radius: finger_length / PI,
            operating_pressure: mpa_to_pa(1.5),
        }
    }

    pub fn with_mass(self, mass: f64) -> Self {
        Self { mass, ..self }
    }

    pub fn validate(&self) -> Result<(), Violations> {
        let mut v = Violations::default();
        // mass = 0 is allowed: it gives the all-zero load case.
        v.check(
            self.mass >= 0.0 && self.mass.is_finite(),
            "mass",
            "mass >= 0",
            self.mass,
        );
        v.check(
            self.finger_count >= 2,
            "finger_count",
            "finger_count >= 2",
            f64::from(self.finger_count),
        );
        v.check(
            self.finger_length > 0.0 && self.finger_length.is_finite(),
            "finger_length",
            "finger_length > 0",
            self.finger_length,
        );
        v.check(
            self.object_radius > 0.0,
            "object_radius",
            "object_radius > 0",
            self.object_radius,
        );
        v.check(
            self.operating_pressure >= 0.0 && self.operating_pressure.is_finite(),
            "operating_pressure",
            "operating_pressure >= 0",
            self.operating_pressure,
        );
        v.into_result()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(theta_deg: f64, mu: f64) -> LockGeometry {
        LockGeometry {
            theta: deg_to_rad(theta_deg),
            mu,
            a: mm_to_m(4.0),
            b: mm_to_m(3.0),
            r1: mm_to_m(5.0),
            protrusion_count: 4,
        }
    }

    #[test]
    fn valid_geometry_passes() {
        let g = geom(30.0, 0.5);
        assert!((g.locking_margin() - 0.616_025_403_784_438_6).abs() < 1e-12);
        assert_eq!(validate_geometry(&g), Ok(()));
    }

    #[test]
    fn steep_sticky_geometry_is_always_locked() {
        let g = geom(60.0, 0.7);
        assert!((g.locking_margin() - (0.5 - 0.7 * 0.75f64.sqrt())).abs() < 1e-12);
        let err = validate_geometry(&g).unwrap_err();
        assert!(err.only_always_locked());
    }

    #[test]
    fn zero_theta_is_a_range_violation() {
        let g = geom(0.0, 0.5);
        let err = validate_geometry(&g).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert!(matches!(err.0[0], Violation::OutOfRange { field: "theta", .. }));
    }

    #[test]
    fn collects_every_violation() {
        let g = LockGeometry {
            theta: 0.3,
            mu: -1.0,
            a: 0.0,
            b: 1e-3,
            r1: -1e-3,
            protrusion_count: 0,
        };
        let err = validate_geometry(&g).unwrap_err();
        let fields: Vec<_> = err
            .iter()
            .filter_map(|v| match v {
                Violation::OutOfRange { field, .. } => Some(*field),
                _ => None,
            })
            .collect();
        assert_eq!(fields, ["mu", "a", "r1", "protrusion_count"]);
    }

    #[test]
    fn validation_is_deterministic() {
        let g = geom(60.0, 0.7);
        assert_eq!(validate_geometry(&g), validate_geometry(&g));
    }

    #[test]
    fn reference_finger_is_valid() {
        assert_eq!(FingerSpec::reference().validate(), Ok(()));
        let f = FingerSpec::reference();
        assert!((f.tip_force(1.2) - 8.450_704_225_352_113).abs() < 1e-12);
    }

    #[test]
    fn scenario_requires_two_fingers() {
        let s = GraspScenario {
            finger_count: 1,
            ..GraspScenario::cabbage_target()
        };
        assert!(s.validate().is_err());
        assert_eq!(GraspScenario::cabbage_target().validate(), Ok(()));
        assert_eq!(GraspScenario::cabbage_target().with_mass(0.0).validate(), Ok(()));
    }
}
