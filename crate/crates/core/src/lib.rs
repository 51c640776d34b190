//! Quasi-static analysis of a twisting soft finger with a pressure-activated
//! self-locking joint.
//!
//! The crate covers four pieces:
//!
//! * [`lock`]: holding-moment capacity of the friction interlock between the
//!   two plates of a 2-DOF joint unit.
//! * [`grasp`]: load model for grasping a cylinder by wrapping, and the root
//!   moment a finger has to carry.
//! * [`curves`]: empirical pressure to pressing-force curves per plate gap,
//!   the moment bands derived from them and the plate-gap design sweep.
//! * [`sim`]: serial-chain kinematics, joint limits, pressure lag and a
//!   quasi-static grasp sequence driver.
//!
//! All quantities are SI inside the crate (m, N, Pa, rad). The [`units`]
//! module holds the conversions used at the boundary.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. Transcendental functions go through `libm` in both modes so
//! results are bit-identical across targets.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod curves;
pub mod grasp;
pub mod lock;
pub mod quadrature;
pub mod sim;
pub mod types;
pub mod units;

pub use curves::{
    design_sweep, interpolate_force, m_max_band, CurveError, CurveSet, ForceCurve, FrictionRange, MomentBand,
    StiffnessProfile, SweepReport, SweepRow, ValueKind,
};
pub use grasp::{
    grasp_feasible, line_load, required_root_moment, wrap_radius, Feasibility, GraspRequirement,
};
pub use lock::{
    amplification_factor, distance_to_axis, lever_integral, max_moment, slip_check, stress_transform,
    AxisStress, LockAssessment, LockError, LockStatus, SurfaceStress,
};
pub use types::{validate_geometry, FingerSpec, GraspScenario, LockGeometry, Violation, Violations};
