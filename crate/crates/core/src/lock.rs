//! Self-locking analysis of the plate interlock in a 2-DOF joint unit.
//!
//! Plates A and B are pressed together with force `F` and carry interlocking
//! protrusions inclined at `theta`. An external moment about the out-of-plane
//! joint axis is resisted by friction on the protrusion top surface `S`
//! (`a` × `b`, offset `r1` from the axis). With uniform contact stress, the
//! joint stays locked while
//!
//! ```text
//! M <= M_max = F * (sin θ + μ cos θ) / (cos θ − μ sin θ) * D / (a b)
//! D = ∫₀ᵃ ∫₀ᵇ sqrt((x cos θ)² + (y + r1)²) dy dx
//! ```
//!
//! and never releases at all when `cos θ − μ sin θ <= 0`.
//!
//! The stress components on `S` follow the source naming: `n` is called the
//! friction component and `r` the normal component, and the no-slip condition
//! is written `R <= μ N`. That naming looks swapped relative to the usual
//! convention, but the resulting inequality is self-consistent and is what
//! this module implements, unchanged.

use core::f64::consts::FRAC_PI_2;

use crate::quadrature::{integrate_2d, QuadError, QuadOptions};
use crate::types::{geometry_range_violations, locking_margin, LockGeometry, Violations};

/// Relative tolerance used where callers do not pass one.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Largest relative tolerance accepted by [`lever_integral`].
pub const MAX_REL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LockError {
    #[error("invalid lock geometry: {0}")]
    InvalidGeometry(Violations),
    #[error("always locked: cos(theta) - mu*sin(theta) = {locking_margin} is not positive")]
    AlwaysLocked { locking_margin: f64 },
    #[error("theta = {0} rad is outside (0, pi/2)")]
    ThetaOutOfRange(f64),
    #[error("pressing force {0} N is negative")]
    NegativeForce(f64),
    #[error("applied moment {0} N m is negative")]
    NegativeMoment(f64),
    #[error("relative tolerance {0} is outside (0, 1e-3]")]
    InvalidTolerance(f64),
    #[error("lever integral: {0}")]
    Quadrature(#[from] QuadError),
}

/// Stress on `S` resolved along the ξ/η axes of the protrusion cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisStress {
    pub xi: f64,
    pub eta: f64,
}

/// Stress on `S` resolved into the `N` and `R` components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceStress {
    pub n: f64,
    pub r: f64,
}

fn check_theta(theta: f64) -> Result<(), LockError> {
    if theta > 0.0 && theta < FRAC_PI_2 {
        Ok(())
    } else {
        Err(LockError::ThetaOutOfRange(theta))
    }
}

// [[sin, cos], [cos, -sin]] is its own inverse.
fn reflect(u: f64, v: f64, theta: f64) -> (f64, f64) {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    (u * s + v * c, u * c - v * s)
}

/// σ_N = σ_ξ sin θ + σ_η cos θ, σ_R = σ_ξ cos θ − σ_η sin θ.
pub fn stress_transform(stress: AxisStress, theta: f64) -> Result<SurfaceStress, LockError> {
    check_theta(theta)?;
    let (n, r) = reflect(stress.xi, stress.eta, theta);
    Ok(SurfaceStress { n, r })
}

/// Inverse of [`stress_transform`]. The map is an involution, so this is the
/// same formula applied to `(n, r)`.
pub fn stress_transform_inverse(stress: SurfaceStress, theta: f64) -> Result<AxisStress, LockError> {
    check_theta(theta)?;
    let (xi, eta) = reflect(stress.n, stress.r, theta);
    Ok(AxisStress { xi, eta })
}

/// Distance from point `(x, y)` on `S` to the joint axis.
pub fn distance_to_axis(x: f64, y: f64, theta: f64, r1: f64) -> f64 {
    let u = x * libm::cos(theta);
    let v = y + r1;
    libm::sqrt(u * u + v * v)
}

/// The lever integral `D` over the protrusion top surface, m³.
///
/// A zero-width or zero-height surface gives 0.
pub fn lever_integral(geom: &LockGeometry, rel_tol: f64) -> Result<f64, LockError> {
    if !(rel_tol > 0.0 && rel_tol <= MAX_REL_TOL) {
        return Err(LockError::InvalidTolerance(rel_tol));
    }
    if !geom.theta.is_finite() {
        return Err(LockError::ThetaOutOfRange(geom.theta));
    }
    let mut v = Violations::default();
    for (field, value) in [("a", geom.a), ("b", geom.b), ("r1", geom.r1)] {
        if !(value >= 0.0 && value.is_finite()) {
            v.0.push(crate::types::Violation::OutOfRange {
                field,
                requirement: "finite and >= 0",
                value,
            });
        }
    }
    if !v.is_empty() {
        return Err(LockError::InvalidGeometry(v));
    }
    if geom.a == 0.0 || geom.b == 0.0 {
        return Ok(0.0);
    }
    let (theta, r1) = (geom.theta, geom.r1);
    let d = integrate_2d(
        |x, y| distance_to_axis(x, y, theta, r1),
        (0.0, geom.a),
        (0.0, geom.b),
        &QuadOptions::with_rel_tol(rel_tol),
    )?;
    Ok(d)
}

/// (sin θ + μ cos θ) / (cos θ − μ sin θ), the gain from pressing force to
/// tangential capacity. Equal to tan(θ + atan μ).
pub fn amplification_factor(theta: f64, mu: f64) -> Result<f64, LockError> {
    let margin = locking_margin(theta, mu);
    if margin <= 0.0 {
        return Err(LockError::AlwaysLocked {
            locking_margin: margin,
        });
    }
    Ok((libm::sin(theta) + mu * libm::cos(theta)) / margin)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LockStatus {
    Holds,
    Slips,
    AlwaysLocked,
}

impl LockStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LockStatus::Holds => "holds",
            LockStatus::Slips => "slips",
            LockStatus::AlwaysLocked => "always_locked",
        }
    }
}

/// Capacity of one lock, optionally checked against an applied moment.
///
/// For [`LockStatus::AlwaysLocked`] both `m_max` and `amplification` are
/// `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockAssessment {
    pub m_max: f64,
    pub amplification: f64,
    pub lever_integral: f64,
    pub status: LockStatus,
}

/// Moment per newton of pressing force: amp · D / (a b), in metres.
///
/// Range violations are reported before the always-locked condition.
pub fn moment_gain(geom: &LockGeometry, rel_tol: f64) -> Result<(f64, f64, f64), LockError> {
    let v = geometry_range_violations(geom);
    if !v.is_empty() {
        return Err(LockError::InvalidGeometry(v));
    }
    let amp = amplification_factor(geom.theta, geom.mu)?;
    let d = lever_integral(geom, rel_tol)?;
    Ok((amp * (d / (geom.a * geom.b)), amp, d))
}

/// Largest moment the lock holds under pressing force `force`.
///
/// The returned assessment is checked against a zero applied moment, so its
/// status is always [`LockStatus::Holds`].
pub fn max_moment(force: f64, geom: &LockGeometry, rel_tol: f64) -> Result<LockAssessment, LockError> {
    if !(force >= 0.0) {
        return Err(LockError::NegativeForce(force));
    }
    let (gain, amp, d) = moment_gain(geom, rel_tol)?;
    Ok(LockAssessment {
        m_max: force * gain,
        amplification: amp,
        lever_integral: d,
        status: LockStatus::Holds,
    })
}

/// Assesses an applied moment against the lock capacity. The slip boundary is
/// closed: `applied == m_max` holds.
pub fn assess(
    applied_moment: f64,
    force: f64,
    geom: &LockGeometry,
    rel_tol: f64,
) -> Result<LockAssessment, LockError> {
    if !(applied_moment >= 0.0) {
        return Err(LockError::NegativeMoment(applied_moment));
    }
    match max_moment(force, geom, rel_tol) {
        Ok(a) => Ok(LockAssessment {
            status: if applied_moment <= a.m_max {
                LockStatus::Holds
            } else {
                LockStatus::Slips
            },
            ..a
        }),
        Err(LockError::AlwaysLocked { .. }) => Ok(LockAssessment {
            m_max: f64::INFINITY,
            amplification: f64::INFINITY,
            lever_integral: lever_integral(geom, rel_tol)?,
            status: LockStatus::AlwaysLocked,
        }),
        Err(e) => Err(e),
    }
}

/// Whether the lock holds `applied_moment` under pressing force `force`.
///
/// Every physical outcome, including the always-locked regime, is a status;
/// errors are reserved for malformed input.
pub fn slip_check(applied_moment: f64, force: f64, geom: &LockGeometry) -> Result<LockStatus, LockError> {
    assess(applied_moment, force, geom, DEFAULT_REL_TOL).map(|a| a.status)
}
