//! Run configuration: a TOML file whose keys carry their units.
//!
//! Every key is optional; missing keys take the reference values. Unknown keys
//! are rejected so a typo cannot silently fall back to a default.

use std::path::Path;

use serde::Deserialize;
use twistlock_core::curves::FrictionRange;
use twistlock_core::sim::{Phase, SimParams};
use twistlock_core::units::{deg_to_rad, m_to_mm, mm_to_m, mpa_to_pa, pa_to_mpa, rad_to_deg};
use twistlock_core::{
    validate_geometry, wrap_radius, FingerSpec, GraspScenario, LockGeometry, StiffnessProfile, Violation,
    Violations,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub scenario: ScenarioConfig,
    pub profile: ProfileConfig,
    pub finger: FingerConfig,
    pub simulation: SimulationConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub theta_deg: f64,
    /// Nominal friction coefficient.
    pub mu: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub a_mm: f64,
    pub b_mm: f64,
    pub r1_mm: f64,
    pub protrusion_count: u32,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let g = LockGeometry::placeholder();
        let mu = FrictionRange::printed_pla();
        Self {
            theta_deg: rad_to_deg(g.theta),
            mu: g.mu,
            mu_lo: mu.lo,
            mu_hi: mu.hi,
            a_mm: m_to_mm(g.a),
            b_mm: m_to_mm(g.b),
            r1_mm: m_to_mm(g.r1),
            protrusion_count: g.protrusion_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mass_kg: f64,
    pub finger_count: u32,
    pub finger_length_mm: f64,
    /// Defaults to the half-wrap radius L/π.
    pub object_radius_mm: Option<f64>,
    pub operating_pressure_mpa: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let s = GraspScenario::cabbage_target();
        Self {
            mass_kg: s.mass,
            finger_count: s.finger_count,
            finger_length_mm: m_to_mm(s.finger_length),
            object_radius_mm: None,
            operating_pressure_mpa: pa_to_mpa(s.operating_pressure),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub soft_pressure_mpa: f64,
    pub soft_max_moment_nm: f64,
    pub grasp_pressure_mpa: f64,
    pub grasp_min_moment_nm: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        let p = StiffnessProfile::reference();
        Self {
            soft_pressure_mpa: pa_to_mpa(p.soft_pressure),
            soft_max_moment_nm: p.soft_max_moment,
            grasp_pressure_mpa: pa_to_mpa(p.grasp_pressure),
            grasp_min_moment_nm: p.grasp_min_moment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerConfig {
    pub total_length_mm: f64,
    pub joint_count: usize,
    pub root_to_tip_mm: f64,
    pub in_plane_limit_deg: f64,
    pub out_of_plane_limit_deg: f64,
}

impl Default for FingerConfig {
    fn default() -> Self {
        let f = FingerSpec::reference();
        Self {
            total_length_mm: m_to_mm(f.total_length),
            joint_count: f.joint_count,
            root_to_tip_mm: m_to_mm(f.root_to_tip),
            in_plane_limit_deg: rad_to_deg(f.in_plane_limit),
            out_of_plane_limit_deg: rad_to_deg(f.out_of_plane_limit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub tau_s: f64,
    pub dt_s: f64,
    pub settle_s: f64,
    pub engage_pressure_mpa: f64,
    /// Plate gap whose curve drives the lock, also the default for `lock`
    /// and `grasp`.
    pub d_mm: f64,
    pub schedule: Vec<PhaseConfig>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let p = SimParams::default();
        Self {
            tau_s: p.tau,
            dt_s: p.dt,
            settle_s: p.settle,
            engage_pressure_mpa: pa_to_mpa(p.engage_pressure),
            d_mm: 2.5,
            schedule: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseConfig {
    /// Total out-of-plane twist, split evenly over the joints.
    InsertTwist {
        out_of_plane_deg: f64,
    },
    Pressurize {
        reference_mpa: f64,
    },
    /// Defaults to the scenario's object radius.
    Wrap {
        object_radius_mm: Option<f64>,
    },
    Hold {
        external_moment_nm: f64,
    },
}

/// Config converted to SI domain values.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub geometry: LockGeometry,
    pub friction: FrictionRange,
    pub scenario: GraspScenario,
    pub profile: StiffnessProfile,
    pub finger: FingerSpec,
    pub sim: SimParams,
    /// m.
    pub d: f64,
    pub schedule: Vec<Phase>,
}

// Domain field name to config key, for diagnostics.
fn key_for(section: &str, field: &str) -> String {
    let key = match (section, field) {
        ("geometry", "theta") => "theta_deg",
        ("geometry", "a") => "a_mm",
        ("geometry", "b") => "b_mm",
        ("geometry", "r1") => "r1_mm",
        ("scenario", "mass") => "mass_kg",
        ("scenario", "finger_length") => "finger_length_mm",
        ("scenario", "object_radius") => "object_radius_mm",
        ("scenario", "operating_pressure") => "operating_pressure_mpa",
        ("profile", "soft_pressure") => "soft_pressure_mpa",
        ("profile", "soft_max_moment") => "soft_max_moment_nm",
        ("profile", "grasp_pressure") => "grasp_pressure_mpa",
        ("profile", "grasp_min_moment") => "grasp_min_moment_nm",
        ("finger", "total_length") => "total_length_mm",
        ("finger", "root_to_tip") => "root_to_tip_mm",
        ("finger", "in_plane_limit") => "in_plane_limit_deg",
        ("finger", "out_of_plane_limit") => "out_of_plane_limit_deg",
        (_, f) => f,
    };
    format!("{section}.{key}")
}

/// First range violation as a config error; the always-locked condition is
/// left for the analysis to report.
fn first_range_error(section: &str, v: Violations) -> Result<(), ConfigError> {
    match v.0.into_iter().find(|v| !v.is_always_locked()) {
        Some(Violation::OutOfRange {
            field, requirement, ..
        }) => Err(invalid(
            key_for(section, field),
            format!("must satisfy {requirement}"),
        )),
        _ => Ok(()),
    }
}

fn finite(field: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, "must be finite"))
    }
}

impl RunConfig {
    pub fn parse(text: &str, path: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_owned(),
            message: e.to_string().trim_end().to_owned(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: shown.clone(),
            source,
        })?;
        Self::parse(&text, &shown)
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let g = &self.geometry;
        let geometry = LockGeometry {
            theta: deg_to_rad(finite("geometry.theta_deg", g.theta_deg)?),
            mu: finite("geometry.mu", g.mu)?,
            a: mm_to_m(finite("geometry.a_mm", g.a_mm)?),
            b: mm_to_m(finite("geometry.b_mm", g.b_mm)?),
            r1: mm_to_m(finite("geometry.r1_mm", g.r1_mm)?),
            protrusion_count: g.protrusion_count,
        };
        if let Err(v) = validate_geometry(&geometry) {
            first_range_error("geometry", v)?;
        }
        let friction = FrictionRange::new(g.mu_lo, g.mu_hi).map_err(|_| {
            invalid(
                "geometry.mu_lo",
                "mu_lo and mu_hi must satisfy 0 < mu_lo <= mu_hi",
            )
        })?;

        let s = &self.scenario;
        let finger_length = mm_to_m(finite("scenario.finger_length_mm", s.finger_length_mm)?);
        let object_radius = match s.object_radius_mm {
            Some(r) => mm_to_m(finite("scenario.object_radius_mm", r)?),
            None => wrap_radius(finger_length),
        };
        let scenario = GraspScenario {
            mass: finite("scenario.mass_kg", s.mass_kg)?,
            finger_count: s.finger_count,
            finger_length,
            object_radius,
            operating_pressure: mpa_to_pa(finite(
                "scenario.operating_pressure_mpa",
                s.operating_pressure_mpa,
            )?),
        };
        if let Err(v) = scenario.validate() {
            first_range_error("scenario", v)?;
        }

        let p = &self.profile;
        let profile = StiffnessProfile {
            soft_pressure: mpa_to_pa(finite("profile.soft_pressure_mpa", p.soft_pressure_mpa)?),
            soft_max_moment: finite("profile.soft_max_moment_nm", p.soft_max_moment_nm)?,
            grasp_pressure: mpa_to_pa(finite("profile.grasp_pressure_mpa", p.grasp_pressure_mpa)?),
            grasp_min_moment: finite("profile.grasp_min_moment_nm", p.grasp_min_moment_nm)?,
        };
        if let Err(v) = profile.validate() {
            first_range_error("profile", v)?;
        }

        let f = &self.finger;
        let finger = FingerSpec {
            total_length: mm_to_m(finite("finger.total_length_mm", f.total_length_mm)?),
            joint_count: f.joint_count,
            root_to_tip: mm_to_m(finite("finger.root_to_tip_mm", f.root_to_tip_mm)?),
            in_plane_limit: deg_to_rad(finite("finger.in_plane_limit_deg", f.in_plane_limit_deg)?),
            out_of_plane_limit: deg_to_rad(finite(
                "finger.out_of_plane_limit_deg",
                f.out_of_plane_limit_deg,
            )?),
        };
        if let Err(v) = finger.validate() {
            first_range_error("finger", v)?;
        }

        let m = &self.simulation;
        let sim = SimParams {
            tau: finite("simulation.tau_s", m.tau_s)?,
            dt: finite("simulation.dt_s", m.dt_s)?,
            settle: finite("simulation.settle_s", m.settle_s)?,
            engage_pressure: mpa_to_pa(finite("simulation.engage_pressure_mpa", m.engage_pressure_mpa)?),
            ..SimParams::default()
        };
        if !(sim.tau > 0.0) {
            return Err(invalid("simulation.tau_s", "must be positive"));
        }
        if !(sim.dt > 0.0) {
            return Err(invalid("simulation.dt_s", "must be positive"));
        }
        if !(sim.settle >= sim.dt) {
            return Err(invalid("simulation.settle_s", "must be at least dt_s"));
        }
        if !(sim.engage_pressure >= 0.0) {
            return Err(invalid("simulation.engage_pressure_mpa", "must be non-negative"));
        }
        let d = mm_to_m(finite("simulation.d_mm", m.d_mm)?);
        if !(d > 0.0) {
            return Err(invalid("simulation.d_mm", "must be positive"));
        }

        let schedule = m
            .schedule
            .iter()
            .enumerate()
            .map(|(i, phase)| {
                let field = |k: &str| format!("simulation.schedule[{i}].{k}");
                Ok(match *phase {
                    PhaseConfig::InsertTwist { out_of_plane_deg } => {
                        let total = deg_to_rad(finite(&field("out_of_plane_deg"), out_of_plane_deg)?);
                        Phase::uniform_twist(total, finger.joint_count)
                    }
                    PhaseConfig::Pressurize { reference_mpa } => {
                        let r = finite(&field("reference_mpa"), reference_mpa)?;
                        if r < 0.0 {
                            return Err(invalid(field("reference_mpa"), "must be non-negative"));
                        }
                        Phase::Pressurize {
                            reference: mpa_to_pa(r),
                        }
                    }
                    PhaseConfig::Wrap { object_radius_mm } => {
                        let r = match object_radius_mm {
                            Some(r) => mm_to_m(finite(&field("object_radius_mm"), r)?),
                            None => scenario.object_radius,
                        };
                        if !(r > 0.0) {
                            return Err(invalid(field("object_radius_mm"), "must be positive"));
                        }
                        Phase::Wrap { object_radius: r }
                    }
                    PhaseConfig::Hold { external_moment_nm } => {
                        let m = finite(&field("external_moment_nm"), external_moment_nm)?;
                        if m < 0.0 {
                            return Err(invalid(field("external_moment_nm"), "must be non-negative"));
                        }
                        Phase::Hold { external_moment: m }
                    }
                })
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;

        Ok(Resolved {
            geometry,
            friction,
            scenario,
            profile,
            finger,
            sim,
            d,
            schedule,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_values() {
        let r = RunConfig::parse("", "t.toml").unwrap().resolve().unwrap();
        assert_eq!(r.scenario.mass, 1.5);
        assert_eq!(r.scenario.finger_count, 3);
        assert!((r.scenario.object_radius - 0.2 / std::f64::consts::PI).abs() < 1e-15);
        assert!((r.geometry.theta - LockGeometry::placeholder().theta).abs() < 1e-15);
        assert_eq!(r.profile, StiffnessProfile::reference());
        assert!((r.d - 2.5e-3).abs() < 1e-15);
        assert!(r.schedule.is_empty());
    }

    #[test]
    fn schedule_phases_convert_units() {
        let text = r#"
[simulation]
d_mm = 3.5

[[simulation.schedule]]
phase = "insert_twist"
out_of_plane_deg = 40.0

[[simulation.schedule]]
phase = "pressurize"
reference_mpa = 1.0

[[simulation.schedule]]
phase = "wrap"

[[simulation.schedule]]
phase = "hold"
external_moment_nm = 0.3
"#;
        let r = RunConfig::parse(text, "t.toml").unwrap().resolve().unwrap();
        assert_eq!(r.schedule.len(), 4);
        match &r.schedule[0] {
            Phase::InsertTwist { out_of_plane } => {
                assert_eq!(out_of_plane.len(), 8);
                assert!((out_of_plane.iter().sum::<f64>() - deg_to_rad(40.0)).abs() < 1e-12);
            }
            p => panic!("{p:?}"),
        }
        assert_eq!(r.schedule[1], Phase::Pressurize { reference: 1.0e6 });
        assert_eq!(
            r.schedule[2],
            Phase::Wrap {
                object_radius: r.scenario.object_radius
            }
        );
        assert_eq!(r.schedule[3], Phase::Hold { external_moment: 0.3 });
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = RunConfig::parse("[geometry]\ntheta = 30.0\n", "t.toml").unwrap_err();
        assert!(e.to_string().contains("theta"), "{e}");
    }

    #[test]
    fn range_errors_name_the_config_key() {
        let e = RunConfig::parse("[geometry]\ntheta_deg = 95.0\n", "t.toml")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(e.to_string().starts_with("geometry.theta_deg:"), "{e}");

        let e = RunConfig::parse(
            "[[simulation.schedule]]\nphase = \"hold\"\nexternal_moment_nm = -1.0\n",
            "t",
        )
        .unwrap()
        .resolve()
        .unwrap_err();
        assert!(
            e.to_string()
                .starts_with("simulation.schedule[0].external_moment_nm"),
            "{e}"
        );
    }

    #[test]
    fn always_locked_geometry_still_resolves() {
        let r = RunConfig::parse("[geometry]\ntheta_deg = 60.0\nmu = 0.7\n", "t")
            .unwrap()
            .resolve()
            .unwrap();
        assert!(r.geometry.locking_margin() <= 0.0);
    }
}
