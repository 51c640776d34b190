//! Pressure-gated lock states and the quasi-static grasp sequence.
//!
//! There is no inertia and no contact resolution. External constraints enter
//! as imposed angles (twist, wrap) or imposed moments (hold). The lock gate is
//! stateless: a joint is engaged exactly when the current pressure is at or
//! above the engage pressure, whatever the history.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::Isometry3;

use super::dynamics::{step_from, StepError, REFERENCE_TAU};
use super::kinematics::{
    forward_kinematics, joint_limit_check, wrap_pose, JointState, LimitViolations, LockState, WrapError,
};
use crate::curves::{CurveError, ForceCurve, ValueKind};
use crate::grasp::moment_shares;
use crate::lock::{assess, LockError, LockStatus, DEFAULT_REL_TOL};
use crate::types::{FingerSpec, GraspScenario, LockGeometry, Violations};
use crate::units::mpa_to_pa;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub tau: f64,
    pub dt: f64,
    /// Simulated time per pressurize phase, s.
    pub settle: f64,
    /// Pa.
    pub engage_pressure: f64,
    pub rel_tol: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            tau: REFERENCE_TAU,
            dt: 0.01,
            settle: 5.0 * REFERENCE_TAU,
            engage_pressure: mpa_to_pa(0.5),
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Phase {
    /// Imposed out-of-plane angles per joint; engaged joints keep theirs.
    InsertTwist { out_of_plane: Vec<f64> },
    /// First-order pressure change toward `reference` Pa.
    Pressurize { reference: f64 },
    /// In-plane wrap around a cylinder of this radius.
    Wrap { object_radius: f64 },
    /// Moment imposed at the root joint, N·m; distal joints carry their share
    /// of the wrap load.
    Hold { external_moment: f64 },
}

impl Phase {
    /// Twist of `total` rad split evenly over `joint_count` joints.
    pub fn uniform_twist(total: f64, joint_count: usize) -> Self {
        Phase::InsertTwist {
            out_of_plane: vec![total / joint_count as f64; joint_count],
        }
    }

    pub fn kind(&self) -> PhaseKind {
        match self {
            Phase::InsertTwist { .. } => PhaseKind::InsertTwist,
            Phase::Pressurize { .. } => PhaseKind::Pressurize,
            Phase::Wrap { .. } => PhaseKind::Wrap,
            Phase::Hold { .. } => PhaseKind::Hold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseKind {
    Initial,
    InsertTwist,
    Pressurize,
    Wrap,
    Hold,
}

impl PhaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::Initial => "initial",
            PhaseKind::InsertTwist => "insert_twist",
            PhaseKind::Pressurize => "pressurize",
            PhaseKind::Wrap => "wrap",
            PhaseKind::Hold => "hold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointStatus {
    Free,
    Holds,
    Slips,
    AlwaysLocked,
}

impl JointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            JointStatus::Free => "free",
            JointStatus::Holds => "holds",
            JointStatus::Slips => "slips",
            JointStatus::AlwaysLocked => "always_locked",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid finger: {0}")]
    Finger(Violations),
    #[error("invalid scenario: {0}")]
    Scenario(Violations),
    #[error("schedule phase {index}: {reason}")]
    Schedule { index: usize, reason: &'static str },
    #[error("phase {index} ({}) violates joint limits: {violations}", .phase.as_str())]
    Limits {
        index: usize,
        phase: PhaseKind,
        violations: LimitViolations,
    },
    #[error("expected {expected} joint moments, got {actual}")]
    MomentCount { expected: usize, actual: usize },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Lock(#[from] LockError),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Snapshot of the finger. `tip` is always the forward kinematics of `joints`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub time: f64,
    /// Pa.
    pub pressure: f64,
    pub joints: Vec<JointState>,
    pub tip: Isometry3<f64>,
}

impl SimState {
    pub fn straight(spec: &FingerSpec) -> Self {
        let joints = vec![JointState::default(); spec.joint_count];
        let mut s = Self {
            time: 0.0,
            pressure: 0.0,
            joints,
            tip: Isometry3::identity(),
        };
        s.refresh_tip(spec);
        s
    }

    fn refresh_tip(&mut self, spec: &FingerSpec) {
        // joints always has joint_count entries here.
        self.tip = forward_kinematics(spec, &self.joints)
            .map(|p| p.tip())
            .unwrap_or_else(|_| Isometry3::identity());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LockUpdate {
    pub locks: Vec<LockState>,
    pub statuses: Vec<JointStatus>,
    /// Capacity of one engaged lock at the current pressure, N·m; 0 when free.
    pub m_max: f64,
}

/// Lock state of every joint for the current pressure, with the same
/// external moment checked at each engaged joint.
pub fn lock_state_update(
    state: &SimState,
    curve: &ForceCurve,
    geom: &LockGeometry,
    engage_pressure: f64,
    external_moment: f64,
) -> Result<LockUpdate, SimError> {
    let moments = vec![external_moment; state.joints.len()];
    lock_state_update_per_joint(state, curve, geom, engage_pressure, &moments, DEFAULT_REL_TOL)
}

/// [`lock_state_update`] with a separate moment for each joint.
pub fn lock_state_update_per_joint(
    state: &SimState,
    curve: &ForceCurve,
    geom: &LockGeometry,
    engage_pressure: f64,
    moments: &[f64],
    rel_tol: f64,
) -> Result<LockUpdate, SimError> {
    let n = state.joints.len();
    if moments.len() != n {
        return Err(SimError::MomentCount {
            expected: n,
            actual: moments.len(),
        });
    }
    if let Some(&m) = moments.iter().find(|m| !(**m >= 0.0)) {
        return Err(LockError::NegativeMoment(m).into());
    }
    if state.pressure < engage_pressure {
        return Ok(LockUpdate {
            locks: vec![LockState::Free; n],
            statuses: vec![JointStatus::Free; n],
            m_max: 0.0,
        });
    }
    let value = curve.value_at(state.pressure)?;
    let (m_max, always) = match curve.kind() {
        ValueKind::MaxMoment => (value, false),
        ValueKind::Force => {
            let a = assess(0.0, value, geom, rel_tol)?;
            (a.m_max, a.status == LockStatus::AlwaysLocked)
        }
    };
    let statuses = moments
        .iter()
        .map(|&m| {
            if always {
                JointStatus::AlwaysLocked
            } else if m <= m_max {
                JointStatus::Holds
            } else {
                JointStatus::Slips
            }
        })
        .collect();
    Ok(LockUpdate {
        locks: vec![LockState::Engaged; n],
        statuses,
        m_max,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEntry {
    pub phase: PhaseKind,
    /// Index into the schedule; `None` for the initial state.
    pub phase_index: Option<usize>,
    pub state: SimState,
    pub statuses: Vec<JointStatus>,
    pub m_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlipEvent {
    pub time: f64,
    pub phase_index: usize,
    pub joint: usize,
    pub moment: f64,
    pub m_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    pub entries: Vec<TimelineEntry>,
    pub slips: Vec<SlipEvent>,
}

impl Timeline {
    pub fn last(&self) -> &TimelineEntry {
        // The initial state is always present.
        &self.entries[self.entries.len() - 1]
    }
}

fn validate_schedule(spec: &FingerSpec, curve: &ForceCurve, schedule: &[Phase]) -> Result<(), SimError> {
    for (index, phase) in schedule.iter().enumerate() {
        let bad = |reason| Err(SimError::Schedule { index, reason });
        match phase {
            Phase::InsertTwist { out_of_plane } => {
                if out_of_plane.len() != spec.joint_count {
                    return bad("insert_twist needs one angle per joint");
                }
                if out_of_plane.iter().any(|a| !a.is_finite()) {
                    return bad("insert_twist angles must be finite");
                }
            }
            Phase::Pressurize { reference } => {
                if !(*reference >= 0.0 && reference.is_finite()) {
                    return bad("pressurize reference must be finite and non-negative");
                }
                if *reference > curve.last_pressure() {
                    return bad("pressurize reference is above the sampled force curve");
                }
            }
            Phase::Wrap { object_radius } => {
                if !(*object_radius > 0.0) {
                    return bad("wrap object radius must be positive");
                }
                if spec.joint_count < 2 {
                    return bad("wrap needs at least 2 joints");
                }
            }
            Phase::Hold { external_moment } => {
                if !(*external_moment >= 0.0 && external_moment.is_finite()) {
                    return bad("hold moment must be finite and non-negative");
                }
            }
        }
    }
    Ok(())
}

struct Driver<'a> {
    spec: &'a FingerSpec,
    curve: &'a ForceCurve,
    geom: &'a LockGeometry,
    params: &'a SimParams,
    timeline: Timeline,
}

impl Driver<'_> {
    fn record(
        &mut self,
        phase: PhaseKind,
        phase_index: Option<usize>,
        mut state: SimState,
        moments: &[f64],
    ) -> Result<(), SimError> {
        let update = lock_state_update_per_joint(
            &state,
            self.curve,
            self.geom,
            self.params.engage_pressure,
            moments,
            self.params.rel_tol,
        )?;
        for (j, lock) in state.joints.iter_mut().zip(&update.locks) {
            j.lock = *lock;
        }
        state.refresh_tip(self.spec);
        if let Some(index) = phase_index {
            for (joint, s) in update.statuses.iter().enumerate() {
                if *s == JointStatus::Slips {
                    self.timeline.slips.push(SlipEvent {
                        time: state.time,
                        phase_index: index,
                        joint,
                        moment: moments[joint],
                        m_max: update.m_max,
                    });
                }
            }
        }
        self.timeline.entries.push(TimelineEntry {
            phase,
            phase_index,
            state,
            statuses: update.statuses,
            m_max: update.m_max,
        });
        Ok(())
    }

    fn check_limits(&self, index: usize, phase: PhaseKind, joints: &[JointState]) -> Result<(), SimError> {
        joint_limit_check(self.spec, joints).map_err(|violations| SimError::Limits {
            index,
            phase,
            violations,
        })
    }
}

/// Runs `schedule` from a straight, unpressurised finger.
///
/// Every state is limit-checked; the first violation aborts the run. Twist and
/// wrap phases add one timeline entry at the current time, pressurize phases
/// add one per time step and hold phases one entry with per-joint slip
/// checks.
pub fn simulate_grasp_sequence(
    spec: &FingerSpec,
    scenario: &GraspScenario,
    curve: &ForceCurve,
    geom: &LockGeometry,
    params: &SimParams,
    schedule: &[Phase],
) -> Result<Timeline, SimError> {
    spec.validate().map_err(SimError::Finger)?;
    scenario.validate().map_err(SimError::Scenario)?;
    // Rejects bad tau/dt/settle before anything runs.
    step_from(0.0, 0.0, params.tau, params.dt, params.settle)?;
    validate_schedule(spec, curve, schedule)?;

    let n = spec.joint_count;
    let zero = vec![0.0; n];
    let mut driver = Driver {
        spec,
        curve,
        geom,
        params,
        timeline: Timeline {
            entries: Vec::new(),
            slips: Vec::new(),
        },
    };
    let mut state = SimState::straight(spec);
    driver.record(PhaseKind::Initial, None, state.clone(), &zero)?;

    for (index, phase) in schedule.iter().enumerate() {
        state = driver.last_state().clone();
        let kind = phase.kind();
        match phase {
            Phase::InsertTwist { out_of_plane } => {
                for (j, &target) in state.joints.iter_mut().zip(out_of_plane) {
                    if j.lock == LockState::Free {
                        j.out_of_plane = target;
                    }
                }
                driver.check_limits(index, kind, &state.joints)?;
                driver.record(kind, Some(index), state, &zero)?;
            }
            Phase::Pressurize { reference } => {
                let trace = step_from(state.pressure, *reference, params.tau, params.dt, params.settle)?;
                let t0 = state.time;
                for (t, p) in trace.iter().skip(1) {
                    let mut s = state.clone();
                    s.time = t0 + t;
                    s.pressure = p;
                    driver.record(kind, Some(index), s, &zero)?;
                }
            }
            Phase::Wrap { object_radius } => {
                let pose = match wrap_pose(spec, *object_radius) {
                    Ok(joints) | Err(WrapError::Infeasible { joints, .. }) => joints,
                    Err(_) => {
                        return Err(SimError::Schedule {
                            index,
                            reason: "wrap pose is undefined for this finger",
                        })
                    }
                };
                let proximal = super::kinematics::proximal_joint_count(n);
                for (i, (j, w)) in state.joints.iter_mut().zip(&pose).enumerate() {
                    if i >= proximal {
                        j.in_plane = w.in_plane;
                    }
                }
                driver.check_limits(index, kind, &state.joints)?;
                driver.record(kind, Some(index), state, &zero)?;
            }
            Phase::Hold { external_moment } => {
                let seg = spec.segment_length();
                let positions: Vec<f64> = (0..n).map(|i| i as f64 * seg).collect();
                let moments: Vec<f64> = moment_shares(scenario, &positions)
                    .into_iter()
                    .map(|share| share * external_moment)
                    .collect();
                driver.record(kind, Some(index), state, &moments)?;
            }
        }
    }
    Ok(driver.timeline)
}

impl Driver<'_> {
    fn last_state(&self) -> &SimState {
        &self.timeline.last().state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::CurveSample;
    use crate::units::{deg_to_rad, mm_to_m};

    fn curve() -> ForceCurve {
        let pts = [(0.5, 0.0), (0.75, 10.0), (1.0, 35.0), (1.25, 70.0), (1.5, 105.0)];
        ForceCurve::new(
            mm_to_m(2.5),
            ValueKind::Force,
            pts.iter()
                .map(|&(p, f)| CurveSample {
                    pressure: mpa_to_pa(p),
                    value: f,
                })
                .collect(),
        )
        .unwrap()
    }

    fn pressurised(p_mpa: f64) -> SimState {
        let mut s = SimState::straight(&FingerSpec::reference());
        s.pressure = mpa_to_pa(p_mpa);
        s
    }

    #[test]
    fn below_engagement_everything_is_free() {
        let u = lock_state_update(
            &pressurised(0.3),
            &curve(),
            &LockGeometry::placeholder(),
            mpa_to_pa(0.5),
            0.0,
        )
        .unwrap();
        assert!(u.locks.iter().all(|l| *l == LockState::Free));
        assert_eq!(u.m_max, 0.0);
    }

    #[test]
    fn engaged_lock_holds_small_and_slips_large_moments() {
        let g = LockGeometry::placeholder();
        let held = lock_state_update(&pressurised(1.5), &curve(), &g, mpa_to_pa(0.5), 0.5).unwrap();
        assert!(held.locks.iter().all(|l| *l == LockState::Engaged));
        assert!(held.statuses.iter().all(|s| *s == JointStatus::Holds));
        let slipped = lock_state_update(&pressurised(1.5), &curve(), &g, mpa_to_pa(0.5), 2.0).unwrap();
        assert!(slipped.statuses.iter().all(|s| *s == JointStatus::Slips));
    }

    #[test]
    fn gate_ignores_history() {
        let g = LockGeometry::placeholder();
        let mut s = pressurised(1.2);
        s.joints[0].lock = LockState::Free;
        let a = lock_state_update(&s, &curve(), &g, mpa_to_pa(0.5), 0.1).unwrap();
        s.joints[0].lock = LockState::Engaged;
        let b = lock_state_update(&s, &curve(), &g, mpa_to_pa(0.5), 0.1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_schedule_is_the_initial_state() {
        let spec = FingerSpec::reference();
        let t = simulate_grasp_sequence(
            &spec,
            &GraspScenario::cabbage_target(),
            &curve(),
            &LockGeometry::placeholder(),
            &SimParams::default(),
            &[],
        )
        .unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.entries[0].phase, PhaseKind::Initial);
        assert!((t.entries[0].state.tip.translation.z - spec.total_length).abs() < 1e-15);
    }

    #[test]
    fn schedule_errors_are_reported_by_index() {
        let spec = FingerSpec::reference();
        let r = simulate_grasp_sequence(
            &spec,
            &GraspScenario::cabbage_target(),
            &curve(),
            &LockGeometry::placeholder(),
            &SimParams::default(),
            &[
                Phase::Pressurize { reference: 1e6 },
                Phase::InsertTwist {
                    out_of_plane: vec![0.1],
                },
            ],
        );
        assert!(matches!(r, Err(SimError::Schedule { index: 1, .. })));
        let r = simulate_grasp_sequence(
            &spec,
            &GraspScenario::cabbage_target(),
            &curve(),
            &LockGeometry::placeholder(),
            &SimParams::default(),
            &[Phase::Pressurize {
                reference: mpa_to_pa(2.0),
            }],
        );
        assert!(matches!(r, Err(SimError::Schedule { index: 0, .. })));
    }

    #[test]
    fn engaged_joints_resist_new_twist() {
        let spec = FingerSpec::reference();
        let t = simulate_grasp_sequence(
            &spec,
            &GraspScenario::cabbage_target(),
            &curve(),
            &LockGeometry::placeholder(),
            &SimParams::default(),
            &[
                Phase::uniform_twist(deg_to_rad(30.0), spec.joint_count),
                Phase::Pressurize {
                    reference: mpa_to_pa(1.0),
                },
                Phase::uniform_twist(deg_to_rad(60.0), spec.joint_count),
            ],
        )
        .unwrap();
        let total: f64 = t.last().state.joints.iter().map(|j| j.out_of_plane).sum();
        assert!((total - deg_to_rad(30.0)).abs() < 1e-12);
    }

    #[test]
    fn over_limit_twist_aborts() {
        let spec = FingerSpec::reference();
        let r = simulate_grasp_sequence(
            &spec,
            &GraspScenario::cabbage_target(),
            &curve(),
            &LockGeometry::placeholder(),
            &SimParams::default(),
            &[Phase::uniform_twist(deg_to_rad(120.0), spec.joint_count)],
        );
        match r {
            Err(SimError::Limits {
                index: 0,
                phase,
                violations,
            }) => {
                assert_eq!(phase, PhaseKind::InsertTwist);
                assert_eq!(violations.0[0].joint, spec.joint_count - 1);
            }
            other => panic!("{other:?}"),
        }
    }
}
