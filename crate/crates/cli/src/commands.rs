//! The five subcommands. Each returns a [`Report`]; routing to stdout, stderr
//! and files happens in the caller.

use std::path::PathBuf;

use clap::Args;
use twistlock_core::curves::BandModel;
use twistlock_core::grasp::{requirement, DESIGN_TARGET_MOMENT, MARGINAL_FRACTION};
use twistlock_core::lock::{assess, moment_gain, DEFAULT_REL_TOL};
use twistlock_core::sim::dynamics::first_order_response;
use twistlock_core::sim::{
    pressure_step, rise_time_10_90, simulate_grasp_sequence, LockState, SimError, Timeline,
};
use twistlock_core::units::{m_to_mm, mm_to_m, mpa_to_pa, pa_to_mpa, rad_to_deg};
use twistlock_core::{
    design_sweep, grasp_feasible, CurveError, CurveSet, ForceCurve, LockAssessment, LockError, LockStatus,
    ValueKind,
};

use crate::config::Resolved;
use crate::curves_csv::{bundled_curve_set, load_curve_set};
use crate::error::CliError;
use crate::format::{num, sig, Table};
use crate::svg::{BandPlot, BandSeries};

/// Tabular output plus human-readable summary lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub summary: Vec<String>,
    /// Analytical failure (always-locked, infeasible, limit abort). The
    /// report is still emitted; the process exits with status 1.
    pub infeasible: Option<String>,
}

impl Report {
    fn new(table: Table) -> Self {
        Self {
            table,
            summary: Vec::new(),
            infeasible: None,
        }
    }

    fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }
}

pub struct Context {
    pub cfg: Resolved,
    pub curves: Option<PathBuf>,
}

impl Context {
    fn curve_set(&self) -> Result<CurveSet, CliError> {
        match &self.curves {
            Some(p) => Ok(load_curve_set(p)?),
            None => Ok(bundled_curve_set()),
        }
    }

    /// Curve for plate gap `d_mm`, defaulting to the configured gap.
    fn curve(&self, set: &CurveSet, d_mm: Option<f64>) -> Result<ForceCurve, CliError> {
        let d = d_mm.map_or(self.cfg.d, mm_to_m);
        set.get(d).cloned().ok_or_else(|| {
            let have: Vec<String> = set.curves().iter().map(|c| num(m_to_mm(c.d()))).collect();
            CliError::Usage(format!(
                "no curve for d = {} mm (available: {})",
                num(m_to_mm(d)),
                have.join(", ")
            ))
        })
    }
}

fn always_locked_message(theta: f64, mu: f64, margin: f64) -> String {
    format!(
        "always locked: cos(theta) - mu*sin(theta) = {} <= 0 at theta = {} deg, mu = {}; \
         the interlock never releases, whatever the pressing force",
        sig(margin, 4),
        num(rad_to_deg(theta)),
        num(mu)
    )
}

fn curve_error(e: CurveError) -> CliError {
    CliError::Usage(e.to_string())
}

fn non_negative(name: &str, x: f64) -> Result<f64, CliError> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!(
            "{name} must be finite and non-negative, got {x}"
        )))
    }
}

fn quantity_table() -> Table {
    Table::new(["quantity", "value", "unit"])
}

fn row(t: &mut Table, name: &str, value: String, unit: &str) {
    t.push([name.to_owned(), value, unit.to_owned()]);
}

/// Lock capacity at one operating point, after the engagement gate.
struct Capacity {
    force: Option<f64>,
    nominal: f64,
    lo: f64,
    hi: f64,
    engaged: bool,
}

fn capacity_at(ctx: &Context, curve: &ForceCurve, pressure: f64) -> Result<Capacity, CliError> {
    let cfg = &ctx.cfg;
    let engaged = pressure >= cfg.sim.engage_pressure;
    let value = if engaged {
        curve.value_at(pressure).map_err(curve_error)?
    } else {
        0.0
    };
    Ok(match curve.kind() {
        ValueKind::MaxMoment => Capacity {
            force: None,
            nominal: value,
            lo: value,
            hi: value,
            engaged,
        },
        ValueKind::Force => {
            let (gain, _, _) = moment_gain(&cfg.geometry, DEFAULT_REL_TOL).map_err(lock_error)?;
            let model = BandModel::new(&cfg.geometry, cfg.friction, DEFAULT_REL_TOL).map_err(curve_error)?;
            let band = model
                .gated_band(curve, pressure, cfg.sim.engage_pressure)
                .map_err(curve_error)?;
            Capacity {
                force: Some(value),
                nominal: gain * value,
                lo: band.lo,
                hi: band.hi,
                engaged,
            }
        }
    })
}

fn lock_error(e: LockError) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct LockInput {
    /// Pressing force between the plates, N.
    #[arg(long, allow_negative_numbers = true)]
    pub force: Option<f64>,
    /// Chamber pressure, MPa; the force is read from the curve file.
    #[arg(long, allow_negative_numbers = true)]
    pub pressure: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LockArgs {
    #[command(flatten)]
    pub input: LockInput,
    /// Plate gap of the curve to use, mm. Defaults to simulation.d_mm.
    #[arg(long)]
    pub d: Option<f64>,
}

pub fn lock(ctx: &Context, args: &LockArgs) -> Result<Report, CliError> {
    let cfg = &ctx.cfg;
    let g = cfg.geometry;
    let mut t = quantity_table();
    row(&mut t, "theta", num(rad_to_deg(g.theta)), "deg");
    row(&mut t, "mu", num(g.mu), "");
    row(&mut t, "locking_margin", num(g.locking_margin()), "");

    for (label, mu) in [("mu", g.mu), ("mu_hi", cfg.friction.hi)] {
        let margin = g.with_mu(mu).locking_margin();
        if margin <= 0.0 {
            row(&mut t, "status", "always_locked".into(), "");
            let mut r = Report::new(t);
            let mut msg = always_locked_message(g.theta, mu, margin);
            if label == "mu_hi" {
                msg = format!("friction range upper end mu_hi is {msg}");
            }
            r.infeasible = Some(msg);
            return Ok(r);
        }
    }

    let (gain, amp, d_int) = moment_gain(&g, DEFAULT_REL_TOL).map_err(lock_error)?;
    row(&mut t, "amplification", num(amp), "");
    row(&mut t, "lever_integral", num(d_int), "m^3");
    row(&mut t, "moment_gain", num(gain), "m");

    let mut notes = Vec::new();
    let cap = match (args.input.force, args.input.pressure) {
        (Some(f), _) => {
            let f = non_negative("--force", f)?;
            let lo = moment_gain(&g.with_mu(cfg.friction.lo), DEFAULT_REL_TOL)
                .map_err(lock_error)?
                .0;
            let hi = moment_gain(&g.with_mu(cfg.friction.hi), DEFAULT_REL_TOL)
                .map_err(lock_error)?
                .0;
            Capacity {
                force: Some(f),
                nominal: gain * f,
                lo: lo * f,
                hi: hi * f,
                engaged: true,
            }
        }
        (None, Some(p)) => {
            let p = non_negative("--pressure", p)?;
            let set = ctx.curve_set()?;
            let curve = ctx.curve(&set, args.d)?;
            row(&mut t, "pressure", num(p), "MPa");
            row(&mut t, "d", num(m_to_mm(curve.d())), "mm");
            let cap = capacity_at(ctx, &curve, mpa_to_pa(p))?;
            if !cap.engaged {
                notes.push(format!(
                    "below the engage pressure of {} MPa the plates are not in contact: M_max = 0",
                    num(pa_to_mpa(cfg.sim.engage_pressure))
                ));
            }
            if curve.kind() == ValueKind::MaxMoment {
                notes.push(
                    "curve gives moment capacity directly; friction band collapses to one value".into(),
                );
            }
            cap
        }
        // clap enforces exactly one of the two.
        (None, None) => return Err(CliError::Usage("one of --force or --pressure is required".into())),
    };

    if let Some(f) = cap.force {
        row(&mut t, "force", num(f), "N");
    }
    let lever = cfg.finger.root_to_tip;
    row(&mut t, "m_max", num(cap.nominal), "N m");
    row(&mut t, "m_max_lo", num(cap.lo), "N m");
    row(&mut t, "m_max_hi", num(cap.hi), "N m");
    row(&mut t, "tip_force", num(cap.nominal / lever), "N");
    row(&mut t, "tip_force_lo", num(cap.lo / lever), "N");
    row(&mut t, "tip_force_hi", num(cap.hi / lever), "N");
    row(&mut t, "status", "valid".into(), "");

    let mut r = Report::new(t);
    r.note(format!(
        "M_max = {} N m at mu = {}; band [{}, {}] N m for mu in [{}, {}]",
        sig(cap.nominal, 4),
        num(g.mu),
        sig(cap.lo, 4),
        sig(cap.hi, 4),
        num(cfg.friction.lo),
        num(cfg.friction.hi)
    ));
    r.note(format!(
        "tip force over {} mm lever: {} N (band {} to {} N)",
        num(m_to_mm(lever)),
        sig(cap.nominal / lever, 3),
        sig(cap.lo / lever, 3),
        sig(cap.hi / lever, 3)
    ));
    r.note(format!(
        "status: valid, the lock releases when unpressurised (cos(theta) - mu*sin(theta) = {})",
        sig(g.locking_margin(), 4)
    ));
    r.summary.extend(notes);
    Ok(r)
}

#[derive(Debug, Args)]
pub struct GraspArgs {
    /// Lock capacity to check, N m. Computed from the curves at the
    /// operating pressure when omitted.
    #[arg(long = "m-max", allow_negative_numbers = true)]
    pub m_max: Option<f64>,
    /// Plate gap of the curve to use, mm. Defaults to simulation.d_mm.
    #[arg(long)]
    pub d: Option<f64>,
}

pub fn grasp(ctx: &Context, args: &GraspArgs) -> Result<Report, CliError> {
    let cfg = &ctx.cfg;
    let s = cfg.scenario;
    let req = requirement(&s);
    let mut t = quantity_table();
    row(&mut t, "mass", num(s.mass), "kg");
    row(&mut t, "finger_count", s.finger_count.to_string(), "");
    row(&mut t, "finger_length", num(m_to_mm(s.finger_length)), "mm");
    row(&mut t, "line_load", num(req.line_load), "N/m");
    row(&mut t, "wrap_radius", num(m_to_mm(req.wrap_radius)), "mm");
    row(&mut t, "required_moment", num(req.required_moment), "N m");
    row(&mut t, "design_target", num(DESIGN_TARGET_MOMENT), "N m");

    let mut notes = Vec::new();
    let assessment = match args.m_max {
        Some(m) => LockAssessment {
            m_max: non_negative("--m-max", m)?,
            amplification: f64::NAN,
            lever_integral: f64::NAN,
            status: LockStatus::Holds,
        },
        None => {
            let set = ctx.curve_set()?;
            let curve = ctx.curve(&set, args.d)?;
            let p = s.operating_pressure;
            row(&mut t, "operating_pressure", num(pa_to_mpa(p)), "MPa");
            row(&mut t, "d", num(m_to_mm(curve.d())), "mm");
            if p < cfg.sim.engage_pressure {
                notes.push("operating pressure is below the engage pressure: M_max = 0".to_owned());
                LockAssessment {
                    m_max: 0.0,
                    amplification: f64::NAN,
                    lever_integral: f64::NAN,
                    status: LockStatus::Holds,
                }
            } else {
                let v = curve.value_at(p).map_err(curve_error)?;
                match curve.kind() {
                    ValueKind::Force => assess(0.0, v, &cfg.geometry, DEFAULT_REL_TOL).map_err(lock_error)?,
                    ValueKind::MaxMoment => LockAssessment {
                        m_max: v,
                        amplification: f64::NAN,
                        lever_integral: f64::NAN,
                        status: LockStatus::Holds,
                    },
                }
            }
        }
    };
    let feas = grasp_feasible(&s, &assessment);
    let tip = assessment.m_max / cfg.finger.root_to_tip;
    row(&mut t, "m_max", num(assessment.m_max), "N m");
    row(&mut t, "margin", num(feas.margin), "N m");
    row(&mut t, "tip_force", num(tip), "N");
    row(&mut t, "feasible", feas.feasible.to_string(), "");
    row(&mut t, "marginal", feas.marginal.to_string(), "");

    let mut r = Report::new(t);
    r.note(format!(
        "line load p = {} N/m, wrap radius R = {} mm",
        sig(req.line_load, 4),
        sig(m_to_mm(req.wrap_radius), 4)
    ));
    let target_note = if DESIGN_TARGET_MOMENT > 0.0 {
        format!(
            ", difference {}% of the target",
            sig(
                100.0 * (DESIGN_TARGET_MOMENT - req.required_moment).abs() / DESIGN_TARGET_MOMENT,
                2
            )
        )
    } else {
        String::new()
    };
    r.note(format!(
        "M_required = {} N m (design target {} N m{target_note})",
        num(req.required_moment),
        num(DESIGN_TARGET_MOMENT)
    ));
    let source = if args.m_max.is_some() {
        "supplied"
    } else {
        "from curves, nominal mu"
    };
    if assessment.status == LockStatus::AlwaysLocked {
        r.note("M_max is unbounded: the geometry is always locked".to_owned());
    } else {
        r.note(format!(
            "M_max = {} N m ({source}), tip force {} N",
            sig(assessment.m_max, 4),
            sig(tip, 3)
        ));
    }
    if feas.feasible {
        r.note(format!("feasible, margin {} N m", sig(feas.margin, 4)));
    } else {
        r.infeasible = Some(format!(
            "infeasible: M_max = {} N m is below the required {} N m",
            sig(assessment.m_max, 4),
            sig(req.required_moment, 4)
        ));
    }
    if feas.marginal {
        r.note(format!(
            "marginal: less than {}% of the requirement to spare. Only the half-wrap load is modelled; \
             a grasp loaded in another direction (for example pulled upwards) can behave differently",
            num(100.0 * MARGINAL_FRACTION)
        ));
    }
    r.summary.extend(notes);
    Ok(r)
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Also write an SVG plot of the moment bands.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

fn first_sentence(s: &str) -> &str {
    s.split_once(". ").map_or(s, |(a, _)| a)
}

fn band_plot(ctx: &Context, set: &CurveSet) -> Result<BandPlot, CliError> {
    let cfg = &ctx.cfg;
    let model = BandModel::new(&cfg.geometry, cfg.friction, DEFAULT_REL_TOL).map_err(curve_error)?;
    let mut series = Vec::new();
    for c in set.curves() {
        let mut points = Vec::new();
        if c.first_pressure() > 0.0 {
            points.push((0.0, 0.0, 0.0));
        }
        // The band is linear between samples, so the samples are exact.
        for s in c.samples() {
            let b = model.band(c, s.pressure).map_err(curve_error)?;
            points.push((pa_to_mpa(s.pressure), b.lo, b.hi));
        }
        series.push(BandSeries {
            label: format!("d = {} mm", num(m_to_mm(c.d()))),
            points,
        });
    }
    Ok(BandPlot {
        title: format!(
            "M_max band, mu in [{}, {}]",
            num(cfg.friction.lo),
            num(cfg.friction.hi)
        ),
        x_label: "pressure [MPa]".into(),
        y_label: "M_max [N m]".into(),
        series,
        references: vec![
            (
                cfg.profile.grasp_min_moment,
                format!("grasp minimum {} N m", num(cfg.profile.grasp_min_moment)),
            ),
            (
                cfg.profile.soft_max_moment,
                format!("soft maximum {} N m", num(cfg.profile.soft_max_moment)),
            ),
        ],
    })
}

pub fn sweep(ctx: &Context, args: &SweepArgs) -> Result<Report, CliError> {
    let cfg = &ctx.cfg;
    let set = ctx.curve_set()?;
    let report = match design_sweep(&set, &cfg.geometry, &cfg.profile, cfg.friction) {
        Ok(r) => r,
        Err(CurveError::Lock(LockError::AlwaysLocked { locking_margin })) => {
            let mut r = Report::new(Table::default());
            r.infeasible = Some(format!(
                "friction range upper end mu_hi is {}",
                always_locked_message(cfg.geometry.theta, cfg.friction.hi, locking_margin)
            ));
            return Ok(r);
        }
        Err(e) => return Err(curve_error(e)),
    };
    let p = &cfg.profile;
    let mut t = Table::new([
        "d_mm",
        "soft_pressure_mpa",
        "soft_upper_nm",
        "soft_pass",
        "grasp_pressure_mpa",
        "grasp_lower_nm",
        "grasp_pass",
        "selected",
    ]);
    for r in &report.rows {
        t.push([
            num(m_to_mm(r.d)),
            num(pa_to_mpa(p.soft_pressure)),
            r.soft_upper.map(num).unwrap_or_default(),
            r.soft_pass.to_string(),
            num(pa_to_mpa(p.grasp_pressure)),
            r.grasp_lower.map(num).unwrap_or_default(),
            r.grasp_pass.to_string(),
            (report.selected == Some(r.d)).to_string(),
        ]);
    }
    if let Some(path) = &args.svg {
        let svg = band_plot(ctx, &set)?.render();
        std::fs::write(path, svg).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }

    let mut out = Report::new(t);
    out.note(format!(
        "soft check: upper band edge at {} MPa <= {} N m; grasp check: lower band edge at {} MPa > {} N m; mu in [{}, {}]",
        num(pa_to_mpa(p.soft_pressure)),
        num(p.soft_max_moment),
        num(pa_to_mpa(p.grasp_pressure)),
        num(p.grasp_min_moment),
        num(cfg.friction.lo),
        num(cfg.friction.hi)
    ));
    out.note(format!("curve source: {}", first_sentence(set.provenance())));
    for r in report
        .rows
        .iter()
        .filter(|r| r.soft_upper.is_none() || r.grasp_lower.is_none())
    {
        out.note(format!(
            "d = {} mm: a check pressure is above the sampled range, counted as a failure",
            num(m_to_mm(r.d))
        ));
    }
    match report.selected {
        Some(d) => out.note(format!(
            "selected d = {} mm (smallest gap passing both checks)",
            num(m_to_mm(d))
        )),
        None => out.infeasible = Some("no feasible design: no plate gap passes both checks".into()),
    }
    Ok(out)
}

#[derive(Debug, Args)]
pub struct StepArgs {
    /// Reference pressure, MPa.
    #[arg(long, allow_negative_numbers = true)]
    pub reference: f64,
    /// Time constant, s. Defaults to simulation.tau_s.
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// Sample interval, s. Defaults to simulation.dt_s.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Trace length, s. Defaults to five time constants.
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
}

pub fn step(ctx: &Context, args: &StepArgs) -> Result<Report, CliError> {
    let tau = args.tau.unwrap_or(ctx.cfg.sim.tau);
    let dt = args.dt.unwrap_or(ctx.cfg.sim.dt);
    let horizon = args.horizon.unwrap_or(5.0 * tau);
    let reference = mpa_to_pa(args.reference);
    let trace = pressure_step(reference, tau, dt, horizon).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut t = Table::new(["time_s", "pressure_mpa"]);
    for (time, p) in trace.iter() {
        t.push([num(time), num(pa_to_mpa(p))]);
    }
    let mut r = Report::new(t);
    r.note(format!(
        "time constant tau = {} s, 10-90% rise time = {} s",
        num(tau),
        sig(rise_time_10_90(tau), 3)
    ));
    r.note(format!(
        "P(tau) = {} MPa ({} of the reference)",
        sig(pa_to_mpa(first_order_response(0.0, reference, tau, tau)), 3),
        sig(1.0 - (-1.0f64).exp(), 3)
    ));
    if let Some(m) = trace.measured_rise_time(reference) {
        r.note(format!("rise time on the {} s grid: {} s", num(dt), sig(m, 3)));
    }
    Ok(r)
}

fn timeline_table(timeline: &Timeline) -> Table {
    let n = timeline.entries[0].state.joints.len();
    let mut header = vec![
        "time_s".to_owned(),
        "phase".into(),
        "pressure_mpa".into(),
        "m_max_nm".into(),
    ];
    for j in 0..n {
        header.push(format!("j{j}_in_plane_deg"));
        header.push(format!("j{j}_out_of_plane_deg"));
        header.push(format!("j{j}_lock"));
        header.push(format!("j{j}_status"));
    }
    header.extend(["tip_x_mm".into(), "tip_y_mm".into(), "tip_z_mm".into()]);
    let mut t = Table::new(header);
    for e in &timeline.entries {
        let mut cells = vec![
            num(e.state.time),
            e.phase.as_str().to_owned(),
            num(pa_to_mpa(e.state.pressure)),
            num(e.m_max),
        ];
        for (j, s) in e.state.joints.iter().zip(&e.statuses) {
            cells.push(num(rad_to_deg(j.in_plane)));
            cells.push(num(rad_to_deg(j.out_of_plane)));
            cells.push(j.lock.as_str().to_owned());
            cells.push(s.as_str().to_owned());
        }
        let tip = e.state.tip.translation.vector;
        cells.extend([num(m_to_mm(tip.x)), num(m_to_mm(tip.y)), num(m_to_mm(tip.z))]);
        t.push(cells);
    }
    t
}

pub fn simulate(ctx: &Context) -> Result<Report, CliError> {
    let cfg = &ctx.cfg;
    let set = ctx.curve_set()?;
    let curve = ctx.curve(&set, None)?;
    let timeline = match simulate_grasp_sequence(
        &cfg.finger,
        &cfg.scenario,
        &curve,
        &cfg.geometry,
        &cfg.sim,
        &cfg.schedule,
    ) {
        Ok(t) => t,
        Err(e @ SimError::Limits { .. }) => {
            let mut r = Report::new(Table::default());
            r.infeasible = Some(format!("simulation aborted: {e}"));
            return Ok(r);
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };

    let last = timeline.last();
    let joints = &last.state.joints;
    let engaged = joints.iter().filter(|j| j.lock == LockState::Engaged).count();
    let twist: f64 = joints.iter().map(|j| j.out_of_plane).sum();
    let bend: f64 = joints.iter().map(|j| j.in_plane).sum();
    let mut r = Report::new(timeline_table(&timeline));
    r.note(format!(
        "{} states over {} schedule phases, d = {} mm",
        timeline.entries.len(),
        cfg.schedule.len(),
        num(m_to_mm(curve.d()))
    ));
    r.note(format!(
        "final state at t = {} s, pressure {} MPa: {engaged}/{} joints engaged, out-of-plane twist {} deg, in-plane bend {} deg",
        sig(last.state.time, 4),
        sig(pa_to_mpa(last.state.pressure), 4),
        joints.len(),
        sig(rad_to_deg(twist), 4),
        sig(rad_to_deg(bend), 4)
    ));
    if timeline.slips.is_empty() {
        r.note("slip events: none");
    } else {
        r.note(format!("slip events: {}", timeline.slips.len()));
        for s in &timeline.slips {
            r.note(format!(
                "  t = {} s, phase {}: joint {} carries {} N m > M_max {} N m",
                sig(s.time, 4),
                s.phase_index,
                s.joint,
                sig(s.moment, 4),
                sig(s.m_max, 4)
            ));
        }
    }
    Ok(r)
}
