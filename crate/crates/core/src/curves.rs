//! Empirical pressure → pressing-force curves and the plate-gap design sweep.
//!
//! A [`ForceCurve`] holds samples for one plate gap `d`. Below the first
//! sampled pressure the plates are taken to be apart and the curve reads 0;
//! above the last sample it refuses to extrapolate.
//!
//! Curves may also carry moment capacity directly ([`ValueKind::MaxMoment`]).
//! Such values already have a friction coefficient folded in, so their moment
//! band collapses to a single value.

use alloc::string::String;
use alloc::vec::Vec;

use crate::grasp::DESIGN_TARGET_MOMENT;
use crate::lock::{moment_gain, LockError, DEFAULT_REL_TOL};
use crate::types::{LockGeometry, Violation, Violations};
use crate::units::mpa_to_pa;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("plate gap d = {0} m must be positive and finite")]
    InvalidDesignParameter(f64),
    #[error("curve d = {d} m has {count} samples, needs at least 2")]
    TooFewSamples { d: f64, count: usize },
    #[error("curve d = {d} m: sample {index} pressure does not increase")]
    NonIncreasingPressure { d: f64, index: usize },
    #[error("curve d = {d} m: sample {index} value {value} is negative")]
    NegativeValue { d: f64, index: usize, value: f64 },
    #[error("curve d = {d} m: sample {index} is not finite")]
    NonFinite { d: f64, index: usize },
    #[error("curve d = {0} m appears more than once")]
    DuplicateDesignParameter(f64),
    #[error("curve set is empty")]
    EmptySet,
    #[error("pressure {0} Pa is negative")]
    NegativePressure(f64),
    #[error("pressure {pressure} Pa is above the last sample ({max} Pa) of curve d = {d} m")]
    AboveSampledRange { d: f64, pressure: f64, max: f64 },
    #[error("friction range [{lo}, {hi}] is invalid")]
    InvalidFrictionRange { lo: f64, hi: f64 },
    #[error("invalid stiffness profile: {0}")]
    InvalidProfile(Violations),
    #[error(transparent)]
    Lock(#[from] LockError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueKind {
    /// Pressing force between the plates, N.
    Force,
    /// Moment capacity, N·m.
    MaxMoment,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Force => "force_n",
            ValueKind::MaxMoment => "mmax_nm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    /// Pa.
    pub pressure: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceCurve {
    d: f64,
    kind: ValueKind,
    samples: Vec<CurveSample>,
}

impl ForceCurve {
    /// Validates and wraps samples that are already in pressure order.
    pub fn new(d: f64, kind: ValueKind, samples: Vec<CurveSample>) -> Result<Self, CurveError> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(CurveError::InvalidDesignParameter(d));
        }
        if samples.len() < 2 {
            return Err(CurveError::TooFewSamples {
                d,
                count: samples.len(),
            });
        }
        for (index, s) in samples.iter().enumerate() {
            if !(s.pressure.is_finite() && s.value.is_finite()) {
                return Err(CurveError::NonFinite { d, index });
            }
            if s.value < 0.0 {
                return Err(CurveError::NegativeValue {
                    d,
                    index,
                    value: s.value,
                });
            }
            if index > 0 && s.pressure <= samples[index - 1].pressure {
                return Err(CurveError::NonIncreasingPressure { d, index });
            }
        }
        Ok(Self { d, kind, samples })
    }

    /// Plate gap, m.
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn first_pressure(&self) -> f64 {
        self.samples[0].pressure
    }

    pub fn last_pressure(&self) -> f64 {
        self.samples[self.samples.len() - 1].pressure
    }

    /// Piecewise-linear value at `pressure`.
    pub fn value_at(&self, pressure: f64) -> Result<f64, CurveError> {
        if !(pressure >= 0.0) {
            return Err(CurveError::NegativePressure(pressure));
        }
        if pressure < self.first_pressure() {
            return Ok(0.0);
        }
        let last = self.last_pressure();
        if pressure > last {
            return Err(CurveError::AboveSampledRange {
                d: self.d,
                pressure,
                max: last,
            });
        }
        // First sample with pressure >= the query; >= 1 here.
        let hi = self.samples.partition_point(|s| s.pressure < pressure);
        let right = self.samples[hi];
        if right.pressure == pressure {
            return Ok(right.value);
        }
        let left = self.samples[hi - 1];
        let t = (pressure - left.pressure) / (right.pressure - left.pressure);
        Ok(left.value + t * (right.value - left.value))
    }
}

/// Interpolated curve value (pressing force for [`ValueKind::Force`] curves)
/// at `pressure` Pa.
pub fn interpolate_force(curve: &ForceCurve, pressure: f64) -> Result<f64, CurveError> {
    curve.value_at(pressure)
}

/// Curves for several plate gaps, ordered by `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    curves: Vec<ForceCurve>,
    provenance: String,
}

impl CurveSet {
    pub fn new(mut curves: Vec<ForceCurve>, provenance: impl Into<String>) -> Result<Self, CurveError> {
        if curves.is_empty() {
            return Err(CurveError::EmptySet);
        }
        curves.sort_by(|a, b| a.d.total_cmp(&b.d));
        if let Some(w) = curves.windows(2).find(|w| w[0].d == w[1].d) {
            return Err(CurveError::DuplicateDesignParameter(w[0].d));
        }
        Ok(Self {
            curves,
            provenance: provenance.into(),
        })
    }

    pub fn curves(&self) -> &[ForceCurve] {
        &self.curves
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Curve whose gap matches `d` to 1e-9 relative.
    pub fn get(&self, d: f64) -> Option<&ForceCurve> {
        self.curves.iter().find(|c| (c.d - d).abs() <= 1e-9 * d.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionRange {
    pub lo: f64,
    pub hi: f64,
}

impl FrictionRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self, CurveError> {
        if lo > 0.0 && lo <= hi && hi.is_finite() {
            Ok(Self { lo, hi })
        } else {
            Err(CurveError::InvalidFrictionRange { lo, hi })
        }
    }

    /// 0.4 ≤ μ ≤ 0.7, the range for fully infilled printed PLA.
    pub fn printed_pla() -> Self {
        Self { lo: 0.4, hi: 0.7 }
    }
}

/// Moment capacity over a friction range: `lo` at the low μ, `hi` at the
/// high μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBand {
    pub lo: f64,
    pub hi: f64,
}

impl MomentBand {
    pub const ZERO: MomentBand = MomentBand { lo: 0.0, hi: 0.0 };

    pub fn contains(&self, moment: f64) -> bool {
        self.lo <= moment && moment <= self.hi
    }
}

/// Precomputed moment-per-newton gains at the two ends of a friction range.
///
/// Capacity is monotone in μ, so the endpoints bound the whole band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandModel {
    gain_lo: f64,
    gain_hi: f64,
}

impl BandModel {
    pub fn new(geom: &LockGeometry, mu: FrictionRange, rel_tol: f64) -> Result<Self, CurveError> {
        // The high end is the one that can tip into the always-locked regime.
        let (gain_hi, _, _) = moment_gain(&geom.with_mu(mu.hi), rel_tol)?;
        let (gain_lo, _, _) = moment_gain(&geom.with_mu(mu.lo), rel_tol)?;
        Ok(Self { gain_lo, gain_hi })
    }

    pub fn band(&self, curve: &ForceCurve, pressure: f64) -> Result<MomentBand, CurveError> {
        let v = curve.value_at(pressure)?;
        Ok(match curve.kind {
            ValueKind::Force => MomentBand {
                lo: v * self.gain_lo,
                hi: v * self.gain_hi,
            },
            ValueKind::MaxMoment => MomentBand { lo: v, hi: v },
        })
    }

    /// Like [`BandModel::band`], but zero below `engage_pressure` where the
    /// plates are not yet in contact.
    pub fn gated_band(
        &self,
        curve: &ForceCurve,
        pressure: f64,
        engage_pressure: f64,
    ) -> Result<MomentBand, CurveError> {
        if !(pressure >= 0.0) {
            return Err(CurveError::NegativePressure(pressure));
        }
        if pressure < engage_pressure {
            return Ok(MomentBand::ZERO);
        }
        self.band(curve, pressure)
    }
}

/// Moment capacity band at `pressure` for μ across `mu`.
pub fn m_max_band(
    curve: &ForceCurve,
    geom: &LockGeometry,
    mu: FrictionRange,
    pressure: f64,
) -> Result<MomentBand, CurveError> {
    BandModel::new(geom, mu, DEFAULT_REL_TOL)?.band(curve, pressure)
}

/// Required shape of capacity versus pressure: compliant at low pressure,
/// strong enough to grasp at the working pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessProfile {
    /// Pa.
    pub soft_pressure: f64,
    /// Upper capacity allowed at `soft_pressure`, N·m.
    pub soft_max_moment: f64,
    /// Pa.
    pub grasp_pressure: f64,
    /// Capacity must exceed this at `grasp_pressure`, N·m.
    pub grasp_min_moment: f64,
}

impl StiffnessProfile {
    /// Soft at 0.75 MPa, above 0.6 N·m at 1.5 MPa. The 0.2 N·m soft ceiling
    /// is an assumed value; the source only asks for "sufficiently small".
    pub fn reference() -> Self {
        Self {
            soft_pressure: mpa_to_pa(0.75),
            soft_max_moment: 0.2,
            grasp_pressure: mpa_to_pa(1.5),
            grasp_min_moment: DESIGN_TARGET_MOMENT,
        }
    }

    pub fn validate(&self) -> Result<(), Violations> {
        let mut v = Vec::new();
        let mut check = |ok: bool, field, requirement, value| {
            if !ok {
                v.push(Violation::OutOfRange {
                    field,
                    requirement,
                    value,
                });
            }
        };
        check(
            self.soft_pressure >= 0.0,
            "soft_pressure",
            "soft_pressure >= 0",
            self.soft_pressure,
        );
        check(
            self.soft_pressure < self.grasp_pressure,
            "grasp_pressure",
            "soft_pressure < grasp_pressure",
            self.grasp_pressure,
        );
        check(
            self.soft_max_moment >= 0.0,
            "soft_max_moment",
            "soft_max_moment >= 0",
            self.soft_max_moment,
        );
        check(
            self.grasp_min_moment >= 0.0,
            "grasp_min_moment",
            "grasp_min_moment >= 0",
            self.grasp_min_moment,
        );
        if v.is_empty() {
            Ok(())
        } else {
            Err(Violations(v))
        }
    }
}

/// Constraint values for one plate gap. `None` means the curve was not
/// sampled up to the pressure in question; that constraint fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub d: f64,
    pub soft_upper: Option<f64>,
    pub soft_pass: bool,
    pub grasp_lower: Option<f64>,
    pub grasp_pass: bool,
}

impl SweepRow {
    pub fn passes(&self) -> bool {
        self.soft_pass && self.grasp_pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// One row per curve, ascending `d`.
    pub rows: Vec<SweepRow>,
    /// Smallest passing `d`; `None` when no design is feasible.
    pub selected: Option<f64>,
}

fn optional(r: Result<MomentBand, CurveError>) -> Result<Option<MomentBand>, CurveError> {
    match r {
        Ok(b) => Ok(Some(b)),
        Err(CurveError::AboveSampledRange { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Checks every curve against the profile and picks the smallest gap that
/// passes both constraints.
///
/// The soft constraint uses the upper band edge (`hi <= soft_max_moment`), the
/// grasp constraint the lower edge (`lo > grasp_min_moment`), so a selected
/// design satisfies both over the whole friction range.
pub fn design_sweep(
    set: &CurveSet,
    geom: &LockGeometry,
    profile: &StiffnessProfile,
    mu: FrictionRange,
) -> Result<SweepReport, CurveError> {
    profile.validate().map_err(CurveError::InvalidProfile)?;
    let model = BandModel::new(geom, mu, DEFAULT_REL_TOL)?;
    let mut rows = Vec::with_capacity(set.curves.len());
    for curve in &set.curves {
        let soft = optional(model.band(curve, profile.soft_pressure))?.map(|b| b.hi);
        let grasp = optional(model.band(curve, profile.grasp_pressure))?.map(|b| b.lo);
        rows.push(SweepRow {
            d: curve.d,
            soft_upper: soft,
            soft_pass: soft.is_some_and(|m| m <= profile.soft_max_moment),
            grasp_lower: grasp,
            grasp_pass: grasp.is_some_and(|m| m > profile.grasp_min_moment),
        });
    }
    let selected = rows.iter().find(|r| r.passes()).map(|r| r.d);
    Ok(SweepReport { rows, selected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::mm_to_m;
    use alloc::vec;

    fn curve(d_mm: f64, pts: &[(f64, f64)]) -> ForceCurve {
        let samples = pts
            .iter()
            .map(|&(p, f)| CurveSample {
                pressure: mpa_to_pa(p),
                value: f,
            })
            .collect();
        ForceCurve::new(mm_to_m(d_mm), ValueKind::Force, samples).unwrap()
    }

    fn sample_curve() -> ForceCurve {
        curve(2.5, &[(0.5, 0.0), (1.0, 40.0), (1.5, 100.0)])
    }

    #[test]
    fn interpolation_hits_samples_and_midpoints() {
        let c = sample_curve();
        assert_eq!(interpolate_force(&c, mpa_to_pa(1.0)), Ok(40.0));
        assert_eq!(interpolate_force(&c, mpa_to_pa(1.5)), Ok(100.0));
        assert_eq!(interpolate_force(&c, mpa_to_pa(1.25)), Ok(70.0));
        assert_eq!(interpolate_force(&c, 0.0), Ok(0.0));
        assert_eq!(interpolate_force(&c, mpa_to_pa(0.3)), Ok(0.0));
    }

    #[test]
    fn no_extrapolation_above_last_sample() {
        let c = sample_curve();
        assert!(matches!(
            interpolate_force(&c, mpa_to_pa(1.6)),
            Err(CurveError::AboveSampledRange { .. })
        ));
        assert!(matches!(
            interpolate_force(&c, -1.0),
            Err(CurveError::NegativePressure(_))
        ));
    }

    #[test]
    fn curve_invariants() {
        let s = |p: f64, v: f64| CurveSample {
            pressure: p,
            value: v,
        };
        assert!(matches!(
            ForceCurve::new(1e-3, ValueKind::Force, vec![s(0.0, 1.0)]),
            Err(CurveError::TooFewSamples { count: 1, .. })
        ));
        assert!(matches!(
            ForceCurve::new(1e-3, ValueKind::Force, vec![s(0.0, 1.0), s(0.0, 2.0)]),
            Err(CurveError::NonIncreasingPressure { index: 1, .. })
        ));
        assert!(matches!(
            ForceCurve::new(1e-3, ValueKind::Force, vec![s(0.0, 1.0), s(1.0, -2.0)]),
            Err(CurveError::NegativeValue { index: 1, .. })
        ));
        assert!(matches!(
            ForceCurve::new(0.0, ValueKind::Force, vec![s(0.0, 1.0), s(1.0, 2.0)]),
            Err(CurveError::InvalidDesignParameter(_))
        ));
    }

    #[test]
    fn set_orders_and_rejects_duplicates() {
        let set = CurveSet::new(
            vec![
                curve(3.5, &[(0.0, 0.0), (1.5, 1.0)]),
                curve(1.5, &[(0.0, 0.0), (1.5, 1.0)]),
            ],
            "test",
        )
        .unwrap();
        assert_eq!(set.curves()[0].d(), mm_to_m(1.5));
        assert!(set.get(mm_to_m(3.5)).is_some());
        assert!(set.get(mm_to_m(2.5)).is_none());
        assert!(matches!(
            CurveSet::new(
                vec![
                    curve(1.5, &[(0.0, 0.0), (1.5, 1.0)]),
                    curve(1.5, &[(0.0, 0.0), (1.5, 2.0)])
                ],
                "dup"
            ),
            Err(CurveError::DuplicateDesignParameter(_))
        ));
        assert_eq!(CurveSet::new(vec![], "none"), Err(CurveError::EmptySet));
    }

    #[test]
    fn band_edges() {
        let g = LockGeometry::placeholder();
        let c = sample_curve();
        let same = FrictionRange::new(0.5, 0.5).unwrap();
        let b = m_max_band(&c, &g, same, mpa_to_pa(1.2)).unwrap();
        assert_eq!(b.lo, b.hi);
        let b = m_max_band(&c, &g, FrictionRange::printed_pla(), mpa_to_pa(0.2)).unwrap();
        assert_eq!(b, MomentBand::ZERO);
        let b = m_max_band(&c, &g, FrictionRange::printed_pla(), mpa_to_pa(1.5)).unwrap();
        assert!(b.lo < b.hi);
    }

    #[test]
    fn band_high_end_can_be_always_locked() {
        let g = LockGeometry {
            theta: 1.0,
            ..LockGeometry::placeholder()
        };
        // cos 1 / sin 1 = 0.642
        let r = m_max_band(&sample_curve(), &g, FrictionRange::new(0.4, 0.7).unwrap(), 1e6);
        assert!(matches!(r, Err(CurveError::Lock(LockError::AlwaysLocked { .. }))));
    }

    #[test]
    fn moment_curves_have_degenerate_bands() {
        let c = ForceCurve::new(
            mm_to_m(2.5),
            ValueKind::MaxMoment,
            vec![
                CurveSample {
                    pressure: 5e5,
                    value: 0.0,
                },
                CurveSample {
                    pressure: 1.5e6,
                    value: 1.2,
                },
            ],
        )
        .unwrap();
        let b = m_max_band(
            &c,
            &LockGeometry::placeholder(),
            FrictionRange::printed_pla(),
            1.5e6,
        )
        .unwrap();
        assert_eq!(b, MomentBand { lo: 1.2, hi: 1.2 });
    }

    #[test]
    fn gate_zeroes_below_engagement() {
        let model = BandModel::new(&LockGeometry::placeholder(), FrictionRange::printed_pla(), 1e-9).unwrap();
        let c = curve(1.5, &[(0.1, 5.0), (1.5, 100.0)]);
        assert_eq!(
            model.gated_band(&c, mpa_to_pa(0.4), mpa_to_pa(0.5)),
            Ok(MomentBand::ZERO)
        );
        assert!(model.gated_band(&c, mpa_to_pa(0.5), mpa_to_pa(0.5)).unwrap().lo > 0.0);
    }

    #[test]
    fn sweep_selects_smallest_passing_gap() {
        let set = CurveSet::new(
            vec![
                curve(1.5, &[(0.0, 0.0), (0.75, 80.0), (1.5, 200.0)]),
                curve(2.5, &[(0.5, 0.0), (0.75, 5.0), (1.5, 120.0)]),
                curve(3.5, &[(0.5, 0.0), (0.75, 1.0), (1.5, 110.0)]),
            ],
            "synthetic",
        )
        .unwrap();
        let r = design_sweep(
            &set,
            &LockGeometry::placeholder(),
            &StiffnessProfile::reference(),
            FrictionRange::printed_pla(),
        )
        .unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(!r.rows[0].soft_pass && r.rows[0].grasp_pass);
        assert!(r.rows[1].passes() && r.rows[2].passes());
        assert_eq!(r.selected, Some(mm_to_m(2.5)));
    }

    #[test]
    fn sweep_reports_no_feasible_design() {
        let set = CurveSet::new(vec![sample_curve()], "one").unwrap();
        let profile = StiffnessProfile {
            grasp_min_moment: 1e30,
            ..StiffnessProfile::reference()
        };
        let r = design_sweep(
            &set,
            &LockGeometry::placeholder(),
            &profile,
            FrictionRange::printed_pla(),
        )
        .unwrap();
        assert_eq!(r.selected, None);
        assert!(!r.rows[0].grasp_pass);
    }

    #[test]
    fn unsampled_grasp_pressure_fails_the_constraint() {
        let set = CurveSet::new(vec![curve(2.5, &[(0.5, 0.0), (1.0, 50.0)])], "short").unwrap();
        let r = design_sweep(
            &set,
            &LockGeometry::placeholder(),
            &StiffnessProfile::reference(),
            FrictionRange::printed_pla(),
        )
        .unwrap();
        assert_eq!(r.rows[0].grasp_lower, None);
        assert!(!r.rows[0].grasp_pass);
        assert_eq!(r.selected, None);
    }

    #[test]
    fn invalid_profile_is_rejected() {
        let set = CurveSet::new(vec![sample_curve()], "one").unwrap();
        let profile = StiffnessProfile {
            soft_pressure: 2e6,
            ..StiffnessProfile::reference()
        };
        assert!(matches!(
            design_sweep(
                &set,
                &LockGeometry::placeholder(),
                &profile,
                FrictionRange::printed_pla()
            ),
            Err(CurveError::InvalidProfile(_))
        ));
    }
}
