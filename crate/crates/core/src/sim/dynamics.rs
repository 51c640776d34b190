//! First-order lag of the drive pressure.

use alloc::vec::Vec;

/// Time constant of the pressure loop, s.
pub const REFERENCE_TAU: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StepError {
    #[error("time constant {0} s must be positive")]
    NonPositiveTau(f64),
    #[error("time step {0} s must be positive")]
    NonPositiveStep(f64),
    #[error("horizon {horizon} s is shorter than the time step {dt} s")]
    HorizonTooShort { horizon: f64, dt: f64 },
    #[error("reference pressure {0} Pa must be finite and non-negative")]
    InvalidReference(f64),
}

/// Pressure at time `t` after a step from `start` to `reference`.
pub fn first_order_response(start: f64, reference: f64, tau: f64, t: f64) -> f64 {
    reference + (start - reference) * libm::exp(-t / tau)
}

/// 10 % to 90 % rise time of a first-order lag: τ ln 9.
pub fn rise_time_10_90(tau: f64) -> f64 {
    tau * libm::log(9.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureTrace {
    pub times: Vec<f64>,
    /// Pa.
    pub pressures: Vec<f64>,
}

impl PressureTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.pressures.iter().copied())
    }

    /// Time at which the trace first reaches `level`, linearly interpolated
    /// between samples.
    pub fn crossing_time(&self, level: f64) -> Option<f64> {
        let i = self.pressures.iter().position(|&p| p >= level)?;
        if i == 0 {
            return Some(self.times[0]);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (p0, p1) = (self.pressures[i - 1], self.pressures[i]);
        Some(t0 + (level - p0) / (p1 - p0) * (t1 - t0))
    }

    /// 10–90 % rise time measured on the samples, relative to `reference`.
    pub fn measured_rise_time(&self, reference: f64) -> Option<f64> {
        if !(reference > 0.0) {
            return None;
        }
        Some(self.crossing_time(0.9 * reference)? - self.crossing_time(0.1 * reference)?)
    }
}

/// Samples `reference · (1 − exp(−t/τ))` at `t = k·dt` for every `k` with
/// `k·dt <= horizon`. Closed form, no integration error.
pub fn pressure_step(reference: f64, tau: f64, dt: f64, horizon: f64) -> Result<PressureTrace, StepError> {
    step_from(0.0, reference, tau, dt, horizon)
}

/// Like [`pressure_step`], but starting from `start` instead of 0.
pub fn step_from(
    start: f64,
    reference: f64,
    tau: f64,
    dt: f64,
    horizon: f64,
) -> Result<PressureTrace, StepError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(StepError::NonPositiveTau(tau));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(StepError::NonPositiveStep(dt));
    }
    if !(horizon >= dt && horizon.is_finite()) {
        return Err(StepError::HorizonTooShort { horizon, dt });
    }
    if !(reference >= 0.0 && reference.is_finite()) {
        return Err(StepError::InvalidReference(reference));
    }
    // The epsilon keeps horizon = n·dt from losing its last sample to rounding.
    let n = libm::floor(horizon / dt + 1e-9) as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let pressures = times
        .iter()
        .map(|&t| first_order_response(start, reference, tau, t))
        .collect();
    Ok(PressureTrace { times, pressures })
}
