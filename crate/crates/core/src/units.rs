//! Boundary unit conversions.
//!
//! Config files and CSV data use MPa, mm and degrees; everything past the
//! boundary is SI.

/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

pub const PA_PER_MPA: f64 = 1.0e6;
pub const M_PER_MM: f64 = 1.0e-3;

#[inline]
pub fn mpa_to_pa(mpa: f64) -> f64 {
    mpa * PA_PER_MPA
}

#[inline]
pub fn pa_to_mpa(pa: f64) -> f64 {
    pa / PA_PER_MPA
}

#[inline]
pub fn mm_to_m(mm: f64) -> f64 {
    mm * M_PER_MM
}

#[inline]
pub fn m_to_mm(m: f64) -> f64 {
    m / M_PER_MM
}

#[inline]
pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

#[inline]
pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }

    proptest! {
        #[test]
        fn round_trips_stay_within_1e_12(x in -1.0e6f64..1.0e6) {
            prop_assert!(rel_err(pa_to_mpa(mpa_to_pa(x)), x) < 1e-12);
            prop_assert!(rel_err(m_to_mm(mm_to_m(x)), x) < 1e-12);
            prop_assert!(rel_err(rad_to_deg(deg_to_rad(x)), x) < 1e-12);
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(mpa_to_pa(1.5), 1.5e6);
        assert_eq!(mm_to_m(2.5), 0.0025);
        assert!((deg_to_rad(180.0) - core::f64::consts::PI).abs() < 1e-15);
    }
}
