//! Solar position: declination, equation of time, and the cosine of the
//! solar zenith angle for a site and civil timestamp.
//!
//! The formulation is the classic Spencer Fourier fit for declination and
//! equation of time, with true solar time recovered from civil time via the
//! longitude offset from the timezone meridian. Zenith accuracy is a few
//! tenths of a degree, which is far below the uncertainty of the broadband
//! cloud/visibility corrections this feeds.

use chrono::{Datelike, NaiveDateTime, Timelike};

use crate::error::{Error, Result};

/// Observation site described by geographic coordinates and a fixed UTC offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    /// Degrees north, in [-90, 90].
    pub latitude: f64,
    /// Degrees east, in [-180, 180].
    pub longitude: f64,
    /// Signed hours, in [-14, 14].
    pub utc_offset_hours: f64,
}

/// Seoul ASOS station (station metadata, used as the default site).
pub const SEOUL: Site = Site {
    latitude: 37.5714,
    longitude: 126.9658,
    utc_offset_hours: 9.0,
};

impl Site {
    pub fn new(latitude: f64, longitude: f64, utc_offset_hours: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&latitude) || !latitude.is_finite() {
            return Err(Error::invalid(format!(
                "latitude {latitude} outside [-90, 90]"
            )));
        }
        if !(-180.0..=180.0).contains(&longitude) || !longitude.is_finite() {
            return Err(Error::invalid(format!(
                "longitude {longitude} outside [-180, 180]"
            )));
        }
        if !(-14.0..=14.0).contains(&utc_offset_hours) || !utc_offset_hours.is_finite() {
            return Err(Error::invalid(format!(
                "utc offset {utc_offset_hours} outside [-14, 14]"
            )));
        }
        Ok(Self {
            latitude,
            longitude,
            utc_offset_hours,
        })
    }
}

impl Default for Site {
    fn default() -> Self {
        SEOUL
    }
}

/// Solar position at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarPosition {
    /// Declination, radians.
    pub declination: f64,
    /// Equation of time, minutes.
    pub equation_of_time: f64,
    /// Hour angle, radians (0 at local solar noon, positive afternoon).
    pub hour_angle: f64,
    /// cos of the solar zenith angle, clamped to [-1, 1].
    pub cos_zenith: f64,
}

/// Which instant within an hour-labeled accumulation row the solar position
/// is evaluated at.
///
/// An ASOS row labeled `HH:00` holds energy accumulated over the preceding
/// hour, so the geometric midpoint `HH-0.5 h` matches the mean irradiance
/// better than the label instant. Both are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalInstant {
    #[default]
    IntervalMidpoint,
    OnTheHour,
}

impl EvalInstant {
    pub fn apply(self, timestamp: NaiveDateTime) -> NaiveDateTime {
        match self {
            EvalInstant::IntervalMidpoint => timestamp - chrono::Duration::minutes(30),
            EvalInstant::OnTheHour => timestamp,
        }
    }
}

fn check_day_of_year(day_of_year: f64) -> Result<()> {
    if !(1.0..367.0).contains(&day_of_year) {
        return Err(Error::invalid(format!(
            "day_of_year {day_of_year} outside [1, 367)"
        )));
    }
    Ok(())
}

/// Day angle in radians for the Spencer series.
fn day_angle(day_of_year: f64) -> f64 {
    std::f64::consts::TAU * (day_of_year - 1.0) / 365.0
}

/// Solar declination in radians (Spencer series). Accepts fractional days;
/// day 366 is valid for leap years.
pub fn solar_declination(day_of_year: f64) -> Result<f64> {
    check_day_of_year(day_of_year)?;
    let g = day_angle(day_of_year);
    Ok(0.006918 - 0.399912 * g.cos() + 0.070257 * g.sin()
        - 0.006758 * (2.0 * g).cos()
        + 0.000907 * (2.0 * g).sin()
        - 0.002697 * (3.0 * g).cos()
        + 0.00148 * (3.0 * g).sin())
}

/// Equation of time in minutes (solar time minus clock time on the local
/// meridian). Bounded by about +-16.4 minutes.
pub fn equation_of_time(day_of_year: f64) -> Result<f64> {
    check_day_of_year(day_of_year)?;
    let g = day_angle(day_of_year);
    Ok(229.18
        * (0.000075 + 0.001868 * g.cos()
            - 0.032077 * g.sin()
            - 0.014615 * (2.0 * g).cos()
            - 0.04089 * (2.0 * g).sin()))
}

/// cos(zenith) from latitude, declination and hour angle, all in radians.
pub fn cos_zenith_from_angles(latitude: f64, declination: f64, hour_angle: f64) -> f64 {
    let c =
        latitude.sin() * declination.sin() + latitude.cos() * declination.cos() * hour_angle.cos();
    c.clamp(-1.0, 1.0)
}

/// Full solar position for a civil timestamp at a site.
pub fn solar_position(site: &Site, timestamp: NaiveDateTime) -> SolarPosition {
    let day = timestamp.ordinal() as f64
        + (timestamp.hour() as f64
            + timestamp.minute() as f64 / 60.0
            + timestamp.second() as f64 / 3600.0)
            / 24.0;
    // ordinal() is in 1..=366, so the fractional day stays inside [1, 367)
    let declination = solar_declination(day).expect("ordinal day in range");
    let eot = equation_of_time(day).expect("ordinal day in range");

    let clock_minutes = timestamp.hour() as f64 * 60.0
        + timestamp.minute() as f64
        + timestamp.second() as f64 / 60.0;
    // 4 minutes of solar time per degree of longitude away from the zone meridian
    let tst_minutes =
        clock_minutes + 4.0 * (site.longitude - 15.0 * site.utc_offset_hours) + eot;
    let hour_angle = (tst_minutes / 4.0 - 180.0).to_radians();

    let cos_zenith = cos_zenith_from_angles(site.latitude.to_radians(), declination, hour_angle);
    SolarPosition {
        declination,
        equation_of_time: eot,
        hour_angle,
        cos_zenith,
    }
}

/// cos of the solar zenith angle; negative when the sun is below the horizon.
pub fn cos_zenith(site: &Site, timestamp: NaiveDateTime) -> f64 {
    solar_position(site, timestamp).cos_zenith
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn ts(y: i32, m: u32, d: u32, h: u32, min: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(y, m, d)
            .unwrap()
            .and_hms_opt(h, min, 0)
            .unwrap()
    }

    #[test]
    fn declination_solstices_and_equinox() {
        // Frozen against an independent low-precision almanac evaluation:
        // day 172 -> +0.409017, day 80 -> +0.002584, day 355 -> -0.408970 rad.
        assert_abs_diff_eq!(solar_declination(172.0).unwrap(), 0.4093, epsilon = 0.01);
        assert_abs_diff_eq!(solar_declination(80.0).unwrap(), 0.0, epsilon = 0.02);
        assert_abs_diff_eq!(solar_declination(355.0).unwrap(), -0.4093, epsilon = 0.01);
    }

    #[test]
    fn declination_bounded_by_obliquity() {
        for d in 1..=366 {
            let dec = solar_declination(d as f64).unwrap();
            assert!(dec.abs() <= 0.4101, "day {d}: {dec}");
        }
    }

    #[test]
    fn declination_rejects_out_of_range() {
        assert!(solar_declination(0.0).is_err());
        assert!(solar_declination(367.0).is_err());
        assert!(solar_declination(f64::NAN).is_err());
    }

    #[test]
    fn equation_of_time_matches_published_extremes() {
        // Published equation-of-time tables: early November ~ +16.4 min,
        // mid February ~ -14.2 min.
        assert_abs_diff_eq!(equation_of_time(307.0).unwrap(), 16.4, epsilon = 1.0);
        assert_abs_diff_eq!(equation_of_time(43.0).unwrap(), -14.2, epsilon = 1.0);
    }

    #[test]
    fn equation_of_time_bounded() {
        for d in 1..=366 {
            let e = equation_of_time(d as f64).unwrap();
            assert!(e.abs() <= 17.0, "day {d}: {e}");
        }
    }

    #[test]
    fn zenith_identity_when_latitude_equals_declination() {
        let dec = solar_declination(172.0).unwrap();
        assert_eq!(cos_zenith_from_angles(dec, dec, 0.0), 1.0);
    }

    #[test]
    fn seoul_equinox_noon_reduces_to_cos_latitude() {
        // At the March equinox the declination is ~0 and the formula at solar
        // noon reduces to cos(latitude) = cos(37.57 deg) = 0.7926.
        let best = (0..24 * 60)
            .map(|m| cos_zenith(&SEOUL, ts(2024, 3, 20, (m / 60) as u32, (m % 60) as u32)))
            .fold(f64::MIN, f64::max);
        assert_abs_diff_eq!(best, 0.7926, epsilon = 0.01);
    }

    #[test]
    fn midnight_sun_below_horizon() {
        // Local solar midnight at a mid-latitude site.
        assert!(cos_zenith(&SEOUL, ts(2024, 6, 20, 0, 30)) < 0.0);
        assert!(cos_zenith(&SEOUL, ts(2024, 12, 21, 1, 0)) < 0.0);
    }

    #[test]
    fn daily_maximum_at_solar_noon() {
        // Hourly argmax must land on the hour nearest local solar noon.
        // Seoul solar noon is ~12:32-12:39 clock time depending on season.
        for (m, d) in [(1u32, 15u32), (4, 10), (7, 1), (10, 20)] {
            let values: Vec<f64> = (0..24).map(|h| cos_zenith(&SEOUL, ts(2024, m, d, h, 0))).collect();
            let argmax = values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            let noon = solar_position(&SEOUL, ts(2024, m, d, 12, 0));
            // clock hour whose value sits nearest hour_angle = 0
            let solar_noon_clock = 12.0 - noon.hour_angle.to_degrees() / 15.0;
            assert_eq!(argmax as i64, solar_noon_clock.round() as i64, "{m}/{d}");
        }
    }

    #[test]
    fn hour_angle_antisymmetry() {
        let phi = 37.57f64.to_radians();
        let dec = solar_declination(120.0).unwrap();
        for k in 0..=20 {
            let h = -
                std::f64::consts::PI + k as f64 * std::f64::consts::PI / 10.0;
            assert_abs_diff_eq!(
                cos_zenith_from_angles(phi, dec, h),
                cos_zenith_from_angles(phi, dec, -h),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn declination_annual_antisymmetry() {
        for d in 1..=183 {
            let a = solar_declination(d as f64).unwrap();
            let b = solar_declination(d as f64 + 182.5).unwrap();
            assert!((a + b).abs() < 0.03, "day {d}: {a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn cos_zenith_always_in_unit_interval(
            lat in -90.0f64..=90.0,
            lon in -180.0f64..=180.0,
            tz in -14.0f64..=14.0,
            day in 0u32..366,
            minute in 0u32..(24 * 60),
        ) {
            let site = Site::new(lat, lon, tz).unwrap();
            let base = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap()
                .and_hms_opt(0, 0, 0).unwrap()
                + chrono::Duration::days(day as i64)
                + chrono::Duration::minutes(minute as i64);
            let c = cos_zenith(&site, base);
            prop_assert!((-1.0..=1.0).contains(&c));
        }
    }
}
