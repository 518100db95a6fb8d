//! Synthetic ASOS-format year generator for self-contained pipeline runs.
//!
//! Clear-sky GHI is `max(0, S * cos(zenith) * atmospheric_factor)` at the
//! interval midpoint; cloudy mode overlays seeded multi-day cloud episodes
//! (which also attenuate the generated GHI by the same `1 - 0.75 * c/10`
//! factor the estimator assumes) and occasional haze spells that depress
//! visibility. Night rows get a blank radiation cell, like the real data.

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};
use crate::ingest::ObservationRecord;
use crate::rng::DeterministicRng;
use crate::solar_geometry::{cos_zenith, EvalInstant, Site};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub year: i32,
    pub site: Site,
    pub seed: u64,
    /// Top-of-atmosphere scale S, W/m2.
    pub solar_constant: f64,
    /// Broadband clear-sky transmittance applied to S * cos(zenith).
    pub atmospheric_factor: f64,
    /// Overlay cloud/haze episodes; off gives a pure clear-sky year.
    pub cloudy: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            year: 2024,
            site: Site::default(),
            seed: 42,
            solar_constant: 1361.0,
            atmospheric_factor: 0.75,
            cloudy: true,
        }
    }
}

/// Generates one full year of hourly observation rows (8,784 for a leap
/// year such as 2024).
pub fn generate_year(config: &SynthConfig) -> Result<Vec<ObservationRecord>> {
    if !(config.solar_constant > 0.0) || !(0.0..=1.0).contains(&config.atmospheric_factor) {
        return Err(Error::invalid(
            "solar_constant must be positive and atmospheric_factor in [0, 1]",
        ));
    }
    let start = NaiveDate::from_ymd_opt(config.year, 1, 1)
        .ok_or_else(|| Error::invalid(format!("invalid year {}", config.year)))?
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let days_in_year = if NaiveDate::from_ymd_opt(config.year, 2, 29).is_some() {
        366
    } else {
        365
    };
    let n_hours = days_in_year * 24;

    let mut rng = DeterministicRng::seeded(config.seed);
    let cloud_by_day = episode_series(&mut rng, days_in_year, config.cloudy);
    let visibility_by_day = visibility_series(&mut rng, days_in_year, config.cloudy);

    let mut records = Vec::with_capacity(n_hours);
    for h in 0..n_hours {
        let timestamp: NaiveDateTime = start + Duration::hours(h as i64);
        let day = (timestamp.ordinal0()) as usize;
        let cz = cos_zenith(&config.site, EvalInstant::IntervalMidpoint.apply(timestamp));

        let cloud_total = if cz > 0.0 {
            cloud_by_day[day].sample_hour(&mut rng)
        } else {
            // night rows still report cloudiness; keep the episode level
            cloud_by_day[day].base
        };
        let visibility_raw = visibility_by_day[day].sample_hour(&mut rng);

        let solar_radiation = if cz > 0.0 {
            let clear = config.solar_constant * cz * config.atmospheric_factor;
            let observed = clear * (1.0 - 0.75 * f64::from(cloud_total) / 10.0);
            // MJ/m2 over the hour, quantized like the source data
            let mj = (observed * 3600.0 / 1e6 * 100.0).round() / 100.0;
            Some(mj)
        } else {
            None
        };

        records.push(ObservationRecord {
            index: h as u64,
            timestamp,
            solar_radiation,
            cloud_total,
            visibility_raw,
        });
    }
    Ok(records)
}

#[derive(Clone, Copy)]
struct CloudDay {
    base: u8,
    jitter: bool,
}

impl CloudDay {
    fn sample_hour(self, rng: &mut DeterministicRng) -> u8 {
        if !self.jitter {
            return self.base;
        }
        let delta = rng.index(5) as i32 - 2; // -2..=2
        (i32::from(self.base) + delta).clamp(0, 10) as u8
    }
}

fn episode_series(rng: &mut DeterministicRng, days: usize, cloudy: bool) -> Vec<CloudDay> {
    let mut out = vec![
        CloudDay {
            base: 0,
            jitter: false
        };
        days
    ];
    if !cloudy {
        return out;
    }
    let mut day = 0usize;
    while day < days {
        // clear stretch, then a 1-4 day episode
        day += 2 + rng.index(6);
        if day >= days {
            break;
        }
        let length = 1 + rng.index(4);
        let base = 4 + rng.index(7) as u8; // 4..=10
        for d in day..(day + length).min(days) {
            out[d] = CloudDay { base, jitter: true };
        }
        day += length;
    }
    out
}

#[derive(Clone, Copy)]
struct VisibilityDay {
    /// Units of 10 m.
    base: u32,
    spread: u32,
}

impl VisibilityDay {
    fn sample_hour(self, rng: &mut DeterministicRng) -> u32 {
        self.base + rng.index(self.spread as usize + 1) as u32
    }
}

fn visibility_series(rng: &mut DeterministicRng, days: usize, cloudy: bool) -> Vec<VisibilityDay> {
    let clear = VisibilityDay {
        base: 2000,
        spread: 0,
    };
    let mut out = vec![clear; days];
    if !cloudy {
        return out;
    }
    for day in out.iter_mut() {
        *day = VisibilityDay {
            base: 1200,
            spread: 1800,
        };
    }
    // haze spells: low visibility for a few days at a time
    let mut day = 0usize;
    while day < days {
        day += 5 + rng.index(15);
        if day >= days {
            break;
        }
        let length = 1 + rng.index(3);
        for d in day..(day + length).min(days) {
            out[d] = VisibilityDay {
                base: 200,
                spread: 600,
            };
        }
        day += length;
    }
    out
}
