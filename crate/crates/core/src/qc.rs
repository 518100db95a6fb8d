//! Daily aggregation and anomaly flagging for the estimated series.

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use serde::Serialize;

use crate::dni::DniEstimate;
use crate::error::{Error, Result};
use crate::ingest::HourlySample;

/// Which hours participate in a daily mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AggregationMode {
    /// All 24 hourly rows, night zeros included.
    #[default]
    AllHours,
    /// Only hours with the sun above the horizon (cos zenith > 0).
    DaylightOnly,
}

impl AggregationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AggregationMode::AllHours => "all_hours",
            AggregationMode::DaylightOnly => "daylight_only",
        }
    }
}

/// Per-day mean irradiance values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DailyAggregate {
    #[serde(with = "date_format")]
    pub date: NaiveDate,
    pub mean_ghi: f64,
    pub mean_dni: f64,
    /// Hours that entered the means.
    pub n_hours: u32,
    /// Flagged hours among them.
    pub n_anomalous: u32,
}

mod date_format {
    use chrono::NaiveDate;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(d: &NaiveDate, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&d.format("%Y-%m-%d").to_string())
    }
}

/// One flagged hour, carrying the concurrent solar geometry so the
/// low-sun division mechanism is visible in the report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnomalyEvent {
    #[serde(with = "ts_format")]
    pub timestamp: NaiveDateTime,
    pub dni_final: f64,
    pub ghi: f64,
    pub cos_zenith: f64,
}

mod ts_format {
    use chrono::NaiveDateTime;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(t: &NaiveDateTime, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.format("%Y-%m-%dT%H:%M:%S").to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalySummary {
    pub threshold: f64,
    pub n_flagged: usize,
    pub events: Vec<AnomalyEvent>,
}

fn check_sorted(series: &[(HourlySample, DniEstimate)]) -> Result<()> {
    for pair in series.windows(2) {
        if pair[1].0.timestamp <= pair[0].0.timestamp {
            return Err(Error::invalid(format!(
                "series not sorted by timestamp at {}",
                pair[1].0.timestamp
            )));
        }
    }
    Ok(())
}

/// Per-calendar-date arithmetic means of GHI and final DNI.
pub fn daily_means(
    series: &[(HourlySample, DniEstimate)],
    mode: AggregationMode,
) -> Result<Vec<DailyAggregate>> {
    check_sorted(series)?;

    let mut out: Vec<DailyAggregate> = Vec::new();
    let mut current: Option<(NaiveDate, f64, f64, u32, u32)> = None;

    for (sample, estimate) in series {
        if mode == AggregationMode::DaylightOnly && sample.cos_zenith <= 0.0 {
            continue;
        }
        let date = sample.timestamp.date();
        let slot = match &mut current {
            Some(slot) if slot.0 == date => slot,
            _ => {
                if let Some(done) = current.take() {
                    out.push(finish_day(done));
                }
                current = Some((date, 0.0, 0.0, 0, 0));
                current.as_mut().unwrap()
            }
        };
        slot.1 += sample.ghi;
        slot.2 += estimate.dni_final;
        slot.3 += 1;
        slot.4 += u32::from(estimate.anomalous);
    }
    if let Some(done) = current.take() {
        out.push(finish_day(done));
    }
    Ok(out)
}

fn finish_day((date, ghi_sum, dni_sum, n, n_anomalous): (NaiveDate, f64, f64, u32, u32)) -> DailyAggregate {
    DailyAggregate {
        date,
        mean_ghi: ghi_sum / f64::from(n),
        mean_dni: dni_sum / f64::from(n),
        n_hours: n,
        n_anomalous,
    }
}

/// Flags every hour whose final DNI exceeds `threshold`.
pub fn flag_anomalies(
    series: &[(HourlySample, DniEstimate)],
    threshold: f64,
) -> Result<(Vec<bool>, AnomalySummary)> {
    if !(threshold > 0.0) {
        return Err(Error::invalid(format!(
            "anomaly threshold must be positive, got {threshold}"
        )));
    }
    let flags: Vec<bool> = series
        .iter()
        .map(|(_, e)| e.dni_final > threshold)
        .collect();
    let events: Vec<AnomalyEvent> = series
        .iter()
        .zip(&flags)
        .filter(|(_, &f)| f)
        .map(|((s, e), _)| AnomalyEvent {
            timestamp: s.timestamp,
            dni_final: e.dni_final,
            ghi: s.ghi,
            cos_zenith: s.cos_zenith,
        })
        .collect();
    let summary = AnomalySummary {
        threshold,
        n_flagged: events.len(),
        events,
    };
    Ok((flags, summary))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
}

impl SummaryStats {
    fn over(values: impl Iterator<Item = f64>) -> Option<SummaryStats> {
        let mut n = 0u32;
        let mut sum = 0.0;
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for v in values {
            n += 1;
            sum += v;
            max = max.max(v);
            min = min.min(v);
        }
        (n > 0).then(|| SummaryStats {
            mean: sum / f64::from(n),
            max,
            min,
        })
    }
}

/// Calendar-month statistics of the daily means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonthlySummary {
    pub year: i32,
    pub month: u32,
    pub n_days: u32,
    pub ghi: SummaryStats,
    pub dni: SummaryStats,
}

/// Groups daily aggregates by calendar month.
pub fn seasonal_summary(aggregates: &[DailyAggregate]) -> Vec<MonthlySummary> {
    let mut keys: Vec<(i32, u32)> = aggregates
        .iter()
        .map(|a| (a.date.year(), a.date.month()))
        .collect();
    keys.dedup();
    keys.sort_unstable();
    keys.dedup();

    keys.into_iter()
        .map(|(year, month)| {
            let days: Vec<&DailyAggregate> = aggregates
                .iter()
                .filter(|a| a.date.year() == year && a.date.month() == month)
                .collect();
            MonthlySummary {
                year,
                month,
                n_days: days.len() as u32,
                ghi: SummaryStats::over(days.iter().map(|a| a.mean_ghi)).unwrap(),
                dni: SummaryStats::over(days.iter().map(|a| a.mean_dni)).unwrap(),
            }
        })
        .collect()
}
