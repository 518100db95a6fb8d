//! KMA ASOS hourly CSV ingestion.
//!
//! The source format is one row per hour with five columns: row index,
//! local timestamp, solar radiation accumulated over the hour (MJ/m2,
//! blank at night), total cloud amount in tenths, and visibility in units
//! of 10 m. Headers may be Korean (일시, 일사(MJ/m2), 전운량(10분위),
//! 시정(10m)), English, or absent entirely (positional columns).

use std::io::Read;

use chrono::{NaiveDate, NaiveDateTime, Timelike};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solar_geometry::{cos_zenith, EvalInstant, Site};

/// One raw hourly observation row.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRecord {
    /// Row ordinal as recorded in the file.
    pub index: u64,
    /// Local civil timestamp (KST for Seoul exports).
    pub timestamp: NaiveDateTime,
    /// Energy flux accumulated over the hour, MJ/m2; `None` for blank cells.
    pub solar_radiation: Option<f64>,
    /// Total cloud amount in tenths, 0..=10.
    pub cloud_total: u8,
    /// Visibility in units of 10 m.
    pub visibility_raw: u32,
}

/// One physics-ready hourly sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HourlySample {
    /// Local civil timestamp of the source row.
    #[serde(with = "timestamp_format")]
    pub timestamp: NaiveDateTime,
    /// Mean global horizontal irradiance over the hour, W/m2.
    pub ghi: f64,
    /// True iff the source radiation cell was blank.
    pub ghi_missing: bool,
    /// cos of the solar zenith angle at the configured evaluation instant.
    pub cos_zenith: f64,
    /// Cloud cover divided by 10, in [0, 1].
    pub cloud_factor: f64,
    /// Visibility in km.
    pub visibility_km: f64,
}

mod timestamp_format {
    use chrono::NaiveDateTime;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(ts: &NaiveDateTime, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&ts.format("%Y-%m-%dT%H:%M:%S").to_string())
    }
}

/// Parsing behavior toggles.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// When a cloud or visibility cell is blank, substitute cloud = 0 and
    /// the previous row's visibility instead of rejecting the row.
    pub lenient: bool,
}

const CANONICAL_HEADER: &str = "index,일시,일사(MJ/m2),전운량(10분위),시정(10m)";

#[derive(Debug, Clone, Copy)]
struct ColumnMap {
    index: usize,
    timestamp: usize,
    radiation: usize,
    cloud: usize,
    visibility: usize,
}

impl ColumnMap {
    const POSITIONAL: ColumnMap = ColumnMap {
        index: 0,
        timestamp: 1,
        radiation: 2,
        cloud: 3,
        visibility: 4,
    };

    fn from_header(fields: &[&str]) -> Result<ColumnMap> {
        let find = |names: &[&str]| -> Option<usize> {
            fields.iter().position(|f| {
                let lower = f.trim().to_lowercase();
                names.iter().any(|n| lower.contains(n))
            })
        };
        let timestamp = find(&["일시", "date"]);
        let radiation = find(&["일사", "solar radiation"]);
        let cloud = find(&["전운량", "cloud"]);
        let visibility = find(&["시정", "visibility"]);
        match (timestamp, radiation, cloud, visibility) {
            (Some(timestamp), Some(radiation), Some(cloud), Some(visibility)) => Ok(ColumnMap {
                index: find(&["index", "no"]).unwrap_or(0),
                timestamp,
                radiation,
                cloud,
                visibility,
            }),
            _ => Err(Error::FileFormat(format!(
                "header is missing a required column (need timestamp, solar radiation, \
                 cloud amount, visibility); got: {}",
                fields.join(",")
            ))),
        }
    }
}

/// Accepts `YYYY.M.D HH:MM[:SS]` with unpadded month/day as exported by KMA,
/// plus `-` or `/` as the date separator.
fn parse_timestamp(text: &str) -> Option<NaiveDateTime> {
    let mut parts = text.split_whitespace();
    let date = parts.next()?;
    let time = parts.next()?;
    if parts.next().is_some() {
        return None;
    }

    let sep = ['.', '-', '/'].into_iter().find(|s| date.contains(*s))?;
    let mut dmy = date.split(sep);
    let year: i32 = dmy.next()?.parse().ok()?;
    let month: u32 = dmy.next()?.parse().ok()?;
    let day: u32 = dmy.next()?.parse().ok()?;
    if dmy.next().is_some() {
        return None;
    }

    let mut hms = time.split(':');
    let hour: u32 = hms.next()?.parse().ok()?;
    let minute: u32 = hms.next()?.parse().ok()?;
    let second: u32 = match hms.next() {
        Some(s) => s.parse().ok()?,
        None => 0,
    };
    if hms.next().is_some() {
        return None;
    }

    NaiveDate::from_ymd_opt(year, month, day)?.and_hms_opt(hour, minute, second)
}

fn looks_like_header(fields: &[&str]) -> bool {
    fields
        .first()
        .map(|f| f.trim().parse::<u64>().is_err())
        .unwrap_or(true)
}

/// Parses an ASOS CSV stream into observation records (strict mode).
pub fn parse_asos_csv<R: Read>(source: R) -> Result<Vec<ObservationRecord>> {
    parse_asos_csv_with(source, &ParseOptions::default())
}

/// Parses an ASOS CSV stream with explicit options.
pub fn parse_asos_csv_with<R: Read>(
    mut source: R,
    options: &ParseOptions,
) -> Result<Vec<ObservationRecord>> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;

    let mut records = Vec::new();
    let mut columns: Option<ColumnMap> = None;
    let mut last_visibility: Option<u32> = None;

    for (line_no, raw_line) in text.lines().enumerate() {
        let row = line_no + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();

        let map = match columns {
            Some(map) => map,
            None => {
                let map = if looks_like_header(&fields) {
                    let map = ColumnMap::from_header(&fields)?;
                    columns = Some(map);
                    continue;
                } else {
                    ColumnMap::POSITIONAL
                };
                columns = Some(map);
                map
            }
        };

        let need = 1 + [map.index, map.timestamp, map.radiation, map.cloud, map.visibility]
            .into_iter()
            .max()
            .unwrap();
        if fields.len() < need {
            return Err(Error::row(
                row,
                format!("expected at least {need} columns, found {}", fields.len()),
            ));
        }

        let index: u64 = fields[map.index].trim().parse().map_err(|_| {
            Error::row(row, format!("invalid index {:?}", fields[map.index]))
        })?;

        let ts_text = fields[map.timestamp].trim();
        let timestamp = parse_timestamp(ts_text)
            .ok_or_else(|| Error::row(row, format!("malformed datetime {ts_text:?}")))?;

        let rad_text = fields[map.radiation].trim();
        let solar_radiation = if rad_text.is_empty() {
            None
        } else {
            let v: f64 = rad_text
                .parse()
                .map_err(|_| Error::row(row, format!("invalid solar radiation {rad_text:?}")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::row(row, format!("negative solar radiation {v}")));
            }
            Some(v)
        };

        let cloud_text = fields[map.cloud].trim();
        let cloud_total: u8 = if cloud_text.is_empty() {
            if options.lenient {
                0
            } else {
                return Err(Error::row(row, "missing cloud amount".to_string()));
            }
        } else {
            let c: u8 = cloud_text
                .parse()
                .map_err(|_| Error::row(row, format!("invalid cloud amount {cloud_text:?}")))?;
            if c > 10 {
                return Err(Error::row(
                    row,
                    format!("cloud amount {c} outside 0..=10"),
                ));
            }
            c
        };

        let vis_text = fields[map.visibility].trim();
        let visibility_raw: u32 = if vis_text.is_empty() {
            if options.lenient {
                last_visibility.unwrap_or(0)
            } else {
                return Err(Error::row(row, "missing visibility".to_string()));
            }
        } else {
            vis_text
                .parse()
                .map_err(|_| Error::row(row, format!("invalid visibility {vis_text:?}")))?
        };
        last_visibility = Some(visibility_raw);

        if let Some(prev) = records.last() {
            let prev: &ObservationRecord = prev;
            if timestamp <= prev.timestamp {
                return Err(Error::FileFormat(format!(
                    "non-monotonic timestamps: row {row} ({timestamp}) does not advance past {}",
                    prev.timestamp
                )));
            }
        }
        if timestamp.minute() != 0 || timestamp.second() != 0 {
            return Err(Error::row(
                row,
                format!("timestamp {timestamp} is not hour-aligned"),
            ));
        }

        records.push(ObservationRecord {
            index,
            timestamp,
            solar_radiation,
            cloud_total,
            visibility_raw,
        });
    }

    Ok(records)
}

/// Serializes records back to the canonical ASOS CSV layout. Parsing the
/// output reproduces the input records field for field.
pub fn write_asos_csv(records: &[ObservationRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 40 + 64);
    out.push_str(CANONICAL_HEADER);
    out.push('\n');
    for r in records {
        let t = r.timestamp;
        let date = t.date();
        let rad = match r.solar_radiation {
            Some(v) => format!("{v}"),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{}.{}.{} {:02}:{:02}:{:02},{},{},{}\n",
            r.index,
            chrono::Datelike::year(&date),
            chrono::Datelike::month(&date),
            chrono::Datelike::day(&date),
            t.hour(),
            t.minute(),
            t.second(),
            rad,
            r.cloud_total,
            r.visibility_raw,
        ));
    }
    out
}

/// Converts an hourly radiation accumulation to a mean flux.
///
/// A present value `v` MJ/m2 over one hour is `v * 1e6 / 3600` W/m2; a blank
/// cell maps to 0 W/m2 with the missing flag set.
pub fn radiation_to_ghi(solar_radiation: Option<f64>) -> Result<(f64, bool)> {
    match solar_radiation {
        Some(v) if !v.is_finite() || v < 0.0 => Err(Error::invalid(format!(
            "solar radiation must be non-negative, got {v}"
        ))),
        Some(v) => Ok((v * 1e6 / 3600.0, false)),
        None => Ok((0.0, true)),
    }
}

/// Converts a raw record into a physics-ready sample.
pub fn to_hourly_sample(
    record: &ObservationRecord,
    site: &Site,
    instant: EvalInstant,
) -> Result<HourlySample> {
    let (ghi, ghi_missing) = radiation_to_ghi(record.solar_radiation)?;
    if record.cloud_total > 10 {
        return Err(Error::invalid(format!(
            "cloud amount {} outside 0..=10",
            record.cloud_total
        )));
    }
    Ok(HourlySample {
        timestamp: record.timestamp,
        ghi,
        ghi_missing,
        cos_zenith: cos_zenith(site, instant.apply(record.timestamp)),
        cloud_factor: f64::from(record.cloud_total) / 10.0,
        visibility_km: f64::from(record.visibility_raw) * 10.0 / 1000.0,
    })
}

/// Converts a whole file of records.
pub fn to_hourly_samples(
    records: &[ObservationRecord],
    site: &Site,
    instant: EvalInstant,
) -> Result<Vec<HourlySample>> {
    records
        .iter()
        .map(|r| to_hourly_sample(r, site, instant))
        .collect()
}
