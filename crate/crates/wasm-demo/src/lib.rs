//! WebAssembly bindings for the interactive demo page (`www/index.html`).
//!
//! Three operations, each returning a JSON payload with an inline SVG and
//! the numbers behind it:
//!   * `spectrum_panel`  - scale the reference spectrum to a chosen DNI
//!   * `dni_panel`       - walk one hour through the three-stage estimator
//!   * `day_profile_panel` - clear-sky geometry and DNI over a whole day
//!
//! All heavy lifting lives in plain functions so the crate also compiles
//! and tests on native targets; the `wasm_bindgen` exports are wrappers.

use std::sync::OnceLock;

use chrono::NaiveDate;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use solspec::dni::{estimate_dni, DniModelConfig};
use solspec::ingest::HourlySample;
use solspec::plot::{dual_axis_chart, line_chart, Series};
use solspec::solar_geometry::{cos_zenith, EvalInstant, Site};
use solspec::spectrum::{
    effective_optical_depth, load_g173, normalize, scale, SpectralShape, SpectrumColumn,
};

const G173: &str = include_str!("../../../data/astm_g173.csv");

fn shape_for(column: SpectrumColumn) -> &'static SpectralShape {
    static ETR: OnceLock<SpectralShape> = OnceLock::new();
    static GLOBAL: OnceLock<SpectralShape> = OnceLock::new();
    static DIRECT: OnceLock<SpectralShape> = OnceLock::new();
    let slot = match column {
        SpectrumColumn::Extraterrestrial => &ETR,
        SpectrumColumn::GlobalTilt => &GLOBAL,
        SpectrumColumn::DirectCircumsolar => &DIRECT,
    };
    slot.get_or_init(|| {
        let table = load_g173(G173.as_bytes(), column).expect("bundled table is valid");
        normalize(&table).expect("bundled table has positive energy")
    })
}

#[derive(Serialize)]
struct SpectrumPanel {
    svg: String,
    column: &'static str,
    e_w_m2: f64,
    e_std_w_m2: f64,
    effective_optical_depth: Option<f64>,
}

/// Scales the unit-area reference shape to total irradiance `e` and plots it.
pub fn spectrum_panel_impl(e: f64, column: &str) -> Result<String, String> {
    let column: SpectrumColumn = column.parse().map_err(|e| format!("{e}"))?;
    let shape = shape_for(column);
    let table = scale(shape, e).map_err(|e| format!("{e}"))?;
    let svg = line_chart(
        &format!("{} scaled to E = {e:.0} W/m2", column.as_str()),
        "wavelength (nm)",
        "irradiance (W/m2/nm)",
        &[Series {
            label: column.as_str(),
            x: table.wavelength_nm(),
            y: table.irradiance(),
            color: "steelblue",
        }],
    );
    let panel = SpectrumPanel {
        svg,
        column: column.as_str(),
        e_w_m2: e,
        e_std_w_m2: shape.reference_total,
        effective_optical_depth: effective_optical_depth(e, shape.reference_total).ok(),
    };
    serde_json::to_string(&panel).map_err(|e| format!("{e}"))
}

#[derive(Serialize)]
struct DniPanel {
    cos_zenith: f64,
    zenith_deg: f64,
    dni0: f64,
    dni1: f64,
    dni_final: f64,
    night: bool,
    anomalous: bool,
    cloud_transmittance: f64,
    visibility_transmittance: f64,
}

/// Runs one hour through the estimator at the given site and civil time.
#[allow(clippy::too_many_arguments)]
pub fn dni_panel_impl(
    ghi: f64,
    cloud_tenths: f64,
    visibility_km: f64,
    month: u32,
    day: u32,
    hour: f64,
    lat: f64,
    lon: f64,
    tz: f64,
) -> Result<String, String> {
    let site = Site::new(lat, lon, tz).map_err(|e| format!("{e}"))?;
    let timestamp = NaiveDate::from_ymd_opt(2024, month, day)
        .ok_or_else(|| format!("invalid date 2024-{month}-{day}"))?
        .and_hms_opt(0, 0, 0)
        .unwrap()
        + chrono::Duration::seconds((hour.clamp(0.0, 23.99) * 3600.0) as i64);
    let cz = cos_zenith(&site, timestamp);
    let cloud_factor = (cloud_tenths / 10.0).clamp(0.0, 1.0);
    let sample = HourlySample {
        timestamp,
        ghi: ghi.max(0.0),
        ghi_missing: false,
        cos_zenith: cz,
        cloud_factor,
        visibility_km: visibility_km.max(0.0),
    };
    let config = DniModelConfig::default();
    let estimate = estimate_dni(&sample, &config).map_err(|e| format!("{e}"))?;
    let panel = DniPanel {
        cos_zenith: cz,
        zenith_deg: cz.acos().to_degrees(),
        dni0: estimate.dni0,
        dni1: estimate.dni1,
        dni_final: estimate.dni_final,
        night: estimate.night,
        anomalous: estimate.anomalous,
        cloud_transmittance: 1.0 - config.cloud_coefficient * cloud_factor,
        visibility_transmittance: (-1.0 / (sample.visibility_km + config.epsilon)).exp(),
    };
    serde_json::to_string(&panel).map_err(|e| format!("{e}"))
}

#[derive(Serialize)]
struct DayProfilePanel {
    svg: String,
    peak_dni_w_m2: f64,
    daylight_hours: u32,
}

/// Clear-sky model over 24 hours: cos(zenith) on the left axis, estimated
/// DNI after cloud/visibility corrections on the right.
pub fn day_profile_panel_impl(
    lat: f64,
    lon: f64,
    tz: f64,
    month: u32,
    day: u32,
    cloud_tenths: f64,
    visibility_km: f64,
) -> Result<String, String> {
    let site = Site::new(lat, lon, tz).map_err(|e| format!("{e}"))?;
    let date = NaiveDate::from_ymd_opt(2024, month, day)
        .ok_or_else(|| format!("invalid date 2024-{month}-{day}"))?;
    let config = DniModelConfig::default();
    let cloud_factor = (cloud_tenths / 10.0).clamp(0.0, 1.0);

    let mut hours = Vec::with_capacity(96);
    let mut zenith_cos = Vec::with_capacity(96);
    let mut dni = Vec::with_capacity(96);
    let mut peak: f64 = 0.0;
    let mut daylight = 0u32;
    for quarter in 0..96 {
        let clock = quarter as f64 * 0.25;
        let timestamp = date.and_hms_opt(0, 0, 0).unwrap()
            + chrono::Duration::minutes((clock * 60.0) as i64);
        let cz = cos_zenith(&site, EvalInstant::OnTheHour.apply(timestamp));
        let ghi = (1361.0 * cz * 0.75).max(0.0) * (1.0 - 0.75 * cloud_factor);
        let sample = HourlySample {
            timestamp,
            ghi,
            ghi_missing: false,
            cos_zenith: cz,
            cloud_factor,
            visibility_km: visibility_km.max(0.0),
        };
        let estimate = estimate_dni(&sample, &config).map_err(|e| format!("{e}"))?;
        if cz > 0.0 && quarter % 4 == 0 {
            daylight += 1;
        }
        peak = peak.max(estimate.dni_final);
        hours.push(clock);
        zenith_cos.push(cz);
        dni.push(estimate.dni_final);
    }

    let svg = dual_axis_chart(
        &format!("2024-{month:02}-{day:02} at {lat:.2}N {lon:.2}E"),
        "local clock hour",
        &Series {
            label: "cos(zenith)",
            x: &hours,
            y: &zenith_cos,
            color: "tomato",
        },
        &Series {
            label: "DNI (W/m2)",
            x: &hours,
            y: &dni,
            color: "steelblue",
        },
    );
    let panel = DayProfilePanel {
        svg,
        peak_dni_w_m2: peak,
        daylight_hours: daylight,
    };
    serde_json::to_string(&panel).map_err(|e| format!("{e}"))
}

#[wasm_bindgen]
pub fn spectrum_panel(e: f64, column: &str) -> Result<String, JsError> {
    spectrum_panel_impl(e, column).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn dni_panel(
    ghi: f64,
    cloud_tenths: f64,
    visibility_km: f64,
    month: u32,
    day: u32,
    hour: f64,
    lat: f64,
    lon: f64,
    tz: f64,
) -> Result<String, JsError> {
    dni_panel_impl(ghi, cloud_tenths, visibility_km, month, day, hour, lat, lon, tz)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn day_profile_panel(
    lat: f64,
    lon: f64,
    tz: f64,
    month: u32,
    day: u32,
    cloud_tenths: f64,
    visibility_km: f64,
) -> Result<String, JsError> {
    day_profile_panel_impl(lat, lon, tz, month, day, cloud_tenths, visibility_km)
        .map_err(|e| JsError::new(&e))
}
