//! File serialization: column-exact CSV writers, JSON views, and the SVG
//! figure wrappers. Float cells use the shortest round-trip formatting, so
//! repeated runs produce byte-identical files.

use anyhow::{bail, Context, Result};
use chrono::NaiveDateTime;
use serde::Serialize;

use solspec::dni::DniEstimate;
use solspec::ingest::HourlySample;
use solspec::plot::{dual_axis_chart, line_chart, scatter_chart, Series};
use solspec::qc::{AnomalySummary, DailyAggregate, MonthlySummary};
use solspec::regression::{ModelReport, ModelScatter};
use solspec::spectrum::SpectrumTable;

pub const SAMPLES_HEADER: &str =
    "timestamp,ghi_w_m2,ghi_missing,cos_zenith,cloud_factor,visibility_km";
pub const ESTIMATES_HEADER: &str =
    "timestamp,ghi_w_m2,cos_zenith,dni0,dni1,dni_final,night,anomalous";

fn ts(t: &NaiveDateTime) -> String {
    t.format("%Y-%m-%dT%H:%M:%S").to_string()
}

pub fn samples_csv(samples: &[HourlySample]) -> String {
    let mut out = String::from(SAMPLES_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            ts(&s.timestamp),
            s.ghi,
            s.ghi_missing,
            s.cos_zenith,
            s.cloud_factor,
            s.visibility_km
        ));
    }
    out
}

/// Reads back a samples.csv produced by [`samples_csv`].
pub fn parse_samples_csv(text: &str) -> Result<Vec<HourlySample>> {
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line_no == 0 {
            if line != SAMPLES_HEADER {
                bail!("unexpected samples header {line:?}");
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let row = line_no + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            bail!("row {row}: expected 6 columns, found {}", fields.len());
        }
        let timestamp = NaiveDateTime::parse_from_str(fields[0], "%Y-%m-%dT%H:%M:%S")
            .with_context(|| format!("row {row}: bad timestamp {:?}", fields[0]))?;
        let parse_f64 = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .with_context(|| format!("row {row}: bad number {:?}", fields[i]))
        };
        let parse_bool = |i: usize| -> Result<bool> {
            fields[i]
                .parse()
                .with_context(|| format!("row {row}: bad flag {:?}", fields[i]))
        };
        out.push(HourlySample {
            timestamp,
            ghi: parse_f64(1)?,
            ghi_missing: parse_bool(2)?,
            cos_zenith: parse_f64(3)?,
            cloud_factor: parse_f64(4)?,
            visibility_km: parse_f64(5)?,
        });
    }
    Ok(out)
}

#[derive(Serialize)]
pub struct EstimateRow {
    pub timestamp: String,
    pub ghi_w_m2: f64,
    pub cos_zenith: f64,
    pub dni0: f64,
    pub dni1: f64,
    pub dni_final: f64,
    pub night: bool,
    pub anomalous: bool,
}

impl From<&(HourlySample, DniEstimate)> for EstimateRow {
    fn from((s, e): &(HourlySample, DniEstimate)) -> Self {
        EstimateRow {
            timestamp: ts(&s.timestamp),
            ghi_w_m2: s.ghi,
            cos_zenith: s.cos_zenith,
            dni0: e.dni0,
            dni1: e.dni1,
            dni_final: e.dni_final,
            night: e.night,
            anomalous: e.anomalous,
        }
    }
}

pub fn estimates_csv(series: &[(HourlySample, DniEstimate)]) -> String {
    let mut out = String::from(ESTIMATES_HEADER);
    out.push('\n');
    for (s, e) in series {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            ts(&s.timestamp),
            s.ghi,
            s.cos_zenith,
            e.dni0,
            e.dni1,
            e.dni_final,
            e.night,
            e.anomalous
        ));
    }
    out
}

pub fn daily_csv(daily: &[DailyAggregate]) -> String {
    let mut out = String::from("date,mean_ghi,mean_dni,n_hours,n_anomalous\n");
    for d in daily {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            d.date.format("%Y-%m-%d"),
            d.mean_ghi,
            d.mean_dni,
            d.n_hours,
            d.n_anomalous
        ));
    }
    out
}

pub fn monthly_csv(monthly: &[MonthlySummary]) -> String {
    let mut out = String::from(
        "year,month,n_days,ghi_mean,ghi_max,ghi_min,dni_mean,dni_max,dni_min\n",
    );
    for m in monthly {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            m.year,
            m.month,
            m.n_days,
            m.ghi.mean,
            m.ghi.max,
            m.ghi.min,
            m.dni.mean,
            m.dni.max,
            m.dni.min
        ));
    }
    out
}

pub fn anomalies_csv(summary: &AnomalySummary) -> String {
    let mut out = String::from("timestamp,dni_final,ghi_w_m2,cos_zenith\n");
    for e in &summary.events {
        out.push_str(&format!(
            "{},{},{},{}\n",
            ts(&e.timestamp),
            e.dni_final,
            e.ghi,
            e.cos_zenith
        ));
    }
    out
}

pub fn spectrum_csv(table: &SpectrumTable) -> String {
    // exponent form below 1e-4 keeps deep-UV cells readable; both forms
    // are shortest round-trip representations
    let cell = |v: f64| {
        if v != 0.0 && v.abs() < 1e-4 {
            format!("{v:e}")
        } else {
            format!("{v}")
        }
    };
    let mut out = String::from("wavelength_nm,irradiance_w_m2_nm\n");
    for (w, v) in table.wavelength_nm().iter().zip(table.irradiance()) {
        out.push_str(&format!("{w},{}\n", cell(*v)));
    }
    out
}

pub fn spectrum_json(table: &SpectrumTable) -> Result<String> {
    #[derive(Serialize)]
    struct View<'a> {
        metadata: &'a solspec::spectrum::SpectrumMetadata,
        wavelength_nm: &'a [f64],
        irradiance_w_m2_nm: &'a [f64],
    }
    Ok(serde_json::to_string_pretty(&View {
        metadata: &table.metadata,
        wavelength_nm: table.wavelength_nm(),
        irradiance_w_m2_nm: table.irradiance(),
    })?)
}

pub fn report_csv(reports: &[ModelReport]) -> String {
    let mut out = String::from("model_id,r2,mse,n_train,n_test,hyperparameters,error\n");
    for r in reports {
        let hyper: Vec<String> = r
            .hyperparameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.model_id,
            r.r2.map(|v| v.to_string()).unwrap_or_default(),
            r.mse.map(|v| v.to_string()).unwrap_or_default(),
            r.n_train,
            r.n_test,
            hyper.join(";"),
            r.error.as_deref().unwrap_or_default().replace(',', ";")
        ));
    }
    out
}

pub fn scatter_csv(scatter: &[ModelScatter]) -> String {
    let mut out = String::from("measured_dni,predicted_dni,model_id\n");
    for s in scatter {
        for (measured, predicted) in &s.points {
            out.push_str(&format!("{measured},{predicted},{}\n", s.model_id));
        }
    }
    out
}

pub fn report_json(
    daily: &[DailyAggregate],
    monthly: &[MonthlySummary],
    anomalies: &AnomalySummary,
) -> Result<String> {
    #[derive(Serialize)]
    struct View<'a> {
        daily: &'a [DailyAggregate],
        monthly: &'a [MonthlySummary],
        anomalies: &'a AnomalySummary,
    }
    Ok(serde_json::to_string_pretty(&View {
        daily,
        monthly,
        anomalies,
    })?)
}

fn day_numbers(daily: &[DailyAggregate]) -> Vec<f64> {
    daily
        .iter()
        .map(|d| chrono::Datelike::ordinal(&d.date) as f64)
        .collect()
}

/// Daily GHI (left axis) and DNI (right axis) on a shared day-of-year axis.
pub fn daily_dual_axis_svg(daily: &[DailyAggregate]) -> String {
    let x = day_numbers(daily);
    let ghi: Vec<f64> = daily.iter().map(|d| d.mean_ghi).collect();
    let dni: Vec<f64> = daily.iter().map(|d| d.mean_dni).collect();
    dual_axis_chart(
        "Daily mean GHI and DNI",
        "day of year",
        &Series {
            label: "GHI (W/m2)",
            x: &x,
            y: &ghi,
            color: "tomato",
        },
        &Series {
            label: "DNI (W/m2)",
            x: &x,
            y: &dni,
            color: "steelblue",
        },
    )
}

pub fn daily_single_svg(daily: &[DailyAggregate], ghi: bool) -> String {
    let x = day_numbers(daily);
    let y: Vec<f64> = daily
        .iter()
        .map(|d| if ghi { d.mean_ghi } else { d.mean_dni })
        .collect();
    let (title, label, color) = if ghi {
        ("Daily mean GHI", "GHI (W/m2)", "tomato")
    } else {
        ("Daily mean DNI", "DNI (W/m2)", "steelblue")
    };
    line_chart(
        title,
        "day of year",
        label,
        &[Series {
            label,
            x: &x,
            y: &y,
            color,
        }],
    )
}

pub fn spectrum_svg(table: &SpectrumTable, dni: f64) -> String {
    line_chart(
        &format!("Spectral irradiance scaled to E = {dni} W/m2"),
        "wavelength (nm)",
        "irradiance (W/m2/nm)",
        &[Series {
            label: table.metadata.column.as_str(),
            x: table.wavelength_nm(),
            y: table.irradiance(),
            color: "steelblue",
        }],
    )
}

pub fn scatter_svg(scatter: &ModelScatter) -> String {
    scatter_chart(
        &format!("Measured vs predicted DNI: {}", scatter.model_id),
        "measured DNI (W/m2)",
        "predicted DNI (W/m2)",
        &scatter.points,
        true,
    )
}
