//! Three-stage DNI estimation from GHI.
//!
//! Stage 0 is the geometric projection `DNI0 = GHI / cos(zenith)`, zeroed
//! whenever the sun is below the horizon or GHI is zero. Stage 1 applies
//! the empirical cloud attenuation `1 - 0.75 * cloud_factor`; stage 2 the
//! visibility transmittance `exp(-1 / (visibility_km + epsilon))`.
//!
//! The geometric stage deliberately divides by small cos(zenith) values in
//! the default "faithful" mode: that is what produces the characteristic
//! low-sun spikes in the thousands of W/m2, and those spikes are exactly
//! what the anomaly flag exists to expose. An optional cos(zenith) floor
//! bounds the division for cleaned-mode experiments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::HourlySample;

/// Total solar irradiance at the top of the atmosphere, W/m2. No surface
/// DNI can physically exceed this, so it is the default anomaly threshold.
pub const SOLAR_CONSTANT_W_M2: f64 = 1361.0;

/// Tunables of the estimation pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DniModelConfig {
    /// Fractional attenuation under full overcast; 0.75 empirically.
    pub cloud_coefficient: f64,
    /// Division guard for the visibility transmittance, km.
    pub epsilon: f64,
    /// Optional lower bound on cos(zenith) in the geometric stage.
    /// `None` (default) reproduces the faithful spiky series.
    pub cos_zenith_floor: Option<f64>,
    /// DNI above this is flagged anomalous, W/m2.
    pub anomaly_threshold: f64,
}

impl Default for DniModelConfig {
    fn default() -> Self {
        DniModelConfig {
            cloud_coefficient: 0.75,
            epsilon: 1e-6,
            cos_zenith_floor: None,
            anomaly_threshold: SOLAR_CONSTANT_W_M2,
        }
    }
}

impl DniModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.cloud_coefficient) {
            return Err(Error::invalid(format!(
                "cloud coefficient {} outside [0, 1]",
                self.cloud_coefficient
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid(format!(
                "epsilon {} must be positive",
                self.epsilon
            )));
        }
        if let Some(floor) = self.cos_zenith_floor {
            if !(floor > 0.0 && floor <= 1.0) {
                return Err(Error::invalid(format!(
                    "cos_zenith floor {floor} outside (0, 1]"
                )));
            }
        }
        if !(self.anomaly_threshold > 0.0) {
            return Err(Error::invalid(format!(
                "anomaly threshold {} must be positive",
                self.anomaly_threshold
            )));
        }
        Ok(())
    }
}

/// The three stages of one hourly estimate plus its QC flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DniEstimate {
    /// Geometric projection GHI / cos(zenith), W/m2.
    pub dni0: f64,
    /// After cloud attenuation, W/m2.
    pub dni1: f64,
    /// After visibility transmittance, W/m2.
    pub dni_final: f64,
    /// Sun below horizon or no measured irradiance.
    pub night: bool,
    /// dni_final exceeds the configured threshold.
    pub anomalous: bool,
}

impl DniEstimate {
    pub const ZERO_NIGHT: DniEstimate = DniEstimate {
        dni0: 0.0,
        dni1: 0.0,
        dni_final: 0.0,
        night: true,
        anomalous: false,
    };
}

/// Geometric projection stage. Returns 0 when the sun is below the horizon
/// or GHI is zero; otherwise `ghi / max(cos_zenith, floor)` with the floor
/// applied only when configured.
pub fn estimate_dni0(ghi: f64, cos_zenith: f64, config: &DniModelConfig) -> Result<f64> {
    if !ghi.is_finite() || ghi < 0.0 {
        return Err(Error::invalid(format!("ghi must be non-negative, got {ghi}")));
    }
    if cos_zenith <= 0.0 || ghi <= 0.0 {
        return Ok(0.0);
    }
    let denominator = match config.cos_zenith_floor {
        Some(floor) => cos_zenith.max(floor),
        None => cos_zenith,
    };
    Ok(ghi / denominator)
}

/// Cloud attenuation stage: `dni0 * (1 - coefficient * cloud_factor)`.
pub fn apply_cloud_attenuation(
    dni0: f64,
    cloud_factor: f64,
    config: &DniModelConfig,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&cloud_factor) {
        return Err(Error::invalid(format!(
            "cloud factor {cloud_factor} outside [0, 1]"
        )));
    }
    Ok(dni0 * (1.0 - config.cloud_coefficient * cloud_factor))
}

/// Visibility transmittance stage: `dni1 * exp(-1 / (visibility_km + eps))`.
///
/// At zero visibility the exponent underflows and the result is exactly 0;
/// the transmittance tends to 1 as visibility grows.
pub fn apply_visibility_attenuation(
    dni1: f64,
    visibility_km: f64,
    config: &DniModelConfig,
) -> Result<f64> {
    if !visibility_km.is_finite() || visibility_km < 0.0 {
        return Err(Error::invalid(format!(
            "visibility must be non-negative, got {visibility_km}"
        )));
    }
    Ok(dni1 * (-1.0 / (visibility_km + config.epsilon)).exp())
}

/// Runs the full three-stage pipeline for one sample.
pub fn estimate_dni(sample: &HourlySample, config: &DniModelConfig) -> Result<DniEstimate> {
    config.validate()?;
    if sample.cos_zenith <= 0.0 || sample.ghi <= 0.0 {
        return Ok(DniEstimate::ZERO_NIGHT);
    }
    let dni0 = estimate_dni0(sample.ghi, sample.cos_zenith, config)?;
    let dni1 = apply_cloud_attenuation(dni0, sample.cloud_factor, config)?;
    let dni_final = apply_visibility_attenuation(dni1, sample.visibility_km, config)?;
    Ok(DniEstimate {
        dni0,
        dni1,
        dni_final,
        night: false,
        anomalous: dni_final > config.anomaly_threshold,
    })
}

/// The uncorrected model: the geometric stage alone.
pub fn estimate_dni_uncorrected(sample: &HourlySample, config: &DniModelConfig) -> Result<f64> {
    estimate_dni0(sample.ghi, sample.cos_zenith, config)
}

/// Runs the pipeline over an ordered series.
pub fn estimate_series(
    samples: &[HourlySample],
    config: &DniModelConfig,
) -> Result<Vec<DniEstimate>> {
    samples.iter().map(|s| estimate_dni(s, config)).collect()
}
