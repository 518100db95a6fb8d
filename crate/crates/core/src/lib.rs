//! Hourly solar spectral irradiance estimation from routine weather
//! observations.
//!
//! The pipeline, end to end:
//!
//! 1. [`ingest`] parses KMA ASOS hourly CSV rows (accumulated radiation,
//!    cloud tenths, visibility) into physics-ready samples.
//! 2. [`solar_geometry`] supplies cos(zenith) for each hour.
//! 3. [`dni`] estimates direct normal irradiance in three stages:
//!    geometric projection GHI / cos(zenith), cloud attenuation
//!    `1 - 0.75 * cloud_factor`, and visibility transmittance
//!    `exp(-1 / (visibility_km + eps))`.
//! 4. [`spectrum`] linearly scales the bundled ASTM G-173 reference
//!    spectrum by the estimated DNI, keeping the spectral shape fixed.
//! 5. [`qc`] aggregates daily means and flags physically impossible DNI
//!    spikes; [`regression`] benchmarks five predictive models over the
//!    corrected series; [`plot`] renders the diagnostic SVG figures.
//!
//! [`synth`] generates a self-contained synthetic year in the ASOS layout
//! so the whole pipeline can run without external data.

pub mod dni;
pub mod error;
pub mod ingest;
pub mod plot;
pub mod qc;
pub mod regression;
pub mod rng;
pub mod solar_geometry;
pub mod spectrum;
pub mod synth;

pub use dni::{estimate_dni, estimate_series, DniEstimate, DniModelConfig, SOLAR_CONSTANT_W_M2};
pub use error::{Error, Result};
pub use ingest::{
    parse_asos_csv, radiation_to_ghi, to_hourly_sample, to_hourly_samples, HourlySample,
    ObservationRecord,
};
pub use qc::{daily_means, flag_anomalies, seasonal_summary, AggregationMode, DailyAggregate};
pub use regression::{run_benchmark, train_test_split, BenchmarkConfig, Dataset, SplitSpec};
pub use solar_geometry::{cos_zenith, solar_position, EvalInstant, Site, SolarPosition};
pub use spectrum::{
    effective_optical_depth, integrate, load_g173, normalize, rescale_by_ratio, scale,
    SpectralShape, SpectrumColumn, SpectrumTable,
};
pub use synth::{generate_year, SynthConfig};
