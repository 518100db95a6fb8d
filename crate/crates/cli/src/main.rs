//! `solspec` command line: ingest ASOS observations, estimate DNI, scale
//! the reference spectrum, aggregate daily QC series, run the regression
//! benchmark, and render the diagnostic figures.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use solspec::dni::{estimate_dni, estimate_dni_uncorrected, DniEstimate, DniModelConfig};
use solspec::ingest::{
    parse_asos_csv_with, to_hourly_samples, write_asos_csv, HourlySample, ParseOptions,
};
use solspec::qc::{daily_means, flag_anomalies, seasonal_summary, AggregationMode};
use solspec::regression::{run_benchmark, BenchmarkConfig, Dataset, SplitSpec};
use solspec::solar_geometry::EvalInstant;
use solspec::spectrum::{load_g173_with, normalize, scale, LoadOptions, SpectrumColumn};
use solspec::synth::{generate_year, SynthConfig};
use solspec::Site;

/// Bundled reference spectrum, used when --g173 is not given.
const BUNDLED_G173: &str = include_str!("../../../data/astm_g173.csv");

#[derive(Parser)]
#[command(
    name = "solspec",
    version,
    about = "Solar spectral irradiance estimation from hourly weather observations"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Input CSV: raw ASOS observations, or a samples.csv from `ingest`
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Spectrum table in the G-173 four-column layout (default: bundled)
    #[arg(long, global = true)]
    g173: Option<PathBuf>,

    /// Site latitude, degrees north
    #[arg(long, global = true, default_value_t = 37.5714)]
    lat: f64,

    /// Site longitude, degrees east
    #[arg(long, global = true, default_value_t = 126.9658)]
    lon: f64,

    /// Site UTC offset, hours
    #[arg(long, global = true, default_value_t = 9.0)]
    tz_offset: f64,

    /// Master seed for splits, bootstraps and initialization
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// DNI above this is flagged anomalous, W/m2
    #[arg(long, global = true, default_value_t = 1361.0)]
    anomaly_threshold: f64,

    /// Optional cos(zenith) floor for the geometric stage (cleaned mode)
    #[arg(long, global = true)]
    cos_floor: Option<f64>,

    /// Skip the cloud/visibility corrections (geometric projection only)
    #[arg(long, global = true)]
    uncorrected: bool,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    output: PathBuf,

    /// Output formats, comma separated subset of csv,json,svg
    #[arg(long, global = true, value_delimiter = ',', default_values = ["csv", "svg"])]
    format: Vec<Format>,

    /// Instant within the hour-labeled accumulation interval at which the
    /// solar position is evaluated
    #[arg(long, global = true, value_enum, default_value_t = Instant::Midpoint)]
    eval_instant: Instant,

    /// Substitute missing cloud/visibility cells instead of rejecting rows
    #[arg(long, global = true)]
    lenient: bool,

    /// Treat per-model benchmark failures as fatal
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Instant {
    Midpoint,
    Hour,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    AllHours,
    DaylightOnly,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SplitMode {
    Shuffle,
    Chronological,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Column {
    Extraterrestrial,
    GlobalTilt,
    DirectCircumsolar,
}

impl From<Column> for SpectrumColumn {
    fn from(c: Column) -> Self {
        match c {
            Column::Extraterrestrial => SpectrumColumn::Extraterrestrial,
            Column::GlobalTilt => SpectrumColumn::GlobalTilt,
            Column::DirectCircumsolar => SpectrumColumn::DirectCircumsolar,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SynthMode {
    Clear,
    Cloudy,
}

#[derive(Subcommand)]
enum Command {
    /// Parse ASOS observations into normalized hourly samples
    Ingest,
    /// Estimate per-hour DNI (three-stage, or geometric with --uncorrected)
    Estimate,
    /// Scale the reference spectrum to a given total irradiance
    Spectrum {
        /// Total irradiance E to scale the unit-area shape to, W/m2
        #[arg(long)]
        dni: f64,
        #[arg(long, value_enum, default_value_t = Column::DirectCircumsolar)]
        column: Column,
        /// Keep the full 280-4000 nm file range instead of 280-2500 nm
        #[arg(long)]
        full_range: bool,
    },
    /// Aggregate daily mean GHI/DNI
    Daily {
        #[arg(long, value_enum, default_value_t = Mode::AllHours)]
        mode: Mode,
    },
    /// Train and score the five regression models on one shared split
    Regress {
        #[arg(long, value_enum, default_value_t = SplitMode::Shuffle)]
        split: SplitMode,
        /// JSON hyperparameter file overriding the defaults
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Full pipeline: estimates, daily series, anomalies, figures, spectra
    Report {
        #[arg(long, value_enum, default_value_t = Mode::AllHours)]
        mode: Mode,
    },
    /// Generate a synthetic ASOS-format year
    Synth {
        #[arg(long, default_value_t = 2024)]
        year: i32,
        #[arg(long, value_enum, default_value_t = SynthMode::Cloudy)]
        mode: SynthMode,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let site = Site::new(g.lat, g.lon, g.tz_offset)?;
    let instant = match g.eval_instant {
        Instant::Midpoint => EvalInstant::IntervalMidpoint,
        Instant::Hour => EvalInstant::OnTheHour,
    };
    let dni_config = DniModelConfig {
        cos_zenith_floor: g.cos_floor,
        anomaly_threshold: g.anomaly_threshold,
        ..DniModelConfig::default()
    };
    dni_config.validate()?;
    fs::create_dir_all(&g.output)
        .with_context(|| format!("creating output directory {}", g.output.display()))?;

    match &cli.command {
        Command::Ingest => cmd_ingest(g, &site, instant),
        Command::Estimate => cmd_estimate(g, &site, instant, &dni_config),
        Command::Spectrum {
            dni,
            column,
            full_range,
        } => cmd_spectrum(g, *dni, (*column).into(), *full_range),
        Command::Daily { mode } => cmd_daily(g, &site, instant, &dni_config, *mode),
        Command::Regress { split, config } => {
            cmd_regress(g, &site, instant, &dni_config, *split, config.as_deref())
        }
        Command::Report { mode } => cmd_report(g, &site, instant, &dni_config, *mode),
        Command::Synth { year, mode } => cmd_synth(g, &site, *year, *mode),
    }
}

fn wants(g: &GlobalArgs, format: Format) -> bool {
    g.format.contains(&format)
}

fn input_path(g: &GlobalArgs) -> Result<&Path> {
    g.input
        .as_deref()
        .ok_or_else(|| anyhow::anyhow!("--input <file> is required for this subcommand"))
}

/// Reads either a raw ASOS CSV or a normalized samples.csv.
fn load_samples(g: &GlobalArgs, site: &Site, instant: EvalInstant) -> Result<Vec<HourlySample>> {
    let path = input_path(g)?;
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading input {}", path.display()))?;
    if text.starts_with(output::SAMPLES_HEADER) {
        return output::parse_samples_csv(&text)
            .with_context(|| format!("parsing normalized samples {}", path.display()));
    }
    let records = parse_asos_csv_with(text.as_bytes(), &ParseOptions { lenient: g.lenient })
        .with_context(|| format!("parsing ASOS observations {}", path.display()))?;
    Ok(to_hourly_samples(&records, site, instant)?)
}

fn estimate_with_mode(
    sample: &HourlySample,
    config: &DniModelConfig,
    uncorrected: bool,
) -> Result<DniEstimate> {
    if !uncorrected {
        return Ok(estimate_dni(sample, config)?);
    }
    let dni0 = estimate_dni_uncorrected(sample, config)?;
    let night = sample.cos_zenith <= 0.0 || sample.ghi <= 0.0;
    Ok(DniEstimate {
        dni0,
        dni1: dni0,
        dni_final: dni0,
        night,
        anomalous: dni0 > config.anomaly_threshold,
    })
}

fn estimated_series(
    g: &GlobalArgs,
    site: &Site,
    instant: EvalInstant,
    config: &DniModelConfig,
    uncorrected: bool,
) -> Result<Vec<(HourlySample, DniEstimate)>> {
    load_samples(g, site, instant)?
        .into_iter()
        .map(|s| {
            let e = estimate_with_mode(&s, config, uncorrected)?;
            Ok((s, e))
        })
        .collect()
}

fn cmd_ingest(g: &GlobalArgs, site: &Site, instant: EvalInstant) -> Result<()> {
    let samples = load_samples(g, site, instant)?;
    if wants(g, Format::Csv) {
        let path = g.output.join("samples.csv");
        fs::write(&path, output::samples_csv(&samples))?;
        println!("wrote {} ({} rows)", path.display(), samples.len());
    }
    if wants(g, Format::Json) {
        let path = g.output.join("samples.json");
        fs::write(&path, serde_json::to_string_pretty(&samples)?)?;
        println!("wrote {}", path.display());
    }
    let missing = samples.iter().filter(|s| s.ghi_missing).count();
    println!(
        "{} samples, {} night/blank radiation cells",
        samples.len(),
        missing
    );
    Ok(())
}

fn cmd_estimate(
    g: &GlobalArgs,
    site: &Site,
    instant: EvalInstant,
    config: &DniModelConfig,
) -> Result<()> {
    let series = estimated_series(g, site, instant, config, g.uncorrected)?;
    if wants(g, Format::Csv) {
        let path = g.output.join("estimates.csv");
        fs::write(&path, output::estimates_csv(&series))?;
        println!("wrote {} ({} rows)", path.display(), series.len());
    }
    if wants(g, Format::Json) {
        let rows: Vec<output::EstimateRow> = series.iter().map(output::EstimateRow::from).collect();
        let path = g.output.join("estimates.json");
        fs::write(&path, serde_json::to_string_pretty(&rows)?)?;
        println!("wrote {}", path.display());
    }
    let anomalous = series.iter().filter(|(_, e)| e.anomalous).count();
    println!(
        "{} hours estimated ({} anomalous above {} W/m2{})",
        series.len(),
        anomalous,
        config.anomaly_threshold,
        if g.uncorrected { ", uncorrected mode" } else { "" }
    );
    Ok(())
}

fn load_spectrum_table(
    g: &GlobalArgs,
    column: SpectrumColumn,
    full_range: bool,
) -> Result<solspec::spectrum::SpectrumTable> {
    let options = LoadOptions { column, full_range };
    match &g.g173 {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading spectrum table {}", path.display()))?;
            Ok(load_g173_with(text.as_bytes(), options)
                .with_context(|| format!("parsing spectrum table {}", path.display()))?)
        }
        None => Ok(load_g173_with(BUNDLED_G173.as_bytes(), options)?),
    }
}

fn cmd_spectrum(g: &GlobalArgs, dni: f64, column: SpectrumColumn, full_range: bool) -> Result<()> {
    let table = load_spectrum_table(g, column, full_range)?;
    let shape = normalize(&table)?;
    let scaled = scale(&shape, dni)?;
    if wants(g, Format::Csv) {
        let path = g.output.join("spectrum.csv");
        fs::write(&path, output::spectrum_csv(&scaled))?;
        println!("wrote {} ({} grid points)", path.display(), scaled.len());
    }
    if wants(g, Format::Json) {
        let path = g.output.join("spectrum.json");
        fs::write(&path, output::spectrum_json(&scaled)?)?;
        println!("wrote {}", path.display());
    }
    if wants(g, Format::Svg) {
        let path = g.output.join("spectrum.svg");
        fs::write(&path, output::spectrum_svg(&scaled, dni))?;
        println!("wrote {}", path.display());
    }
    println!(
        "scaled {} shape (E_std {:.4} W/m2) to E = {dni} W/m2",
        shape.metadata.column.as_str(),
        shape.reference_total,
    );
    Ok(())
}

fn cmd_daily(
    g: &GlobalArgs,
    site: &Site,
    instant: EvalInstant,
    config: &DniModelConfig,
    mode: Mode,
) -> Result<()> {
    let series = estimated_series(g, site, instant, config, g.uncorrected)?;
    let mode = match mode {
        Mode::AllHours => AggregationMode::AllHours,
        Mode::DaylightOnly => AggregationMode::DaylightOnly,
    };
    let daily = daily_means(&series, mode)?;
    if wants(g, Format::Csv) {
        let path = g.output.join("daily.csv");
        fs::write(&path, output::daily_csv(&daily))?;
        println!("wrote {} ({} days, {})", path.display(), daily.len(), mode.as_str());
    }
    if wants(g, Format::Json) {
        let path = g.output.join("daily.json");
        fs::write(&path, serde_json::to_string_pretty(&daily)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn load_benchmark_config(path: Option<&Path>) -> Result<BenchmarkConfig> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading hyperparameter file {}", p.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing hyperparameter file {}", p.display()))
        }
        None => Ok(BenchmarkConfig::default()),
    }
}

fn cmd_regress(
    g: &GlobalArgs,
    site: &Site,
    instant: EvalInstant,
    config: &DniModelConfig,
    split: SplitMode,
    config_path: Option<&Path>,
) -> Result<()> {
    let series = estimated_series(g, site, instant, config, false)?;
    let dataset = Dataset::from_series(&series);
    let spec = SplitSpec {
        train_fraction: 0.8,
        seed: g.seed,
        chronological: split == SplitMode::Chronological,
    };
    let bench_config = load_benchmark_config(config_path)?;
    let outcome = run_benchmark(&dataset, &spec, &bench_config)?;

    if wants(g, Format::Csv) {
        let path = g.output.join("regression_report.csv");
        fs::write(&path, output::report_csv(&outcome.reports))?;
        println!("wrote {}", path.display());
        let path = g.output.join("scatter.csv");
        fs::write(&path, output::scatter_csv(&outcome.scatter))?;
        println!("wrote {}", path.display());
    }
    if wants(g, Format::Json) {
        let path = g.output.join("regression_report.json");
        fs::write(&path, serde_json::to_string_pretty(&outcome)?)?;
        println!("wrote {}", path.display());
    }
    if wants(g, Format::Svg) {
        for s in &outcome.scatter {
            let path = g.output.join(format!("scatter_{}.svg", s.model_id));
            fs::write(&path, output::scatter_svg(s))?;
            println!("wrote {}", path.display());
        }
    }

    let mut failed = Vec::new();
    for r in &outcome.reports {
        let r2 = r
            .r2
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "-".to_string());
        let mse = r
            .mse
            .map(|v| format!("{v:.4e}"))
            .unwrap_or_else(|| "-".to_string());
        println!(
            "{:<18} r2 {:>8}  mse {:>12}  train {}  test {}{}",
            r.model_id,
            r2,
            mse,
            r.n_train,
            r.n_test,
            r.error
                .as_deref()
                .map(|e| format!("  [{e}]"))
                .unwrap_or_default()
        );
        if r.mse.is_none() {
            failed.push(r.model_id.clone());
        }
    }
    if !failed.is_empty() {
        if g.strict {
            bail!("models failed: {}", failed.join(", "));
        }
        eprintln!("warning: models failed: {}", failed.join(", "));
    }
    Ok(())
}

fn cmd_report(
    g: &GlobalArgs,
    site: &Site,
    instant: EvalInstant,
    config: &DniModelConfig,
    mode: Mode,
) -> Result<()> {
    let series = estimated_series(g, site, instant, config, false)?;
    let mode = match mode {
        Mode::AllHours => AggregationMode::AllHours,
        Mode::DaylightOnly => AggregationMode::DaylightOnly,
    };
    let daily = daily_means(&series, mode)?;
    let monthly = seasonal_summary(&daily);
    let (_, anomalies) = flag_anomalies(&series, config.anomaly_threshold)?;

    if wants(g, Format::Csv) {
        for (name, body) in [
            ("estimates.csv", output::estimates_csv(&series)),
            ("daily.csv", output::daily_csv(&daily)),
            ("monthly.csv", output::monthly_csv(&monthly)),
            ("anomalies.csv", output::anomalies_csv(&anomalies)),
        ] {
            let path = g.output.join(name);
            fs::write(&path, body)?;
            println!("wrote {}", path.display());
        }
    }
    if wants(g, Format::Json) {
        let path = g.output.join("report.json");
        fs::write(&path, output::report_json(&daily, &monthly, &anomalies)?)?;
        println!("wrote {}", path.display());
    }
    if wants(g, Format::Svg) {
        let path = g.output.join("daily_time_series.svg");
        fs::write(&path, output::daily_dual_axis_svg(&daily))?;
        println!("wrote {}", path.display());
        let path = g.output.join("ghi_daily.svg");
        fs::write(&path, output::daily_single_svg(&daily, true))?;
        println!("wrote {}", path.display());
        let path = g.output.join("dni_daily.svg");
        fs::write(&path, output::daily_single_svg(&daily, false))?;
        println!("wrote {}", path.display());
    }

    // scaled spectra at two representative hours: the peak-DNI hour and
    // the median positive-DNI hour; flagged hours are excluded so the
    // representative spectra stay physically plausible
    let table = load_spectrum_table(g, SpectrumColumn::DirectCircumsolar, false)?;
    let shape = normalize(&table)?;
    let mut positive: Vec<&(HourlySample, DniEstimate)> = series
        .iter()
        .filter(|(_, e)| e.dni_final > 0.0 && !e.anomalous)
        .collect();
    positive.sort_by(|a, b| a.1.dni_final.total_cmp(&b.1.dni_final));
    if wants(g, Format::Csv) {
        if let Some((sample, estimate)) = positive.last() {
            let scaled = scale(&shape, estimate.dni_final)?;
            let path = g.output.join("spectrum_peak_hour.csv");
            fs::write(&path, output::spectrum_csv(&scaled))?;
            println!(
                "wrote {} (hour {}, DNI {:.2} W/m2)",
                path.display(),
                sample.timestamp,
                estimate.dni_final
            );
        }
        if !positive.is_empty() {
            let (sample, estimate) = positive[positive.len() / 2];
            let scaled = scale(&shape, estimate.dni_final)?;
            let path = g.output.join("spectrum_median_hour.csv");
            fs::write(&path, output::spectrum_csv(&scaled))?;
            println!(
                "wrote {} (hour {}, DNI {:.2} W/m2)",
                path.display(),
                sample.timestamp,
                estimate.dni_final
            );
        }
    }

    if g.uncorrected {
        let raw = estimated_series(g, site, instant, config, true)?;
        let raw_daily = daily_means(&raw, mode)?;
        if wants(g, Format::Csv) {
            let path = g.output.join("estimates_uncorrected.csv");
            fs::write(&path, output::estimates_csv(&raw))?;
            println!("wrote {}", path.display());
        }
        if wants(g, Format::Svg) {
            let path = g.output.join("dni_daily_uncorrected.svg");
            fs::write(&path, output::daily_single_svg(&raw_daily, false))?;
            println!("wrote {}", path.display());
        }
    }

    println!(
        "{} hours, {} days, {} anomalous hours above {} W/m2",
        series.len(),
        daily.len(),
        anomalies.n_flagged,
        config.anomaly_threshold
    );
    Ok(())
}

fn cmd_synth(g: &GlobalArgs, site: &Site, year: i32, mode: SynthMode) -> Result<()> {
    let config = SynthConfig {
        year,
        site: *site,
        seed: g.seed,
        cloudy: mode == SynthMode::Cloudy,
        ..SynthConfig::default()
    };
    let records = generate_year(&config)?;
    let path = g.output.join("synthetic_asos.csv");
    fs::write(&path, write_asos_csv(&records))?;
    println!("wrote {} ({} rows)", path.display(), records.len());
    Ok(())
}
