//! ASTM G-173 reference spectrum: loading, trapezoidal integration,
//! normalization to a unit-area shape, and linear rescaling by a total
//! irradiance.
//!
//! The scaling model keeps the spectral shape fixed and moves only the
//! total: `I(lambda) = f(lambda) * E`, which is equivalent to multiplying
//! the reference spectrum by `E / E_std`, i.e. a wavelength-independent
//! Beer-Lambert attenuation with optical-depth increment
//! `ln(E_std / E)`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which irradiance column of the four-column G-173 table to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumColumn {
    Extraterrestrial,
    GlobalTilt,
    /// Direct beam plus circumsolar; dimensionally the column that pairs
    /// with a DNI total, so it is the default.
    #[default]
    DirectCircumsolar,
}

impl SpectrumColumn {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumColumn::Extraterrestrial => "extraterrestrial",
            SpectrumColumn::GlobalTilt => "global_tilt",
            SpectrumColumn::DirectCircumsolar => "direct_circumsolar",
        }
    }

    fn file_position(self) -> usize {
        match self {
            SpectrumColumn::Extraterrestrial => 1,
            SpectrumColumn::GlobalTilt => 2,
            SpectrumColumn::DirectCircumsolar => 3,
        }
    }
}

impl std::str::FromStr for SpectrumColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().replace('-', "_").as_str() {
            "extraterrestrial" | "etr" => Ok(SpectrumColumn::Extraterrestrial),
            "global_tilt" | "global" => Ok(SpectrumColumn::GlobalTilt),
            "direct_circumsolar" | "direct" => Ok(SpectrumColumn::DirectCircumsolar),
            other => Err(Error::invalid(format!("unknown spectrum column {other:?}"))),
        }
    }
}

/// Source label and the standard atmospheric conditions of the table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumMetadata {
    pub source: String,
    pub column: SpectrumColumn,
    pub air_mass: f64,
    pub zenith_angle_deg: f64,
    pub precipitable_water_cm: f64,
    pub ozone_atm_cm: f64,
    pub aerosol_optical_depth: f64,
}

impl SpectrumMetadata {
    /// The published G-173 conditions: AM 1.5, zenith ~48.2 deg, 1.42 cm
    /// precipitable water, 0.34 atm-cm ozone, AOD 0.084.
    pub fn g173(column: SpectrumColumn) -> Self {
        SpectrumMetadata {
            source: "ASTM G-173".to_string(),
            column,
            air_mass: 1.5,
            zenith_angle_deg: 48.2,
            precipitable_water_cm: 1.42,
            ozone_atm_cm: 0.34,
            aerosol_optical_depth: 0.084,
        }
    }
}

/// A sampled spectrum on a strictly increasing wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    wavelength_nm: Vec<f64>,
    irradiance: Vec<f64>,
    pub metadata: SpectrumMetadata,
}

/// A unit-area spectral shape together with the total it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralShape {
    wavelength_nm: Vec<f64>,
    density_per_nm: Vec<f64>,
    /// The integral of the source spectrum, W/m2 (E_std when derived from
    /// the reference table).
    pub reference_total: f64,
    pub metadata: SpectrumMetadata,
}

/// Wavelength domain of the scaling model.
pub const WAVELENGTH_MIN_NM: f64 = 280.0;
pub const WAVELENGTH_MAX_NM: f64 = 2500.0;

impl SpectrumTable {
    pub fn new(
        wavelength_nm: Vec<f64>,
        irradiance: Vec<f64>,
        metadata: SpectrumMetadata,
    ) -> Result<Self> {
        if wavelength_nm.is_empty() {
            return Err(Error::invalid("empty wavelength grid"));
        }
        if wavelength_nm.len() != irradiance.len() {
            return Err(Error::invalid(format!(
                "grid/irradiance length mismatch: {} vs {}",
                wavelength_nm.len(),
                irradiance.len()
            )));
        }
        for i in 1..wavelength_nm.len() {
            if wavelength_nm[i] <= wavelength_nm[i - 1] {
                return Err(Error::invalid(format!(
                    "wavelengths not strictly increasing at point {i} ({} after {})",
                    wavelength_nm[i],
                    wavelength_nm[i - 1]
                )));
            }
        }
        if let Some(i) = irradiance.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(format!(
                "negative or non-finite irradiance {} at point {i}",
                irradiance[i]
            )));
        }
        Ok(Self {
            wavelength_nm,
            irradiance,
            metadata,
        })
    }

    pub fn wavelength_nm(&self) -> &[f64] {
        &self.wavelength_nm
    }

    pub fn irradiance(&self) -> &[f64] {
        &self.irradiance
    }

    pub fn len(&self) -> usize {
        self.wavelength_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelength_nm.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (
            self.wavelength_nm[0],
            self.wavelength_nm[self.wavelength_nm.len() - 1],
        )
    }

    /// Integral over the whole grid.
    pub fn total(&self) -> f64 {
        trapezoid(&self.wavelength_nm, &self.irradiance)
    }
}

impl SpectralShape {
    pub fn wavelength_nm(&self) -> &[f64] {
        &self.wavelength_nm
    }

    pub fn density_per_nm(&self) -> &[f64] {
        &self.density_per_nm
    }
}

/// Loader options; the default clips the table to [280, 2500] nm.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub column: SpectrumColumn,
    /// Keep the full file range (the distributed table extends to 4000 nm).
    pub full_range: bool,
}

/// Loads one column of a G-173-layout table: any number of leading header
/// lines, then comma-separated rows of (wavelength nm, extraterrestrial,
/// global tilt, direct+circumsolar) in W/m2/nm.
pub fn load_g173<R: Read>(source: R, column: SpectrumColumn) -> Result<SpectrumTable> {
    load_g173_with(
        source,
        LoadOptions {
            column,
            full_range: false,
        },
    )
}

pub fn load_g173_with<R: Read>(mut source: R, options: LoadOptions) -> Result<SpectrumTable> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;

    let col = options.column.file_position();
    let mut wavelength = Vec::new();
    let mut irradiance = Vec::new();
    let mut prev_w: Option<f64> = None;

    for (line_no, raw_line) in text.lines().enumerate() {
        let row = line_no + 1;
        let line = raw_line.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let Ok(w) = fields[0].parse::<f64>() else {
            if prev_w.is_none() {
                continue; // header line
            }
            return Err(Error::row(row, format!("invalid wavelength {:?}", fields[0])));
        };
        if fields.len() <= col {
            return Err(Error::row(
                row,
                format!(
                    "missing {} column (need {} fields, found {})",
                    options.column.as_str(),
                    col + 1,
                    fields.len()
                ),
            ));
        }
        let v: f64 = fields[col]
            .parse()
            .map_err(|_| Error::row(row, format!("invalid irradiance {:?}", fields[col])))?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::row(row, format!("negative irradiance {v}")));
        }
        if let Some(prev) = prev_w {
            if w <= prev {
                return Err(Error::row(
                    row,
                    format!("wavelengths not strictly increasing ({w} after {prev})"),
                ));
            }
        }
        prev_w = Some(w);
        if !options.full_range && !(WAVELENGTH_MIN_NM..=WAVELENGTH_MAX_NM).contains(&w) {
            continue;
        }
        wavelength.push(w);
        irradiance.push(v);
    }

    if wavelength.is_empty() {
        return Err(Error::FileFormat(
            "no data rows found in spectrum file".to_string(),
        ));
    }
    SpectrumTable::new(
        wavelength,
        irradiance,
        SpectrumMetadata::g173(options.column),
    )
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 1..x.len() {
        sum += (x[i] - x[i - 1]) * (y[i] + y[i - 1]) * 0.5;
    }
    sum
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    // callers guarantee x[0] <= at <= x[last]
    let i = x.partition_point(|&w| w < at);
    if i == 0 {
        return y[0];
    }
    if x[i - 1] == at {
        return y[i - 1];
    }
    let t = (at - x[i - 1]) / (x[i] - x[i - 1]);
    y[i - 1] + t * (y[i] - y[i - 1])
}

/// Trapezoidal integral of the spectrum over `[lambda0, lambda1]`, with
/// linear interpolation at partial end intervals.
pub fn integrate(spectrum: &SpectrumTable, lambda0: f64, lambda1: f64) -> Result<f64> {
    let (lo, hi) = spectrum.span();
    if !lambda0.is_finite() || !lambda1.is_finite() || lambda0 >= lambda1 {
        return Err(Error::invalid(format!(
            "invalid integration bounds [{lambda0}, {lambda1}]"
        )));
    }
    if lambda0 < lo || lambda1 > hi {
        return Err(Error::invalid(format!(
            "bounds [{lambda0}, {lambda1}] outside grid span [{lo}, {hi}]"
        )));
    }

    let x = spectrum.wavelength_nm();
    let y = spectrum.irradiance();
    let first = x.partition_point(|&w| w <= lambda0);
    let last = x.partition_point(|&w| w < lambda1);
    // first is the first grid index > lambda0; last the first index >= lambda1
    let y0 = interpolate(x, y, lambda0);
    let y1 = interpolate(x, y, lambda1);

    if first == last {
        // both bounds inside one grid interval
        return Ok((lambda1 - lambda0) * (y0 + y1) * 0.5);
    }

    let mut sum = (x[first] - lambda0) * (y[first] + y0) * 0.5;
    for i in (first + 1)..last {
        sum += (x[i] - x[i - 1]) * (y[i] + y[i - 1]) * 0.5;
    }
    sum += (lambda1 - x[last - 1]) * (y1 + y[last - 1]) * 0.5;
    Ok(sum)
}

/// Normalizes a spectrum to a unit-area shape function.
pub fn normalize(spectrum: &SpectrumTable) -> Result<SpectralShape> {
    let total = spectrum.total();
    if !(total > 0.0) {
        return Err(Error::DegenerateSpectrum(format!(
            "total irradiance {total} is not positive"
        )));
    }
    Ok(SpectralShape {
        wavelength_nm: spectrum.wavelength_nm.clone(),
        density_per_nm: spectrum.irradiance.iter().map(|v| v / total).collect(),
        reference_total: total,
        metadata: spectrum.metadata.clone(),
    })
}

/// Scales a unit-area shape to a spectrum with total irradiance `e` W/m2.
pub fn scale(shape: &SpectralShape, e: f64) -> Result<SpectrumTable> {
    if !e.is_finite() || e < 0.0 {
        return Err(Error::invalid(format!(
            "scaling irradiance must be non-negative, got {e}"
        )));
    }
    Ok(SpectrumTable {
        wavelength_nm: shape.wavelength_nm.clone(),
        irradiance: shape.density_per_nm.iter().map(|d| d * e).collect(),
        metadata: shape.metadata.clone(),
    })
}

/// Rescales a reference spectrum by the ratio `e_real / E_std`, where
/// `E_std` is the reference table's own integral. Pointwise identical to
/// `scale(normalize(std), e_real)`.
pub fn rescale_by_ratio(std: &SpectrumTable, e_real: f64) -> Result<SpectrumTable> {
    if !e_real.is_finite() || e_real < 0.0 {
        return Err(Error::invalid(format!(
            "target irradiance must be non-negative, got {e_real}"
        )));
    }
    let e_std = std.total();
    if !(e_std > 0.0) {
        return Err(Error::DegenerateSpectrum(format!(
            "reference total {e_std} is not positive"
        )));
    }
    let ratio = e_real / e_std;
    Ok(SpectrumTable {
        wavelength_nm: std.wavelength_nm.clone(),
        irradiance: std.irradiance.iter().map(|v| v * ratio).collect(),
        metadata: std.metadata.clone(),
    })
}

/// The uniform optical-depth increment `ln(E_std / E_real)` that makes the
/// ratio rescaling an exact wavelength-independent Beer-Lambert attenuation.
pub fn effective_optical_depth(e_real: f64, e_std: f64) -> Result<f64> {
    if !(e_real > 0.0) || !e_real.is_finite() {
        return Err(Error::invalid(format!(
            "e_real must be positive, got {e_real}"
        )));
    }
    if !(e_std > 0.0) || !e_std.is_finite() {
        return Err(Error::invalid(format!("e_std must be positive, got {e_std}")));
    }
    Ok((e_std / e_real).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    pub(crate) const G173: &str = include_str!("../../../data/astm_g173.csv");

    /// Integral of the bundled direct+circumsolar column over [280, 2500] nm,
    /// frozen from an independent high-precision trapezoid oracle run over
    /// the file as committed.
    pub(crate) const E_STD_DIRECT: f64 = 887.3381206870274;

    fn table(vals: &[(f64, f64)]) -> SpectrumTable {
        SpectrumTable::new(
            vals.iter().map(|v| v.0).collect(),
            vals.iter().map(|v| v.1).collect(),
            SpectrumMetadata::g173(SpectrumColumn::DirectCircumsolar),
        )
        .unwrap()
    }

    #[test]
    fn loads_bundled_table_clipped() {
        let s = load_g173(G173.as_bytes(), SpectrumColumn::DirectCircumsolar).unwrap();
        let (lo, hi) = s.span();
        assert_eq!(lo, 280.0);
        assert!(hi <= 2500.0);
        assert_eq!(s.len(), 1702);
        assert_relative_eq!(s.total(), E_STD_DIRECT, max_relative = 1e-10);
    }

    #[test]
    fn full_range_reaches_4000nm() {
        let s = load_g173_with(
            G173.as_bytes(),
            LoadOptions {
                column: SpectrumColumn::DirectCircumsolar,
                full_range: true,
            },
        )
        .unwrap();
        assert_eq!(s.len(), 2002);
        assert_eq!(s.span().1, 4000.0);
    }

    #[test]
    fn all_three_columns_load() {
        for col in [
            SpectrumColumn::Extraterrestrial,
            SpectrumColumn::GlobalTilt,
            SpectrumColumn::DirectCircumsolar,
        ] {
            let s = load_g173(G173.as_bytes(), col).unwrap();
            assert!(s.total() > 100.0, "{col:?}");
        }
    }

    #[test]
    fn non_monotonic_wavelength_is_load_error() {
        let body = "wl,a,b,c\n300,1,1,1\n300,1,1,1\n";
        let err = load_g173(body.as_bytes(), SpectrumColumn::DirectCircumsolar).unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
    }

    #[test]
    fn negative_irradiance_is_load_error() {
        let body = "wl,a,b,c\n300,1,1,-0.5\n";
        let err = load_g173(body.as_bytes(), SpectrumColumn::DirectCircumsolar).unwrap_err();
        assert!(err.to_string().contains("negative"), "{err}");
    }

    #[test]
    fn missing_column_is_load_error() {
        let body = "wl,a\n300,1\n";
        let err = load_g173(body.as_bytes(), SpectrumColumn::DirectCircumsolar).unwrap_err();
        assert!(err.to_string().contains("direct_circumsolar"), "{err}");
    }

    #[test]
    fn integrate_rectangle() {
        let s = table(&[(0.0, 2.0), (10.0, 2.0)]);
        assert_eq!(integrate(&s, 0.0, 10.0).unwrap(), 20.0);
    }

    #[test]
    fn integrate_triangle_matches_dense_oracle() {
        // rising 0 -> 1 W/m2/nm over [0, 100]: closed-form area 50
        let coarse = table(&[(0.0, 0.0), (100.0, 1.0)]);
        assert_abs_diff_eq!(integrate(&coarse, 0.0, 100.0).unwrap(), 50.0, epsilon = 1e-12);

        let dense: Vec<(f64, f64)> = (0..=10_000)
            .map(|i| {
                let x = i as f64 / 100.0;
                (x, x / 100.0)
            })
            .collect();
        let dense = table(&dense);
        assert_relative_eq!(
            integrate(&dense, 0.0, 100.0).unwrap(),
            50.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn integrate_is_additive() {
        let s = load_g173(G173.as_bytes(), SpectrumColumn::DirectCircumsolar).unwrap();
        let (a, c) = (301.3, 2222.7);
        let b = 997.1;
        let whole = integrate(&s, a, c).unwrap();
        let parts = integrate(&s, a, b).unwrap() + integrate(&s, b, c).unwrap();
        assert_relative_eq!(whole, parts, max_relative = 1e-12);
    }

    #[test]
    fn integrate_rejects_bad_bounds() {
        let s = table(&[(0.0, 1.0), (10.0, 1.0)]);
        assert!(integrate(&s, 5.0, 5.0).is_err());
        assert!(integrate(&s, 8.0, 2.0).is_err());
        assert!(integrate(&s, -1.0, 5.0).is_err());
        assert!(integrate(&s, 0.0, 11.0).is_err());
    }

    #[test]
    fn normalize_has_unit_area_and_scale_invariance() {
        let s = load_g173(G173.as_bytes(), SpectrumColumn::DirectCircumsolar).unwrap();
        let shape = normalize(&s).unwrap();
        let area = trapezoid(shape.wavelength_nm(), shape.density_per_nm());
        assert_relative_eq!(area, 1.0, max_relative = 1e-9);
        assert_relative_eq!(shape.reference_total, E_STD_DIRECT, max_relative = 1e-10);

        let scaled5 = rescale_by_ratio(&s, 5.0 * s.total()).unwrap();
        let shape5 = normalize(&scaled5).unwrap();
        for (a, b) in shape.density_per_nm().iter().zip(shape5.density_per_nm()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_zero_spectrum() {
        let s = table(&[(0.0, 0.0), (10.0, 0.0)]);
        assert!(matches!(
            normalize(&s),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn scale_examples() {
        let s = load_g173(G173.as_bytes(), SpectrumColumn::DirectCircumsolar).unwrap();
        let shape = normalize(&s).unwrap();

        let zero = scale(&shape, 0.0).unwrap();
        assert!(zero.irradiance().iter().all(|&v| v == 0.0));

        let recovered = scale(&shape, shape.reference_total).unwrap();
        for (a, b) in recovered.irradiance().iter().zip(s.irradiance()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }

        let e500 = scale(&shape, 500.0).unwrap();
        assert_relative_eq!(e500.total(), 500.0, max_relative = 1e-9);

        assert!(scale(&shape, -1.0).is_err());
    }

    #[test]
    fn rescale_matches_scale_of_normalize() {
        let s = load_g173(G173.as_bytes(), SpectrumColumn::DirectCircumsolar).unwrap();
        let shape = normalize(&s).unwrap();
        for e in [100.0, 500.0, 900.0] {
            let a = rescale_by_ratio(&s, e).unwrap();
            let b = scale(&shape, e).unwrap();
            for (x, y) in a.irradiance().iter().zip(b.irradiance()) {
                assert_relative_eq!(x, y, max_relative = 1e-12);
            }
        }

        let identity = rescale_by_ratio(&s, s.total()).unwrap();
        for (x, y) in identity.irradiance().iter().zip(s.irradiance()) {
            assert_relative_eq!(x, y, max_relative = 1e-15);
        }

        let half = rescale_by_ratio(&s, s.total() / 2.0).unwrap();
        for (x, y) in half.irradiance().iter().zip(s.irradiance()) {
            assert_relative_eq!(*x * 2.0, y, max_relative = 1e-15);
        }
    }

    #[test]
    fn optical_depth_identities() {
        assert_eq!(effective_optical_depth(500.0, 500.0).unwrap(), 0.0);
        assert_relative_eq!(
            effective_optical_depth(100.0 / std::f64::consts::E, 100.0).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert!(effective_optical_depth(0.0, 1.0).is_err());
        assert!(effective_optical_depth(1.0, -1.0).is_err());
    }

    #[test]
    fn rescaling_is_beer_lambert_attenuation() {
        let s = load_g173(G173.as_bytes(), SpectrumColumn::DirectCircumsolar).unwrap();
        let e_std = s.total();
        for e_real in [100.0, 500.0, 900.0] {
            let tau = effective_optical_depth(e_real, e_std).unwrap();
            let scaled = rescale_by_ratio(&s, e_real).unwrap();
            for (v, v0) in scaled.irradiance().iter().zip(s.irradiance()) {
                let expected = v0 * (-tau).exp();
                assert_relative_eq!(*v, expected, max_relative = 1e-12);
            }
        }
    }

    fn arb_spectrum() -> impl Strategy<Value = SpectrumTable> {
        (3usize..40)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(0.1f64..50.0, n),
                    proptest::collection::vec(0.0f64..10.0, n),
                )
            })
            .prop_filter_map("needs positive total", |(steps, vals)| {
                let mut x = Vec::with_capacity(steps.len());
                let mut acc = 100.0;
                for s in &steps {
                    acc += s;
                    x.push(acc);
                }
                let table = SpectrumTable::new(
                    x,
                    vals,
                    SpectrumMetadata::g173(SpectrumColumn::DirectCircumsolar),
                )
                .ok()?;
                (table.total() > 1e-9).then_some(table)
            })
    }

    proptest! {
        #[test]
        fn unit_area_for_random_spectra(s in arb_spectrum()) {
            let shape = normalize(&s).unwrap();
            let area = trapezoid(shape.wavelength_nm(), shape.density_per_nm());
            prop_assert!((area - 1.0).abs() < 1e-9, "area {area}");
        }

        #[test]
        fn scale_normalize_round_trip(s in arb_spectrum()) {
            let shape = normalize(&s).unwrap();
            let back = scale(&shape, s.total()).unwrap();
            for (a, b) in back.irradiance().iter().zip(s.irradiance()) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
            }
        }

        #[test]
        fn scale_is_linear(s in arb_spectrum(), a in 0.0f64..800.0, b in 0.0f64..800.0) {
            let shape = normalize(&s).unwrap();
            let sum = scale(&shape, a + b).unwrap();
            let sa = scale(&shape, a).unwrap();
            let sb = scale(&shape, b).unwrap();
            for i in 0..sum.len() {
                let lhs = sum.irradiance()[i];
                let rhs = sa.irradiance()[i] + sb.irradiance()[i];
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
            }
        }

        #[test]
        fn shape_is_preserved_under_scaling(s in arb_spectrum(), e in 1.0f64..2000.0) {
            let shape = normalize(&s).unwrap();
            let rescaled = scale(&shape, e).unwrap();
            let reshaped = normalize(&rescaled).unwrap();
            for (a, b) in reshaped.density_per_nm().iter().zip(shape.density_per_nm()) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
            }
        }
    }
}
