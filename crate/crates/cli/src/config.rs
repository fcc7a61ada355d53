//! Run configuration: TOML with unit-suffixed quantities, resolved to SI.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Value;

use qpm_core::algorithms::{Acceptance, Algorithm, AnnealConfig, Cooling, DesignParams};
use qpm_core::dispersion::{
    omega_from_wavelength, Axis, DispersionModel, LinearModel, ProcessSpec, SellmeierTable, KTP_TABLE,
};
use qpm_core::io::{sha256_hex, PolingFormat};
use qpm_core::presets::domains_for_length;
use qpm_core::spectrum::SpectrumConfig;

/// Directory searched for relative data-file paths.
pub const DATA_DIR_ENV: &str = "QPM_DATA_DIR";

#[derive(Debug, thiserror::Error)]
#[error("{field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

pub fn config_error(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        reason: reason.into(),
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Copy, Debug)]
enum Dim {
    Length,
    Temperature,
    AngularFrequency,
    Wavenumber,
    InverseVelocity,
}

impl Dim {
    /// Accepted units and their decimal exponent relative to SI.
    fn units(self) -> &'static [(&'static str, i32)] {
        match self {
            Dim::Length => &[("nm", -9), ("um", -6), ("µm", -6), ("mm", -3), ("cm", -2), ("m", 0)],
            Dim::Temperature => &[("C", 0), ("°C", 0)],
            Dim::AngularFrequency => &[("rad/s", 0)],
            Dim::Wavenumber => &[("1/m", 0), ("rad/m", 0), ("1/um", 6), ("1/mm", 3)],
            Dim::InverseVelocity => &[("s/m", 0), ("ps/mm", -9), ("fs/mm", -12)],
        }
    }
}

/// Parses `"<number> <unit>"`; bare numbers are rejected.
fn quantity(field: &str, value: &Value, dim: Dim) -> Result<f64> {
    let allowed = || {
        dim.units()
            .iter()
            .map(|(u, _)| *u)
            .collect::<Vec<_>>()
            .join(", ")
    };
    let text = match value {
        Value::String(s) => s.trim(),
        Value::Integer(_) | Value::Float(_) => {
            return Err(config_error(
                field,
                format!("unitless value; write it as a string with a unit ({})", allowed()),
            ))
        }
        other => return Err(config_error(field, format!("expected a quantity string, got {}", other.type_str()))),
    };
    // the number is the longest prefix that parses, so "2.5um" and "1e5 1/m" both work
    let split = (1..=text.len())
        .rev()
        .filter(|&i| text.is_char_boundary(i))
        .find(|&i| text[..i].trim().parse::<f64>().is_ok())
        .ok_or_else(|| config_error(field, format!("`{text}` does not start with a number")))?;
    let (num, unit) = (text[..split].trim(), text[split..].trim());
    if unit.is_empty() {
        return Err(config_error(field, format!("`{text}` has no unit ({})", allowed())));
    }
    let exp = dim
        .units()
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, e)| *e)
        .ok_or_else(|| config_error(field, format!("unit `{unit}` not accepted here ({})", allowed())))?;
    // shift the decimal exponent in text so "791 nm" is exactly 791e-9
    let (mantissa, e10) = match num.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
        None => (num, 0),
    };
    let x: f64 = format!("{mantissa}e{}", e10 + exp)
        .parse()
        .map_err(|_| config_error(field, format!("`{num}` is not a number")))?;
    if !x.is_finite() {
        return Err(config_error(field, "must be finite"));
    }
    Ok(x)
}

fn opt_quantity(field: &str, value: &Option<Value>, dim: Dim) -> Result<Option<f64>> {
    value.as_ref().map(|v| quantity(field, v, dim)).transpose()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    pub seed: Option<u64>,
    pub dispersion: RawDispersion,
    pub process: RawProcess,
    pub design: RawDesign,
    pub anneal: RawAnneal,
    pub spectrum: RawSpectrum,
    pub sweep: RawSweep,
    pub output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawDispersion {
    pub model: Option<String>,
    pub table: Option<String>,
    pub temperature: Option<Value>,
    pub k0: Option<Value>,
    /// Pump, signal, idler.
    pub tau: Option<Vec<Value>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawProcess {
    pub pump: Option<Value>,
    pub signal: Option<Value>,
    pub idler: Option<Value>,
    /// Pump, signal, idler polarization axes.
    pub axes: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawDesign {
    pub algorithm: Option<String>,
    pub length: Option<Value>,
    pub domains: Option<usize>,
    pub sigma_ratio: Option<f64>,
    pub subdivisions: Option<u32>,
    pub min_domain_width: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawAnneal {
    pub temperature: Option<f64>,
    pub temperature_step: Option<f64>,
    pub energy_threshold: Option<f64>,
    pub perturbation: Option<f64>,
    pub grid_points: Option<usize>,
    pub grid_half_width: Option<f64>,
    pub max_iterations: Option<u64>,
    pub restarts: Option<u32>,
    pub acceptance: Option<Acceptance>,
    pub cooling: Option<Cooling>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSpectrum {
    pub grid: Option<usize>,
    pub window_factor: Option<f64>,
    pub pump_bandwidth: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSweep {
    pub lengths_lc: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawOutput {
    pub dir: Option<String>,
    pub format: Option<String>,
    pub trace: Option<bool>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum DispersionSummary {
    KtpSellmeier {
        table_version: u32,
        table_sha256: String,
        temperature_c: f64,
    },
    LinearSynthetic {
        k0_per_m: f64,
        tau_s_per_m: [f64; 3],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignSection {
    pub algorithm: Algorithm,
    pub domains: usize,
    pub length_m: f64,
    pub coherence_length_m: f64,
    pub sigma_ratio: f64,
    pub subdivisions: u32,
    pub min_domain_width_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSection {
    pub lengths_lc: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputSection {
    pub format: PolingFormat,
    pub trace: bool,
}

/// Fully resolved, SI-unit configuration. Embedded in every artifact; the
/// output directory is deliberately left out so that artifacts do not
/// depend on where they were written.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub seed: u64,
    pub dispersion: DispersionSummary,
    pub process: ProcessSpec,
    pub design: DesignSection,
    pub anneal: AnnealConfig,
    pub spectrum: SpectrumConfig,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

pub struct RunConfig {
    pub resolved: Resolved,
    pub model: DispersionModel,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn params(&self) -> DesignParams {
        let d = &self.resolved.design;
        DesignParams {
            lc: d.coherence_length_m,
            sigma_ratio: d.sigma_ratio,
            subdivisions: d.subdivisions,
            anneal: self.resolved.anneal.clone(),
            min_domain_width: d.min_domain_width_m,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.resolved).expect("resolved config serializes")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.resolved).expect("resolved config serializes")
    }
}

/// Reads `path` (or uses defaults when `None`) and applies overrides.
pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let (raw, base) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| config_error("config", format!("cannot read {}: {e}", p.display())))?;
            let raw: RawConfig = toml::from_str(&text).map_err(|e| config_error("config", one_line(&e.to_string())))?;
            (raw, p.parent().map(Path::to_path_buf))
        }
        None => (RawConfig::default(), None),
    };
    resolve(raw, base.as_deref(), overrides)
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn data_path(name: &str, base: Option<&Path>) -> PathBuf {
    let p = PathBuf::from(name);
    if p.is_absolute() {
        return p;
    }
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        return PathBuf::from(dir).join(p);
    }
    base.map(|b| b.join(&p)).unwrap_or(p)
}

fn resolve_dispersion(raw: &RawDispersion, base: Option<&Path>) -> Result<(DispersionModel, DispersionSummary)> {
    match raw.model.as_deref().unwrap_or("ktp-sellmeier") {
        "ktp-sellmeier" => {
            let text = match &raw.table {
                Some(name) => {
                    let path = data_path(name, base);
                    std::fs::read_to_string(&path)
                        .map_err(|e| config_error("dispersion.table", format!("cannot read {}: {e}", path.display())))?
                }
                None => {
                    // a ktp.toml in the data directory replaces the bundled table
                    let candidate = std::env::var_os(DATA_DIR_ENV).map(|d| PathBuf::from(d).join("ktp.toml"));
                    match candidate.filter(|p| p.is_file()) {
                        Some(p) => std::fs::read_to_string(&p)
                            .map_err(|e| config_error("dispersion.table", format!("cannot read {}: {e}", p.display())))?,
                        None => KTP_TABLE.to_string(),
                    }
                }
            };
            let table = SellmeierTable::parse(&text).map_err(|e| config_error("dispersion.table", e.to_string()))?;
            let temperature_c = opt_quantity("dispersion.temperature", &raw.temperature, Dim::Temperature)?
                .unwrap_or(table.reference_temperature_c);
            if raw.k0.is_some() || raw.tau.is_some() {
                return Err(config_error("dispersion.k0", "k0 and tau apply to the linear-synthetic model only"));
            }
            let summary = DispersionSummary::KtpSellmeier {
                table_version: table.version,
                table_sha256: sha256_hex(text.as_bytes()),
                temperature_c,
            };
            Ok((DispersionModel::KtpSellmeier { table, temperature_c }, summary))
        }
        "linear-synthetic" => {
            let k0 = opt_quantity("dispersion.k0", &raw.k0, Dim::Wavenumber)?
                .ok_or_else(|| config_error("dispersion.k0", "required for the linear-synthetic model"))?;
            let taus = raw
                .tau
                .as_ref()
                .ok_or_else(|| config_error("dispersion.tau", "required for the linear-synthetic model"))?;
            if taus.len() != 3 {
                return Err(config_error("dispersion.tau", "need three values: pump, signal, idler"));
            }
            let mut tau = [0.0; 3];
            for (slot, v) in tau.iter_mut().zip(taus) {
                *slot = quantity("dispersion.tau", v, Dim::InverseVelocity)?;
            }
            Ok((
                DispersionModel::LinearSynthetic(LinearModel::new(k0, tau, 0.0, 0.0)),
                DispersionSummary::LinearSynthetic {
                    k0_per_m: k0,
                    tau_s_per_m: tau,
                },
            ))
        }
        other => Err(config_error(
            "dispersion.model",
            format!("unknown model `{other}` (ktp-sellmeier, linear-synthetic)"),
        )),
    }
}

fn positive(field: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(config_error(field, format!("must be positive, got {x}")))
    }
}

pub fn resolve(raw: RawConfig, base: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let (mut model, dispersion) = resolve_dispersion(&raw.dispersion, base)?;

    let p = &raw.process;
    let pump = opt_quantity("process.pump", &p.pump, Dim::Length)?.unwrap_or(791e-9);
    let signal = opt_quantity("process.signal", &p.signal, Dim::Length)?.unwrap_or(1582e-9);
    let idler = opt_quantity("process.idler", &p.idler, Dim::Length)?.unwrap_or(1582e-9);
    let axes = match &p.axes {
        None => [Axis::Y, Axis::Y, Axis::Z],
        Some(list) if list.len() == 3 => {
            let mut out = [Axis::X; 3];
            for (slot, s) in out.iter_mut().zip(list) {
                *slot = s.parse().map_err(|_| config_error("process.axes", format!("unknown axis `{s}`")))?;
            }
            out
        }
        Some(_) => return Err(config_error("process.axes", "need three axes: pump, signal, idler")),
    };
    let spec = ProcessSpec::new([pump, signal, idler], axes).map_err(|e| config_error("process", e.to_string()))?;
    if let DispersionModel::LinearSynthetic(m) = &model {
        model = DispersionModel::LinearSynthetic(LinearModel::new(
            m.k0,
            [m.pump.tau, m.signal.tau, m.idler.tau],
            omega_from_wavelength(signal),
            omega_from_wavelength(idler),
        ));
    }
    let lc = model
        .coherence_length(&spec)
        .map_err(|e| config_error("process", e.to_string()))?;

    let d = &raw.design;
    let algorithm: Algorithm = d
        .algorithm
        .as_deref()
        .unwrap_or("periodic")
        .parse()
        .map_err(|_| {
            config_error(
                "design.algorithm",
                "unknown algorithm (periodic, tambasco-blocks, domain-by-domain, annealed, sub-coherence)",
            )
        })?;
    let domains = match (d.domains, opt_quantity("design.length", &d.length, Dim::Length)?) {
        (Some(_), Some(_)) => return Err(config_error("design.length", "give either length or domains, not both")),
        (Some(n), None) => n,
        (None, Some(l)) => domains_for_length(positive("design.length", l)?, lc),
        (None, None) => domains_for_length(2e-3, lc),
    };
    if domains < 2 {
        return Err(config_error("design.domains", "need at least two domains"));
    }
    if algorithm == Algorithm::TambascoBlocks && domains % 2 != 0 {
        return Err(config_error("design.domains", "the block method needs an even domain count"));
    }
    let sigma_ratio = positive("design.sigma_ratio", d.sigma_ratio.unwrap_or(0.25))?;
    let subdivisions = d.subdivisions.unwrap_or(10);
    if subdivisions == 0 {
        return Err(config_error("design.subdivisions", "must be at least 1"));
    }
    let min_domain_width = opt_quantity("design.min_domain_width", &d.min_domain_width, Dim::Length)?.unwrap_or(1e-6);
    if min_domain_width < 0.0 {
        return Err(config_error("design.min_domain_width", "must be non-negative"));
    }

    let seed = overrides.seed.or(raw.seed).unwrap_or(0);
    let a = &raw.anneal;
    let defaults = AnnealConfig::with_temperature(a.temperature.unwrap_or(0.1));
    let anneal = AnnealConfig {
        temperature_step: a.temperature_step.unwrap_or(defaults.temperature_step),
        energy_threshold: a.energy_threshold.unwrap_or(defaults.energy_threshold),
        perturbation: a.perturbation.unwrap_or(defaults.perturbation),
        grid_points: a.grid_points.unwrap_or(defaults.grid_points),
        grid_half_width: a.grid_half_width.unwrap_or(defaults.grid_half_width),
        max_iterations: a.max_iterations.unwrap_or(defaults.max_iterations),
        restarts: a.restarts.unwrap_or(defaults.restarts),
        acceptance: a.acceptance.unwrap_or(defaults.acceptance),
        cooling: a.cooling.unwrap_or(defaults.cooling),
        seed,
        record_trace: raw.output.trace.unwrap_or(false),
        ..defaults
    };
    anneal.validate().map_err(|e| core_field("anneal", e))?;

    let s = &raw.spectrum;
    let spectrum = SpectrumConfig {
        grid: s.grid.unwrap_or(100),
        window_factor: s.window_factor.unwrap_or(8.0),
        pump_bandwidth: opt_quantity("spectrum.pump_bandwidth", &s.pump_bandwidth, Dim::AngularFrequency)?,
    };
    spectrum.validate().map_err(|e| core_field("spectrum", e))?;

    let lengths_lc = raw.sweep.lengths_lc.clone().unwrap_or_else(|| vec![100, 200, 400, 800]);
    if lengths_lc.is_empty() {
        return Err(config_error("sweep.lengths_lc", "need at least one length"));
    }
    if let Some(short) = lengths_lc.iter().find(|&&n| n < 20) {
        return Err(config_error("sweep.lengths_lc", format!("lengths must be at least 20, got {short}")));
    }

    let format: PolingFormat = raw
        .output
        .format
        .as_deref()
        .unwrap_or("csv-boundaries")
        .parse()
        .map_err(|_| config_error("output.format", "expected csv-boundaries or csv-widths"))?;
    let out_dir = overrides
        .out
        .clone()
        .or_else(|| raw.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("qpm-out"));

    Ok(RunConfig {
        resolved: Resolved {
            seed,
            dispersion,
            process: spec,
            design: DesignSection {
                algorithm,
                domains,
                length_m: domains as f64 * lc,
                coherence_length_m: lc,
                sigma_ratio,
                subdivisions,
                min_domain_width_m: min_domain_width,
            },
            anneal,
            spectrum,
            sweep: SweepSection { lengths_lc },
            output: OutputSection {
                format,
                trace: raw.output.trace.unwrap_or(false),
            },
        },
        model,
        out_dir,
    })
}

/// Prefixes a core validation error's field with its config section.
fn core_field(section: &str, e: qpm_core::Error) -> ConfigError {
    match e {
        qpm_core::Error::InvalidParameter { field, reason } => config_error(format!("{section}.{field}"), reason),
        other => config_error(section, other.to_string()),
    }
}
