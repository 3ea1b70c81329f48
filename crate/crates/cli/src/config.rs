//! Scenario configuration files (TOML).
//!
//! Angles are in degrees here and converted to radians once, when the
//! [`Scenario`] is built. See `scenarios/paper_scenario.toml` for a complete
//! example and the README for the schema.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use mvmfdr::pattern::{Normalization, DEFAULT_THETA_POINTS};
use mvmfdr::scenario::{
    equally_spaced, DiagonalLoading, InterfererSpectrum, DEFAULT_RELATIVE_LOADING, DEFAULT_SIM_COMPONENTS,
    DEFAULT_SWEEP_POINTS,
};
use mvmfdr::{
    half_wavelength_spacing, AngleReference, ArrayGeometry, Complex64, CovarianceSource, Scenario, SPEED_OF_LIGHT,
};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceChoice {
    Ideal,
    Sample,
}

impl From<CovarianceChoice> for CovarianceSource {
    fn from(c: CovarianceChoice) -> Self {
        match c {
            CovarianceChoice::Ideal => CovarianceSource::Ideal,
            CovarianceChoice::Sample => CovarianceSource::Sample,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    array: ArraySection,
    scenario: ScenarioSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArraySection {
    num_sensors: usize,
    /// Explicit spacing; otherwise half a wavelength at `half_wavelength_at_hz`.
    spacing_m: Option<f64>,
    half_wavelength_at_hz: Option<f64>,
    #[serde(default = "default_speed")]
    propagation_speed_mps: f64,
    #[serde(default)]
    angle_reference: AngleRef,
}

fn default_speed() -> f64 {
    SPEED_OF_LIGHT
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum AngleRef {
    #[default]
    Broadside,
    Axis,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum Loading {
    /// Multiple of `tr(R)/N`.
    RelativeTrace(f64),
    Absolute(f64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    soi_doa_deg: f64,
    #[serde(default)]
    interferer_doas_deg: Vec<f64>,
    band_lo_hz: f64,
    band_hi_hz: f64,
    constraint_freqs_hz: Vec<f64>,
    sim_components: Option<usize>,
    sim_freqs_hz: Option<Vec<f64>>,
    interferer_tone_hz: Option<f64>,
    snr_db: f64,
    sir_db: Option<f64>,
    /// Linear signal-to-interference ratio, alternative to `sir_db`.
    sir_ratio: Option<f64>,
    constraint_gain_b: Option<ComplexValue>,
    diagonal_loading: Option<Loading>,
    sweep_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    num_snapshots: Option<usize>,
    num_trials: Option<usize>,
    seed: Option<u64>,
    theta_points: Option<usize>,
    pattern_freqs_hz: Option<Vec<f64>>,
    normalization: Option<NormalizationName>,
    covariance: Option<CovarianceChoice>,
    format: Option<OutputFormat>,
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum NormalizationName {
    None,
    GlobalPeak,
    PerFrequencyPeak,
}

/// A validated scenario plus run settings. Command-line flags are applied
/// on top with the `with_*` methods.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    /// `None` means the command's own default.
    pub covariance: Option<CovarianceChoice>,
    pub format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub theta_points: usize,
    pub pattern_freqs_hz: Vec<f64>,
    pub normalization: Normalization,
}

fn syntax(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Syntax {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Config key for a core validation field name.
fn config_key(core_field: &str) -> String {
    match core_field {
        "soi_doa" => "scenario.soi_doa_deg".into(),
        "interferer_doas" => "scenario.interferer_doas_deg".into(),
        "interferer_tone_hz"
        | "band_lo_hz"
        | "band_hi_hz"
        | "constraint_freqs_hz"
        | "sim_freqs_hz"
        | "snr_db"
        | "sir_db"
        | "constraint_gain_b"
        | "sweep_points" => format!("scenario.{core_field}"),
        "loading" => "scenario.diagonal_loading".into(),
        "num_snapshots" | "num_trials" => format!("run.{core_field}"),
        "num_sensors" => "array.num_sensors".into(),
        "spacing_m" | "propagation_speed_mps" => format!("array.{core_field}"),
        other => other.into(),
    }
}

fn map_invalid(e: mvmfdr::Error) -> CliError {
    match e {
        mvmfdr::Error::InvalidInput { field, reason } => CliError::invalid(config_key(field), reason),
        other => other.into(),
    }
}

fn deg(x: f64) -> f64 {
    x * PI / 180.0
}

/// Reads, parses and validates a configuration file.
pub fn parse_config(path: &Path) -> CliResult<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text, path)
}

/// Parses configuration text; `origin` only labels diagnostics.
pub fn parse_config_str(text: &str, origin: &Path) -> CliResult<RunConfig> {
    let file: FileConfig = toml::from_str(text).map_err(|e| syntax(origin, e.message().to_string()))?;
    build(file)
}

fn build(file: FileConfig) -> CliResult<RunConfig> {
    let a = &file.array;
    let spacing = match (a.spacing_m, a.half_wavelength_at_hz) {
        (Some(d), None) => d,
        (None, Some(f)) => half_wavelength_spacing(f, a.propagation_speed_mps)
            .map_err(|_| CliError::invalid("array.half_wavelength_at_hz", "must be positive and finite"))?,
        (Some(_), Some(_)) => {
            return Err(CliError::invalid(
                "array.spacing_m",
                "give either spacing_m or half_wavelength_at_hz, not both",
            ))
        }
        (None, None) => {
            return Err(CliError::invalid(
                "array.spacing_m",
                "one of spacing_m or half_wavelength_at_hz is required",
            ))
        }
    };
    let reference = match a.angle_reference {
        AngleRef::Broadside => AngleReference::Broadside,
        AngleRef::Axis => AngleReference::Axis,
    };
    let geometry = ArrayGeometry::with_medium(a.num_sensors, spacing, a.propagation_speed_mps)
        .map_err(map_invalid)?
        .with_angle_reference(reference);

    let s = &file.scenario;
    let sim_freqs_hz = match (&s.sim_freqs_hz, s.sim_components) {
        (Some(f), None) => f.clone(),
        (None, k) => {
            let k = k.unwrap_or(DEFAULT_SIM_COMPONENTS);
            if k == 0 {
                return Err(CliError::invalid("scenario.sim_components", "must be at least 1"));
            }
            equally_spaced(s.band_lo_hz, s.band_hi_hz, k)
        }
        (Some(_), Some(_)) => {
            return Err(CliError::invalid(
                "scenario.sim_freqs_hz",
                "give either sim_freqs_hz or sim_components, not both",
            ))
        }
    };
    let sir_db = match (s.sir_db, s.sir_ratio) {
        (Some(db), None) => db,
        (None, Some(ratio)) if ratio > 0.0 && ratio.is_finite() => 10.0 * ratio.log10(),
        (None, Some(_)) => return Err(CliError::invalid("scenario.sir_ratio", "must be positive and finite")),
        (None, None) if s.interferer_doas_deg.is_empty() => 0.0,
        (None, None) => {
            return Err(CliError::invalid(
                "scenario.sir_db",
                "required when interferers are present",
            ))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::invalid(
                "scenario.sir_db",
                "give either sir_db or sir_ratio, not both",
            ))
        }
    };
    let b = match s.constraint_gain_b {
        None => Complex64::new(1.0, 0.0),
        Some(ComplexValue::Real(re)) => Complex64::new(re, 0.0),
        Some(ComplexValue::Pair([re, im])) => Complex64::new(re, im),
    };
    let loading = match s.diagonal_loading {
        None => DiagonalLoading::RelativeTrace(DEFAULT_RELATIVE_LOADING),
        Some(Loading::RelativeTrace(x)) => DiagonalLoading::RelativeTrace(x),
        Some(Loading::Absolute(x)) => DiagonalLoading::Absolute(x),
    };
    let mut scenario = Scenario {
        geometry,
        soi_doa_rad: deg(s.soi_doa_deg),
        interferer_doas_rad: s.interferer_doas_deg.iter().map(|&t| deg(t)).collect(),
        band_lo_hz: s.band_lo_hz,
        band_hi_hz: s.band_hi_hz,
        constraint_freqs_hz: s.constraint_freqs_hz.clone(),
        sim_freqs_hz,
        interferer_spectrum: match s.interferer_tone_hz {
            Some(f) => InterfererSpectrum::Tone(f),
            None => InterfererSpectrum::Wideband,
        },
        snr_db: s.snr_db,
        sir_db,
        num_snapshots: 64,
        num_trials: 500,
        rng_seed: Scenario::paper().rng_seed,
        constraint_gain_b: b,
        loading,
        sweep_points: s.sweep_points.unwrap_or(DEFAULT_SWEEP_POINTS),
    };

    let r = &file.run;
    if let Some(t) = r.num_snapshots {
        scenario.num_snapshots = t;
    }
    if let Some(n) = r.num_trials {
        scenario.num_trials = n;
    }
    if let Some(seed) = r.seed {
        scenario.rng_seed = seed;
    }
    scenario.validate().map_err(map_invalid)?;

    let theta_points = r.theta_points.unwrap_or(DEFAULT_THETA_POINTS);
    if theta_points == 0 {
        return Err(CliError::invalid("run.theta_points", "must be at least 1"));
    }
    let pattern_freqs_hz = r
        .pattern_freqs_hz
        .clone()
        .unwrap_or_else(|| scenario.constraint_freqs_hz.clone());
    if pattern_freqs_hz.is_empty() || pattern_freqs_hz.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
        return Err(CliError::invalid(
            "run.pattern_freqs_hz",
            "needs at least one positive, finite frequency",
        ));
    }
    Ok(RunConfig {
        scenario,
        covariance: r.covariance,
        format: r.format.unwrap_or(OutputFormat::Csv),
        output_path: r.output.clone(),
        theta_points,
        pattern_freqs_hz,
        normalization: match r.normalization {
            None | Some(NormalizationName::GlobalPeak) => Normalization::GlobalPeak,
            Some(NormalizationName::None) => Normalization::None,
            Some(NormalizationName::PerFrequencyPeak) => Normalization::PerFrequencyPeak,
        },
    })
}

impl RunConfig {
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(seed) = seed {
            self.scenario.rng_seed = seed;
        }
        self
    }

    pub fn with_covariance(mut self, c: Option<CovarianceChoice>) -> Self {
        if c.is_some() {
            self.covariance = c;
        }
        self
    }

    pub fn with_format(mut self, f: Option<OutputFormat>) -> Self {
        if let Some(f) = f {
            self.format = f;
        }
        self
    }

    pub fn with_output(mut self, out: Option<PathBuf>) -> Self {
        if out.is_some() {
            self.output_path = out;
        }
        self
    }
}
