//! Result files: fixed-schema CSV or a JSON document per file.
//!
//! Floats are written with 12 significant digits, except weights, which use
//! 17 so that re-evaluating patterns from a weights file is exact.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mvmfdr::pattern::{BeamPattern, ComparisonReport, Method, Normalization};
use mvmfdr::{Complex64, WeightVector};
use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::{CliError, CliResult};

pub const REPORT_DIGITS: usize = 12;
pub const WEIGHT_DIGITS: usize = 17;

pub const PATTERN_HEADER: [&str; 4] = ["method", "freq_hz", "theta_deg", "gain_db"];
pub const REPORT_HEADER: [&str; 4] = ["method", "metric", "mean", "std"];
pub const WEIGHTS_HEADER: [&str; 4] = ["method", "sensor", "re", "im"];

/// `printf("%.{digits}g")`: shortest of fixed or exponent notation,
/// trailing zeros removed.
pub fn format_g(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to `digits` significant digits, for JSON output.
fn round_sig(x: f64, digits: usize) -> f64 {
    format_g(x, digits).parse().unwrap_or(x)
}

fn r12(x: f64) -> f64 {
    round_sig(x, REPORT_DIGITS)
}

/// A method's pattern family.
pub struct MethodPatterns<'a> {
    pub method: Method,
    pub patterns: &'a [BeamPattern],
}

fn normalization_name(n: Normalization) -> &'static str {
    match n {
        Normalization::None => "none",
        Normalization::GlobalPeak => "global_peak",
        Normalization::PerFrequencyPeak => "per_frequency_peak",
    }
}

#[derive(Serialize)]
struct PatternDoc {
    kind: &'static str,
    patterns: Vec<PatternEntry>,
}

#[derive(Serialize)]
struct PatternEntry {
    method: &'static str,
    freq_hz: f64,
    normalization: &'static str,
    theta_deg: Vec<f64>,
    gain_db: Vec<f64>,
}

#[derive(Serialize)]
struct ReportDoc {
    kind: &'static str,
    num_trials: usize,
    rows: Vec<ReportEntry>,
}

#[derive(Serialize)]
struct ReportEntry {
    method: &'static str,
    metric: String,
    mean: f64,
    std: f64,
}

#[derive(Serialize)]
struct WeightsDoc {
    kind: &'static str,
    designs: Vec<WeightsEntry>,
}

#[derive(Serialize)]
struct WeightsEntry {
    method: &'static str,
    constraint_freqs_hz: Vec<f64>,
    objective_value: f64,
    gram_condition: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn csv_bytes(header: [&str; 4], rows: impl Iterator<Item = [String; 4]>) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::invalid("output", e.to_string());
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::invalid("output", e.to_string()))
}

fn json_bytes<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("serialisable document");
    out.push(b'\n');
    out
}

pub fn patterns_bytes(families: &[MethodPatterns<'_>], format: OutputFormat) -> CliResult<Vec<u8>> {
    let deg = |t: f64| t.to_degrees();
    match format {
        OutputFormat::Csv => {
            let rows = families.iter().flat_map(|fam| {
                fam.patterns.iter().flat_map(move |p| {
                    p.theta_grid_rad.iter().zip(&p.gains_db).map(move |(&t, &g)| {
                        [
                            fam.method.name().to_string(),
                            format_g(p.freq_hz, REPORT_DIGITS),
                            format_g(deg(t), REPORT_DIGITS),
                            format_g(g, REPORT_DIGITS),
                        ]
                    })
                })
            });
            csv_bytes(PATTERN_HEADER, rows)
        }
        OutputFormat::Structured => Ok(json_bytes(&PatternDoc {
            kind: "patterns",
            patterns: families
                .iter()
                .flat_map(|fam| {
                    fam.patterns.iter().map(|p| PatternEntry {
                        method: fam.method.name(),
                        freq_hz: r12(p.freq_hz),
                        normalization: normalization_name(p.normalization),
                        theta_deg: p.theta_grid_rad.iter().map(|&t| r12(deg(t))).collect(),
                        gain_db: p.gains_db.iter().map(|&g| r12(g)).collect(),
                    })
                })
                .collect(),
        })),
    }
}

pub fn report_bytes(report: &ComparisonReport, format: OutputFormat) -> CliResult<Vec<u8>> {
    let rows = report.rows();
    match format {
        OutputFormat::Csv => csv_bytes(
            REPORT_HEADER,
            rows.iter().map(|r| {
                [
                    r.method.name().to_string(),
                    r.metric.clone(),
                    format_g(r.stat.mean, REPORT_DIGITS),
                    format_g(r.stat.std, REPORT_DIGITS),
                ]
            }),
        ),
        OutputFormat::Structured => Ok(json_bytes(&ReportDoc {
            kind: "report",
            num_trials: report.num_trials,
            rows: rows
                .into_iter()
                .map(|r| ReportEntry {
                    method: r.method.name(),
                    metric: r.metric,
                    mean: r12(r.stat.mean),
                    std: r12(r.stat.std),
                })
                .collect(),
        })),
    }
}

pub fn weights_bytes(designs: &[(Method, &WeightVector)], format: OutputFormat) -> CliResult<Vec<u8>> {
    match format {
        OutputFormat::Csv => csv_bytes(
            WEIGHTS_HEADER,
            designs.iter().flat_map(|(m, w)| {
                w.weights().iter().enumerate().map(move |(n, z)| {
                    [
                        m.name().to_string(),
                        n.to_string(),
                        format_g(z.re, WEIGHT_DIGITS),
                        format_g(z.im, WEIGHT_DIGITS),
                    ]
                })
            }),
        ),
        // serde_json already writes the shortest round-tripping form
        OutputFormat::Structured => Ok(json_bytes(&WeightsDoc {
            kind: "weights",
            designs: designs
                .iter()
                .map(|(m, w)| WeightsEntry {
                    method: m.name(),
                    constraint_freqs_hz: w.constraints().freqs_hz().to_vec(),
                    objective_value: r12(w.objective_value()),
                    gram_condition: r12(w.gram_condition()),
                    re: w.weights().iter().map(|z| z.re).collect(),
                    im: w.weights().iter().map(|z| z.im).collect(),
                })
                .collect(),
        })),
    }
}

/// Reads a CSV weights file back into per-method weight vectors, in file order.
pub fn read_weights_csv(path: &Path) -> CliResult<Vec<(String, Vec<Complex64>)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::invalid("weights", e.to_string()))?;
    let mut out: Vec<(String, Vec<Complex64>)> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::invalid("weights", e.to_string()))?;
        let num = |i: usize| -> CliResult<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::invalid("weights", format!("bad number in column {i}")))
        };
        let method = rec.get(0).unwrap_or_default().to_string();
        let z = Complex64::new(num(2)?, num(3)?);
        match out.last_mut() {
            Some((m, v)) if *m == method => v.push(z),
            _ => out.push((method, vec![z])),
        }
    }
    Ok(out)
}

/// `<stem>.<tag>.<ext>` next to `path`.
pub fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

/// Fails early, before any computation, if `path` cannot be created.
pub fn check_writable(path: &Path) -> CliResult<()> {
    if path.file_name().is_none() || path.is_dir() {
        return Err(CliError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "output path is not a file path"),
        ));
    }
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    match fs::metadata(parent) {
        Ok(m) if m.is_dir() && !m.permissions().readonly() => Ok(()),
        Ok(_) => Err(CliError::io(
            parent,
            std::io::Error::new(std::io::ErrorKind::PermissionDenied, "output directory is not writable"),
        )),
        Err(e) => Err(CliError::io(parent, e)),
    }
}

/// Writes every file through a temporary sibling and renames it into place,
/// so an interrupted run never leaves a truncated result.
pub fn write_all(files: &[(PathBuf, Vec<u8>)]) -> CliResult<()> {
    for (path, bytes) in files {
        let tmp = sibling(path, "partial");
        let result = fs::File::create(&tmp)
            .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
            .and_then(|_| fs::rename(&tmp, path));
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(CliError::io(path, e));
        }
    }
    Ok(())
}
