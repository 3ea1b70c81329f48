//! Beam patterns, in-band gain ripple, SINR and Monte Carlo comparison of the
//! narrowband and multi-frequency beamformers.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::array::{steering_vector, ArrayGeometry};
use crate::error::{Error, Result};
use crate::linalg::{dot_h, norm2};
use crate::scenario::{ideal_covariance, trial_covariance, CovarianceMatrix, CovarianceSource, Scenario};
use crate::solvers::{mvdr_weights, mvmfdr_weights, ConstraintSet, WeightVector};

/// Stand-in for `−∞ dB` (zero gain or zero signal power).
pub const DB_FLOOR: f64 = -300.0;
/// Points in the default angle grid (0.25° steps over a 180° range).
pub const DEFAULT_THETA_POINTS: usize = 721;

/// `20·log10(gain)`, floored at [`DB_FLOOR`].
pub fn amplitude_db(gain: f64) -> f64 {
    if gain > 0.0 {
        (20.0 * libm::log10(gain)).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// `10·log10(ratio)`, floored at [`DB_FLOOR`].
pub fn power_db(ratio: f64) -> f64 {
    if ratio > 0.0 {
        (10.0 * libm::log10(ratio)).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    None,
    /// Peak over the whole pattern family is 0 dB.
    #[default]
    GlobalPeak,
    /// Every pattern's own peak is 0 dB.
    PerFrequencyPeak,
}

/// Array gain versus angle at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern {
    pub theta_grid_rad: Vec<f64>,
    pub freq_hz: f64,
    pub gains_db: Vec<f64>,
    pub normalization: Normalization,
}

impl BeamPattern {
    pub fn peak_db(&self) -> f64 {
        self.gains_db.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `n` equally spaced angles covering the geometry's valid range.
pub fn theta_grid(geom: &ArrayGeometry, n: usize) -> Vec<f64> {
    let (lo, hi) = geom.angle_reference().range();
    crate::scenario::equally_spaced(lo, hi, n)
}

fn check_grid(theta_grid: &[f64]) -> Result<()> {
    if theta_grid.is_empty() {
        return Err(Error::invalid("theta_grid", "angle grid is empty"));
    }
    if theta_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("theta_grid", "angle grid must be sorted"));
    }
    Ok(())
}

fn raw_pattern_db<W: AsRef<[Complex64]> + ?Sized>(
    w: &W,
    geom: &ArrayGeometry,
    freq_hz: f64,
    theta_grid: &[f64],
) -> Result<Vec<f64>> {
    theta_grid
        .iter()
        .map(|&t| {
            Ok(amplitude_db(
                dot_h(w.as_ref(), &steering_vector(geom, t, freq_hz)?).norm(),
            ))
        })
        .collect()
}

/// Gain pattern `|w^H a(θ, f)|` in dB over `theta_grid` at a single frequency.
pub fn beam_pattern<W: AsRef<[Complex64]> + ?Sized>(
    w: &W,
    geom: &ArrayGeometry,
    freq_hz: f64,
    theta_grid: &[f64],
    normalization: Normalization,
) -> Result<BeamPattern> {
    let mut family = beam_pattern_family(w, geom, &[freq_hz], theta_grid, normalization)?;
    Ok(family.remove(0))
}

/// Patterns of one weight vector at several frequencies, normalised jointly
/// for [`Normalization::GlobalPeak`].
pub fn beam_pattern_family<W: AsRef<[Complex64]> + ?Sized>(
    w: &W,
    geom: &ArrayGeometry,
    freqs_hz: &[f64],
    theta_grid: &[f64],
    normalization: Normalization,
) -> Result<Vec<BeamPattern>> {
    check_grid(theta_grid)?;
    if freqs_hz.is_empty() {
        return Err(Error::invalid("freqs_hz", "no pattern frequencies given"));
    }
    let mut family = freqs_hz
        .iter()
        .map(|&f| {
            Ok(BeamPattern {
                theta_grid_rad: theta_grid.to_vec(),
                freq_hz: f,
                gains_db: raw_pattern_db(w, geom, f, theta_grid)?,
                normalization,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    match normalization {
        Normalization::None => {}
        Normalization::GlobalPeak => {
            let peak = family
                .iter()
                .map(BeamPattern::peak_db)
                .fold(f64::NEG_INFINITY, f64::max);
            for p in &mut family {
                p.gains_db.iter_mut().for_each(|g| *g -= peak);
            }
        }
        Normalization::PerFrequencyPeak => {
            for p in &mut family {
                let peak = p.peak_db();
                p.gains_db.iter_mut().for_each(|g| *g -= peak);
            }
        }
    }
    Ok(family)
}

/// Linear gain `|w^H a(θ₀, f)|` at each frequency.
pub fn soi_gain_profile<W: AsRef<[Complex64]> + ?Sized>(
    w: &W,
    geom: &ArrayGeometry,
    theta0_rad: f64,
    freq_grid_hz: &[f64],
) -> Result<Vec<f64>> {
    freq_grid_hz
        .iter()
        .map(|&f| Ok(dot_h(w.as_ref(), &steering_vector(geom, theta0_rad, f)?).norm()))
        .collect()
}

/// Peak-to-trough spread of a linear gain profile, in dB.
pub fn ripple_db(profile: &[f64]) -> f64 {
    if profile.is_empty() {
        return 0.0;
    }
    let hi = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = profile.iter().copied().fold(f64::INFINITY, f64::min);
    (amplitude_db(hi) - amplitude_db(lo)).max(0.0)
}

/// Output SINR in dB against the scenario's analytic signal and
/// interference-plus-noise covariances: `w^H R_s w / w^H (R_i + I) w`.
///
/// Responses at rounding level (`|w^H a| ≤ 4ε‖w‖‖a‖`) count as exact zeros,
/// so a beamformer orthogonal to the signal reports [`DB_FLOOR`].
pub fn output_sinr<W: AsRef<[Complex64]> + ?Sized>(w: &W, scn: &Scenario) -> Result<f64> {
    scn.validate()?;
    let w_norm = norm2(w.as_ref());
    let power = |components: Vec<(Vec<Complex64>, f64)>| -> f64 {
        components
            .iter()
            .map(|(a, p)| {
                let g = dot_h(w.as_ref(), a).norm();
                if g <= 4.0 * f64::EPSILON * w_norm * norm2(a) {
                    0.0
                } else {
                    p * g * g
                }
            })
            .sum()
    };
    let signal = power(scn.soi_components()?);
    let interference = power(scn.interferer_components()?);
    Ok(power_db(signal / (w_norm * w_norm + interference)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Single distortionless constraint at the band centre.
    Mvdr,
    /// Distortionless constraints at every constraint frequency.
    Mvmfdr,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Mvdr, Method::Mvmfdr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mvdr => "mvdr",
            Method::Mvmfdr => "mvmfdr",
        }
    }
}

/// Both designs for one covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub mvdr: WeightVector,
    pub mvmfdr: WeightVector,
}

impl Design {
    pub fn get(&self, method: Method) -> &WeightVector {
        match method {
            Method::Mvdr => &self.mvdr,
            Method::Mvmfdr => &self.mvmfdr,
        }
    }
}

/// MVDR at the band centre and MVMFDR at the scenario's constraint frequencies.
pub fn design(scn: &Scenario, r: &CovarianceMatrix) -> Result<Design> {
    scn.validate()?;
    let a0 = steering_vector(&scn.geometry, scn.soi_doa_rad, scn.center_freq_hz())?;
    let cs = ConstraintSet::at_frequencies(
        &scn.geometry,
        scn.soi_doa_rad,
        &scn.constraint_freqs_hz,
        scn.constraint_gain_b,
    )?;
    Ok(Design {
        mvdr: mvdr_weights(r, &a0)?,
        mvmfdr: mvmfdr_weights(r, &cs)?,
    })
}

/// Per-design figures of merit.
///
/// Per-frequency entries follow the scenario's constraint frequencies; the
/// interferer table is indexed `[interferer][frequency]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodMetrics {
    pub soi_gain_ripple_db: f64,
    pub soi_mean_gain_db: f64,
    pub soi_gain_db: Vec<f64>,
    pub interferer_gain_db: Vec<Vec<f64>>,
    pub output_sinr_db: f64,
    pub objective_value: f64,
}

/// Metrics of `w` in `scn`.
pub fn evaluate(scn: &Scenario, w: &WeightVector) -> Result<MethodMetrics> {
    let g = &scn.geometry;
    let sweep = soi_gain_profile(w, g, scn.soi_doa_rad, &scn.sweep_freqs_hz())?;
    let mean_gain = sweep.iter().sum::<f64>() / sweep.len() as f64;
    let soi_gain_db = soi_gain_profile(w, g, scn.soi_doa_rad, &scn.constraint_freqs_hz)?
        .into_iter()
        .map(amplitude_db)
        .collect();
    let interferer_gain_db = scn
        .interferer_doas_rad
        .iter()
        .map(|&t| {
            Ok(soi_gain_profile(w, g, t, &scn.constraint_freqs_hz)?
                .into_iter()
                .map(amplitude_db)
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(MethodMetrics {
        soi_gain_ripple_db: ripple_db(&sweep),
        soi_mean_gain_db: amplitude_db(mean_gain),
        soi_gain_db,
        interferer_gain_db,
        output_sinr_db: output_sinr(w, scn)?,
        objective_value: w.objective_value(),
    })
}

/// Metrics of both designs for one covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialComparison {
    pub mvdr: MethodMetrics,
    pub mvmfdr: MethodMetrics,
}

impl TrialComparison {
    pub fn get(&self, method: Method) -> &MethodMetrics {
        match method {
            Method::Mvdr => &self.mvdr,
            Method::Mvmfdr => &self.mvmfdr,
        }
    }
}

/// Single-shot analysis: design both beamformers for `r` and evaluate them.
pub fn analyze(scn: &Scenario, r: &CovarianceMatrix) -> Result<TrialComparison> {
    let d = design(scn, r)?;
    Ok(TrialComparison {
        mvdr: evaluate(scn, &d.mvdr)?,
        mvmfdr: evaluate(scn, &d.mvmfdr)?,
    })
}

/// One Monte Carlo trial. Errors carry the trial index.
pub fn run_trial(scn: &Scenario, source: CovarianceSource, trial_index: u64) -> Result<TrialComparison> {
    trial_covariance(scn, source, trial_index)
        .and_then(|r| analyze(scn, &r))
        .map_err(|e| Error::Trial {
            index: trial_index,
            source: Box::new(e),
        })
}

/// Mean and sample standard deviation across trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Two-pass statistics, summed in slice order.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Stat {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let first = values.iter().sum::<f64>() / n as f64;
        // corrected two-pass: removes the rounding error of the first mean
        let mean = first + values.iter().map(|v| v - first).sum::<f64>() / n as f64;
        let std = if n > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            libm::sqrt(ss / (n - 1) as f64)
        } else {
            0.0
        };
        Stat { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub soi_gain_ripple_db: Stat,
    pub soi_mean_gain_db: Stat,
    pub soi_gain_db: Vec<Stat>,
    pub interferer_gain_db: Vec<Vec<Stat>>,
    pub output_sinr_db: Stat,
    pub objective_value: Stat,
}

impl MethodSummary {
    fn from_metrics(all: &[&MethodMetrics]) -> Self {
        let col = |f: &dyn Fn(&MethodMetrics) -> f64| Stat::of(&all.iter().map(|m| f(m)).collect::<Vec<_>>());
        let nf = all[0].soi_gain_db.len();
        let nj = all[0].interferer_gain_db.len();
        MethodSummary {
            soi_gain_ripple_db: col(&|m| m.soi_gain_ripple_db),
            soi_mean_gain_db: col(&|m| m.soi_mean_gain_db),
            soi_gain_db: (0..nf).map(|k| col(&|m| m.soi_gain_db[k])).collect(),
            interferer_gain_db: (0..nj)
                .map(|j| (0..nf).map(|k| col(&|m| m.interferer_gain_db[j][k])).collect())
                .collect(),
            output_sinr_db: col(&|m| m.output_sinr_db),
            objective_value: col(&|m| m.objective_value),
        }
    }
}

/// One flattened `(method, metric, mean, std)` line of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: Method,
    pub metric: String,
    pub stat: Stat,
}

/// Aggregated Monte Carlo comparison of the two designs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub num_trials: usize,
    /// Frequencies of the per-frequency metrics (the constraint frequencies).
    pub report_freqs_hz: Vec<f64>,
    pub mvdr: MethodSummary,
    pub mvmfdr: MethodSummary,
}

impl ComparisonReport {
    /// Reduces per-trial metrics in slice (trial index) order.
    pub fn from_trials(scn: &Scenario, trials: &[TrialComparison]) -> Result<Self> {
        if trials.is_empty() {
            return Err(Error::invalid("num_trials", "no trials to aggregate"));
        }
        let mvdr: Vec<&MethodMetrics> = trials.iter().map(|t| &t.mvdr).collect();
        let mvmfdr: Vec<&MethodMetrics> = trials.iter().map(|t| &t.mvmfdr).collect();
        Ok(Self {
            num_trials: trials.len(),
            report_freqs_hz: scn.constraint_freqs_hz.clone(),
            mvdr: MethodSummary::from_metrics(&mvdr),
            mvmfdr: MethodSummary::from_metrics(&mvmfdr),
        })
    }

    pub fn get(&self, method: Method) -> &MethodSummary {
        match method {
            Method::Mvdr => &self.mvdr,
            Method::Mvmfdr => &self.mvmfdr,
        }
    }

    /// Flat rows, MVDR first, metrics in a fixed order.
    pub fn rows(&self) -> Vec<ReportRow> {
        let mut rows = Vec::new();
        for method in Method::ALL {
            let s = self.get(method);
            let mut push = |metric: String, stat: Stat| rows.push(ReportRow { method, metric, stat });
            push("soi_gain_ripple_db".into(), s.soi_gain_ripple_db);
            push("soi_mean_gain_db".into(), s.soi_mean_gain_db);
            for (f, st) in self.report_freqs_hz.iter().zip(&s.soi_gain_db) {
                push(format!("soi_gain_db@{f}"), *st);
            }
            for (j, per_f) in s.interferer_gain_db.iter().enumerate() {
                for (f, st) in self.report_freqs_hz.iter().zip(per_f) {
                    push(format!("interferer{j}_gain_db@{f}"), *st);
                }
            }
            push("output_sinr_db".into(), s.output_sinr_db);
            push("objective_value".into(), s.objective_value);
        }
        rows
    }
}

/// Runs `scn.num_trials` trials in index order and aggregates them.
///
/// With [`CovarianceSource::Ideal`] every trial sees the same covariance, so
/// the analysis runs once and is replicated.
pub fn monte_carlo_compare(scn: &Scenario, source: CovarianceSource) -> Result<ComparisonReport> {
    scn.validate()?;
    let trials = match source {
        CovarianceSource::Ideal => {
            let r = ideal_covariance(scn)?;
            let one = analyze(scn, &r).map_err(|e| Error::Trial {
                index: 0,
                source: Box::new(e),
            })?;
            vec![one; scn.num_trials]
        }
        CovarianceSource::Sample => (0..scn.num_trials as u64)
            .map(|i| run_trial(scn, source, i))
            .collect::<Result<Vec<_>>>()?,
    };
    ComparisonReport::from_trials(scn, &trials)
}

/// Complex response of `w` at every point of a frequency grid toward `theta_rad`.
pub fn response_profile<W: AsRef<[Complex64]> + ?Sized>(
    w: &W,
    geom: &ArrayGeometry,
    theta_rad: f64,
    freq_grid_hz: &[f64],
) -> Result<Vec<Complex64>> {
    freq_grid_hz
        .iter()
        .map(|&f| Ok(dot_h(w.as_ref(), &steering_vector(geom, theta_rad, f)?)))
        .collect()
}
