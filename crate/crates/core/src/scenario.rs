//! Wideband array scenario: snapshot synthesis and covariance estimation.
//!
//! The wideband signal of interest and each interferer are modelled as a sum of
//! discrete frequency components with independent circular complex Gaussian
//! amplitudes, plus spatially white unit-power sensor noise. That keeps the
//! true covariance available in closed form ([`ideal_covariance`]).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::array::{half_wavelength_spacing, steering_vector, ArrayGeometry, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Number of synthesis components spread across the band when none are given.
pub const DEFAULT_SIM_COMPONENTS: usize = 21;
/// Points in the dense frequency sweep used for gain ripple.
pub const DEFAULT_SWEEP_POINTS: usize = 101;
/// Relative diagonal loading applied to sample covariances.
pub const DEFAULT_RELATIVE_LOADING: f64 = 1e-6;

/// Spectral extent of each interferer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InterfererSpectrum {
    /// Same component grid as the signal of interest.
    #[default]
    Wideband,
    /// A single tone at the given frequency.
    Tone(f64),
}

/// How much identity to add to an estimated covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagonalLoading {
    /// `factor · trace(R)/N`.
    RelativeTrace(f64),
    /// A fixed amount, in units of the (unit) noise power.
    Absolute(f64),
}

impl Default for DiagonalLoading {
    fn default() -> Self {
        DiagonalLoading::RelativeTrace(DEFAULT_RELATIVE_LOADING)
    }
}

impl DiagonalLoading {
    fn validate(self) -> Result<()> {
        let v = match self {
            DiagonalLoading::RelativeTrace(v) | DiagonalLoading::Absolute(v) => v,
        };
        if v >= 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid("loading", "must be nonnegative and finite"))
        }
    }

    /// Loading to add to the unloaded estimate `raw`.
    pub fn amount(self, raw: &CMatrix) -> f64 {
        match self {
            DiagonalLoading::Absolute(v) => v,
            DiagonalLoading::RelativeTrace(f) => f * raw.trace().re / raw.rows() as f64,
        }
    }
}

/// Which covariance feeds the weight solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceSource {
    /// The analytic covariance of the scenario.
    #[default]
    Ideal,
    /// Sample covariance of simulated snapshots, with the scenario's loading.
    Sample,
}

/// Full description of a wideband beamforming experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: ArrayGeometry,
    pub soi_doa_rad: f64,
    pub interferer_doas_rad: Vec<f64>,
    pub band_lo_hz: f64,
    pub band_hi_hz: f64,
    /// Distortionless-constraint frequencies, strictly increasing, inside the band.
    pub constraint_freqs_hz: Vec<f64>,
    /// Frequency components used to synthesise the signals.
    pub sim_freqs_hz: Vec<f64>,
    pub interferer_spectrum: InterfererSpectrum,
    /// Total signal power over per-sensor noise power, dB. `−∞` disables the signal.
    pub snr_db: f64,
    /// Total signal power over per-interferer power, dB.
    pub sir_db: f64,
    pub num_snapshots: usize,
    pub num_trials: usize,
    pub rng_seed: u64,
    /// Required response `b` toward the signal at every constraint frequency.
    pub constraint_gain_b: Complex64,
    pub loading: DiagonalLoading,
    /// Points in the dense in-band sweep used for ripple metrics.
    pub sweep_points: usize,
}

/// `n` equally spaced points over `[lo, hi]`; a single point sits at the centre.
pub fn equally_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

impl Scenario {
    /// The reference experiment: 8 sensors at half a wavelength of 3.6 GHz,
    /// signal at 50°, interferer at 80°, 20 dB SNR, SIR of 1/2, band
    /// 3.50–3.60 GHz, five constraint frequencies, 64 snapshots, 500 trials.
    pub fn paper() -> Self {
        let spacing = half_wavelength_spacing(3.6e9, SPEED_OF_LIGHT).expect("positive frequency");
        let geometry = ArrayGeometry::new(8, spacing).expect("valid geometry");
        let (lo, hi) = (3.50e9, 3.60e9);
        Self {
            geometry,
            soi_doa_rad: 50.0 * PI / 180.0,
            interferer_doas_rad: vec![80.0 * PI / 180.0],
            band_lo_hz: lo,
            band_hi_hz: hi,
            constraint_freqs_hz: vec![3.50e9, 3.52e9, 3.55e9, 3.57e9, 3.60e9],
            sim_freqs_hz: equally_spaced(lo, hi, DEFAULT_SIM_COMPONENTS),
            interferer_spectrum: InterfererSpectrum::Wideband,
            snr_db: 20.0,
            sir_db: 10.0 * libm::log10(0.5),
            num_snapshots: 64,
            num_trials: 500,
            rng_seed: 0x5EED_2010,
            constraint_gain_b: Complex64::new(1.0, 0.0),
            loading: DiagonalLoading::default(),
            sweep_points: DEFAULT_SWEEP_POINTS,
        }
    }

    /// Checks every scenario invariant, naming the offending field on failure.
    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        g.check_angle("soi_doa", self.soi_doa_rad)?;
        for &t in &self.interferer_doas_rad {
            g.check_angle("interferer_doas", t)?;
        }
        if !(self.band_lo_hz > 0.0 && self.band_lo_hz.is_finite()) {
            return Err(Error::invalid("band_lo_hz", "must be positive and finite"));
        }
        if !(self.band_hi_hz > self.band_lo_hz && self.band_hi_hz.is_finite()) {
            return Err(Error::invalid("band_hi_hz", "must be finite and exceed band_lo_hz"));
        }
        let cf = &self.constraint_freqs_hz;
        if cf.is_empty() {
            return Err(Error::invalid(
                "constraint_freqs_hz",
                "at least one constraint frequency is required",
            ));
        }
        if cf.len() > g.num_sensors() {
            return Err(Error::invalid("constraint_freqs_hz", "more constraints than sensors"));
        }
        if cf.iter().any(|&f| !(f >= self.band_lo_hz && f <= self.band_hi_hz)) {
            return Err(Error::invalid(
                "constraint_freqs_hz",
                "frequency outside [band_lo_hz, band_hi_hz]",
            ));
        }
        if cf.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("constraint_freqs_hz", "must be strictly increasing"));
        }
        if self.sim_freqs_hz.is_empty() {
            return Err(Error::invalid(
                "sim_freqs_hz",
                "at least one synthesis frequency is required",
            ));
        }
        if self.sim_freqs_hz.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
            return Err(Error::invalid(
                "sim_freqs_hz",
                "frequencies must be positive and finite",
            ));
        }
        if let InterfererSpectrum::Tone(f) = self.interferer_spectrum {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::invalid("interferer_tone_hz", "must be positive and finite"));
            }
        }
        if self.snr_db.is_nan() || self.snr_db == f64::INFINITY {
            return Err(Error::invalid("snr_db", "must be finite or −∞"));
        }
        if !self.sir_db.is_finite() {
            return Err(Error::invalid("sir_db", "must be finite"));
        }
        if self.num_snapshots == 0 {
            return Err(Error::invalid("num_snapshots", "must be at least 1"));
        }
        if self.num_trials == 0 {
            return Err(Error::invalid("num_trials", "must be at least 1"));
        }
        let b = self.constraint_gain_b;
        if !(b.norm() > 0.0 && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::invalid("constraint_gain_b", "must be nonzero and finite"));
        }
        self.loading.validate()?;
        if self.sweep_points < 2 {
            return Err(Error::invalid("sweep_points", "must be at least 2"));
        }
        Ok(())
    }

    /// Centre of the band, where the narrowband beamformer is designed.
    pub fn center_freq_hz(&self) -> f64 {
        0.5 * (self.band_lo_hz + self.band_hi_hz)
    }

    /// Dense in-band frequency sweep.
    pub fn sweep_freqs_hz(&self) -> Vec<f64> {
        equally_spaced(self.band_lo_hz, self.band_hi_hz, self.sweep_points)
    }

    /// Total signal power (noise power is 1).
    pub fn soi_power(&self) -> f64 {
        libm::pow(10.0, self.snr_db / 10.0)
    }

    /// Total power of each interferer.
    pub fn interferer_power(&self) -> f64 {
        self.soi_power() / libm::pow(10.0, self.sir_db / 10.0)
    }

    /// Power carried by each signal component.
    pub fn soi_component_power(&self) -> f64 {
        self.soi_power() / self.sim_freqs_hz.len() as f64
    }

    /// Frequencies carried by each interferer.
    pub fn interferer_freqs_hz(&self) -> Vec<f64> {
        match self.interferer_spectrum {
            InterfererSpectrum::Wideband => self.sim_freqs_hz.clone(),
            InterfererSpectrum::Tone(f) => vec![f],
        }
    }

    /// Power carried by each component of each interferer.
    pub fn interferer_component_power(&self) -> f64 {
        let k = match self.interferer_spectrum {
            InterfererSpectrum::Wideband => self.sim_freqs_hz.len(),
            InterfererSpectrum::Tone(_) => 1,
        };
        self.interferer_power() / k as f64
    }

    /// Every (steering vector, power) pair of the signal of interest.
    pub fn soi_components(&self) -> Result<Vec<(Vec<Complex64>, f64)>> {
        let p = self.soi_component_power();
        self.sim_freqs_hz
            .iter()
            .map(|&f| Ok((steering_vector(&self.geometry, self.soi_doa_rad, f)?.into_entries(), p)))
            .collect()
    }

    /// Every (steering vector, power) pair of every interferer, interferer-major.
    pub fn interferer_components(&self) -> Result<Vec<(Vec<Complex64>, f64)>> {
        let p = self.interferer_component_power();
        let freqs = self.interferer_freqs_hz();
        let mut out = Vec::with_capacity(freqs.len() * self.interferer_doas_rad.len());
        for &theta in &self.interferer_doas_rad {
            for &f in &freqs {
                out.push((steering_vector(&self.geometry, theta, f)?.into_entries(), p));
            }
        }
        Ok(out)
    }
}

/// Sensor-by-time data block; snapshot `k` is the vector `x(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    num_sensors: usize,
    // time-major: snapshot k occupies data[k*N .. (k+1)*N]
    data: Vec<Complex64>,
}

impl SnapshotMatrix {
    /// Builds from an `N × T` matrix (rows are sensors).
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if m.rows() == 0 || m.cols() == 0 {
            return Err(Error::invalid("snapshots", "snapshot matrix is empty"));
        }
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for k in 0..m.cols() {
            for n in 0..m.rows() {
                data.push(m[(n, k)]);
            }
        }
        Ok(Self {
            num_sensors: m.rows(),
            data,
        })
    }

    /// Builds from a list of snapshots of equal length.
    pub fn from_snapshots<S: AsRef<[Complex64]>>(snapshots: &[S]) -> Result<Self> {
        let n = snapshots.first().map_or(0, |s| s.as_ref().len());
        if n == 0 {
            return Err(Error::invalid("snapshots", "snapshot matrix is empty"));
        }
        if snapshots.iter().any(|s| s.as_ref().len() != n) {
            return Err(Error::invalid("snapshots", "snapshots differ in length"));
        }
        Ok(Self {
            num_sensors: n,
            data: snapshots.iter().flat_map(|s| s.as_ref().iter().copied()).collect(),
        })
    }

    pub fn num_sensors(&self) -> usize {
        self.num_sensors
    }

    pub fn num_snapshots(&self) -> usize {
        self.data.len() / self.num_sensors
    }

    pub fn snapshot(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.num_sensors..(k + 1) * self.num_sensors]
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks_exact(self.num_sensors)
    }

    /// `N × T` matrix view (rows are sensors).
    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.num_sensors, self.num_snapshots(), |n, k| self.snapshot(k)[n])
    }
}

/// Hermitian covariance estimate with the diagonal loading it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: CMatrix,
    loading_factor: f64,
}

impl CovarianceMatrix {
    /// `(raw + loading·I)`, symmetrised to exact Hermitian form.
    pub fn new(raw: CMatrix, loading_factor: f64) -> Result<Self> {
        if !raw.is_square() || raw.rows() == 0 {
            return Err(Error::invalid("covariance", "matrix must be square and non-empty"));
        }
        if raw.as_slice().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("covariance", "entries must be finite"));
        }
        if !(loading_factor >= 0.0 && loading_factor.is_finite()) {
            return Err(Error::invalid("loading_factor", "must be nonnegative and finite"));
        }
        let mut m = raw;
        for i in 0..m.rows() {
            m[(i, i)] += loading_factor;
        }
        Ok(Self {
            matrix: m.hermitian_part(),
            loading_factor,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn loading_factor(&self) -> f64 {
        self.loading_factor
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `alpha · R`, loading included.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            matrix: self.matrix.scaled(alpha),
            loading_factor: self.loading_factor * alpha,
        }
    }

    /// Quadratic form `w^H R w` (real part).
    pub fn quadratic_form(&self, w: &[Complex64]) -> f64 {
        crate::linalg::dot_h(w, &self.matrix.matvec(w)).re
    }
}

/// Running `Σ x x^H` over snapshots.
#[derive(Debug, Clone)]
pub struct CovarianceAccumulator {
    sum: CMatrix,
    count: usize,
}

impl CovarianceAccumulator {
    pub fn new(num_sensors: usize) -> Self {
        Self {
            sum: CMatrix::zeros(num_sensors, num_sensors),
            count: 0,
        }
    }

    pub fn push(&mut self, x: &[Complex64]) {
        let n = self.sum.rows();
        assert_eq!(x.len(), n, "snapshot length differs from sensor count");
        // upper triangle only; mirrored in `raw`
        for (i, &xi) in x.iter().enumerate() {
            for (j, xj) in x.iter().enumerate().skip(i) {
                self.sum[(i, j)] += xi * xj.conj();
            }
        }
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Unloaded estimate `(1/T) Σ x x^H`.
    pub fn raw(&self) -> Result<CMatrix> {
        if self.count == 0 {
            return Err(Error::invalid("snapshots", "no snapshots accumulated"));
        }
        let n = self.sum.rows();
        let scale = 1.0 / self.count as f64;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let z = self.sum[(i, j)] * scale;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        Ok(m)
    }

    pub fn finish(&self, loading_factor: f64) -> Result<CovarianceMatrix> {
        CovarianceMatrix::new(self.raw()?, loading_factor)
    }

    pub fn finish_with(&self, loading: DiagonalLoading) -> Result<CovarianceMatrix> {
        let raw = self.raw()?;
        let amount = loading.amount(&raw);
        CovarianceMatrix::new(raw, amount)
    }
}

/// `R = (1/T)·X·X^H + loading_factor·I`, symmetrised.
pub fn sample_covariance(x: &SnapshotMatrix, loading_factor: f64) -> Result<CovarianceMatrix> {
    accumulate(x).finish(loading_factor)
}

/// Sample covariance with the loading rule applied to the unloaded estimate.
pub fn sample_covariance_with(x: &SnapshotMatrix, loading: DiagonalLoading) -> Result<CovarianceMatrix> {
    accumulate(x).finish_with(loading)
}

fn accumulate(x: &SnapshotMatrix) -> CovarianceAccumulator {
    let mut acc = CovarianceAccumulator::new(x.num_sensors());
    for s in x.snapshots() {
        acc.push(s);
    }
    acc
}

/// Analytic covariance: unit noise plus every source component's rank-one term.
pub fn ideal_covariance(scn: &Scenario) -> Result<CovarianceMatrix> {
    scn.validate()?;
    let n = scn.geometry.num_sensors();
    let mut r = CMatrix::identity(n);
    for (a, p) in scn.soi_components()?.iter().chain(scn.interferer_components()?.iter()) {
        if *p > 0.0 {
            r.add_outer(*p, a);
        }
    }
    CovarianceMatrix::new(r, 0.0)
}

/// Deterministic snapshot source for one trial.
///
/// The generator state is a pure function of `(rng_seed, trial_index)`: the
/// seed selects the ChaCha key and the trial index selects the stream, so
/// trials are independent and may be generated in any order or in parallel.
#[derive(Debug, Clone)]
pub struct SnapshotGenerator {
    num_sensors: usize,
    soi: Vec<Vec<Complex64>>,
    soi_amp: f64,
    interferers: Vec<Vec<Complex64>>,
    interferer_amp: f64,
    rng: ChaCha8Rng,
}

impl SnapshotGenerator {
    pub fn new(scn: &Scenario, trial_index: u64) -> Result<Self> {
        scn.validate()?;
        let soi = scn.soi_components()?.into_iter().map(|(a, _)| a).collect();
        let interferers = scn.interferer_components()?.into_iter().map(|(a, _)| a).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(scn.rng_seed);
        rng.set_stream(trial_index);
        Ok(Self {
            num_sensors: scn.geometry.num_sensors(),
            soi,
            soi_amp: libm::sqrt(scn.soi_component_power() / 2.0),
            interferers,
            interferer_amp: libm::sqrt(scn.interferer_component_power() / 2.0),
            rng,
        })
    }

    fn gaussian(&mut self, amp: f64) -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex64::new(re * amp, im * amp)
    }

    /// Writes the next snapshot `x(k)` into `out`.
    pub fn fill_next(&mut self, out: &mut [Complex64]) {
        assert_eq!(out.len(), self.num_sensors);
        out.fill(Complex64::new(0.0, 0.0));
        for m in 0..self.soi.len() {
            let s = self.gaussian(self.soi_amp);
            for (o, a) in out.iter_mut().zip(&self.soi[m]) {
                *o += s * a;
            }
        }
        for m in 0..self.interferers.len() {
            let s = self.gaussian(self.interferer_amp);
            for (o, a) in out.iter_mut().zip(&self.interferers[m]) {
                *o += s * a;
            }
        }
        for o in out.iter_mut() {
            *o += self.gaussian(core::f64::consts::FRAC_1_SQRT_2);
        }
    }

    pub fn next_snapshot(&mut self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.num_sensors];
        self.fill_next(&mut v);
        v
    }

    /// Streams `count` snapshots straight into a covariance accumulator.
    pub fn accumulate(&mut self, count: usize) -> CovarianceAccumulator {
        let mut acc = CovarianceAccumulator::new(self.num_sensors);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.num_sensors];
        for _ in 0..count {
            self.fill_next(&mut buf);
            acc.push(&buf);
        }
        acc
    }
}

/// `scn.num_snapshots` snapshots for trial `trial_index`.
pub fn generate_snapshots(scn: &Scenario, trial_index: u64) -> Result<SnapshotMatrix> {
    let mut generator = SnapshotGenerator::new(scn, trial_index)?;
    let n = scn.geometry.num_sensors();
    let mut data = vec![Complex64::new(0.0, 0.0); n * scn.num_snapshots];
    for chunk in data.chunks_exact_mut(n) {
        generator.fill_next(chunk);
    }
    Ok(SnapshotMatrix { num_sensors: n, data })
}

/// Covariance handed to the solvers for one trial.
pub fn trial_covariance(scn: &Scenario, source: CovarianceSource, trial_index: u64) -> Result<CovarianceMatrix> {
    match source {
        CovarianceSource::Ideal => ideal_covariance(scn),
        CovarianceSource::Sample => {
            let mut generator = SnapshotGenerator::new(scn, trial_index)?;
            generator.accumulate(scn.num_snapshots).finish_with(scn.loading)
        }
    }
}
