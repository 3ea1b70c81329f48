//! Uniform linear array geometry and plane-wave steering vectors.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::ops::Deref;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Angles are accepted this far outside their nominal range to absorb
/// degree/radian round-off at the endpoints.
const ANGLE_SLACK: f64 = 1e-12;

/// Which direction an angle of arrival is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleReference {
    /// Measured from the array normal; valid range `[−π/2, π/2]`, delay ∝ `sin θ`.
    #[default]
    Broadside,
    /// Measured from the array axis; valid range `[0, π]`, delay ∝ `cos θ`.
    Axis,
}

impl AngleReference {
    /// Closed range of valid angles in radians.
    pub fn range(self) -> (f64, f64) {
        match self {
            AngleReference::Broadside => (-FRAC_PI_2, FRAC_PI_2),
            AngleReference::Axis => (0.0, PI),
        }
    }

    /// Path-difference factor per unit spacing for a wave arriving from `theta_rad`.
    pub fn delay_factor(self, theta_rad: f64) -> f64 {
        match self {
            AngleReference::Broadside => libm::sin(theta_rad),
            AngleReference::Axis => libm::cos(theta_rad),
        }
    }

    pub fn contains(self, theta_rad: f64) -> bool {
        let (lo, hi) = self.range();
        theta_rad >= lo - ANGLE_SLACK && theta_rad <= hi + ANGLE_SLACK
    }
}

/// Uniform linear array: `num_sensors` elements, `spacing_m` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_sensors: usize,
    spacing_m: f64,
    propagation_speed_mps: f64,
    angle_reference: AngleReference,
}

impl ArrayGeometry {
    /// Array in free space (propagation at the speed of light), broadside angles.
    pub fn new(num_sensors: usize, spacing_m: f64) -> Result<Self> {
        Self::with_medium(num_sensors, spacing_m, SPEED_OF_LIGHT)
    }

    pub fn with_medium(num_sensors: usize, spacing_m: f64, propagation_speed_mps: f64) -> Result<Self> {
        if num_sensors < 2 {
            return Err(Error::invalid("num_sensors", "an array needs at least 2 sensors"));
        }
        if !(spacing_m > 0.0 && spacing_m.is_finite()) {
            return Err(Error::invalid("spacing_m", "must be positive and finite"));
        }
        if !(propagation_speed_mps > 0.0 && propagation_speed_mps.is_finite()) {
            return Err(Error::invalid("propagation_speed_mps", "must be positive and finite"));
        }
        Ok(Self {
            num_sensors,
            spacing_m,
            propagation_speed_mps,
            angle_reference: AngleReference::Broadside,
        })
    }

    /// Same geometry, with angles interpreted against `reference`.
    pub fn with_angle_reference(mut self, reference: AngleReference) -> Self {
        self.angle_reference = reference;
        self
    }

    pub fn num_sensors(&self) -> usize {
        self.num_sensors
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m
    }

    pub fn propagation_speed_mps(&self) -> f64 {
        self.propagation_speed_mps
    }

    pub fn angle_reference(&self) -> AngleReference {
        self.angle_reference
    }

    pub fn check_angle(&self, field: &'static str, theta_rad: f64) -> Result<()> {
        if theta_rad.is_finite() && self.angle_reference.contains(theta_rad) {
            Ok(())
        } else {
            Err(Error::invalid(
                field,
                "angle outside the valid range for the angle reference",
            ))
        }
    }
}

/// Spacing of half a wavelength at `freq_hz`.
pub fn half_wavelength_spacing(freq_hz: f64, propagation_speed_mps: f64) -> Result<f64> {
    if !(freq_hz > 0.0 && freq_hz.is_finite()) {
        return Err(Error::invalid("freq_hz", "must be positive and finite"));
    }
    if !(propagation_speed_mps > 0.0 && propagation_speed_mps.is_finite()) {
        return Err(Error::invalid("propagation_speed_mps", "must be positive and finite"));
    }
    Ok(propagation_speed_mps / (2.0 * freq_hz))
}

/// Array response to a unit plane wave, phase-referenced to sensor 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
    theta_rad: f64,
    freq_hz: f64,
}

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn theta_rad(&self) -> f64 {
        self.theta_rad
    }

    pub fn freq_hz(&self) -> f64 {
        self.freq_hz
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }
}

impl Deref for SteeringVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.entries
    }
}

impl AsRef<[Complex64]> for SteeringVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.entries
    }
}

/// Steering vector `a(θ, f)` with entries `exp(−i·2π·f·n·d·g(θ)/c)`, where
/// `g` is `sin` for broadside angles and `cos` for axis angles.
pub fn steering_vector(geom: &ArrayGeometry, theta_rad: f64, freq_hz: f64) -> Result<SteeringVector> {
    if !(freq_hz > 0.0 && freq_hz.is_finite()) {
        return Err(Error::invalid("freq_hz", "must be positive and finite"));
    }
    geom.check_angle("theta_rad", theta_rad)?;
    let step =
        TAU * freq_hz * geom.spacing_m * geom.angle_reference.delay_factor(theta_rad) / geom.propagation_speed_mps;
    let mut entries = Vec::with_capacity(geom.num_sensors);
    entries.push(Complex64::new(1.0, 0.0));
    for n in 1..geom.num_sensors {
        let phase = -(step * n as f64);
        entries.push(Complex64::new(libm::cos(phase), libm::sin(phase)));
    }
    Ok(SteeringVector {
        entries,
        theta_rad,
        freq_hz,
    })
}
