//! Butterworth low-pass design as a cascade of second-order sections.
//!
//! The analog prototype is factored into conjugate pole pairs
//! `s^2 + 2 zeta s + 1` (plus a real pole at `s = -1` for odd orders), each
//! pair mapped to the z-plane by the bilinear transform with the cutoff
//! pre-warped to `K = tan(pi fc / fs)`. Every section is normalized to unit
//! gain at DC.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub order: usize,
    pub cutoff_hz: f64,
    pub sample_rate_hz: f64,
}

impl FilterSpec {
    pub fn new(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        let spec = Self {
            order,
            cutoff_hz,
            sample_rate_hz,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidFilter("order must be positive".into()));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidFilter(format!(
                "sample rate {} must be positive",
                self.sample_rate_hz
            )));
        }
        let nyquist = self.sample_rate_hz / 2.0;
        if !(self.cutoff_hz.is_finite() && self.cutoff_hz > 0.0 && self.cutoff_hz < nyquist) {
            return Err(Error::InvalidFilter(format!(
                "cutoff {} Hz must lie in (0, {nyquist}) Hz",
                self.cutoff_hz
            )));
        }
        Ok(())
    }
}

/// One biquad, `a0` normalized to 1:
/// `H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    pub fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        let num = self.b[0] + self.b[1] * z_inv + self.b[2] * z2;
        let den = 1.0 + self.a[0] * z_inv + self.a[1] * z2;
        num / den
    }

    pub fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosCascade {
    pub order: usize,
    pub sections: Vec<Biquad>,
}

impl SosCascade {
    /// Complex frequency response at `freq_hz`.
    pub fn response(&self, freq_hz: f64, sample_rate_hz: f64) -> Complex64 {
        let w = 2.0 * PI * freq_hz / sample_rate_hz;
        let z_inv = Complex64::from_polar(1.0, -w);
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(z_inv))
    }

    pub fn magnitude(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        self.response(freq_hz, sample_rate_hz).norm()
    }
}

pub fn design_butterworth_lowpass(spec: &FilterSpec) -> Result<SosCascade> {
    spec.validate()?;
    let n = spec.order;
    let k = (PI * spec.cutoff_hz / spec.sample_rate_hz).tan();
    let k2 = k * k;
    let mut sections = Vec::with_capacity(n.div_ceil(2));

    for pair in 0..n / 2 {
        let zeta = (PI * (2 * pair + 1) as f64 / (2 * n) as f64).sin();
        let a0 = 1.0 + 2.0 * zeta * k + k2;
        sections.push(Biquad {
            b: [k2 / a0, 2.0 * k2 / a0, k2 / a0],
            a: [2.0 * (k2 - 1.0) / a0, (1.0 - 2.0 * zeta * k + k2) / a0],
        });
    }
    if n % 2 == 1 {
        let a0 = 1.0 + k;
        sections.push(Biquad {
            b: [k / a0, k / a0, 0.0],
            a: [(k - 1.0) / a0, 0.0],
        });
    }
    Ok(SosCascade { order: n, sections })
}
