//! Target field amplitudes along the crystal.
//!
//! A Gaussian nonlinearity envelope centred in a crystal of length `L`,
//! width `sigma`, produces at `dk = pi / lc` the amplitude
//!
//! ```text
//! A_target(z) = c (erf(L / (2 sqrt2 sigma)) - erf((L - 2z) / (2 sqrt2 sigma)))
//! ```
//!
//! up to a global phase. `c = sqrt(2/pi) sigma` makes the steepest slope of
//! the target equal to `2/pi`, the largest slope a ±1 grating can produce.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum TargetAmplitude {
    /// Real-valued Gaussian-erf target, the form the real-part trackers use.
    GaussianErfReal { length: f64, sigma: f64, scale: f64 },
    /// The same profile carrying the `i` phase of the ideal amplitude.
    GaussianErfImag { length: f64, sigma: f64, scale: f64 },
    /// Complex samples on a uniform grid over `[0, length]`, linearly
    /// interpolated.
    CustomTabulated { length: f64, values: Vec<Complex64> },
}

impl TargetAmplitude {
    /// Real Gaussian-erf target with `sigma = sigma_ratio * length` and the
    /// optimal scale `c = sqrt(2/pi) sigma`.
    pub fn gaussian(length: f64, sigma_ratio: f64) -> Result<Self> {
        let sigma = sigma_ratio * length;
        Self::gaussian_real(length, sigma, (2.0 / PI).sqrt() * sigma)
    }

    pub fn gaussian_real(length: f64, sigma: f64, scale: f64) -> Result<Self> {
        check_gaussian(length, sigma, scale)?;
        Ok(TargetAmplitude::GaussianErfReal {
            length,
            sigma,
            scale,
        })
    }

    pub fn gaussian_imag(length: f64, sigma: f64, scale: f64) -> Result<Self> {
        check_gaussian(length, sigma, scale)?;
        Ok(TargetAmplitude::GaussianErfImag {
            length,
            sigma,
            scale,
        })
    }

    pub fn tabulated(length: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid("length", "must be positive"));
        }
        if values.len() < 2 {
            return Err(Error::invalid("values", "need at least two samples"));
        }
        Ok(TargetAmplitude::CustomTabulated { length, values })
    }

    /// Constant-zero target.
    pub fn zero(length: f64) -> Result<Self> {
        Self::tabulated(length, vec![Complex64::new(0.0, 0.0); 2])
    }

    pub fn length(&self) -> f64 {
        match self {
            TargetAmplitude::GaussianErfReal { length, .. }
            | TargetAmplitude::GaussianErfImag { length, .. }
            | TargetAmplitude::CustomTabulated { length, .. } => *length,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            TargetAmplitude::GaussianErfReal { .. } => "gaussian-erf-real",
            TargetAmplitude::GaussianErfImag { .. } => "gaussian-erf-imag",
            TargetAmplitude::CustomTabulated { .. } => "custom-tabulated",
        }
    }

    /// True when every value the target can take is real.
    pub fn is_real(&self) -> bool {
        match self {
            TargetAmplitude::GaussianErfReal { .. } => true,
            TargetAmplitude::GaussianErfImag { .. } => false,
            TargetAmplitude::CustomTabulated { values, .. } => values.iter().all(|v| v.im == 0.0),
        }
    }

    pub fn eval(&self, z: f64) -> Result<Complex64> {
        let length = self.length();
        if !(z >= 0.0 && z <= length * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange { z, length });
        }
        let z = z.min(length);
        Ok(match self {
            TargetAmplitude::GaussianErfReal { length, sigma, scale } => {
                Complex64::new(erf_profile(*length, *sigma, *scale, z), 0.0)
            }
            TargetAmplitude::GaussianErfImag { length, sigma, scale } => {
                Complex64::new(0.0, erf_profile(*length, *sigma, *scale, z))
            }
            TargetAmplitude::CustomTabulated { length, values } => {
                let steps = (values.len() - 1) as f64;
                let x = z / length * steps;
                let j = (x.floor() as usize).min(values.len() - 2);
                let t = x - j as f64;
                values[j] * (1.0 - t) + values[j + 1] * t
            }
        })
    }

    /// `|∫_0^L dA_target/dz exp(i delta z) dz|`, the magnitude of the
    /// phase-matching function the target encodes, at offset `delta` from
    /// the carrier. Composite Simpson on 4096 panels.
    pub fn pmf_magnitude(&self, delta: f64) -> f64 {
        const PANELS: usize = 4096;
        let length = self.length();
        let h = length / PANELS as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=PANELS {
            let z = h * j as f64;
            let weight = if j == 0 || j == PANELS {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += weight * self.slope(z) * Complex64::from_polar(1.0, delta * z);
        }
        (acc * h / 3.0).norm()
    }

    fn slope(&self, z: f64) -> Complex64 {
        match self {
            TargetAmplitude::GaussianErfReal { length, sigma, scale }
            | TargetAmplitude::GaussianErfImag { length, sigma, scale } => {
                let u = (z - 0.5 * length) / sigma;
                Complex64::new(scale * (2.0 / PI).sqrt() / sigma * (-0.5 * u * u).exp(), 0.0)
            }
            TargetAmplitude::CustomTabulated { length, values } => {
                let steps = (values.len() - 1) as f64;
                let j = ((z / length * steps).floor() as usize).min(values.len() - 2);
                (values[j + 1] - values[j]) * (steps / length)
            }
        }
    }
}

fn erf_profile(length: f64, sigma: f64, scale: f64, z: f64) -> f64 {
    let d = 2.0 * SQRT_2 * sigma;
    scale * (libm::erf(length / d) - libm::erf((length - 2.0 * z) / d))
}

fn check_gaussian(length: f64, sigma: f64, scale: f64) -> Result<()> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::invalid("length", format!("must be positive, got {length}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma", format!("must be positive, got {sigma}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid("scale", format!("must be positive, got {scale}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let t = TargetAmplitude::gaussian(2e-3, 0.25).unwrap();
        assert_eq!(t.eval(0.0).unwrap(), Complex64::new(0.0, 0.0));
        let TargetAmplitude::GaussianErfReal { sigma, scale, .. } = t else { unreachable!() };
        let end = t.eval(2e-3).unwrap().re;
        let budget = 2.0 * scale * libm::erf(2e-3 / (2.0 * SQRT_2 * sigma));
        assert!((end - budget).abs() < 1e-15 * budget);
    }

    #[test]
    fn midpoint_value() {
        // sigma = L/4 -> argument L/(2 sqrt2 sigma) = sqrt2; erf(sqrt2) = 0.954499736...
        let t = TargetAmplitude::gaussian(1e-3, 0.25).unwrap();
        let TargetAmplitude::GaussianErfReal { scale, .. } = t else { unreachable!() };
        let mid = t.eval(0.5e-3).unwrap().re;
        assert!((mid / scale - 0.954_499_736_103_642).abs() < 1e-12);
    }

    #[test]
    fn imaginary_family() {
        let t = TargetAmplitude::gaussian_imag(1e-3, 2.5e-4, 1e-4).unwrap();
        let v = t.eval(0.3e-3).unwrap();
        assert_eq!(v.re, 0.0);
        assert!(v.im > 0.0);
        assert!(!t.is_real());
    }

    #[test]
    fn rejects_non_positive() {
        assert!(TargetAmplitude::gaussian_real(1e-3, 0.0, 1.0).is_err());
        assert!(TargetAmplitude::gaussian_real(1e-3, -1.0, 1.0).is_err());
        assert!(TargetAmplitude::gaussian_real(0.0, 1.0, 1.0).is_err());
        assert!(TargetAmplitude::gaussian_real(1e-3, 1.0, 0.0).is_err());
    }

    #[test]
    fn out_of_range() {
        let t = TargetAmplitude::gaussian(1e-3, 0.25).unwrap();
        assert!(t.eval(-1e-9).is_err());
        assert!(t.eval(1.1e-3).is_err());
    }

    #[test]
    fn tabulated_interpolates() {
        let t = TargetAmplitude::tabulated(
            1.0,
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 2.0), Complex64::new(3.0, 0.0)],
        )
        .unwrap();
        assert_eq!(t.eval(0.25).unwrap(), Complex64::new(0.5, 1.0));
        assert_eq!(t.eval(0.75).unwrap(), Complex64::new(2.0, 1.0));
        assert_eq!(t.eval(1.0).unwrap(), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn target_pmf_peak_equals_final_amplitude() {
        let t = TargetAmplitude::gaussian(2e-3, 0.25).unwrap();
        let peak = t.pmf_magnitude(0.0);
        let end = t.eval(2e-3).unwrap().re;
        assert!((peak - end).abs() < 1e-10 * end);
        // Gaussian roll-off, sigma_k = 1/sigma
        let sigma = 0.5e-3;
        let off = t.pmf_magnitude(1.0 / sigma);
        assert!(off < peak && off > 0.5 * peak);
    }
}
