//! Poling patterns and the closed-form phase-matching function and field
//! amplitude they generate.
//!
//! A grating is an ordered list of domains of width `w_n` and orientation
//! `s_n = ±1`. With boundaries `z_n = w_1 + ... + w_n`, the phase-matching
//! function is
//!
//! ```text
//! phi(dk) = sum_n s_n ∫_{z_{n-1}}^{z_n} exp(i dk z) dz
//!         = sum_n s_n w_n exp(i dk (z_{n-1} + z_n) / 2) sinc(dk w_n / 2)
//! ```
//!
//! which has units of length and is additive over domains. The field
//! amplitude is `A(z, dk) = -i ∫_0^z g(z') exp(i dk z') dz'`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Up,
    Down,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Up => 1.0,
            Orientation::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Up => Orientation::Down,
            Orientation::Down => Orientation::Up,
        }
    }

    pub fn from_sign(sign: i32) -> Option<Self> {
        match sign {
            1 => Some(Orientation::Up),
            -1 => Some(Orientation::Down),
            _ => None,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Up => "UP",
            Orientation::Down => "DOWN",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub width: f64,
    pub orientation: Orientation,
}

impl Domain {
    pub fn new(width: f64, orientation: Orientation) -> Self {
        Self { width, orientation }
    }
}

/// `sin(x) / x` with the removable singularity filled in.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Compensated (Neumaier) running sum of domain widths. Plain accumulation
/// lets boundaries of long gratings wander by thousands of ulps.
#[derive(Clone, Copy, Debug, Default)]
pub struct PositionSum {
    sum: f64,
    carry: f64,
}

impl PositionSum {
    /// Adds a width and returns the new position.
    pub fn add(&mut self, w: f64) -> f64 {
        let t = self.sum + w;
        if self.sum.abs() >= w.abs() {
            self.carry += (self.sum - t) + w;
        } else {
            self.carry += (w - t) + self.sum;
        }
        self.sum = t;
        self.value()
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `∫_a^b exp(i dk z) dz`, exact at `dk = 0`.
fn segment_integral(a: f64, b: f64, dk: f64) -> Complex64 {
    let w = b - a;
    Complex64::from_polar(w * sinc(0.5 * dk * w), 0.5 * dk * (a + b))
}

/// An ordered sequence of poled domains.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Grating {
    domains: Vec<Domain>,
}

impl Grating {
    pub fn new(domains: Vec<Domain>) -> Result<Self> {
        if let Some((n, d)) = domains
            .iter()
            .enumerate()
            .find(|(_, d)| !(d.width.is_finite() && d.width > 0.0))
        {
            return Err(Error::invalid(
                "width",
                format!("domain {n} has non-positive width {}", d.width),
            ));
        }
        Ok(Self { domains })
    }

    /// Domains of a common width with the given orientations.
    pub fn uniform(width: f64, orientations: &[Orientation]) -> Result<Self> {
        Self::new(
            orientations
                .iter()
                .map(|&o| Domain::new(width, o))
                .collect(),
        )
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    /// Total length, recomputed from the widths.
    pub fn length(&self) -> f64 {
        let mut pos = PositionSum::default();
        self.domains.iter().fold(0.0, |_, d| pos.add(d.width))
    }

    /// Cumulative boundary positions `z_0 = 0, ..., z_N = L`.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut pos = PositionSum::default();
        let mut out = Vec::with_capacity(self.domains.len() + 1);
        out.push(0.0);
        out.extend(self.domains.iter().map(|d| pos.add(d.width)));
        out
    }

    pub fn orientations(&self) -> Vec<Orientation> {
        self.domains.iter().map(|d| d.orientation).collect()
    }

    /// Adjacent same-orientation domains fused into single blocks. The
    /// nonlinearity profile, and so every PMF value, is unchanged.
    pub fn merged(&self) -> Grating {
        let z = self.boundaries();
        let mut out: Vec<Domain> = Vec::new();
        let mut start = 0;
        for (j, d) in self.domains.iter().enumerate() {
            if self.domains.get(j + 1).map(|n| n.orientation) != Some(d.orientation) {
                out.push(Domain::new(z[j + 1] - z[start], d.orientation));
                start = j + 1;
            }
        }
        Grating { domains: out }
    }

    /// Every orientation inverted.
    pub fn flipped(&self) -> Grating {
        Grating {
            domains: self
                .domains
                .iter()
                .map(|d| Domain::new(d.width, d.orientation.flipped()))
                .collect(),
        }
    }

    /// The grating followed by its mirror image, giving a palindromic
    /// structure of twice the length.
    pub fn symmetrize(&self) -> Grating {
        let mut domains = self.domains.clone();
        domains.extend(self.domains.iter().rev().copied());
        Grating { domains }
    }

    pub fn split_at(&self, n: usize) -> (Grating, Grating) {
        let (a, b) = self.domains.split_at(n);
        (
            Grating { domains: a.to_vec() },
            Grating { domains: b.to_vec() },
        )
    }

    pub fn concat(&self, other: &Grating) -> Grating {
        let mut domains = self.domains.clone();
        domains.extend_from_slice(&other.domains);
        Grating { domains }
    }

    /// Phase-matching function at `dk` (units of length).
    pub fn pmf(&self, dk: f64) -> Complex64 {
        let mut pos = PositionSum::default();
        let mut z = 0.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for d in &self.domains {
            let next = pos.add(d.width);
            acc += d.orientation.sign() * segment_integral(z, next, dk);
            z = next;
        }
        acc
    }

    pub fn pmf_many(&self, dks: &[f64]) -> Vec<Complex64> {
        dks.iter().map(|&dk| self.pmf(dk)).collect()
    }

    /// Field amplitude `A(z, dk)` for `0 <= z <= L`.
    pub fn field_amplitude(&self, z: f64, dk: f64) -> Result<Complex64> {
        let length = self.length();
        let slack = 1e-12 * length.max(f64::MIN_POSITIVE);
        if !(z >= 0.0 && z <= length + slack) {
            return Err(Error::OutOfRange { z, length });
        }
        let mut pos = PositionSum::default();
        let mut start = 0.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for d in &self.domains {
            if start >= z {
                break;
            }
            let next = pos.add(d.width);
            acc += d.orientation.sign() * segment_integral(start, next.min(z), dk);
            start = next;
        }
        Ok(-I * acc)
    }

    /// `A(z_n, dk)` at every boundary `z_0 .. z_N`, by a running sum.
    pub fn amplitude_trace(&self, dk: f64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.domains.len() + 1);
        let mut pos = PositionSum::default();
        let mut z = 0.0;
        let mut acc = Complex64::new(0.0, 0.0);
        out.push(acc);
        for d in &self.domains {
            let next = pos.add(d.width);
            acc += -I * d.orientation.sign() * segment_integral(z, next, dk);
            out.push(acc);
            z = next;
        }
        out
    }
}

/// Field amplitude at the end of each of `N` equal domains of width `w`,
/// evaluated at `dk = pi / lc`:
///
/// `A_m = (lc/pi) (exp(-i pi w/lc) - 1) sum_{n<=m} s_n exp(i pi n w / lc)`.
pub fn amplitude_at_domain_ends(orientations: &[Orientation], w: f64, lc: f64) -> Vec<Complex64> {
    let kappa = PI / lc;
    let prefactor = step_prefactor(w, lc);
    let mut running = Complex64::new(0.0, 0.0);
    orientations
        .iter()
        .enumerate()
        .map(|(idx, o)| {
            running += o.sign() * Complex64::from_polar(1.0, kappa * (idx + 1) as f64 * w);
            prefactor * running
        })
        .collect()
}

/// `(lc/pi) (exp(-i pi w/lc) - 1)`, the per-domain factor of the running sum.
pub(crate) fn step_prefactor(w: f64, lc: f64) -> Complex64 {
    (lc / PI) * (Complex64::from_polar(1.0, -PI * w / lc) - 1.0)
}

/// Sampled phase-matching function on a uniform, strictly increasing
/// `dk` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmfGrid {
    pub dk: Vec<f64>,
    pub values: Vec<Complex64>,
    pub source: String,
    pub dk0: f64,
}

impl PmfGrid {
    pub fn new(dk: Vec<f64>, values: Vec<Complex64>, source: impl Into<String>, dk0: f64) -> Result<Self> {
        if dk.len() < 2 {
            return Err(Error::invalid("dk", "a PMF grid needs at least two samples"));
        }
        if dk.len() != values.len() {
            return Err(Error::invalid("values", "length differs from the dk axis"));
        }
        if !dk.windows(2).all(|p| p[1] > p[0]) {
            return Err(Error::invalid("dk", "samples must be strictly increasing"));
        }
        Ok(Self {
            dk,
            values,
            source: source.into(),
            dk0,
        })
    }

    /// `count` uniform samples over `dk0 ± half_width`.
    pub fn axis(dk0: f64, half_width: f64, count: usize) -> Vec<f64> {
        let step = 2.0 * half_width / (count - 1) as f64;
        (0..count).map(|j| dk0 - half_width + step * j as f64).collect()
    }

    pub fn from_grating(grating: &Grating, dk: Vec<f64>, dk0: f64, source: impl Into<String>) -> Result<Self> {
        let merged = grating.merged();
        let values = merged.pmf_many(&dk);
        Self::new(dk, values, source, dk0)
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}
