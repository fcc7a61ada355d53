//! Joint spectral amplitude and heralded-photon purity.
//!
//! `f(ws, wi) = phi(dk(ws, wi)) alpha(ws + wi)` is sampled on an `n x n`
//! grid centred on the degenerate point. The grid spans `window_factor`
//! times the PMF width along each axis, where the PMF width is the FWHM of
//! `|phi|^2` along the antidiagonal (pump frequency fixed), expressed in
//! signal angular frequency.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{design, Algorithm, DesignParams};
use crate::dispersion::{DispersionModel, Field, ProcessSpec};
use crate::error::{Error, Result};
use crate::grating::{Grating, PmfGrid};

/// Anything with a phase-matching function.
pub trait PhaseMatching: Sync {
    fn pmf(&self, dk: f64) -> Complex64;
    /// Length setting the PMF scale; the width scan covers `±12 pi / L`.
    fn length_scale(&self) -> f64;
}

impl PhaseMatching for Grating {
    fn pmf(&self, dk: f64) -> Complex64 {
        Grating::pmf(self, dk)
    }
    fn length_scale(&self) -> f64 {
        self.length()
    }
}

/// Linear interpolation of the tabulated values; zero outside the table.
impl PhaseMatching for PmfGrid {
    fn pmf(&self, dk: f64) -> Complex64 {
        let n = self.dk.len();
        if !(dk >= self.dk[0] && dk <= self.dk[n - 1]) {
            return Complex64::new(0.0, 0.0);
        }
        let j = self.dk.partition_point(|&x| x <= dk).clamp(1, n - 1);
        let (a, b) = (self.dk[j - 1], self.dk[j]);
        let t = (dk - a) / (b - a);
        self.values[j - 1] * (1.0 - t) + self.values[j] * t
    }
    fn length_scale(&self) -> f64 {
        let half = 0.5 * (self.dk[self.dk.len() - 1] - self.dk[0]);
        12.0 * PI / half
    }
}

/// `exp(-(dk - dk0)^2 / (2 s^2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPmf {
    pub dk0: f64,
    pub width: f64,
}

impl PhaseMatching for GaussianPmf {
    fn pmf(&self, dk: f64) -> Complex64 {
        let u = (dk - self.dk0) / self.width;
        Complex64::new((-0.5 * u * u).exp(), 0.0)
    }
    fn length_scale(&self) -> f64 {
        2.0 / self.width
    }
}

/// Gaussian pump envelope `alpha(W) = exp(-(W - w0p)^2 / (2 bandwidth^2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpEnvelope {
    pub center: f64,
    pub bandwidth: f64,
}

impl PumpEnvelope {
    pub fn new(center: f64, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::invalid("pump_bandwidth", format!("must be positive, got {bandwidth}")));
        }
        Ok(Self { center, bandwidth })
    }

    pub fn amplitude(&self, omega_pump: f64) -> f64 {
        let u = (omega_pump - self.center) / self.bandwidth;
        (-0.5 * u * u).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumConfig {
    /// Samples per axis.
    pub grid: usize,
    /// Axis span in units of the PMF width.
    pub window_factor: f64,
    /// Fixed pump bandwidth (rad/s); optimized when absent.
    pub pump_bandwidth: Option<f64>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            grid: 100,
            window_factor: 8.0,
            pump_bandwidth: None,
        }
    }
}

impl SpectrumConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 32 {
            return Err(Error::invalid("grid", format!("need at least 32 samples per axis, got {}", self.grid)));
        }
        if !(self.window_factor > 0.0 && self.window_factor.is_finite()) {
            return Err(Error::invalid("window_factor", "must be positive"));
        }
        if let Some(b) = self.pump_bandwidth {
            PumpEnvelope::new(0.0, b)?;
        }
        Ok(())
    }
}

/// FWHM of `|phi|^2` along the antidiagonal, in rad/s of signal frequency.
///
/// `|phi(dk0 + x)|^2` is scanned over `x in ±12 pi / L` (4097 samples); the
/// half-maximum crossings on either side of the peak are refined by
/// bisection and the `dk` width is mapped through
/// `d(dk)/d(ws) = k'_i - k'_s` along `ws + wi = const`.
pub fn pmf_width(pm: &dyn PhaseMatching, model: &DispersionModel, spec: &ProcessSpec) -> Result<f64> {
    let dk0 = model.delta_k0(spec)?;
    let slope = antidiagonal_slope(model, spec)?;
    let fwhm = pmf_fwhm_dk(pm, dk0)?;
    Ok(fwhm / slope.abs())
}

fn antidiagonal_slope(model: &DispersionModel, spec: &ProcessSpec) -> Result<f64> {
    let ks = model.inverse_group_velocity(spec.beam(Field::Signal), spec.omega_signal())?;
    let ki = model.inverse_group_velocity(spec.beam(Field::Idler), spec.omega_idler())?;
    let slope = ki - ks;
    if slope == 0.0 {
        return Err(Error::invalid(
            "process",
            "signal and idler group velocities are equal; the antidiagonal PMF width is unbounded",
        ));
    }
    Ok(slope)
}

/// FWHM of `|phi|^2` in `dk` units around `dk0`.
pub fn pmf_fwhm_dk(pm: &dyn PhaseMatching, dk0: f64) -> Result<f64> {
    const SAMPLES: usize = 4097;
    let span = 12.0 * PI / pm.length_scale();
    let xs: Vec<f64> = (0..SAMPLES)
        .map(|j| -span + 2.0 * span * j as f64 / (SAMPLES - 1) as f64)
        .collect();
    let power = |x: f64| pm.pmf(dk0 + x).norm_sqr();
    let p: Vec<f64> = xs.iter().map(|&x| power(x)).collect();
    let (peak_idx, peak) = p
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (j, &v)| if v > best.1 { (j, v) } else { best });
    if !(peak > 0.0) {
        return Err(Error::DegeneratePmf);
    }
    let half = 0.5 * peak;
    let crossing = |inside: usize, outside: usize| -> f64 {
        let (mut a, mut b) = (xs[inside], xs[outside]);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if power(m) >= half {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let right = (peak_idx + 1..SAMPLES).find(|&j| p[j] < half).ok_or(Error::DegeneratePmf)?;
    let left = (0..peak_idx).rev().find(|&j| p[j] < half).ok_or(Error::DegeneratePmf)?;
    Ok(crossing(right - 1, right) - crossing(left + 1, left))
}

/// Signal and idler sample axes (rad/s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub signal: Vec<f64>,
    pub idler: Vec<f64>,
    /// PMF width the window was derived from (rad/s).
    pub pmf_width: f64,
}

impl FrequencyGrid {
    pub fn centred(omega_s0: f64, omega_i0: f64, pmf_width: f64, cfg: &SpectrumConfig) -> Self {
        let span = cfg.window_factor * pmf_width;
        let axis = |c: f64| -> Vec<f64> {
            (0..cfg.grid)
                .map(|j| c + span * (j as f64 / (cfg.grid - 1) as f64 - 0.5))
                .collect()
        };
        Self {
            signal: axis(omega_s0),
            idler: axis(omega_i0),
            pmf_width,
        }
    }
}

/// PMF sampled on a frequency grid, reusable across pump bandwidths.
#[derive(Clone, Debug, PartialEq)]
pub struct PmfSamples {
    pub grid: FrequencyGrid,
    /// Row-major, signal index outer.
    pub values: Vec<Complex64>,
    pub pump_center: f64,
}

impl PmfSamples {
    pub fn sample(pm: &dyn PhaseMatching, model: &DispersionModel, spec: &ProcessSpec, cfg: &SpectrumConfig) -> Result<Self> {
        cfg.validate()?;
        let width = pmf_width(pm, model, spec)?;
        let grid = FrequencyGrid::centred(spec.omega_signal(), spec.omega_idler(), width, cfg);
        let rows: Vec<Vec<Complex64>> = grid
            .signal
            .par_iter()
            .map(|&ws| {
                grid.idler
                    .iter()
                    .map(|&wi| Ok(pm.pmf(model.delta_k(spec, ws, wi)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            grid,
            values: rows.concat(),
            pump_center: spec.omega_pump(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointSpectrum {
    pub signal: Vec<f64>,
    pub idler: Vec<f64>,
    /// Row-major `n_s x n_i`.
    pub values: Vec<Complex64>,
    pub normalized: bool,
}

impl JointSpectrum {
    /// Multiplies the sampled PMF by the pump envelope (`None` means
    /// `alpha = 1`) and normalizes.
    pub fn from_samples(samples: &PmfSamples, pump: Option<&PumpEnvelope>) -> Result<Self> {
        let g = &samples.grid;
        let n_i = g.idler.len();
        let values = samples
            .values
            .iter()
            .enumerate()
            .map(|(idx, v)| match pump {
                Some(p) => v * p.amplitude(g.signal[idx / n_i] + g.idler[idx % n_i]),
                None => *v,
            })
            .collect();
        let mut js = Self {
            signal: g.signal.clone(),
            idler: g.idler.clone(),
            values,
            normalized: false,
        };
        js.normalize()?;
        Ok(js)
    }

    pub fn from_matrix(signal: Vec<f64>, idler: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if signal.len() < 2 || idler.len() < 2 || values.len() != signal.len() * idler.len() {
            return Err(Error::invalid("jsa", "matrix shape does not match the axes"));
        }
        Ok(Self {
            signal,
            idler,
            values,
            normalized: false,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.signal.len(), self.idler.len())
    }

    fn cell(&self) -> f64 {
        (self.signal[1] - self.signal[0]).abs() * (self.idler[1] - self.idler[0]).abs()
    }

    /// Scales so that `sum |f|^2 dws dwi = 1`.
    pub fn normalize(&mut self) -> Result<()> {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::ZeroSpectrum);
        }
        let s = total.sqrt().recip();
        self.values.iter_mut().for_each(|v| *v *= s);
        self.normalized = true;
        Ok(())
    }

    /// Swaps the signal and idler roles.
    pub fn transposed(&self) -> Self {
        let (n_s, n_i) = self.shape();
        let values = (0..n_i * n_s)
            .map(|idx| self.values[(idx % n_s) * n_i + idx / n_s])
            .collect();
        Self {
            signal: self.idler.clone(),
            idler: self.signal.clone(),
            values,
            normalized: self.normalized,
        }
    }

    /// `f sqrt(dws dwi)` as a dense matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let (n_s, n_i) = self.shape();
        let w = self.cell().sqrt();
        DMatrix::from_fn(n_s, n_i, |r, c| self.values[r * n_i + c] * w)
    }
}

/// Builds and normalizes the JSA of `pm` pumped by `pump`.
pub fn build_jsa(
    pm: &dyn PhaseMatching,
    model: &DispersionModel,
    spec: &ProcessSpec,
    pump: Option<&PumpEnvelope>,
    cfg: &SpectrumConfig,
) -> Result<JointSpectrum> {
    JointSpectrum::from_samples(&PmfSamples::sample(pm, model, spec, cfg)?, pump)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtResult {
    /// Descending, `sum b_k^2 = 1`.
    pub coefficients: Vec<f64>,
    pub purity: f64,
    pub schmidt_number: f64,
}

/// Schmidt decomposition by singular values of `f sqrt(dws dwi)`.
pub fn schmidt(js: &JointSpectrum) -> Result<SchmidtResult> {
    schmidt_matrix(js.matrix())
}

pub fn schmidt_matrix(m: DMatrix<Complex64>) -> Result<SchmidtResult> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sv.iter().map(|s| s * s).sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::ZeroSpectrum);
    }
    let norm = total.sqrt();
    let coefficients: Vec<f64> = sv.iter().map(|s| s / norm).collect();
    let purity: f64 = coefficients.iter().map(|b| b.powi(4)).sum();
    Ok(SchmidtResult {
        coefficients,
        purity,
        schmidt_number: 1.0 / purity,
    })
}

/// `||G||_F^2 / (tr G)^2` with `G = M M^dagger`, the trace of the squared
/// normalized reduced density matrix.
pub fn gram_purity(m: &DMatrix<Complex64>) -> Result<f64> {
    let g = m * m.adjoint();
    let trace = g.trace().re;
    if !(trace > 0.0) {
        return Err(Error::ZeroSpectrum);
    }
    Ok(g.iter().map(|v| v.norm_sqr()).sum::<f64>() / (trace * trace))
}

/// Purity of the sampled PMF under a Gaussian pump of the given bandwidth.
pub fn purity_at(samples: &PmfSamples, bandwidth: f64) -> Result<f64> {
    let pump = PumpEnvelope::new(samples.pump_center, bandwidth)?;
    Ok(schmidt(&JointSpectrum::from_samples(&samples, Some(&pump))?)?.purity)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpOptimum {
    pub bandwidth: f64,
    pub purity: f64,
    pub evaluations: u32,
}

/// Maximizes purity over the pump bandwidth.
///
/// Thirteen log-spaced probes over `[0.1, 10] x guess` locate the best
/// sample; if it sits on an end the bracket is widened once to
/// `[0.01, 100] x guess`. Golden-section search in `ln(bandwidth)` between
/// the best probe's neighbours then runs to a relative width of `1e-3`.
pub fn optimize_pump_bandwidth(samples: &PmfSamples, guess: f64) -> Result<PumpOptimum> {
    const PROBES: usize = 13;
    const GOLD: f64 = 0.618_033_988_749_894_9;
    if !(guess > 0.0 && guess.is_finite()) {
        return Err(Error::invalid("pump_bandwidth", "initial guess must be positive"));
    }
    let mut evaluations = 0u32;
    let mut eval = |ln_b: f64| -> Result<f64> {
        evaluations += 1;
        purity_at(samples, ln_b.exp())
    };

    let mut bracket = None;
    for (lo, hi) in [(0.1, 10.0), (0.01, 100.0)] {
        let a = (guess * lo).ln();
        let b = (guess * hi).ln();
        let xs: Vec<f64> = (0..PROBES)
            .map(|j| a + (b - a) * j as f64 / (PROBES - 1) as f64)
            .collect();
        let ps = xs.iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
        let best = ps
            .iter()
            .enumerate()
            .fold(0, |k, (j, p)| if *p > ps[k] { j } else { k });
        if best > 0 && best < PROBES - 1 {
            bracket = Some((xs[best - 1], xs[best + 1]));
            break;
        }
    }
    let (mut a, mut b) = bracket.ok_or(Error::BracketFailure {
        lo: guess * 0.01,
        hi: guess * 100.0,
    })?;

    let mut c = b - GOLD * (b - a);
    let mut d = a + GOLD * (b - a);
    let mut pc = eval(c)?;
    let mut pd = eval(d)?;
    // ln-width 1e-3 is a relative bandwidth tolerance of 1e-3
    while b - a > 1e-3 {
        if pc >= pd {
            b = d;
            d = c;
            pd = pc;
            c = b - GOLD * (b - a);
            pc = eval(c)?;
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + GOLD * (b - a);
            pd = eval(d)?;
        }
    }
    let (x, p) = if pc >= pd { (c, pc) } else { (d, pd) };
    Ok(PumpOptimum {
        bandwidth: x.exp(),
        purity: p,
        evaluations,
    })
}

/// Purity figures for one grating.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    pub purity: f64,
    pub bandwidth: f64,
    pub pmf_width: f64,
    pub schmidt: SchmidtResult,
    pub jsa: JointSpectrum,
}

/// Samples the PMF, picks the pump (fixed or optimized) and decomposes.
pub fn evaluate_purity(
    pm: &dyn PhaseMatching,
    model: &DispersionModel,
    spec: &ProcessSpec,
    cfg: &SpectrumConfig,
) -> Result<PurityReport> {
    let samples = PmfSamples::sample(pm, model, spec, cfg)?;
    let bandwidth = match cfg.pump_bandwidth {
        Some(b) => b,
        None => optimize_pump_bandwidth(&samples, samples.grid.pmf_width)?.bandwidth,
    };
    let pump = PumpEnvelope::new(samples.pump_center, bandwidth)?;
    let jsa = JointSpectrum::from_samples(&samples, Some(&pump))?;
    let schmidt = schmidt(&jsa)?;
    Ok(PurityReport {
        purity: schmidt.purity,
        bandwidth,
        pmf_width: samples.grid.pmf_width,
        schmidt,
        jsa,
    })
}

/// One row of a purity-versus-length table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Crystal length in coherence lengths.
    pub length_lc: usize,
    pub length_m: f64,
    pub domains: usize,
    pub purity: Option<f64>,
    pub bandwidth: Option<f64>,
    pub energy: Option<f64>,
    /// `ok` or the error message.
    pub status: String,
}

/// Designs and evaluates each length; a failing length yields a row with
/// its error in `status` instead of aborting the sweep. Rows follow the
/// order of `lengths`.
pub fn purity_vs_length(
    algorithm: Algorithm,
    lengths: &[usize],
    params: &DesignParams,
    model: &DispersionModel,
    spec: &ProcessSpec,
    cfg: &SpectrumConfig,
) -> Result<Vec<SweepRow>> {
    if let Some(short) = lengths.iter().find(|&&n| n < 20) {
        return Err(Error::invalid("lengths", format!("sweep lengths must be at least 20 lc, got {short}")));
    }
    cfg.validate()?;
    params.validate()?;
    Ok(lengths
        .par_iter()
        .map(|&n| {
            let run = || -> Result<(Grating, f64, f64, Option<f64>)> {
                let report = design(algorithm, n, params)?;
                let eval = evaluate_purity(&report.grating.merged(), model, spec, cfg)?;
                Ok((report.grating, eval.purity, eval.bandwidth, report.energy))
            };
            match run() {
                Ok((g, purity, bandwidth, energy)) => SweepRow {
                    length_lc: n,
                    length_m: g.length(),
                    domains: g.len(),
                    purity: Some(purity),
                    bandwidth: Some(bandwidth),
                    energy,
                    status: "ok".into(),
                },
                Err(e) => SweepRow {
                    length_lc: n,
                    length_m: n as f64 * params.lc,
                    domains: 0,
                    purity: None,
                    bandwidth: None,
                    energy: None,
                    status: e.to_string(),
                },
            }
        })
        .collect())
}
