//! Simulated annealing of domain widths.
//!
//! Adjacent same-orientation domains of the seed are fused into blocks and
//! only block widths move; orientations are never flipped. The energy is
//! the root-sum-square difference between target and achieved PMF
//! magnitudes on a fixed `dk` grid, divided by the target peak so that
//! temperatures are dimensionless.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Algorithm, DesignReport};
use crate::error::{Error, Result};
use crate::grating::{Domain, Grating, PmfGrid, PositionSum};
use crate::target::TargetAmplitude;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acceptance {
    /// Worse configurations pass with probability `exp(-E / T)`.
    Absolute,
    /// Metropolis rule, `exp(-(E - E_current) / T)`.
    Metropolis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cooling {
    /// `T -= dT` only when a configuration is rejected.
    OnRejection,
    /// `T -= dT` after every iteration.
    EveryIteration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    pub temperature: f64,
    pub temperature_step: f64,
    pub energy_threshold: f64,
    /// Maximum relative width change per iteration.
    pub perturbation: f64,
    pub grid_points: usize,
    /// Half-span of the energy grid in units of `pi / L`.
    pub grid_half_width: f64,
    pub seed: u64,
    pub max_iterations: u64,
    pub restarts: u32,
    pub acceptance: Acceptance,
    pub cooling: Cooling,
    pub record_trace: bool,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            temperature: 0.1,
            temperature_step: 0.1 / 100_000.0,
            energy_threshold: 1e-6,
            perturbation: 0.01,
            grid_points: 257,
            grid_half_width: 8.0,
            seed: 0,
            max_iterations: 2_000_000,
            restarts: 5,
            acceptance: Acceptance::Absolute,
            cooling: Cooling::OnRejection,
            record_trace: false,
        }
    }
}

impl AnnealConfig {
    /// Initial temperature `t` with the step `t / 100000`.
    pub fn with_temperature(t: f64) -> Self {
        Self {
            temperature: t,
            temperature_step: t / 100_000.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::invalid("temperature", "must be positive"));
        }
        if !(self.temperature_step > 0.0 && self.temperature_step < self.temperature) {
            return Err(Error::invalid("temperature_step", "must satisfy 0 < dT < T"));
        }
        if !(self.perturbation > 0.0 && self.perturbation <= 0.05) {
            return Err(Error::invalid("perturbation", "must lie in (0, 0.05]"));
        }
        if self.grid_points < 16 {
            return Err(Error::invalid("grid_points", "need at least 16 samples"));
        }
        if !(self.grid_half_width > 0.0) {
            return Err(Error::invalid("grid_half_width", "must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts", "need at least one run"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub temperature: f64,
    pub energy: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealOutcome {
    pub report: DesignReport,
    pub trace: Vec<TraceRow>,
    /// Final energy of each restart, in seed order.
    pub restart_energies: Vec<f64>,
}

/// Target magnitude `|phi_target|` on the annealing grid
/// `pi/lc ± grid_half_width * pi / L`.
pub fn target_pmf_grid(target: &TargetAmplitude, lc: f64, cfg: &AnnealConfig) -> Result<PmfGrid> {
    cfg.validate()?;
    let dk0 = PI / lc;
    let half = cfg.grid_half_width * PI / target.length();
    let dk = PmfGrid::axis(dk0, half, cfg.grid_points);
    let values = dk
        .iter()
        .map(|&k| Complex64::new(target.pmf_magnitude(k - dk0), 0.0))
        .collect();
    PmfGrid::new(dk, values, format!("target:{}", target.family()), dk0)
}

/// PMF evaluator for a block structure on a fixed grid, using the boundary
/// form `phi(k) = (1/ik) sum_j c_j exp(i k z_j)` with `c_j = s_j - s_{j+1}`.
struct BlockPmf<'a> {
    dk: &'a [f64],
    signs: Vec<f64>,
    coeffs: Vec<f64>,
    boundaries: Vec<f64>,
}

impl<'a> BlockPmf<'a> {
    fn new(dk: &'a [f64], blocks: &Grating) -> Self {
        let signs: Vec<f64> = blocks.domains().iter().map(|d| d.orientation.sign()).collect();
        let n = signs.len();
        let coeffs = (0..=n)
            .map(|j| {
                let left = if j == 0 { 0.0 } else { signs[j - 1] };
                let right = if j == n { 0.0 } else { signs[j] };
                left - right
            })
            .collect();
        Self {
            dk,
            signs,
            coeffs,
            boundaries: vec![0.0; n + 1],
        }
    }

    fn magnitudes(&mut self, widths: &[f64], out: &mut [f64]) {
        let mut pos = PositionSum::default();
        let mut z = 0.0;
        self.boundaries[0] = 0.0;
        for (j, &w) in widths.iter().enumerate() {
            z = pos.add(w);
            self.boundaries[j + 1] = z;
        }
        let length = z;
        for (slot, &k) in out.iter_mut().zip(self.dk) {
            if (k * length).abs() < 1e-3 {
                // near dk = 0 the boundary form cancels badly; sum exact segments
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, s) in self.signs.iter().enumerate() {
                    let (a, b) = (self.boundaries[j], self.boundaries[j + 1]);
                    let w = b - a;
                    acc += s * Complex64::from_polar(w * crate::grating::sinc(0.5 * k * w), 0.5 * k * (a + b));
                }
                *slot = acc.norm();
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, &zj) in self.coeffs.iter().zip(&self.boundaries) {
                if *c != 0.0 {
                    let (s, co) = (k * zj).sin_cos();
                    acc += Complex64::new(c * co, c * s);
                }
            }
            *slot = acc.norm() / k.abs();
        }
    }
}

fn energy(target: &[f64], achieved: &[f64], norm: f64) -> f64 {
    target
        .iter()
        .zip(achieved)
        .map(|(t, a)| (t - a) * (t - a))
        .sum::<f64>()
        .sqrt()
        / norm
}

/// One annealing run with RNG seed `rng_seed`.
pub fn anneal_single(seed: &Grating, target: &PmfGrid, cfg: &AnnealConfig, rng_seed: u64) -> Result<AnnealOutcome> {
    cfg.validate()?;
    if seed.is_empty() {
        return Err(Error::invalid("seed", "cannot anneal an empty grating"));
    }
    let started = Instant::now();
    let target_mag = target.magnitudes();
    let norm = target_mag.iter().cloned().fold(0.0, f64::max);
    if !(norm > 0.0) {
        return Err(Error::invalid("target_pmf", "target magnitude is identically zero"));
    }

    let blocks = seed.merged();
    let original: Vec<f64> = blocks.domains().iter().map(|d| d.width).collect();
    let mut evaluator = BlockPmf::new(&target.dk, &blocks);
    let mut scratch = vec![0.0; target.dk.len()];
    let mut eval = |widths: &[f64], scratch: &mut Vec<f64>| -> f64 {
        evaluator.magnitudes(widths, scratch);
        energy(&target_mag, scratch, norm)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut temperature = cfg.temperature;
    let mut best = original.clone();
    let mut current = original.clone();
    let seed_energy = eval(&original, &mut scratch);
    let mut e_min = seed_energy;
    let mut e_current = seed_energy;
    let mut iterations = 0u64;
    let mut trace = Vec::new();
    if cfg.record_trace {
        trace.push(TraceRow {
            iteration: 0,
            temperature,
            energy: seed_energy,
            accepted: true,
        });
    }

    let mut trial = vec![0.0; original.len()];
    while e_min >= cfg.energy_threshold && temperature > 0.0 && iterations < cfg.max_iterations {
        iterations += 1;
        for (t, &w) in trial.iter_mut().zip(&current) {
            *t = loop {
                let candidate = w * (1.0 + rng.gen_range(-cfg.perturbation..=cfg.perturbation));
                if candidate > 0.0 {
                    break candidate;
                }
            };
        }
        let e = eval(&trial, &mut scratch);
        let accepted = if e < e_min {
            e_min = e;
            best.copy_from_slice(&trial);
            true
        } else {
            let p = match cfg.acceptance {
                Acceptance::Absolute => (-e / temperature).exp(),
                Acceptance::Metropolis => (-(e - e_current) / temperature).exp(),
            };
            rng.gen::<f64>() < p
        };
        if accepted {
            current.copy_from_slice(&trial);
            e_current = e;
            if cfg.cooling == Cooling::EveryIteration {
                temperature -= cfg.temperature_step;
            }
        } else {
            current.copy_from_slice(&best);
            e_current = e_min;
            temperature -= cfg.temperature_step;
        }
        if cfg.record_trace {
            trace.push(TraceRow {
                iteration: iterations,
                temperature,
                energy: e,
                accepted,
            });
        }
    }

    // Spread each block's new width over its original domains so that the
    // domain count and orientation sequence match the seed.
    let mut domains = Vec::with_capacity(seed.len());
    let mut block = 0usize;
    let mut used = 0.0;
    for d in seed.domains() {
        if used >= original[block] * (1.0 - 1e-12) {
            block += 1;
            used = 0.0;
        }
        used += d.width;
        domains.push(Domain::new(d.width * (best[block] / original[block]), d.orientation));
    }

    let lc = PI / target.dk0.abs();
    let nominal = seed.domains()[0].width;
    let mut report = DesignReport::deterministic(Grating::new(domains)?, Algorithm::Annealed, lc, nominal);
    report.iterations = iterations;
    report.energy = Some(e_min);
    report.seed_energy = Some(seed_energy);
    report.wall_time = started.elapsed().as_secs_f64();
    Ok(AnnealOutcome {
        report,
        trace,
        restart_energies: vec![e_min],
    })
}

/// Anneals `cfg.restarts` independent runs with RNG seeds `cfg.seed + k`
/// and returns the lowest-energy one.
pub fn anneal_widths(seed: &Grating, target: &PmfGrid, cfg: &AnnealConfig) -> Result<AnnealOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let runs: Vec<AnnealOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| anneal_single(seed, target, cfg, cfg.seed.wrapping_add(k as u64)))
        .collect::<Result<_>>()?;
    let energies: Vec<f64> = runs.iter().map(|r| r.report.energy.unwrap()).collect();
    let best = energies
        .iter()
        .enumerate()
        .fold(0usize, |b, (k, e)| if *e < energies[b] { k } else { b });
    let mut outcome = runs.into_iter().nth(best).unwrap();
    outcome.restart_energies = energies;
    outcome.report.wall_time = started.elapsed().as_secs_f64();
    Ok(outcome)
}
