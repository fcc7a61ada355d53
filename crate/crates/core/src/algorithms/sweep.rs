//! One-call design at a length given in coherence lengths, and length sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    anneal_widths, design_domain_by_domain, design_periodic, design_sub_coherence, design_tambasco_blocks,
    target_pmf_grid, Algorithm, AnnealConfig, DesignReport,
};
use crate::error::{Error, Result};
use crate::target::TargetAmplitude;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignParams {
    /// Coherence length (m).
    pub lc: f64,
    /// Gaussian target width as a fraction of the crystal length.
    pub sigma_ratio: f64,
    /// Sub-coherence domains per coherence length, `lc / w`.
    pub subdivisions: u32,
    pub anneal: AnnealConfig,
    /// Domains narrower than this trigger a warning (m).
    pub min_domain_width: f64,
}

impl DesignParams {
    pub fn new(lc: f64) -> Self {
        Self {
            lc,
            sigma_ratio: 0.25,
            subdivisions: 10,
            anneal: AnnealConfig::default(),
            min_domain_width: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lc > 0.0 && self.lc.is_finite()) {
            return Err(Error::invalid("coherence_length", "must be positive"));
        }
        if !(self.sigma_ratio > 0.0 && self.sigma_ratio.is_finite()) {
            return Err(Error::invalid("sigma_ratio", format!("must be positive, got {}", self.sigma_ratio)));
        }
        if self.subdivisions == 0 {
            return Err(Error::invalid("subdivisions", "must be at least 1"));
        }
        if !(self.min_domain_width >= 0.0) {
            return Err(Error::invalid("min_domain_width", "must be non-negative"));
        }
        self.anneal.validate()
    }

    /// Gaussian-erf target for a crystal of `n` coherence lengths.
    pub fn target(&self, n: usize) -> Result<TargetAmplitude> {
        TargetAmplitude::gaussian(n as f64 * self.lc, self.sigma_ratio)
    }
}

/// Designs a crystal of length `n * lc` with `algorithm`.
///
/// The block method uses `n / 2` two-domain blocks and needs even `n`; the
/// annealer is seeded with the domain-by-domain design of the same length.
pub fn design(algorithm: Algorithm, n: usize, params: &DesignParams) -> Result<DesignReport> {
    params.validate()?;
    let lc = params.lc;
    let report = match algorithm {
        Algorithm::Periodic => DesignReport::deterministic(design_periodic(n, lc)?, algorithm, lc, lc),
        Algorithm::TambascoBlocks => {
            if n == 0 || n % 2 != 0 {
                return Err(Error::invalid("domains", format!("block method needs an even domain count, got {n}")));
            }
            design_tambasco_blocks(&params.target(n)?, n / 2, lc)?
        }
        Algorithm::DomainByDomain => design_domain_by_domain(&params.target(n)?, n, lc)?,
        Algorithm::SubCoherence => {
            let k = params.subdivisions as usize;
            let w = lc / k as f64;
            if w < params.min_domain_width {
                log::warn!(
                    "domain width {:.3e} m is below the practical minimum {:.3e} m",
                    w,
                    params.min_domain_width
                );
            }
            design_sub_coherence(&params.target(n)?, w, n * k, lc)?
        }
        Algorithm::Annealed => {
            let target = params.target(n)?;
            let seed = design_domain_by_domain(&target, n, lc)?;
            let grid = target_pmf_grid(&target, lc, &params.anneal)?;
            anneal_widths(&seed.grating, &grid, &params.anneal)?.report
        }
    };
    if algorithm == Algorithm::Annealed {
        let thinnest = report.grating.domains().iter().map(|d| d.width).fold(f64::INFINITY, f64::min);
        if thinnest < params.min_domain_width {
            log::warn!("annealed grating has a {thinnest:.3e} m domain");
        }
    }
    Ok(report)
}

/// Runs [`design`] for every length (in coherence lengths), in parallel.
/// Output order follows `lengths`.
pub fn design_for_length_sweep(algorithm: Algorithm, lengths: &[usize], params: &DesignParams) -> Result<Vec<DesignReport>> {
    if let Some(short) = lengths.iter().find(|&&n| n < 20) {
        return Err(Error::invalid("lengths", format!("sweep lengths must be at least 20 lc, got {short}")));
    }
    lengths.par_iter().map(|&n| design(algorithm, n, params)).collect()
}
