//! Poling designers.
//!
//! All designers that track a target work at `dk = pi / lc`, where a domain
//! of width `lc` moves the real part of the field amplitude by `±2 lc / pi`
//! and leaves the imaginary part at zero on every boundary.

mod annealing;
mod greedy;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grating::{Grating, Orientation};

pub use annealing::{
    anneal_single, anneal_widths, target_pmf_grid, Acceptance, AnnealConfig, AnnealOutcome, Cooling,
    TraceRow,
};
pub use greedy::{design_domain_by_domain, design_sub_coherence, design_tambasco_blocks};
pub use sweep::{design, design_for_length_sweep, DesignParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Periodic,
    TambascoBlocks,
    DomainByDomain,
    Annealed,
    SubCoherence,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Periodic,
        Algorithm::TambascoBlocks,
        Algorithm::DomainByDomain,
        Algorithm::Annealed,
        Algorithm::SubCoherence,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Periodic => "periodic",
            Algorithm::TambascoBlocks => "tambasco-blocks",
            Algorithm::DomainByDomain => "domain-by-domain",
            Algorithm::Annealed => "annealed",
            Algorithm::SubCoherence => "sub-coherence",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::invalid("algorithm", format!("unknown algorithm `{s}`")))
    }
}

/// Outcome of a design run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub grating: Grating,
    pub algorithm: Algorithm,
    pub coherence_length: f64,
    /// Nominal domain width before any annealing.
    pub domain_width: f64,
    pub iterations: u64,
    /// Final annealing energy; `None` for deterministic designers.
    pub energy: Option<f64>,
    /// Energy of the seed configuration on the same grid.
    pub seed_energy: Option<f64>,
    /// Tracking residual after each greedy decision.
    pub residuals: Vec<f64>,
    /// Indices of decisions settled by the tie rule.
    pub ties: Vec<usize>,
    /// Seconds; excluded from serialized artifacts so they stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

impl DesignReport {
    pub(crate) fn deterministic(grating: Grating, algorithm: Algorithm, lc: f64, w: f64) -> Self {
        Self {
            grating,
            algorithm,
            coherence_length: lc,
            domain_width: w,
            iterations: 0,
            energy: None,
            seed_energy: None,
            residuals: Vec::new(),
            ties: Vec::new(),
            wall_time: 0.0,
        }
    }
}

/// `n` domains of width `lc`, alternating and starting UP.
pub fn design_periodic(n: usize, lc: f64) -> Result<Grating> {
    if n == 0 {
        return Err(Error::invalid("domains", "periodic grating needs at least one domain"));
    }
    if !(lc > 0.0 && lc.is_finite()) {
        return Err(Error::invalid("coherence_length", "must be positive"));
    }
    let orientations: Vec<_> = (0..n)
        .map(|k| if k % 2 == 0 { Orientation::Up } else { Orientation::Down })
        .collect();
    Grating::uniform(lc, &orientations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn periodic_two_domains() {
        let g = design_periodic(2, 20e-6).unwrap();
        assert_eq!(g.orientations(), vec![Orientation::Up, Orientation::Down]);
    }

    #[test]
    fn periodic_peak_and_sinc_null() {
        let lc = 23e-6;
        let n = 100;
        let g = design_periodic(n, lc).unwrap();
        let dk0 = PI / lc;
        let peak = g.pmf(dk0).norm();
        assert!((peak - 2.0 * n as f64 * lc / PI).abs() < 1e-10 * peak);
        let l = g.length();
        for side in [-1.0, 1.0] {
            let off = g.pmf(dk0 + side * 2.0 * PI / l).norm();
            assert!(off / peak < 0.05, "{}", off / peak);
        }
    }

    #[test]
    fn algorithm_ids_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!("dixon".parse::<Algorithm>().is_err());
    }
}
