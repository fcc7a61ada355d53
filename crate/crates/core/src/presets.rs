//! The 2 mm KTP reference case.

use crate::dispersion::{DispersionModel, ProcessSpec};
use crate::error::Result;

/// Nominal crystal length of the reference case (m).
pub const REFERENCE_LENGTH: f64 = 2e-3;

/// Smallest even number of coherence lengths covering `length`.
pub fn domains_for_length(length: f64, lc: f64) -> usize {
    let n = (length / lc).ceil() as usize;
    n + n % 2
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceCase {
    pub model: DispersionModel,
    pub spec: ProcessSpec,
    pub coherence_length: f64,
    /// Domains of width `coherence_length`.
    pub domains: usize,
}

/// Type-II 791 nm -> 1582 nm + 1582 nm in KTP at 25 C, about 2 mm long.
pub fn ktp_reference() -> Result<ReferenceCase> {
    let model = DispersionModel::ktp();
    let spec = ProcessSpec::ktp_type2_791();
    let lc = model.coherence_length(&spec)?;
    Ok(ReferenceCase {
        domains: domains_for_length(REFERENCE_LENGTH, lc),
        model,
        spec,
        coherence_length: lc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_has_88_domains() {
        let r = ktp_reference().unwrap();
        assert_eq!(r.domains, 88);
        assert!(r.domains as f64 * r.coherence_length >= REFERENCE_LENGTH);
    }

    #[test]
    fn rounding_to_even() {
        assert_eq!(domains_for_length(10.0, 1.0), 10);
        assert_eq!(domains_for_length(10.5, 1.0), 12);
        assert_eq!(domains_for_length(9.0, 1.0), 10);
    }
}
