use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelength {wavelength_nm:.3} nm outside validity window [{min_nm}, {max_nm}] nm")]
    OutOfWindow {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("dispersion table has no entry for axis {0}")]
    MissingAxis(String),

    #[error("process is phase-matched or inverted; poling undefined (delta k = {0} rad/m)")]
    PhaseMatched(f64),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("position z = {z} m outside [0, {length}] m")]
    OutOfRange { z: f64, length: f64 },

    #[error("phase-matching function has no resolvable half-maximum in the scan window")]
    DegeneratePmf,

    #[error("purity is monotone over the pump-bandwidth bracket [{lo:.4e}, {hi:.4e}] rad/s")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("joint spectrum is identically zero")]
    ZeroSpectrum,

    #[error("malformed poling file, line {line}: {reason}")]
    PolingFormat { line: usize, reason: String },

    #[error("malformed dispersion data: {0}")]
    DispersionData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
