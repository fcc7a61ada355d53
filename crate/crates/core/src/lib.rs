//! Domain engineering of quasi-phase-matched crystals for spectrally pure
//! down-conversion photons.
//!
//! The crate covers the whole design loop: material dispersion and the
//! coherence length ([`dispersion`]), closed-form phase-matching functions
//! and field amplitudes of a poling pattern ([`grating`], [`target`]), the
//! poling designers ([`algorithms`]) and the joint-spectrum purity
//! evaluation ([`spectrum`]).

pub mod algorithms;
pub mod dispersion;
pub mod error;
pub mod grating;
pub mod io;
pub mod presets;
pub mod spectrum;
pub mod target;

pub use error::{Error, Result};
