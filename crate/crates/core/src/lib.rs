//! Four-level Maxwell-Bloch model of coherent backscattering assisted by
//! electromagnetically induced transparency.
//!
//! The library is layered: [`medium`] defines the level scheme, driven
//! fields, and bulk parameters; [`bloch`] solves the density-matrix
//! equations; [`dispersion`] turns coherences into susceptibility, wave
//! vectors, and group velocity; [`phasematch`] scores and plans the
//! backward-wave geometry; [`propagation`] marches the coupled field
//! envelopes through the medium; [`config`] parses run descriptions.

pub mod bloch;
pub mod config;
pub mod constants;
pub mod dispersion;
pub mod error;
pub mod medium;
pub mod phasematch;
pub mod propagation;
pub mod units;

pub use error::{ModelError, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
