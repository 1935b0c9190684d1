//! Command-line front end for the backscatter simulator: scenario presets
//! for concrete atomic and molecular media, parameter sweeps over a
//! parallel worker pool, and CSV/JSON emission of every computable curve.
//!
//! The binary is a thin wrapper; everything testable lives here.

pub mod figures;
pub mod output;
pub mod presets;
pub mod scenario;
pub mod sweep;
