//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    /// A scalar input violates its domain (sign, range, finiteness).
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// Two redundant inputs disagree (e.g. level energies vs transition
    /// frequencies).
    #[error("inconsistent inputs: {identity} violated: {message}")]
    Inconsistency { identity: &'static str, message: String },

    /// A required configuration key is absent.
    #[error("missing field {name}: {message}")]
    MissingField { name: &'static str, message: String },

    /// An analytic expression hit a vanishing denominator.
    #[error("singularity in {context}: denominator {value:e} below tolerance")]
    Singularity { context: &'static str, value: f64 },

    /// The vectorized steady-state system is rank-deficient.
    #[error("degenerate steady state: null space dimension {null_dim} (add dephasing to lift the degeneracy)")]
    DegenerateSteadyState { null_dim: usize },

    /// Fixed-step integration diverged.
    #[error("integrator unstable at t = {t:e} s (norm {norm:e}); reduce dt below {dt_suggest:e} s")]
    IntegratorUnstable { t: f64, norm: f64, dt_suggest: f64 },

    /// Dispersion slope undefined or vanishing where a group velocity was
    /// requested.
    #[error("dispersion singularity at nu = {nu:e} rad/s: {message}")]
    DispersionSingularity { nu: f64, message: String },

    /// Propagation produced a non-finite medium response.
    #[error("integration failure at z = {z:e} m: non-finite medium response")]
    IntegrationFailure { z: f64 },

    /// Quadrature grid too coarse for the oscillation it must resolve.
    #[error("refinement needed: |kappa|*dz = {kappa_dz:.3} exceeds 0.5; use at least {nz_needed} nodes")]
    RefinementNeeded { kappa_dz: f64, nz_needed: usize },

    /// Planner found no phase-matching root inside the EIT window.
    #[error("infeasible plan: {reason}")]
    Infeasible { reason: String },

    /// Unknown enum tag in a config file or CLI argument.
    #[error("unknown {kind} '{got}'; valid: {valid}")]
    UnknownName { kind: &'static str, got: String, valid: String },
}

pub type Result<T> = std::result::Result<T, ModelError>;
