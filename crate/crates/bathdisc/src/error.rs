use thiserror::Error;

/// Errors produced by discretization, quadrature, and evolution routines.
#[derive(Debug, Error)]
pub enum BathError {
    #[error("invalid spectral density: {0}")]
    InvalidDensity(String),

    #[error("quadrature failed to converge: requested {requested:e}, achieved {achieved:e} after {panels} panels")]
    QuadratureTolerance {
        requested: f64,
        achieved: f64,
        panels: usize,
    },

    #[error("on-support singular evaluation; use broadened_density")]
    OnSupportSingularity,

    #[error("discretization produced no modes with positive weight")]
    EmptyBath,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("mean method exhausted subdivisions: requested {requested} energies, achievable {achievable}")]
    MeanMethodExhausted { requested: usize, achievable: usize },

    #[error("recurrence unstable at order {order} (beta = {beta:e}); increase precision")]
    RecurrenceInstability { order: usize, beta: f64 },

    #[error("eigensolver failed to converge at index {0}")]
    EigenNonConvergence(usize),

    #[error("time grids do not match: {0}")]
    GridMismatch(String),

    #[error("pole encountered: |denominator| = {0:e}")]
    PoleEncountered(f64),

    #[error("reference not converged: max |P_N - P_{{N/2}}| = {defect:e} exceeds {tolerance:e}; increase N_ref")]
    ReferenceNotConverged { defect: f64, tolerance: f64 },

    #[error("sector dimension {dim} exceeds budget {budget}")]
    SectorTooLarge { dim: usize, budget: usize },

    #[error("initial excitation vanishes: d\u{2020}|E0> = 0")]
    EmptyExcitation,

    #[error("Bose occupation diverges: gapless density with nonpositive low-energy exponent at finite temperature")]
    GaplessThermalDivergence,

    #[error("step-size check failed: halving defect {defect:e} exceeds {tolerance:e}")]
    StepSizeCheck { defect: f64, tolerance: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, BathError>;
