//! Discretization of continuous quantum baths into finite star/chain
//! Hamiltonians, real-time evolution of the resulting models, and
//! quantification of the discretization error.

pub mod bath;
pub mod bessel;
pub mod chain;
pub mod direct;
pub mod error;
pub mod evolve;
pub mod manybody;
pub mod master;
pub mod ortho;
pub mod precision;
pub mod quad;
pub mod series;
pub mod spectral;
pub mod tridiag;

pub use bath::{ChainCoefficients, DiscreteBath};
pub use chain::{lanczos_tridiagonalize, star_from_chain, LanczosOutcome};
pub use error::{BathError, Result};
pub use evolve::{
    chebyshev_remainder, diagonalize, error_series, error_series_real, filled_sea_overlap,
    greens_function, population, reference_filled_sea, reference_solution, tmax_empirical,
    tmax_predict, BathGeometry, SingleParticleModel, SpEigen, TmaxKind,
};
pub use manybody::{
    build_siam, greens_overlap, ground_state, ground_state_in, overlap_from_ground,
    DegeneracyReport, FockBasis, GroundState, ManyBodyState, OverlapRun, SparseHamiltonian,
};
pub use master::{
    correlation_functions, gamma_integral, integrate_me, integrate_me_from, BathCorrelation,
    CorrelationSource, CouplingOperator, DensityMatrix2, MasterEqRun, SourceKind,
};
pub use ortho::{
    bsdo_discretize, chain_from_weight, golub_welsch, legendre_discretize, stieltjes_recurrence,
    QuadratureRule, RecurrenceCoefficients, WeightSpec, WeightTag,
};
pub use precision::Precision;
pub use series::{RealSeries, TimeGrid, TimeSeries};
pub use spectral::{HybridizationSign, SpectralDensity};
