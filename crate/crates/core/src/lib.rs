//! Extreme Perron roots over the set Ω(A) of matrices obtained from a
//! nonnegative matrix `A` by permuting the entries within each row.
//!
//! The mean row sum of `A` always lies between the smallest and the largest
//! Perron root over Ω(A). This crate computes both extremes, by alignment
//! search ([`optimize`]) and, for small `n`, by exhaustive enumeration
//! ([`oracle`]); certifies optimality of a candidate; and detects the cases
//! where the bounds are tight ([`analysis`]).
//!
//! Indices are 0-based in the API and 1-based in text output.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod optimize;
pub mod oracle;
pub mod permutation;
pub mod spectral;

pub use analysis::{
    bound_report, detect_equality_case, perturbation_sandwich, verify_equality_equivalence,
    AnalysisOptions, BoundReport, EqualityCase, EquivalenceVerdict, Method,
};
pub use error::{
    AnalysisError, ExperimentError, MatrixError, OptimizeError, OracleError, SpectralError,
};
pub use experiments::{
    random_matrix, run_convergence_experiment, EntryDistribution, ExperimentConfig, LoopStats,
};
pub use matrix::{Matrix, RowSignature, SortDirection};
pub use optimize::{
    align_to_vector, is_max_optimal, is_min_optimal, maximize_rho, minimize_rho, optimize,
    InitialOrder, Objective, OptimizeOptions, OptimizeResult, OptimizeTrace, TraceStep,
};
pub use oracle::{enumerate_omega, oracle_extremes, OracleOptions, OracleReport};
pub use permutation::Permutation;
pub use spectral::{
    cw_bounds, is_fully_indecomposable, is_irreducible, perron, rearrangement_extremes,
    strict_improvement_certificate, BoundSide, Certificate, CwBounds, PerronOptions, PerronPair,
};
