//! Perron roots, Collatz-Wielandt certificates and pattern structure.

mod collatz;
mod perron;
mod rearrange;
mod structure;

pub use collatz::{cw_bounds, strict_improvement_certificate, BoundSide, Certificate, CwBounds};
pub use perron::{
    eigen_residual, perron, PerronFlags, PerronOptions, PerronPair, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use rearrange::rearrangement_extremes;
pub use structure::{
    is_fully_indecomposable, is_fully_indecomposable_by_minors, is_irreducible, max_matching,
    pattern_graph, strongly_connected_components,
};
