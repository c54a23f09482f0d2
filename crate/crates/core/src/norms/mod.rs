//! Norm oracles on the non-negative orthant, their JSON descriptors, the
//! submodularity property engines, and the ordered approximation of
//! symmetric norms.

pub mod approx;
pub mod descriptor;
pub mod fixtures;
pub mod oracle;
pub mod setfn;
pub mod submod;
pub mod vector;

pub use approx::{check_symmetric, ordered_approx, OrderedApprox};
pub use descriptor::{MatroidDescriptor, NormDescriptor, PValue, SetFunctionDescriptor};
pub use fixtures::{
    asymmetric_gap_fixture, block_max_fixture, greedy_block_witness, make_gap_fixtures,
    make_tightness_norm, tightness_witness,
};
pub use oracle::{Exponent, Norm, NormKind, Provenance, ValueFn};
pub use setfn::{
    ConcaveCardinality, CoverageFunction, GraphicMatroid, Matroid, MatroidRankFunction,
    PartitionMatroid, SetFunction, TableSetFunction, UniformMatroid,
};
pub use submod::{
    check_dr_submodular, check_submodular, exhaustive_grid_check, Characterization, MixedSampler,
    SubmodCheckReport, VectorSampler, Violation, Witness,
};
pub use vector::NonNegVec;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NormError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("base vector must vanish from the marginal index on (non-zero at {index})")]
    MarginalPrefix { index: usize },
    #[error("degenerate norm: basis vector e_{index} has zero norm")]
    Degenerate { index: usize },
    #[error("norm is not symmetric: {original} vs {permuted} under a permutation")]
    NotSymmetric { original: f64, permuted: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("norm kind {0} has no JSON descriptor")]
    NotSerializable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed norm descriptor: {0}")]
    Json(String),
}
