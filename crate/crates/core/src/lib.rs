//! Submodular norms and their applications.
//!
//! * [`norms`]: norm oracles, submodularity property engines, `ρ`, and the
//!   ordered approximation of symmetric norms.
//! * [`ofl`]: online facility location with norm connection costs.
//! * [`probing`]: exact adaptive and non-adaptive optima for stochastic probing.
//! * [`loadbal`]: greedy generalized load balancing with an `ℓ1` outer norm.
//! * [`harness`]: instance generators, file formats and experiment drivers.
//!
//! Everything numerical is generic over [`Scalar`] (`f32`, `f64`); the
//! aliases below fix the scalar to `f64`.

// `!(x >= 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod loadbal;
pub mod norms;
pub mod ofl;
pub mod probing;
pub mod scalar;

pub use scalar::{kahan_sum, CompensatedSum, Scalar, Tolerance};

pub type NormF64 = norms::Norm<f64>;
pub type NormF32 = norms::Norm<f32>;
pub type OrderedApproxF64 = norms::OrderedApprox<f64>;
pub type MetricSpaceF64 = ofl::MetricSpace<f64>;
pub type OflInstanceF64 = ofl::OflInstance<f64>;
pub type OflTraceF64 = ofl::OflTrace<f64>;
pub type OfflineOptF64 = ofl::OfflineOpt<f64>;
pub type ProbingInstanceF64 = probing::ProbingInstance<f64>;
pub type PolicyF64 = probing::Policy<f64>;
pub type LoadBalInstanceF64 = loadbal::LoadBalInstance<f64>;
pub type AssignmentF64 = loadbal::Assignment<f64>;
