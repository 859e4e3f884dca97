//! Numerical evaluation and certification of dimension-free bounds for
//! Riesz transforms of Schrödinger operators `L = -½Δ + V` with separable
//! power potentials `V(x) = Σ_i κ_i |x_i|^α`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod error;
pub mod paths;
pub mod potentials;
pub mod quad;
pub mod riesz;
pub mod semigroup;
pub mod special;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use paths::{Estimate, PathConfig, WeightedEndpoint};
pub use potentials::{CoefficientRule, Potential, SeparablePotential, TruncatedPotential};
pub use riesz::{AdjointValue, RieszEvaluator, RieszParams, RieszValue};
pub use semigroup::{Backend, BackendKind, GridOptions, GridSolverConfig, SemigroupValue};
