//! Determining sets for directional regularity of vector-valued maps.
//!
//! A finite set Λ of direction pairs `(ξ, η)` determines order-`k`
//! regularity exactly when no nonzero form `Φ(ξ, η) = Σ φ_{αj} ξ^α η_j`,
//! homogeneous of degree `k` in `ξ` and linear in `η`, vanishes on Λ. This
//! crate decides that property with certificates on both sides, reconstructs
//! k-th partials from directional derivatives, checks the counterexamples
//! that make the condition sharp, and covers the rank-one variant used for
//! `C^∞` and Carleman/Beurling classes.

pub mod determine;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod moment;
pub mod multiindex;
pub mod poly;
pub mod rank1;
pub mod reconstruct;
pub mod scalar;
pub mod sharpness;

pub use error::{Error, Result};
pub use exec::Execution;
pub use moment::{DirectionPair, DirectionSet, MomentMatrix};
pub use multiindex::{IndexBasis, MultiIndex};
pub use num_rational::BigRational;
pub use scalar::{Mode, Scalar};
