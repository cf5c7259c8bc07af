//! Representations of `K^n` that resist random sampling.
//!
//! For `G = K^n` with `K` a small nonabelian group with trivial center, this
//! crate computes the pattern statistics of random generator tuples, the
//! restriction statistic `X_H` and its exact Plancherel moments, operator
//! norms of averaged tensor-power unitaries (matrix-free and dense), Cayley
//! graph second eigenvalues, and closed-form tail bounds, plus seeded
//! experiment drivers that compare the observed frequencies with the bounds.

pub mod error;
mod exact;
pub mod experiment;
pub mod group;
pub mod lab;
pub mod norm;
pub mod product;
pub mod repr;

pub use error::{Error, Result};
