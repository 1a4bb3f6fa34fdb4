//! Truncated formal mappings (finite sequences of `k`-linear maps), their
//! composition algebra, and an Euler-Maruyama solver for the Taylor
//! coefficients `S_n(t, s)` of the flow of a stochastic differential equation
//! with power-series coefficients.
//!
//! * [`algebra`]: dense multilinear maps, formal mappings, composition.
//! * [`chain`]: Brownian paths, the triangular solver, the direct solver and
//!   the evolution-family check.
//! * [`explicit_formula`]: variation of constants through the fundamental
//!   solution of the linear part.
//! * [`verification`]: closed forms, oracles and convergence studies.
//! * [`cli`]: the configuration-driven command-line front end.

pub mod algebra;
pub mod chain;
pub mod cli;
pub mod error;
pub mod explicit_formula;
pub mod verification;

pub use algebra::{compose, DiffusionFamily, DiffusionMap, FormalMapping, MultilinearMap};
pub use chain::{BrownianPath, ChainSolution, Coefficients, ConstantCoefficients, TimeGrid};
pub use error::{Error, Result};

/// Hex SHA-256 of the JSON serialization of `value`.
pub fn fingerprint<T: serde::Serialize + ?Sized>(value: &T) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(value).expect("in-memory values always serialize");
    hex::encode(Sha256::digest(&bytes))
}
