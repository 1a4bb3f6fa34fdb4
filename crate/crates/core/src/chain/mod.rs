//! Brownian paths and the Euler-Maruyama solver for the Taylor coefficients
//! `S_n(t, s)` of a stochastic flow.

mod brownian;
mod coefficients;
mod evolution;
mod forcing;
mod grid;
mod solver;

pub use brownian::{standard_normals, BrownianPath};
pub use coefficients::{Coefficients, ConstantCoefficients, SampledCoefficients};
pub use evolution::{evolution_check, evolution_check_at, EvolutionReport};
pub use forcing::forcing_terms;
pub use grid::{GridLiteral, TimeGrid};
pub(crate) use solver::csv_err;
pub use solver::{one_step_map, simulate_direct, solve_chain, solve_terminal, ChainProvenance, ChainSolution};
