//! Oracles and statistical harnesses: closed-form references, the exact
//! polynomial-substitution oracle, convergence-order estimation and
//! truncation-scaling studies.

mod convergence;
mod oracles;
mod random;
mod scaling;

pub use convergence::{estimate_order, fit_slope, ConvergenceProblem, ConvergenceReport};
pub use oracles::{bernoulli_closed_form, gbm_closed_form, polynomial_oracle_compose, second_component_closed_form};
pub use random::{random_coefficients, random_diffusion, random_mapping};
pub use scaling::{truncation_scaling, truncation_scaling_at_order, ScalingReport, GAP_FLOOR};
