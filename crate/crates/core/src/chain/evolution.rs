use serde::Serialize;

use super::{solve_terminal, BrownianPath, Coefficients};
use crate::algebra::FormalMapping;
use crate::error::{domain, Result};

/// Outcome of comparing `S(t, tau) o S(tau, s)` against `S(t, s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionReport {
    pub split_knot: usize,
    pub split_time: f64,
    /// Relative Frobenius discrepancy per component, degree 1 first.
    pub discrepancies: Vec<f64>,
    pub max_discrepancy: f64,
}

impl EvolutionReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_discrepancy <= tolerance
    }
}

/// Solves on `[s, tau]` and `[tau, t]` separately from the identity,
/// composes, and compares with one run on `[s, t]` along the same path.
pub fn evolution_check<C: Coefficients + ?Sized>(
    coeffs: &C,
    path: &BrownianPath,
    split_knot: usize,
) -> Result<EvolutionReport> {
    let n = path.n_steps();
    if split_knot == 0 || split_knot >= n {
        return Err(domain(format!(
            "split knot {split_knot} must lie strictly inside 0..{n}"
        )));
    }
    let id = FormalMapping::identity(coeffs.order(), coeffs.dim())?;
    let whole = solve_terminal(coeffs, &id, path)?;
    let left = solve_terminal(coeffs, &id, &path.window(0, split_knot)?)?;
    let right = solve_terminal(coeffs, &id, &path.window(split_knot, n)?)?;
    let joined = right.compose(&left)?;
    let discrepancies = joined.relative_discrepancy(&whole)?;
    let max_discrepancy = discrepancies.iter().cloned().fold(0.0, f64::max);
    Ok(EvolutionReport {
        split_knot,
        split_time: path.grid().knot(split_knot),
        discrepancies,
        max_discrepancy,
    })
}

/// [`evolution_check`] with the split given as a time, which must be a knot.
pub fn evolution_check_at<C: Coefficients + ?Sized>(
    coeffs: &C,
    path: &BrownianPath,
    tau: f64,
) -> Result<EvolutionReport> {
    let knot = path.grid().knot_of(tau)?;
    evolution_check(coeffs, path, knot)
}
