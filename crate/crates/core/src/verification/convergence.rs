//! Strong-convergence studies on nested grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracles::{bernoulli_closed_form, gbm_closed_form, second_component_closed_form};
use crate::algebra::FormalMapping;
use crate::chain::{simulate_direct, solve_chain, solve_terminal, BrownianPath, ConstantCoefficients, TimeGrid};
use crate::error::{domain, Error, Result};

/// Canonical problems with a closed-form reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConvergenceProblem {
    /// `S_1` of the scalar linear equation `dy = alpha y dt + beta y dw`
    /// against geometric Brownian motion; error `E|S_1(T) - exact|`.
    Gbm { alpha: f64, beta: f64, horizon: f64 },
    /// Direct Euler for `y' = alpha y + gamma y^2` against the Bernoulli
    /// solution; error is the maximum over knots.
    Quadratic {
        alpha: f64,
        gamma: f64,
        y0: f64,
        horizon: f64,
    },
    /// Chain component `S_2` for the same drift against its closed form;
    /// error is the maximum over knots.
    SecondComponent { alpha: f64, gamma: f64, horizon: f64 },
}

impl ConvergenceProblem {
    /// Expected strong order and the accepted band around it: 0.5 +- 0.15 for
    /// the stochastic problem, 1.0 +- 0.1 otherwise.
    pub fn expected_order(&self) -> (f64, f64) {
        if self.is_stochastic() {
            (0.5, 0.15)
        } else {
            (1.0, 0.1)
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, ConvergenceProblem::Gbm { beta, .. } if *beta != 0.0)
    }

    fn horizon(&self) -> f64 {
        match *self {
            ConvergenceProblem::Gbm { horizon, .. }
            | ConvergenceProblem::Quadratic { horizon, .. }
            | ConvergenceProblem::SecondComponent { horizon, .. } => horizon,
        }
    }

    /// Error of one run on `path`.
    fn error(&self, path: &BrownianPath) -> Result<f64> {
        let grid = path.grid();
        match *self {
            ConvergenceProblem::Gbm { alpha, beta, horizon } => {
                let c = ConstantCoefficients::scalar(&[alpha], &[beta])?;
                let s = solve_terminal(&c, &FormalMapping::identity(1, 1)?, path)?;
                let exact = gbm_closed_form(alpha, beta, horizon, path.total()[0]);
                Ok((s.component(1).entries()[0] - exact).abs())
            }
            ConvergenceProblem::Quadratic { alpha, gamma, y0, .. } => {
                let c = ConstantCoefficients::scalar(&[alpha, gamma], &[])?;
                let ys = simulate_direct(&c, &[y0], path)?;
                Ok(ys
                    .iter()
                    .enumerate()
                    .map(|(i, y)| (y[0] - bernoulli_closed_form(alpha, gamma, y0, grid.knot(i))).abs())
                    .fold(0.0, f64::max))
            }
            ConvergenceProblem::SecondComponent { alpha, gamma, .. } => {
                let c = ConstantCoefficients::scalar(&[alpha, gamma], &[])?;
                let sol = solve_chain(&c, &FormalMapping::identity(2, 1)?, path)?;
                Ok(sol
                    .states
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        (s.component(2).entries()[0] - second_component_closed_form(alpha, gamma, grid.knot(i))).abs()
                    })
                    .fold(0.0, f64::max))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub problem: ConvergenceProblem,
    pub steps: Vec<usize>,
    pub dts: Vec<f64>,
    /// Mean error per level (strong error for stochastic problems).
    pub errors: Vec<f64>,
    /// Standard error of each mean; zero for deterministic problems.
    pub std_errors: Vec<f64>,
    /// Least-squares slope of `log err` against `log dt`; `None` if some
    /// error is exactly zero.
    pub slope: Option<f64>,
    pub paths: usize,
    pub excluded: usize,
    pub seed: u64,
}

impl ConvergenceReport {
    pub fn slope_within(&self, expected: f64, band: f64) -> bool {
        self.slope.is_some_and(|s| (s - expected).abs() <= band)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["steps", "dt", "error", "std_error"])
            .map_err(crate::chain::csv_err)?;
        for i in 0..self.steps.len() {
            w.write_record([
                self.steps[i].to_string(),
                self.dts[i].to_string(),
                self.errors[i].to_string(),
                self.std_errors[i].to_string(),
            ])
            .map_err(crate::chain::csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Estimates the convergence order of `problem` on grids with the given step
/// counts. All levels share one Brownian path per sample: it is drawn on the
/// finest grid and summed down to the coarser ones.
///
/// Paths whose run blows up are dropped and counted; more than 1% dropped
/// is an error.
pub fn estimate_order(
    problem: &ConvergenceProblem,
    steps: &[usize],
    paths: usize,
    seed: u64,
) -> Result<ConvergenceReport> {
    if steps.len() < 3 {
        return Err(domain("a convergence study needs at least three step sizes"));
    }
    let finest = *steps.iter().max().expect("non-empty");
    if let Some(s) = steps.iter().find(|&&s| s == 0 || !finest.is_multiple_of(s)) {
        return Err(domain(format!(
            "step count {s} does not divide the finest level {finest}"
        )));
    }
    let fine_grid = TimeGrid::new(0.0, problem.horizon(), finest)?;
    let paths = if problem.is_stochastic() { paths.max(1) } else { 1 };

    let per_path: Vec<Result<Option<Vec<f64>>>> = (0..paths as u64)
        .into_par_iter()
        .map(|p| {
            let fine = if problem.is_stochastic() {
                BrownianPath::sample(&fine_grid, 1, seed, p)?
            } else {
                BrownianPath::zero(&fine_grid, 1)?
            };
            let mut errs = Vec::with_capacity(steps.len());
            for &s in steps {
                match fine.coarsen(finest / s).and_then(|path| problem.error(&path)) {
                    Ok(e) if e.is_finite() => errs.push(e),
                    Ok(_) | Err(Error::Blowup { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            Ok(Some(errs))
        })
        .collect();

    // ordered reduction, independent of the thread schedule
    let mut sums = vec![0.0; steps.len()];
    let mut sq = vec![0.0; steps.len()];
    let mut used = 0usize;
    for r in per_path {
        if let Some(errs) = r? {
            used += 1;
            for (i, e) in errs.iter().enumerate() {
                sums[i] += e;
                sq[i] += e * e;
            }
        }
    }
    let excluded = paths - used;
    if excluded * 100 > paths {
        return Err(Error::TooManyExclusions { excluded, paths });
    }
    let n = used as f64;
    let errors: Vec<f64> = sums.iter().map(|s| s / n).collect();
    let std_errors = if used > 1 {
        errors
            .iter()
            .zip(&sq)
            .map(|(m, q)| ((q / n - m * m).max(0.0) * n / (n - 1.0) / n).sqrt())
            .collect()
    } else {
        vec![0.0; steps.len()]
    };
    let dts: Vec<f64> = steps.iter().map(|&s| problem.horizon() / s as f64).collect();
    let slope = if errors.iter().all(|&e| e > 0.0) {
        let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        Some(fit_slope(&lx, &ly))
    } else {
        None
    };
    Ok(ConvergenceReport {
        problem: problem.clone(),
        steps: steps.to_vec(),
        dts,
        errors,
        std_errors,
        slope,
        paths,
        excluded,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_fit() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((fit_slope(&xs, &ys) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_problem_has_zero_error() {
        let p = ConvergenceProblem::Gbm {
            alpha: 0.0,
            beta: 0.0,
            horizon: 1.0,
        };
        let r = estimate_order(&p, &[4, 8, 16], 10, 1).unwrap();
        assert!(r.errors.iter().all(|&e| e == 0.0));
        assert_eq!(r.slope, None);
    }

    #[test]
    fn rejects_bad_schedules() {
        let p = ConvergenceProblem::Gbm {
            alpha: 1.0,
            beta: 0.5,
            horizon: 1.0,
        };
        assert!(estimate_order(&p, &[4, 8], 10, 1).is_err());
        assert!(estimate_order(&p, &[3, 8, 16], 10, 1).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let p = ConvergenceProblem::Gbm {
            alpha: 1.0,
            beta: 0.5,
            horizon: 1.0,
        };
        let a = estimate_order(&p, &[8, 16, 32], 64, 9).unwrap();
        let b = estimate_order(&p, &[8, 16, 32], 64, 9).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn deterministic_quadratic_is_first_order() {
        let p = ConvergenceProblem::Quadratic {
            alpha: 1.0,
            gamma: 0.5,
            y0: 0.1,
            horizon: 1.0,
        };
        let r = estimate_order(&p, &[16, 32, 64, 128], 1000, 0).unwrap();
        assert_eq!(r.paths, 1);
        assert!(r.slope_within(1.0, 0.1), "{:?}", r.slope);
    }

    #[test]
    fn problem_json() {
        let p: ConvergenceProblem =
            serde_json::from_str(r#"{"kind": "gbm", "alpha": 1.0, "beta": 0.5, "horizon": 1.0}"#).unwrap();
        assert_eq!(
            p,
            ConvergenceProblem::Gbm {
                alpha: 1.0,
                beta: 0.5,
                horizon: 1.0
            }
        );
    }
}
