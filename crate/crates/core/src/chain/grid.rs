use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Uniform grid on `[start, end]` with `n_steps` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridLiteral", into = "GridLiteral")]
pub struct TimeGrid {
    start: f64,
    end: f64,
    n_steps: usize,
    dt: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridLiteral {
    pub start: f64,
    pub end: f64,
    pub n_steps: usize,
}

impl TryFrom<GridLiteral> for TimeGrid {
    type Error = Error;
    fn try_from(lit: GridLiteral) -> Result<Self> {
        TimeGrid::new(lit.start, lit.end, lit.n_steps)
    }
}

impl From<TimeGrid> for GridLiteral {
    fn from(g: TimeGrid) -> Self {
        GridLiteral {
            start: g.start,
            end: g.end,
            n_steps: g.n_steps,
        }
    }
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(domain("grid needs at least one step"));
        }
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return Err(domain(format!("grid needs start < end, got [{start}, {end}]")));
        }
        Ok(Self {
            start,
            end,
            n_steps,
            dt: (end - start) / n_steps as f64,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of knot `i`, `0 <= i <= n_steps`.
    pub fn knot(&self, i: usize) -> f64 {
        if i == self.n_steps {
            self.end
        } else {
            self.start + i as f64 * self.dt
        }
    }

    pub fn knots(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|i| self.knot(i)).collect()
    }

    /// Index of the knot at time `t`, up to a relative tolerance of `1e-9` steps.
    pub fn knot_of(&self, t: f64) -> Result<usize> {
        let x = (t - self.start) / self.dt;
        let i = x.round();
        if (x - i).abs() > 1e-9 || i < 0.0 || i > self.n_steps as f64 {
            return Err(domain(format!("time {t} is not a knot of the grid")));
        }
        Ok(i as usize)
    }

    /// Sub-grid between knots `from` and `to`; keeps the step length.
    pub fn window(&self, from: usize, to: usize) -> Result<TimeGrid> {
        if from >= to || to > self.n_steps {
            return Err(domain(format!("bad grid window {from}..{to} of {}", self.n_steps)));
        }
        Ok(TimeGrid {
            start: self.knot(from),
            end: self.knot(to),
            n_steps: to - from,
            dt: self.dt,
        })
    }

    /// Grid with `n_steps / factor` steps over the same interval.
    pub fn coarsen(&self, factor: usize) -> Result<TimeGrid> {
        if factor == 0 || !self.n_steps.is_multiple_of(factor) {
            return Err(domain(format!(
                "coarsening factor {factor} does not divide {} steps",
                self.n_steps
            )));
        }
        TimeGrid::new(self.start, self.end, self.n_steps / factor)
    }
}
