use serde::Serialize;

use crate::algebra::FormalMapping;
use crate::chain::{simulate_direct, solve_terminal, BrownianPath, Coefficients, SampledCoefficients, TimeGrid};
use crate::error::{domain, Error, Result};

/// Gaps below this are treated as rounding noise.
pub const GAP_FLOOR: f64 = 100.0 * f64::EPSILON;

/// Truncation gap `|S(T, 0)(y0) - y(T; y0)|` under repeated halving of `y0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub order: usize,
    pub magnitudes: Vec<f64>,
    pub gaps: Vec<f64>,
    /// `gaps[i - 1] / gaps[i]`; `None` when either gap is below [`GAP_FLOOR`].
    pub ratios: Vec<Option<f64>>,
    pub expected_ratio: f64,
}

impl ScalingReport {
    /// Every reliable ratio lies in `[expected / 2, 2 expected]`, and there is at least one.
    pub fn ratios_within_band(&self) -> bool {
        let reliable: Vec<f64> = self.ratios.iter().flatten().copied().collect();
        !reliable.is_empty()
            && reliable
                .iter()
                .all(|&r| r >= 0.5 * self.expected_ratio && r <= 2.0 * self.expected_ratio)
    }

    /// Every gap is at rounding level.
    pub fn at_machine_precision(&self) -> bool {
        self.gaps.iter().all(|&g| g < GAP_FLOOR)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["magnitude", "gap", "ratio"])
            .map_err(crate::chain::csv_err)?;
        for i in 0..self.gaps.len() {
            let ratio = if i == 0 {
                String::new()
            } else {
                self.ratios[i - 1]
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "unreliable".into())
            };
            w.write_record([self.magnitudes[i].to_string(), self.gaps[i].to_string(), ratio])
                .map_err(crate::chain::csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Compares the truncated flow with direct Euler for `y0_base / 2^i`,
/// `i = 0..=halvings`. Requires zero diffusion so that the gap is pure
/// truncation error.
pub fn truncation_scaling<C: Coefficients + ?Sized>(
    coeffs: &C,
    grid: &TimeGrid,
    y0_base: &[f64],
    halvings: usize,
) -> Result<ScalingReport> {
    truncation_scaling_at_order(coeffs, coeffs.order(), grid, y0_base, halvings)
}

/// Same as [`truncation_scaling`] with the flow truncated at `order`, which
/// may be below the order of the coefficients; the direct simulation always
/// uses the full coefficients.
pub fn truncation_scaling_at_order<C: Coefficients + ?Sized>(
    coeffs: &C,
    order: usize,
    grid: &TimeGrid,
    y0_base: &[f64],
    halvings: usize,
) -> Result<ScalingReport> {
    if halvings == 0 {
        return Err(domain("need at least one halving"));
    }
    if order == 0 || order > coeffs.order() {
        return Err(domain(format!("flow order {order} outside 1..={}", coeffs.order())));
    }
    for knot in 0..grid.n_steps() {
        if !coeffs.diffusion(knot).is_zero() {
            return Err(Error::Unsupported("truncation scaling needs zero diffusion".into()));
        }
    }
    let path = BrownianPath::zero(grid, coeffs.noise_dim())?;
    let id = FormalMapping::identity(order, coeffs.dim())?;
    let flow = if order == coeffs.order() {
        solve_terminal(coeffs, &id, &path)?
    } else {
        let (drift, diffusion) = (0..grid.n_steps())
            .map(|k| Ok((coeffs.drift(k).truncate(order)?, coeffs.diffusion(k).truncate(order)?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        solve_terminal(&SampledCoefficients::new(drift, diffusion)?, &id, &path)?
    };

    let mut magnitudes = Vec::with_capacity(halvings + 1);
    let mut gaps = Vec::with_capacity(halvings + 1);
    for i in 0..=halvings {
        let y0: Vec<f64> = y0_base.iter().map(|v| v / 2f64.powi(i as i32)).collect();
        let taylor = flow.evaluate(&y0)?;
        let direct = simulate_direct(coeffs, &y0, &path)?;
        let last = direct.last().expect("at least the initial point");
        let diff: Vec<f64> = taylor.iter().zip(last).map(|(a, b)| a - b).collect();
        magnitudes.push(norm(&y0));
        gaps.push(norm(&diff));
    }
    let ratios = gaps
        .windows(2)
        .map(|w| (w[0] >= GAP_FLOOR && w[1] >= GAP_FLOOR).then(|| w[0] / w[1]))
        .collect();
    Ok(ScalingReport {
        order,
        magnitudes,
        gaps,
        ratios,
        expected_ratio: 2f64.powi(order as i32 + 1),
    })
}
