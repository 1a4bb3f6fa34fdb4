//! The truncated flow S(T, 0) evaluated at y0 matches the direct solution up
//! to O(|y0|^(N+1)).
//!
//! cargo run --example taylor_truncation

use formal_flow::chain::{ConstantCoefficients, TimeGrid};
use formal_flow::verification::truncation_scaling;

pub fn run() -> formal_flow::Result<()> {
    let grid = TimeGrid::new(0.0, 1.0, 256)?;
    for order in 1..=4 {
        let mut drift = vec![0.0; order];
        drift[0] = 1.0;
        if order > 1 {
            drift[1] = 0.5;
        }
        let coeffs = ConstantCoefficients::scalar(&drift, &[])?;
        // the order-1 case uses linear drift only, so the gap is rounding noise
        let report = truncation_scaling(&coeffs, &grid, &[0.1], 5)?;
        println!(
            "N = {order}: gaps {:?}",
            report.gaps.iter().map(|g| format!("{g:.2e}")).collect::<Vec<_>>()
        );
        println!(
            "        ratios {:?} (expected {})",
            report.ratios, report.expected_ratio
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> formal_flow::Result<()> {
    run()
}
