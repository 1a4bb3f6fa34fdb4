//! Solving on [s, tau] and [tau, t] and composing the results reproduces
//! the solution on [s, t] along the same Brownian path.
//!
//! cargo run --example evolution_family

use formal_flow::chain::{evolution_check, BrownianPath, TimeGrid};
use formal_flow::verification::random_coefficients;

pub fn run() -> formal_flow::Result<()> {
    let coeffs = random_coefficients(4, 3, 2, 0.5, 17)?;
    let grid = TimeGrid::new(0.0, 1.0, 128)?;
    let path = BrownianPath::sample(&grid, 2, 17, 0)?;
    for knot in [1, 32, 64, 100, 127] {
        let report = evolution_check(&coeffs, &path, knot)?;
        println!(
            "tau = {:.4}: per-degree relative discrepancy {:?}",
            report.split_time,
            report
                .discrepancies
                .iter()
                .map(|d| format!("{d:.1e}"))
                .collect::<Vec<_>>()
        );
        assert!(report.passes(1e-10));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> formal_flow::Result<()> {
    run()
}
