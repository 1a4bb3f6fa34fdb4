//! Empirical convergence orders on nested grids.
//!
//! cargo run --release --example strong_convergence

use formal_flow::verification::{estimate_order, ConvergenceProblem};

pub fn run() -> formal_flow::Result<()> {
    let schedule = [16, 32, 64, 128, 256, 512];
    let problems = [
        ConvergenceProblem::Gbm {
            alpha: 1.0,
            beta: 0.5,
            horizon: 1.0,
        },
        ConvergenceProblem::Quadratic {
            alpha: 1.0,
            gamma: 0.5,
            y0: 0.1,
            horizon: 1.0,
        },
        ConvergenceProblem::SecondComponent {
            alpha: 1.0,
            gamma: 0.5,
            horizon: 1.0,
        },
    ];
    for problem in &problems {
        let report = estimate_order(problem, &schedule, 1000, 42)?;
        let (expected, band) = problem.expected_order();
        println!("{problem:?}");
        for (dt, e) in report.dts.iter().zip(&report.errors) {
            println!("    dt = {dt:.5}  error = {e:.3e}");
        }
        println!(
            "    slope {:.3} (expected {expected} +- {band})",
            report.slope.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> formal_flow::Result<()> {
    run()
}
