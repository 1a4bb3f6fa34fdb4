//! The degree-1 coefficient of a linear stochastic flow is geometric Brownian
//! motion; compare the solver with the closed form along sampled paths.
//!
//! cargo run --example geometric_brownian_flow

use formal_flow::chain::{solve_chain, BrownianPath, ConstantCoefficients, TimeGrid};
use formal_flow::verification::gbm_closed_form;
use formal_flow::FormalMapping;

pub fn run() -> formal_flow::Result<()> {
    let (alpha, beta) = (1.0, 0.5);
    let coeffs = ConstantCoefficients::scalar(&[alpha], &[beta])?;
    let grid = TimeGrid::new(0.0, 1.0, 1024)?;
    for p in 0..4 {
        let path = BrownianPath::sample(&grid, 1, 2024, p)?;
        let sol = solve_chain(&coeffs, &FormalMapping::identity(1, 1)?, &path)?;
        let s1 = sol.terminal().component(1).entries()[0];
        let exact = gbm_closed_form(alpha, beta, 1.0, path.total()[0]);
        println!(
            "path {p}: S_1(1) = {s1:.6}, exact {exact:.6}, error {:.2e}",
            (s1 - exact).abs()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> formal_flow::Result<()> {
    run()
}
