//! Higher Taylor coefficients from the fundamental solution of the linear
//! part, against the triangular solver.
//!
//! cargo run --example variation_of_constants

use formal_flow::chain::{solve_chain, BrownianPath, ConstantCoefficients, TimeGrid};
use formal_flow::explicit_formula::variation_of_constants;
use formal_flow::verification::second_component_closed_form;
use formal_flow::FormalMapping;

pub fn run() -> formal_flow::Result<()> {
    // drift y + y^2 / 2 + y^3 / 10, noise only in degrees 2 and 3
    let coeffs = ConstantCoefficients::scalar(&[1.0, 0.5, 0.1], &[0.0, 0.3, -0.2])?;
    let grid = TimeGrid::new(0.0, 1.0, 256)?;
    let path = BrownianPath::sample(&grid, 1, 5, 0)?;
    let chain = solve_chain(&coeffs, &FormalMapping::identity(3, 1)?, &path)?;
    for n in 2..=3 {
        let explicit = variation_of_constants(n, &coeffs, &chain, &path)?;
        let a = explicit.last().unwrap().entries()[0];
        let b = chain.terminal().component(n).entries()[0];
        println!("S_{n}(1): explicit {a:.12}, chain {b:.12}");
    }

    let det = ConstantCoefficients::scalar(&[1.0, 0.5], &[])?;
    let zero = BrownianPath::zero(&grid, 1)?;
    let chain = solve_chain(&det, &FormalMapping::identity(2, 1)?, &zero)?;
    let s2 = variation_of_constants(2, &det, &chain, &zero)?;
    println!(
        "deterministic S_2(1) = {:.6}, closed form {:.6}",
        s2.last().unwrap().entries()[0],
        second_component_closed_form(1.0, 0.5, 1.0)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> formal_flow::Result<()> {
    run()
}
