//! Composition of truncated formal mappings, checked against plain
//! polynomial substitution.
//!
//! cargo run --example compose_series

use formal_flow::verification::polynomial_oracle_compose;
use formal_flow::{FormalMapping, MultilinearMap};

pub fn run() -> formal_flow::Result<()> {
    // a(y) = y + y^2, composed with itself and truncated at degree 4
    let a = FormalMapping::from_scalar_coefficients(&[1.0, 1.0, 0.0, 0.0])?;
    let aa = a.compose(&a)?;
    let coeffs = aa.scalar_coefficients()?;
    let oracle = polynomial_oracle_compose(&[1.0, 1.0], &[1.0, 1.0], 4);
    println!("(y + y^2) o (y + y^2) = {coeffs:?}  (substitution: {oracle:?})");
    assert_eq!(coeffs, oracle);

    // a vector-valued example: a rotation after a quadratic map R^2 -> R^2
    let rotation = FormalMapping::new(vec![MultilinearMap::from_matrix(2, 2, vec![0.0, -1.0, 1.0, 0.0])?])?.pad(2)?;
    let mut quad = MultilinearMap::zeros(2, 2, 2)?.into_entries();
    quad[1] = 1.0; // z_0 += y_0 y_1
    let f = FormalMapping::new(vec![MultilinearMap::identity(2)?, MultilinearMap::new(2, 2, 2, quad)?])?;
    let g = rotation.compose(&f)?;
    let y = [0.1, 0.2];
    println!(
        "R(f(y)) = {:?}, (R o f)(y) = {:?}",
        rotation.evaluate(&f.evaluate(&y)?)?,
        g.evaluate(&y)?
    );

    // identity laws hold exactly
    let id = FormalMapping::identity(2, 2)?;
    assert_eq!(f.compose(&id)?, f);
    assert_eq!(id.compose(&f)?, f);
    Ok(())
}

#[allow(dead_code)]
fn main() -> formal_flow::Result<()> {
    run()
}
