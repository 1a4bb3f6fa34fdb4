//! Closed-form references and the polynomial-substitution oracle.

use num_traits::Zero;
use std::ops::{Add, Mul};

/// Coefficients (degree 1 first) of `outer(inner(y))` truncated at `order`,
/// computed by plain polynomial multiplication. Works over any ring, in
/// particular exact rationals.
pub fn polynomial_oracle_compose<T>(outer: &[T], inner: &[T], order: usize) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    // dense polynomials indexed by degree, entry 0 is the constant term
    let mut inner_poly = vec![T::zero(); order + 1];
    for (i, c) in inner.iter().take(order).enumerate() {
        inner_poly[i + 1] = c.clone();
    }
    let mut result = vec![T::zero(); order + 1];
    let mut power = inner_poly.clone();
    for (k, b) in outer.iter().take(order).enumerate() {
        if k > 0 {
            power = truncated_product(&power, &inner_poly, order);
        }
        for (r, p) in result.iter_mut().zip(&power) {
            *r = r.clone() + b.clone() * p.clone();
        }
    }
    result.into_iter().skip(1).collect()
}

fn truncated_product<T>(a: &[T], b: &[T], order: usize) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    let mut out = vec![T::zero(); order + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Geometric Brownian motion `exp((alpha - beta^2 / 2) t + beta w)`.
pub fn gbm_closed_form(alpha: f64, beta: f64, t: f64, w: f64) -> f64 {
    ((alpha - 0.5 * beta * beta) * t + beta * w).exp()
}

/// Solution of `y' = alpha y + gamma y^2`, `y(0) = y0`.
pub fn bernoulli_closed_form(alpha: f64, gamma: f64, y0: f64, t: f64) -> f64 {
    let e = (alpha * t).exp();
    alpha * y0 * e / (alpha - gamma * y0 * (e - 1.0))
}

/// Second Taylor coefficient of the flow of `y' = alpha y + gamma y^2`:
/// `gamma e^{alpha t} (e^{alpha t} - 1) / alpha`.
pub fn second_component_closed_form(alpha: f64, gamma: f64, t: f64) -> f64 {
    let e = (alpha * t).exp();
    gamma * e * (e - 1.0) / alpha
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(polynomial_oracle_compose(&q(&[1, 1]), &q(&[1, 1]), 4), q(&[1, 2, 2, 1]));
        assert_eq!(polynomial_oracle_compose(&[3i64], &[5i64], 1), vec![15]);
        assert_eq!(polynomial_oracle_compose(&q(&[1, 1]), &q(&[1, 0, 1]), 3), q(&[1, 1, 1]));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(gbm_closed_form(0.0, 0.0, 1.0, 0.3), 1.0);
        assert_eq!(gbm_closed_form(0.7, 0.0, 2.0, 0.3), 1.4f64.exp());
        assert!((gbm_closed_form(1.0, 0.5, 1.0, 0.0) - 2.398_875_293_967_098).abs() < 1e-14);
        assert_eq!(bernoulli_closed_form(1.0, 0.5, 0.2, 0.0), 0.2);
        // small-y0 limit is the linear flow
        let y = bernoulli_closed_form(1.0, 0.5, 1e-9, 1.0);
        assert!((y / 1e-9 - 1f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn second_component_is_taylor_coefficient_of_bernoulli() {
        // central second difference of y0 -> y(t; y0) at 0
        let (alpha, gamma, t, h) = (0.8, 0.3, 1.2, 1e-3);
        let f = |y0: f64| bernoulli_closed_form(alpha, gamma, y0, t);
        let second = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h) / 2.0;
        let exact = second_component_closed_form(alpha, gamma, t);
        assert!((second - exact).abs() < 1e-6 * exact, "{second} vs {exact}");
    }
}
