//! Variation of constants for the higher Taylor coefficients.
//!
//! With the fundamental solution `Phi(t, tau)` of the linear degree-1
//! equation, the degree-`n` coefficient started from zero is
//!
//! ```text
//! S_n(t) = int_0^t Phi(t, tau) f_n(tau) dtau + int_0^t Phi(t, tau) g_n(tau) dw(tau)
//! ```
//!
//! Only the case `b_1 = 0` is supported: `Phi` is then deterministic and the
//! stochastic integral is an ordinary Ito integral. The quadrature is the
//! left-point rule aligned with the Euler scheme,
//!
//! ```text
//! S_n(t_i) = Phi(t_i, t_0) S_n(t_0) + sum_{j<i} Phi(t_i, t_{j+1}) [f_n(t_j) dt + g_n(t_j) dw_j]
//! ```
//!
//! with `Phi(t_i, t_j) = F_{i-1} ... F_j` and `F_j = I + a_1(t_j) dt`, so it
//! reproduces the chain solver up to summation order.

use crate::algebra::{left_multiply, MultilinearMap};
use crate::chain::{forcing_terms, BrownianPath, ChainSolution, Coefficients, TimeGrid};
use crate::error::{check_dim, domain, Error, Result};

/// Per-step factors `F_j = I + a_1(t_j) dt + b_1(t_j)(., dw_j)` and their
/// ordered products.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolution {
    grid: TimeGrid,
    dim: usize,
    factors: Vec<Vec<f64>>,
    path_dependent: bool,
}

/// Builds the per-step factors along `path`.
pub fn fundamental<C: Coefficients + ?Sized>(coeffs: &C, path: &BrownianPath) -> Result<FundamentalSolution> {
    check_dim("path noise dimension", coeffs.noise_dim(), path.noise_dim())?;
    let d = coeffs.dim();
    let dt = path.grid().dt();
    let mut path_dependent = false;
    let factors = (0..path.n_steps())
        .map(|j| {
            let knot = path.knot_offset() + j;
            let a1 = coeffs.drift(knot).component(1);
            let b1 = coeffs.diffusion(knot).component(1);
            let mut f: Vec<f64> = a1.entries().iter().map(|x| x * dt).collect();
            for i in 0..d {
                f[i * d + i] += 1.0;
            }
            if !b1.is_zero() {
                path_dependent = true;
                for (x, n) in f.iter_mut().zip(b1.contract_noise(path.increment(j))?.entries()) {
                    *x += n;
                }
            }
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FundamentalSolution {
        grid: path.grid().clone(),
        dim: d,
        factors,
        path_dependent,
    })
}

fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    left_multiply(a, d, d, b)
}

fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

impl FundamentalSolution {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True when `b_1` is nonzero somewhere, so the factors depend on the path.
    pub fn is_path_dependent(&self) -> bool {
        self.path_dependent
    }

    /// Factor of step `j`.
    pub fn factor(&self, j: usize) -> &[f64] {
        &self.factors[j]
    }

    /// `Phi(t_i, t_j) = F_{i-1} ... F_j`, row-major `d x d`, for `j <= i`.
    pub fn between(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        self.advance(identity(self.dim), j, i)
    }

    /// Left-multiplies `start` by `F_{to-1} ... F_from`, one factor at a time.
    /// `advance(between(j, k), j, i)` equals `between(i, k)` bit for bit.
    pub fn advance(&self, start: Vec<f64>, from: usize, to: usize) -> Result<Vec<f64>> {
        if from > to || to > self.factors.len() {
            return Err(domain(format!("bad knot range {from}..{to}")));
        }
        check_dim("matrix entry count", self.dim * self.dim, start.len())?;
        Ok((from..to).fold(start, |acc, s| matmul(&self.factors[s], &acc, self.dim)))
    }
}

/// Trajectory of `S_n` on the grid of `chain` from the explicit formula.
///
/// `chain` supplies `S_1..S_{n-1}` at every knot (and `S_n` at the first
/// knot); `path` must be the path the chain was solved on.
pub fn variation_of_constants<C: Coefficients + ?Sized>(
    n: usize,
    coeffs: &C,
    chain: &ChainSolution,
    path: &BrownianPath,
) -> Result<Vec<MultilinearMap>> {
    if n < 2 || n > coeffs.order() {
        return Err(domain(format!("degree {n} outside 2..={}", coeffs.order())));
    }
    check_dim("chain length", path.n_steps() + 1, chain.states.len())?;
    let steps = path.n_steps();
    for j in 0..steps {
        if !coeffs.diffusion(path.knot_offset() + j).component(1).is_zero() {
            return Err(Error::Unsupported(
                "variation of constants needs b_1 = 0; a random fundamental solution calls for an anticipating integral".into(),
            ));
        }
    }
    let phi = fundamental(coeffs, path)?;
    let d = phi.dim;
    let dt = path.grid().dt();

    // h_j = f_n(t_j) dt + g_n(t_j)(dw_j)
    let forcing = (0..steps)
        .map(|j| {
            let knot = path.knot_offset() + j;
            let (f, g) = forcing_terms(n, &chain.states[j], coeffs.drift(knot), coeffs.diffusion(knot))?;
            f.scale(dt).add(&g.contract_noise(path.increment(j))?)
        })
        .collect::<Result<Vec<_>>>()?;

    let start = chain.states[0].component(n);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start.clone());
    for i in 1..=steps {
        // phis[j] = Phi(t_i, t_{j+1}), built downwards one factor at a time
        let mut phis = vec![identity(d); i];
        for j in (0..i - 1).rev() {
            phis[j] = matmul(&phis[j + 1], &phi.factors[j + 1], d);
        }
        let mut acc = if start.is_zero() {
            MultilinearMap::zeros(n, start.domain_dim(), d)?
        } else {
            start.left_multiply(&matmul(&phis[0], &phi.factors[0], d), d)?
        };
        for (j, p) in phis.iter().enumerate() {
            acc = acc.add(&forcing[j].left_multiply(p, d)?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FormalMapping;
    use crate::chain::{solve_chain, ConstantCoefficients};

    #[test]
    fn zero_linear_part_gives_identity() {
        let c = ConstantCoefficients::zero(2, 3, 1).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 5).unwrap();
        let p = BrownianPath::sample(&g, 1, 1, 0).unwrap();
        let phi = fundamental(&c, &p).unwrap();
        assert!(!phi.is_path_dependent());
        for i in 0..=5 {
            for j in 0..=i {
                assert_eq!(phi.between(i, j).unwrap(), identity(3));
            }
        }
    }

    #[test]
    fn scalar_factor_product_tends_to_exponential() {
        let alpha = 0.6;
        let c = ConstantCoefficients::scalar(&[alpha], &[0.0]).unwrap();
        let err = |steps: usize| {
            let g = TimeGrid::new(0.0, 1.0, steps).unwrap();
            let phi = fundamental(&c, &BrownianPath::zero(&g, 1).unwrap()).unwrap();
            let q = steps / 4;
            // Phi(1, 0.25) against e^{0.75 alpha}
            (phi.between(steps, q).unwrap()[0] - (0.75 * alpha).exp()).abs()
        };
        let ratio = err(256) / err(512);
        assert!((1.8..2.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn continuation_is_exact() {
        let c = ConstantCoefficients::new(
            FormalMapping::new(vec![
                MultilinearMap::from_matrix(2, 2, vec![0.1, -0.4, 0.3, 0.2]).unwrap()
            ])
            .unwrap(),
            crate::algebra::DiffusionFamily::zero(1, 2, 1).unwrap(),
        )
        .unwrap();
        let g = TimeGrid::new(0.0, 1.0, 20).unwrap();
        let phi = fundamental(&c, &BrownianPath::zero(&g, 1).unwrap()).unwrap();
        let (i, j, k) = (17, 9, 3);
        assert_eq!(
            phi.advance(phi.between(j, k).unwrap(), j, i).unwrap(),
            phi.between(i, k).unwrap()
        );
        let product = matmul(&phi.between(i, j).unwrap(), &phi.between(j, k).unwrap(), 2);
        let direct = phi.between(i, k).unwrap();
        for (a, b) in product.iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn random_linear_part_with_noise_is_rejected() {
        let c = ConstantCoefficients::scalar(&[0.1, 0.2], &[0.3, 0.0]).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 4).unwrap();
        let p = BrownianPath::sample(&g, 1, 3, 0).unwrap();
        assert!(fundamental(&c, &p).unwrap().is_path_dependent());
        let chain = solve_chain(&c, &FormalMapping::identity(2, 1).unwrap(), &p).unwrap();
        assert!(matches!(
            variation_of_constants(2, &c, &chain, &p),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn no_forcing_means_zero() {
        let c = ConstantCoefficients::scalar(&[0.5, 0.0, 0.0], &[0.0, 0.0, 0.0]).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 16).unwrap();
        let p = BrownianPath::sample(&g, 1, 3, 0).unwrap();
        let chain = solve_chain(&c, &FormalMapping::identity(3, 1).unwrap(), &p).unwrap();
        for n in 2..=3 {
            let s = variation_of_constants(n, &c, &chain, &p).unwrap();
            assert!(s.iter().all(|m| m.is_zero()));
        }
    }

    #[test]
    fn pure_noise_forcing_is_scaled_brownian_sum() {
        // a = 0, b = (0, 1/2): S_1 = 1 and S_2(t_i) = sum_{j<i} dw_j / 2
        let c = ConstantCoefficients::scalar(&[0.0, 0.0], &[0.0, 0.5]).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 64).unwrap();
        let p = BrownianPath::sample(&g, 1, 77, 2).unwrap();
        let chain = solve_chain(&c, &FormalMapping::identity(2, 1).unwrap(), &p).unwrap();
        let s2 = variation_of_constants(2, &c, &chain, &p).unwrap();
        let mut w = 0.0;
        for (i, s) in s2.iter().enumerate() {
            assert_eq!(s.entries()[0], 0.5 * w, "knot {i}");
            assert_eq!(chain.states[i].component(2).entries()[0], 0.5 * w);
            if i < 64 {
                w += p.increment(i)[0];
            }
        }
    }

    #[test]
    fn nonzero_initial_higher_component_is_propagated() {
        let c = ConstantCoefficients::scalar(&[0.4, 0.3], &[0.0, 0.2]).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 32).unwrap();
        let p = BrownianPath::sample(&g, 1, 5, 0).unwrap();
        let init = FormalMapping::from_scalar_coefficients(&[1.1, -0.6]).unwrap();
        let chain = solve_chain(&c, &init, &p).unwrap();
        let s2 = variation_of_constants(2, &c, &chain, &p).unwrap();
        for (i, m) in s2.iter().enumerate() {
            let a = m.entries()[0];
            let b = chain.states[i].component(2).entries()[0];
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "knot {i}: {a} vs {b}");
        }
    }
}
