use crate::algebra::{CompositionSum, DiffusionFamily, DiffusionMap, FormalMapping, MultilinearMap};
use crate::error::{check_dim, domain, Result};

/// Nonlinear forcing of the degree-`n` equation:
///
/// ```text
/// f_n = sum_{k=2}^{n} sum_{j_1+..+j_k=n} a_k(S_{j_1}, .., S_{j_k})
/// g_n = sum_{k=2}^{n} sum_{j_1+..+j_k=n} b_k(S_{j_1}, .., S_{j_k}, .)
/// ```
///
/// Only `S_1..S_{n-1}` are read.
pub fn forcing_terms(
    n: usize,
    states: &FormalMapping,
    drift: &FormalMapping,
    diffusion: &DiffusionFamily,
) -> Result<(MultilinearMap, DiffusionMap)> {
    if n < 2 {
        return Err(domain(format!("forcing terms start at degree 2, got {n}")));
    }
    if n > drift.order() || n > diffusion.order() || n - 1 > states.order() {
        return Err(domain(format!("degree {n} exceeds the available orders")));
    }
    let d = drift.domain_dim();
    check_dim("state codomain", d, states.codomain_dim())?;
    check_dim("diffusion domain", d, diffusion.domain_dim())?;
    let dx = states.domain_dim();
    let lower = &states.components()[..n - 1];

    let mut f = CompositionSum::new(drift.codomain_dim(), d, dx, 1, n, lower);
    let mut g = CompositionSum::new(diffusion.codomain_dim(), d, dx, diffusion.noise_dim(), n, lower);
    for k in 2..=n {
        f.add_degree(k, drift.component(k).entries());
        g.add_degree(k, diffusion.component(k).entries());
    }
    let f_n = f.finish().pop().expect("n >= 2 accumulators");
    let g_n = g.finish().pop().expect("n >= 2 accumulators");
    Ok((
        MultilinearMap::new(n, dx, drift.codomain_dim(), f_n)?,
        DiffusionMap::new(n, dx, diffusion.codomain_dim(), diffusion.noise_dim(), g_n)?,
    ))
}
