//! Euler-Maruyama for the triangular system of Taylor-coefficient equations.
//!
//! One step with drift `a`, diffusion `b`, step `dt` and increment `dw` is
//! composition with the formal mapping
//!
//! ```text
//! Psi_1 = id + a_1 dt + b_1(., dw),   Psi_k = a_k dt + b_k(., .., ., dw)  (k >= 2)
//! ```
//!
//! so `S(t_{i+1}, s) = Psi_i o S(t_i, s)`. Expanding the composition gives
//! exactly the component-wise explicit update
//! `S_n + dt sum a_k(S_{j_1}, ..) + sum b_k(S_{j_1}, .., dw)`.

use serde::Serialize;

use super::{BrownianPath, Coefficients, TimeGrid};
use crate::algebra::{DiffusionFamily, FormalMapping, MultilinearMap};
use crate::error::{check_dim, domain, Error, Result};

/// Provenance of a chain run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainProvenance {
    pub seed: Option<u64>,
    pub path_index: u64,
    pub knot_offset: usize,
    pub coefficients: String,
}

/// States `S(t_i, s)` for every knot of the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSolution {
    pub grid: TimeGrid,
    pub provenance: ChainProvenance,
    pub initial: FormalMapping,
    pub states: Vec<FormalMapping>,
}

impl ChainSolution {
    pub fn terminal(&self) -> &FormalMapping {
        self.states.last().expect("a solution always holds the initial state")
    }

    /// CSV with one row per knot: index, time, Frobenius norm of every component.
    pub fn write_norms_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let order = self.initial.order();
        let mut header = vec!["knot".to_string(), "t".to_string()];
        header.extend((1..=order).map(|k| format!("norm_s{k}")));
        w.write_record(&header).map_err(csv_err)?;
        for (i, s) in self.states.iter().enumerate() {
            let mut row = vec![i.to_string(), self.grid.knot(i).to_string()];
            row.extend(s.component_norms().iter().map(|x| x.to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// The formal mapping whose composition performs one Euler-Maruyama step.
pub fn one_step_map(drift: &FormalMapping, diffusion: &DiffusionFamily, dt: f64, dw: &[f64]) -> Result<FormalMapping> {
    let d = drift.domain_dim();
    check_dim("drift codomain", d, drift.codomain_dim())?;
    check_dim("diffusion order", drift.order(), diffusion.order())?;
    check_dim("diffusion domain", d, diffusion.domain_dim())?;
    check_dim("diffusion codomain", d, diffusion.codomain_dim())?;
    check_dim("noise increment length", diffusion.noise_dim(), dw.len())?;

    let components = drift
        .components()
        .iter()
        .zip(diffusion.components())
        .map(|(a, b)| {
            let mut entries: Vec<f64> = a.entries().iter().map(|x| x * dt).collect();
            if a.degree() == 1 {
                for i in 0..d {
                    entries[i * d + i] += 1.0;
                }
            }
            if !b.is_zero() {
                let noise = b.contract_noise(dw)?;
                for (e, n) in entries.iter_mut().zip(noise.entries()) {
                    *e += n;
                }
            }
            MultilinearMap::new(a.degree(), d, d, entries)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| match e {
            Error::NonFinite(_) => Error::NonFinite("one-step map".into()),
            other => other,
        })?;
    FormalMapping::new(components)
}

fn check_inputs<C: Coefficients + ?Sized>(coeffs: &C, initial: &FormalMapping, path: &BrownianPath) -> Result<()> {
    check_dim("initial condition order", coeffs.order(), initial.order())?;
    check_dim("initial condition codomain", coeffs.dim(), initial.codomain_dim())?;
    check_dim("path noise dimension", coeffs.noise_dim(), path.noise_dim())?;
    if let Some(n) = coeffs.knot_count() {
        // the last knot needs no sample
        if path.knot_offset() + path.n_steps() > n {
            return Err(domain(format!(
                "coefficients sampled at {n} knots, path needs {}",
                path.knot_offset() + path.n_steps()
            )));
        }
    }
    Ok(())
}

/// Runs the scheme and hands every state after the initial one to `visit`.
fn propagate<C: Coefficients + ?Sized>(
    coeffs: &C,
    initial: &FormalMapping,
    path: &BrownianPath,
    mut visit: impl FnMut(FormalMapping) -> FormalMapping,
) -> Result<FormalMapping> {
    check_inputs(coeffs, initial, path)?;
    let dt = path.grid().dt();
    let mut state = initial.clone();
    for i in 0..path.n_steps() {
        let knot = path.knot_offset() + i;
        let psi =
            one_step_map(coeffs.drift(knot), coeffs.diffusion(knot), dt, path.increment(i)).map_err(|e| match e {
                Error::NonFinite(_) => Error::Blowup { step: i, component: 0 },
                other => other,
            })?;
        let next = psi.compose(&state)?;
        if let Some(component) = next.first_non_finite() {
            return Err(Error::Blowup { step: i, component });
        }
        state = visit(next);
    }
    Ok(state)
}

/// Solves the chain from `initial` along `path`, keeping every state.
pub fn solve_chain<C: Coefficients + ?Sized>(
    coeffs: &C,
    initial: &FormalMapping,
    path: &BrownianPath,
) -> Result<ChainSolution> {
    let mut states = Vec::with_capacity(path.n_steps() + 1);
    states.push(initial.clone());
    propagate(coeffs, initial, path, |s| {
        states.push(s.clone());
        s
    })?;
    Ok(ChainSolution {
        grid: path.grid().clone(),
        provenance: ChainProvenance {
            seed: path.seed(),
            path_index: path.path_index(),
            knot_offset: path.knot_offset(),
            coefficients: coeffs.fingerprint(),
        },
        initial: initial.clone(),
        states,
    })
}

/// Terminal state only.
pub fn solve_terminal<C: Coefficients + ?Sized>(
    coeffs: &C,
    initial: &FormalMapping,
    path: &BrownianPath,
) -> Result<FormalMapping> {
    propagate(coeffs, initial, path, |s| s)
}

/// Euler-Maruyama on the nonlinear equation `dy = a(y) dt + b(y) dw`, with
/// the coefficients evaluated as truncated power series.
pub fn simulate_direct<C: Coefficients + ?Sized>(coeffs: &C, y0: &[f64], path: &BrownianPath) -> Result<Vec<Vec<f64>>> {
    check_dim("initial point length", coeffs.dim(), y0.len())?;
    check_dim("path noise dimension", coeffs.noise_dim(), path.noise_dim())?;
    if let Some(n) = coeffs.knot_count() {
        if path.knot_offset() + path.n_steps() > n {
            return Err(domain("coefficient samples do not cover the path"));
        }
    }
    let dt = path.grid().dt();
    let mut out = Vec::with_capacity(path.n_steps() + 1);
    out.push(y0.to_vec());
    for i in 0..path.n_steps() {
        let knot = path.knot_offset() + i;
        let y = &out[i];
        let drift = coeffs.drift(knot).evaluate(y)?;
        let noise = coeffs.diffusion(knot).evaluate(y, path.increment(i))?;
        let next: Vec<f64> = y
            .iter()
            .zip(&drift)
            .zip(&noise)
            .map(|((y, a), b)| y + a * dt + b)
            .collect();
        if let Some(component) = next.iter().position(|x| !x.is_finite()) {
            return Err(Error::Blowup { step: i, component });
        }
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ConstantCoefficients;

    #[test]
    fn zero_step_is_identity() {
        let c = ConstantCoefficients::scalar(&[0.7, -0.2, 0.1], &[0.3, 0.5, 0.0]).unwrap();
        let psi = one_step_map(c.drift_mapping(), c.diffusion_family(), 0.0, &[0.0]).unwrap();
        assert_eq!(psi, FormalMapping::identity(3, 1).unwrap());
    }

    #[test]
    fn linear_scalar_step() {
        let alpha = 0.8;
        let dt = 0.125;
        let c = ConstantCoefficients::scalar(&[alpha], &[0.0]).unwrap();
        let psi = one_step_map(c.drift_mapping(), c.diffusion_family(), dt, &[0.3]).unwrap();
        assert_eq!(psi.scalar_coefficients().unwrap(), vec![1.0 + alpha * dt]);
    }

    #[test]
    fn quadratic_step_matches_explicit_update() {
        let (alpha, gamma, dt) = (0.9, -0.4, 0.01);
        let c = ConstantCoefficients::scalar(&[alpha, gamma], &[]).unwrap();
        let s = FormalMapping::from_scalar_coefficients(&[1.3, 0.2]).unwrap();
        let psi = one_step_map(c.drift_mapping(), c.diffusion_family(), dt, &[0.05]).unwrap();
        let next = psi.compose(&s).unwrap().scalar_coefficients().unwrap();
        let explicit = 0.2 + dt * (alpha * 0.2 + gamma * 1.3 * 1.3);
        assert!((next[1] - explicit).abs() <= 1e-15 * explicit.abs());
    }

    #[test]
    fn blowup_is_reported_with_step() {
        let c = ConstantCoefficients::scalar(&[1e200], &[0.0]).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 8).unwrap();
        let p = BrownianPath::zero(&g, 1).unwrap();
        let err = solve_chain(&c, &FormalMapping::identity(1, 1).unwrap(), &p).unwrap_err();
        assert!(matches!(err, Error::Blowup { component: 1, .. }), "{err:?}");
        let err = simulate_direct(&c, &[1.0], &p).unwrap_err();
        assert!(matches!(err, Error::Blowup { component: 0, .. }), "{err:?}");
    }

    #[test]
    fn shape_checks() {
        let c = ConstantCoefficients::zero(3, 2, 1).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 4).unwrap();
        let p = BrownianPath::zero(&g, 1).unwrap();
        assert!(solve_chain(&c, &FormalMapping::identity(2, 2).unwrap(), &p).is_err());
        assert!(solve_chain(&c, &FormalMapping::identity(3, 3).unwrap(), &p).is_err());
        let p2 = BrownianPath::zero(&g, 2).unwrap();
        assert!(solve_chain(&c, &FormalMapping::identity(3, 2).unwrap(), &p2).is_err());
        assert!(simulate_direct(&c, &[1.0], &p).is_err());
    }
}
