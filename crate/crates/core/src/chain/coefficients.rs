use serde::Serialize;

use crate::algebra::{DiffusionFamily, FormalMapping};
use crate::error::{check_dim, domain, Result};

/// Drift `a(t)` and diffusion `b(t)` coefficients sampled at grid knots.
///
/// `knot` is a global knot index; the solvers query the left endpoint of
/// every step.
pub trait Coefficients: Sync {
    fn order(&self) -> usize;
    fn dim(&self) -> usize;
    fn noise_dim(&self) -> usize;
    fn drift(&self, knot: usize) -> &FormalMapping;
    fn diffusion(&self, knot: usize) -> &DiffusionFamily;
    /// Number of knots with samples, `None` when every knot is valid.
    fn knot_count(&self) -> Option<usize> {
        None
    }
    /// Content hash recorded in solution provenance.
    fn fingerprint(&self) -> String;
}

fn check_pair(drift: &FormalMapping, diffusion: &DiffusionFamily) -> Result<()> {
    let d = drift.domain_dim();
    check_dim("drift codomain", d, drift.codomain_dim())?;
    check_dim("diffusion order", drift.order(), diffusion.order())?;
    check_dim("diffusion domain", d, diffusion.domain_dim())?;
    check_dim("diffusion codomain", d, diffusion.codomain_dim())
}

/// Coefficients that do not depend on time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantCoefficients {
    drift: FormalMapping,
    diffusion: DiffusionFamily,
}

impl ConstantCoefficients {
    pub fn new(drift: FormalMapping, diffusion: DiffusionFamily) -> Result<Self> {
        check_pair(&drift, &diffusion)?;
        Ok(Self { drift, diffusion })
    }

    /// Drift only; the diffusion is zero with `noise_dim` sources.
    pub fn deterministic(drift: FormalMapping, noise_dim: usize) -> Result<Self> {
        let diffusion = DiffusionFamily::zero(drift.order(), drift.domain_dim(), noise_dim)?;
        Self::new(drift, diffusion)
    }

    /// Scalar problem with one noise source.
    pub fn scalar(drift: &[f64], diffusion: &[f64]) -> Result<Self> {
        let n = drift.len().max(diffusion.len());
        let pad = |c: &[f64]| {
            let mut v = c.to_vec();
            v.resize(n, 0.0);
            v
        };
        Self::new(
            FormalMapping::from_scalar_coefficients(&pad(drift))?,
            DiffusionFamily::from_scalar_coefficients(&pad(diffusion))?,
        )
    }

    pub fn zero(order: usize, dim: usize, noise_dim: usize) -> Result<Self> {
        Self::new(
            FormalMapping::zero(order, dim, dim)?,
            DiffusionFamily::zero(order, dim, noise_dim)?,
        )
    }

    pub fn drift_mapping(&self) -> &FormalMapping {
        &self.drift
    }

    pub fn diffusion_family(&self) -> &DiffusionFamily {
        &self.diffusion
    }

    pub fn drift_mut(&mut self) -> &mut FormalMapping {
        &mut self.drift
    }

    pub fn diffusion_mut(&mut self) -> &mut DiffusionFamily {
        &mut self.diffusion
    }
}

impl Coefficients for ConstantCoefficients {
    fn order(&self) -> usize {
        self.drift.order()
    }
    fn dim(&self) -> usize {
        self.drift.domain_dim()
    }
    fn noise_dim(&self) -> usize {
        self.diffusion.noise_dim()
    }
    fn drift(&self, _knot: usize) -> &FormalMapping {
        &self.drift
    }
    fn diffusion(&self, _knot: usize) -> &DiffusionFamily {
        &self.diffusion
    }
    fn fingerprint(&self) -> String {
        crate::fingerprint(self)
    }
}

/// Time-dependent coefficients given by one sample per knot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCoefficients {
    drift: Vec<FormalMapping>,
    diffusion: Vec<DiffusionFamily>,
}

impl SampledCoefficients {
    pub fn new(drift: Vec<FormalMapping>, diffusion: Vec<DiffusionFamily>) -> Result<Self> {
        check_dim("diffusion sample count", drift.len(), diffusion.len())?;
        let first = drift.first().ok_or_else(|| domain("no coefficient samples"))?;
        let (order, d, m) = (first.order(), first.domain_dim(), diffusion[0].noise_dim());
        for (a, b) in drift.iter().zip(&diffusion) {
            check_pair(a, b)?;
            check_dim("sample order", order, a.order())?;
            check_dim("sample dimension", d, a.domain_dim())?;
            check_dim("sample noise dimension", m, b.noise_dim())?;
        }
        Ok(Self { drift, diffusion })
    }

    /// Samples `f(t_i)` at every knot of `grid`.
    pub fn from_fn(
        grid: &super::TimeGrid,
        mut f: impl FnMut(f64) -> Result<(FormalMapping, DiffusionFamily)>,
    ) -> Result<Self> {
        let (drift, diffusion) = grid
            .knots()
            .into_iter()
            .map(&mut f)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Self::new(drift, diffusion)
    }
}

impl Coefficients for SampledCoefficients {
    fn order(&self) -> usize {
        self.drift[0].order()
    }
    fn dim(&self) -> usize {
        self.drift[0].domain_dim()
    }
    fn noise_dim(&self) -> usize {
        self.diffusion[0].noise_dim()
    }
    fn drift(&self, knot: usize) -> &FormalMapping {
        &self.drift[knot]
    }
    fn diffusion(&self, knot: usize) -> &DiffusionFamily {
        &self.diffusion[knot]
    }
    fn knot_count(&self) -> Option<usize> {
        Some(self.drift.len())
    }
    fn fingerprint(&self) -> String {
        crate::fingerprint(self)
    }
}
