//! Truncated formal mappings: finite sequences of `k`-linear maps.

use serde::{Deserialize, Serialize};

use super::tensor::{frobenius, CompositionSum, DiffusionMap, MultilinearMap};
use crate::error::{check_dim, domain, Error, Result};

/// A formal mapping `Y -> Z` truncated at order `N`: components of degrees
/// `1..=N`, all with the same domain and codomain dimensions. There is no
/// constant term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormalLiteral", into = "FormalLiteral")]
pub struct FormalMapping {
    dy: usize,
    dz: usize,
    components: Vec<MultilinearMap>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormalLiteral {
    pub order: usize,
    pub components: Vec<MultilinearMap>,
}

impl TryFrom<FormalLiteral> for FormalMapping {
    type Error = Error;
    fn try_from(lit: FormalLiteral) -> Result<Self> {
        check_dim("order vs component count", lit.order, lit.components.len())?;
        FormalMapping::new(lit.components)
    }
}

impl From<FormalMapping> for FormalLiteral {
    fn from(f: FormalMapping) -> Self {
        FormalLiteral {
            order: f.components.len(),
            components: f.components,
        }
    }
}

impl FormalMapping {
    /// Builds a mapping from its components; component `i` must have degree `i + 1`.
    pub fn new(components: Vec<MultilinearMap>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| domain("a formal mapping needs at least one component"))?;
        let (dy, dz) = (first.domain_dim(), first.codomain_dim());
        for (i, c) in components.iter().enumerate() {
            check_dim("component degree", i + 1, c.degree())?;
            check_dim("component domain dimension", dy, c.domain_dim())?;
            check_dim("component codomain dimension", dz, c.codomain_dim())?;
        }
        Ok(Self { dy, dz, components })
    }

    pub fn zero(order: usize, dy: usize, dz: usize) -> Result<Self> {
        if order == 0 {
            return Err(domain("order must be positive"));
        }
        let components = (1..=order)
            .map(|k| MultilinearMap::zeros(k, dy, dz))
            .collect::<Result<_>>()?;
        Ok(Self { dy, dz, components })
    }

    /// The identical mapping: identity matrix in degree 1, zero above.
    pub fn identity(order: usize, d: usize) -> Result<Self> {
        let mut id = Self::zero(order, d, d)?;
        id.components[0] = MultilinearMap::identity(d)?;
        Ok(id)
    }

    /// Scalar mapping `y -> c_1 y + c_2 y^2 + ...`.
    pub fn from_scalar_coefficients(coeffs: &[f64]) -> Result<Self> {
        let components = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| MultilinearMap::new(i + 1, 1, 1, vec![c]))
            .collect::<Result<_>>()?;
        Self::new(components)
    }

    /// Inverse of [`Self::from_scalar_coefficients`].
    pub fn scalar_coefficients(&self) -> Result<Vec<f64>> {
        if self.dy != 1 || self.dz != 1 {
            return Err(domain("scalar coefficients need dy = dz = 1"));
        }
        Ok(self.components.iter().map(|c| c.entries()[0]).collect())
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }

    pub fn domain_dim(&self) -> usize {
        self.dy
    }

    pub fn codomain_dim(&self) -> usize {
        self.dz
    }

    pub fn components(&self) -> &[MultilinearMap] {
        &self.components
    }

    /// Component of degree `k` (1-based).
    pub fn component(&self, k: usize) -> &MultilinearMap {
        &self.components[k - 1]
    }

    pub fn set_component(&mut self, map: MultilinearMap) -> Result<()> {
        let k = map.degree();
        if k == 0 || k > self.order() {
            return Err(domain(format!("degree {k} outside 1..={}", self.order())));
        }
        self.components[k - 1].check_same_shape(&map)?;
        self.components[k - 1] = map;
        Ok(())
    }

    /// Keeps components of degree `<= order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order() {
            return Err(domain(format!("cannot truncate order {} to {order}", self.order())));
        }
        Self::new(self.components[..order].to_vec())
    }

    /// Pads with zero components up to `order`.
    pub fn pad(&self, order: usize) -> Result<Self> {
        let mut components = self.components.clone();
        for k in self.order() + 1..=order {
            components.push(MultilinearMap::zeros(k, self.dy, self.dz)?);
        }
        Self::new(components)
    }

    /// `self o inner`. The result has order `min(self.order, inner.order)`;
    /// component `n` is `sum_k sum_{j_1+..+j_k=n} self_k(inner_{j_1}, .., inner_{j_k})`.
    pub fn compose(&self, inner: &FormalMapping) -> Result<FormalMapping> {
        check_dim("inner codomain vs outer domain", self.dy, inner.dz)?;
        let order = self.order().min(inner.order());
        let mut sum = CompositionSum::new(self.dz, self.dy, inner.dy, 1, order, &inner.components);
        for (i, c) in self.components.iter().take(order).enumerate() {
            sum.add_degree(i + 1, c.entries());
        }
        let components = sum
            .finish()
            .into_iter()
            .enumerate()
            .map(|(i, e)| MultilinearMap::from_raw(i + 1, inner.dy, self.dz, e))
            .collect();
        Ok(FormalMapping {
            dy: inner.dy,
            dz: self.dz,
            components,
        })
    }

    /// Truncated sum `a_1(y) + a_2(y, y) + ... + a_N(y, .., y)`.
    pub fn evaluate(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim("evaluation point length", self.dy, y.len())?;
        let mut out = vec![0.0; self.dz];
        for c in &self.components {
            for (o, v) in out.iter_mut().zip(c.apply_diagonal(y)?) {
                *o += v;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &FormalMapping) -> Result<FormalMapping> {
        check_dim("order", self.order(), other.order())?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Self::new(components)
    }

    pub fn scale(&self, c: f64) -> FormalMapping {
        FormalMapping {
            dy: self.dy,
            dz: self.dz,
            components: self.components.iter().map(|m| m.scale(c)).collect(),
        }
    }

    pub fn symmetrize(&self) -> FormalMapping {
        FormalMapping {
            dy: self.dy,
            dz: self.dz,
            components: self.components.iter().map(|m| m.symmetrize()).collect(),
        }
    }

    pub fn component_norms(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.frobenius_norm()).collect()
    }

    /// First degree (1-based) holding a non-finite entry.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.entries().iter().any(|x| !x.is_finite()))
            .map(|i| i + 1)
    }

    /// Per-component `||self_n - reference_n||_F / ||reference_n||_F`, falling
    /// back to the absolute difference when the reference component is zero.
    pub fn relative_discrepancy(&self, reference: &FormalMapping) -> Result<Vec<f64>> {
        check_dim("order", reference.order(), self.order())?;
        self.components
            .iter()
            .zip(&reference.components)
            .map(|(a, b)| {
                a.check_same_shape(b)?;
                Ok(relative_gap(a.entries(), b.entries()))
            })
            .collect()
    }
}

pub(crate) fn relative_gap(a: &[f64], reference: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(reference).map(|(x, y)| x - y).collect();
    let d = frobenius(&diff);
    let r = frobenius(reference);
    if r > 0.0 {
        d / r
    } else {
        d
    }
}

/// The diffusion coefficients `b_k: Y^k x H -> Z` of degrees `1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiffusionFamilyLiteral", into = "DiffusionFamilyLiteral")]
pub struct DiffusionFamily {
    dy: usize,
    dz: usize,
    m: usize,
    components: Vec<DiffusionMap>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffusionFamilyLiteral {
    pub order: usize,
    pub components: Vec<DiffusionMap>,
}

impl TryFrom<DiffusionFamilyLiteral> for DiffusionFamily {
    type Error = Error;
    fn try_from(lit: DiffusionFamilyLiteral) -> Result<Self> {
        check_dim("order vs component count", lit.order, lit.components.len())?;
        DiffusionFamily::new(lit.components)
    }
}

impl From<DiffusionFamily> for DiffusionFamilyLiteral {
    fn from(f: DiffusionFamily) -> Self {
        DiffusionFamilyLiteral {
            order: f.components.len(),
            components: f.components,
        }
    }
}

impl DiffusionFamily {
    pub fn new(components: Vec<DiffusionMap>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| domain("a diffusion family needs at least one component"))?;
        let (dy, dz, m) = (first.domain_dim(), first.codomain_dim(), first.noise_dim());
        for (i, c) in components.iter().enumerate() {
            check_dim("diffusion component degree", i + 1, c.degree())?;
            check_dim("diffusion domain dimension", dy, c.domain_dim())?;
            check_dim("diffusion codomain dimension", dz, c.codomain_dim())?;
            check_dim("diffusion noise dimension", m, c.noise_dim())?;
        }
        Ok(Self { dy, dz, m, components })
    }

    pub fn zero(order: usize, d: usize, m: usize) -> Result<Self> {
        if order == 0 {
            return Err(domain("order must be positive"));
        }
        let components = (1..=order)
            .map(|k| DiffusionMap::zeros(k, d, d, m))
            .collect::<Result<_>>()?;
        Self::new(components)
    }

    /// Scalar family with one noise source: `b_k = coeffs[k - 1]`.
    pub fn from_scalar_coefficients(coeffs: &[f64]) -> Result<Self> {
        let components = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| DiffusionMap::new(i + 1, 1, 1, 1, vec![c]))
            .collect::<Result<_>>()?;
        Self::new(components)
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }

    pub fn domain_dim(&self) -> usize {
        self.dy
    }

    pub fn codomain_dim(&self) -> usize {
        self.dz
    }

    pub fn noise_dim(&self) -> usize {
        self.m
    }

    pub fn components(&self) -> &[DiffusionMap] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &DiffusionMap {
        &self.components[k - 1]
    }

    pub fn set_component(&mut self, map: DiffusionMap) -> Result<()> {
        let k = map.degree();
        if k == 0 || k > self.order() {
            return Err(domain(format!("degree {k} outside 1..={}", self.order())));
        }
        let old = &self.components[k - 1];
        check_dim("domain dimension", old.domain_dim(), map.domain_dim())?;
        check_dim("codomain dimension", old.codomain_dim(), map.codomain_dim())?;
        check_dim("noise dimension", old.noise_dim(), map.noise_dim())?;
        self.components[k - 1] = map;
        Ok(())
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order() {
            return Err(domain(format!("cannot truncate order {} to {order}", self.order())));
        }
        Self::new(self.components[..order].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// `b(y)(dw) = sum_k b_k(y, .., y, dw)`.
    pub fn evaluate(&self, y: &[f64], dw: &[f64]) -> Result<Vec<f64>> {
        check_dim("evaluation point length", self.dy, y.len())?;
        let mut out = vec![0.0; self.dz];
        for c in &self.components {
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(c.contract_noise(dw)?.apply_diagonal(y)?) {
                *o += v;
            }
        }
        Ok(out)
    }
}
