//! Dense multilinear maps and the contraction kernels behind composition.
//!
//! A degree-`k` map `T: Y^k -> Z` is stored as one flat row-major array of
//! shape `dz x dy x ... x dy` (`k` argument axes). The output index varies
//! slowest and the argument indices follow in argument order, so the entry
//! `T[z; i_1, ..., i_k]` lives at
//!
//! ```text
//! ((z * dy + i_1) * dy + i_2) ... * dy + i_k
//! ```
//!
//! A [`DiffusionMap`] has one extra noise axis of length `m`, stored last
//! (fastest varying): `T[z; i_1, ..., i_k; r]`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};

/// A `k`-linear map `Y^k -> Z` stored densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorLiteral", into = "TensorLiteral")]
pub struct MultilinearMap {
    degree: usize,
    dy: usize,
    dz: usize,
    entries: Vec<f64>,
}

/// JSON form of a [`MultilinearMap`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorLiteral {
    pub degree: usize,
    pub dy: usize,
    pub dz: usize,
    pub entries: Vec<f64>,
}

impl TryFrom<TensorLiteral> for MultilinearMap {
    type Error = Error;
    fn try_from(lit: TensorLiteral) -> Result<Self> {
        MultilinearMap::new(lit.degree, lit.dy, lit.dz, lit.entries)
    }
}

impl From<MultilinearMap> for TensorLiteral {
    fn from(m: MultilinearMap) -> Self {
        TensorLiteral {
            degree: m.degree,
            dy: m.dy,
            dz: m.dz,
            entries: m.entries,
        }
    }
}

pub(crate) fn check_finite(entries: &[f64], what: &str) -> Result<()> {
    if entries.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn check_shape(degree: usize, dy: usize, dz: usize) -> Result<()> {
    if degree == 0 || dy == 0 || dz == 0 {
        return Err(domain(format!(
            "degree and dimensions must be positive (degree {degree}, dy {dy}, dz {dz})"
        )));
    }
    Ok(())
}

impl MultilinearMap {
    pub fn new(degree: usize, dy: usize, dz: usize, entries: Vec<f64>) -> Result<Self> {
        check_shape(degree, dy, dz)?;
        check_dim("tensor entry count", dz * dy.pow(degree as u32), entries.len())?;
        check_finite(&entries, "tensor entries")?;
        Ok(Self {
            degree,
            dy,
            dz,
            entries,
        })
    }

    pub fn zeros(degree: usize, dy: usize, dz: usize) -> Result<Self> {
        check_shape(degree, dy, dz)?;
        Ok(Self {
            degree,
            dy,
            dz,
            entries: vec![0.0; dz * dy.pow(degree as u32)],
        })
    }

    /// The `d x d` identity as a degree-1 map.
    pub fn identity(d: usize) -> Result<Self> {
        let mut m = Self::zeros(1, d, d)?;
        for i in 0..d {
            m.entries[i * d + i] = 1.0;
        }
        Ok(m)
    }

    /// Degree-1 map from a row-major `dz x dy` matrix.
    pub fn from_matrix(dz: usize, dy: usize, entries: Vec<f64>) -> Result<Self> {
        Self::new(1, dy, dz, entries)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn domain_dim(&self) -> usize {
        self.dy
    }

    pub fn codomain_dim(&self) -> usize {
        self.dz
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.entries)
    }

    /// Entry `T[z; idx]`.
    pub fn get(&self, z: usize, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.degree);
        let flat = idx.iter().fold(z, |acc, &i| acc * self.dy + i);
        self.entries[flat]
    }

    pub(crate) fn from_raw(degree: usize, dy: usize, dz: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), dz * dy.pow(degree as u32));
        Self {
            degree,
            dy,
            dz,
            entries,
        }
    }

    /// Value on `k` argument vectors `T(y_1, ..., y_k)`.
    pub fn apply(&self, args: &[&[f64]]) -> Result<Vec<f64>> {
        check_dim("argument count", self.degree, args.len())?;
        let mut t = self.entries.clone();
        for (i, y) in args.iter().enumerate() {
            check_dim("argument length", self.dy, y.len())?;
            let rest = self.dy.pow((self.degree - i - 1) as u32);
            t = contract_slot(&t, self.dz, 1, self.dy, rest, y, 1);
        }
        Ok(t)
    }

    /// `T(y, ..., y)`.
    pub fn apply_diagonal(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim("argument length", self.dy, y.len())?;
        Ok(diagonal(&self.entries, self.dz, self.dy, self.degree, y))
    }

    /// Contracts argument slot `i` with the output of `args[i]`, distributing
    /// the `n = sum j_i` new inputs in order. The result is the `n`-linear map
    /// `(x_1..x_n) -> T(a_1(x_1..x_{j_1}), ..., a_k(..., x_n))`.
    pub fn apply_to_tuple(&self, args: &[&MultilinearMap]) -> Result<MultilinearMap> {
        let (dx, n) = check_tuple(self.degree, self.dy, args)?;
        let t = contract_tuple(&self.entries, self.dz, self.dy, 1, args);
        Ok(MultilinearMap::from_raw(n, dx, self.dz, t))
    }

    /// Averages over all permutations of the argument slots.
    pub fn symmetrize(&self) -> MultilinearMap {
        let entries = symmetrize_entries(&self.entries, self.dz, self.dy, self.degree, 1);
        MultilinearMap::from_raw(self.degree, self.dy, self.dz, entries)
    }

    pub fn add(&self, other: &MultilinearMap) -> Result<MultilinearMap> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(MultilinearMap::from_raw(self.degree, self.dy, self.dz, entries))
    }

    pub fn scale(&self, c: f64) -> MultilinearMap {
        let entries = self.entries.iter().map(|a| a * c).collect();
        MultilinearMap::from_raw(self.degree, self.dy, self.dz, entries)
    }

    /// `M . T` for a row-major `rows x dz` matrix acting on the output index.
    pub fn left_multiply(&self, matrix: &[f64], rows: usize) -> Result<MultilinearMap> {
        check_dim("matrix entry count", rows * self.dz, matrix.len())?;
        let entries = left_multiply(matrix, rows, self.dz, &self.entries);
        Ok(MultilinearMap::from_raw(self.degree, self.dy, rows, entries))
    }

    pub(crate) fn check_same_shape(&self, other: &MultilinearMap) -> Result<()> {
        check_dim("degree", self.degree, other.degree)?;
        check_dim("domain dimension", self.dy, other.dy)?;
        check_dim("codomain dimension", self.dz, other.dz)
    }
}

/// A degree-`k` diffusion coefficient `Y^k x H -> Z` with noise axis of
/// length `m` stored last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiffusionLiteral", into = "DiffusionLiteral")]
pub struct DiffusionMap {
    degree: usize,
    dy: usize,
    dz: usize,
    m: usize,
    entries: Vec<f64>,
}

/// JSON form of a [`DiffusionMap`]: the tensor literal plus the noise length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffusionLiteral {
    pub degree: usize,
    pub dy: usize,
    pub dz: usize,
    pub m: usize,
    pub entries: Vec<f64>,
}

impl TryFrom<DiffusionLiteral> for DiffusionMap {
    type Error = Error;
    fn try_from(lit: DiffusionLiteral) -> Result<Self> {
        DiffusionMap::new(lit.degree, lit.dy, lit.dz, lit.m, lit.entries)
    }
}

impl From<DiffusionMap> for DiffusionLiteral {
    fn from(m: DiffusionMap) -> Self {
        DiffusionLiteral {
            degree: m.degree,
            dy: m.dy,
            dz: m.dz,
            m: m.m,
            entries: m.entries,
        }
    }
}

impl DiffusionMap {
    pub fn new(degree: usize, dy: usize, dz: usize, m: usize, entries: Vec<f64>) -> Result<Self> {
        check_shape(degree, dy, dz)?;
        if m == 0 {
            return Err(domain("noise dimension must be positive"));
        }
        check_dim("diffusion entry count", dz * dy.pow(degree as u32) * m, entries.len())?;
        check_finite(&entries, "diffusion entries")?;
        Ok(Self {
            degree,
            dy,
            dz,
            m,
            entries,
        })
    }

    pub fn zeros(degree: usize, dy: usize, dz: usize, m: usize) -> Result<Self> {
        Self::new(degree, dy, dz, m, vec![0.0; dz * dy.pow(degree as u32) * m])
    }

    pub fn degree(&self) -> usize {
        self.degree
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

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.entries)
    }

    pub(crate) fn from_raw(degree: usize, dy: usize, dz: usize, m: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), dz * dy.pow(degree as u32) * m);
        Self {
            degree,
            dy,
            dz,
            m,
            entries,
        }
    }

    /// `T(., ..., ., dw)`: the noise slot contracted with an increment.
    pub fn contract_noise(&self, dw: &[f64]) -> Result<MultilinearMap> {
        check_dim("noise increment length", self.m, dw.len())?;
        let rows = self.entries.len() / self.m;
        let entries = (0..rows)
            .map(|row| {
                let slice = &self.entries[row * self.m..(row + 1) * self.m];
                slice.iter().zip(dw).fold(0.0, |acc, (t, w)| acc + t * w)
            })
            .collect();
        Ok(MultilinearMap::from_raw(self.degree, self.dy, self.dz, entries))
    }

    /// Same as [`MultilinearMap::apply_to_tuple`]; the noise slot is carried
    /// through untouched.
    pub fn apply_to_tuple(&self, args: &[&MultilinearMap]) -> Result<DiffusionMap> {
        let (dx, n) = check_tuple(self.degree, self.dy, args)?;
        let t = contract_tuple(&self.entries, self.dz, self.dy, self.m, args);
        Ok(DiffusionMap::from_raw(n, dx, self.dz, self.m, t))
    }

    pub fn add(&self, other: &DiffusionMap) -> Result<DiffusionMap> {
        check_dim("degree", self.degree, other.degree)?;
        check_dim("domain dimension", self.dy, other.dy)?;
        check_dim("codomain dimension", self.dz, other.dz)?;
        check_dim("noise dimension", self.m, other.m)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(DiffusionMap::from_raw(self.degree, self.dy, self.dz, self.m, entries))
    }

    pub fn scale(&self, c: f64) -> DiffusionMap {
        let entries = self.entries.iter().map(|a| a * c).collect();
        DiffusionMap::from_raw(self.degree, self.dy, self.dz, self.m, entries)
    }
}

fn check_tuple(degree: usize, dy: usize, args: &[&MultilinearMap]) -> Result<(usize, usize)> {
    check_dim("argument count", degree, args.len())?;
    let dx = args[0].dy;
    for a in args {
        check_dim("argument codomain", dy, a.dz)?;
        check_dim("argument domain", dx, a.dy)?;
    }
    Ok((dx, args.iter().map(|a| a.degree).sum()))
}

/// Contracts all argument slots of `t` (shape `dz x dy^k x trailing`) with
/// `args` in order.
fn contract_tuple(t: &[f64], dz: usize, dy: usize, trailing: usize, args: &[&MultilinearMap]) -> Vec<f64> {
    let k = args.len();
    let mut t = t.to_vec();
    let mut prefix = 1;
    for (i, a) in args.iter().enumerate() {
        let rest = dy.pow((k - i - 1) as u32) * trailing;
        let q = a.dy.pow(a.degree as u32);
        t = contract_slot(&t, dz, prefix, dy, rest, &a.entries, q);
        prefix *= q;
    }
    t
}

/// Core kernel. `t` has layout `[outer][prefix][dy][rest]`, `a` has layout
/// `[dy][q]`; returns `[outer][prefix][q][rest]` with
/// `out[z,p,j,r] = sum_y t[z,p,y,r] * a[y,j]`, summed in increasing `y`.
pub(crate) fn contract_slot(
    t: &[f64],
    outer: usize,
    prefix: usize,
    dy: usize,
    rest: usize,
    a: &[f64],
    q: usize,
) -> Vec<f64> {
    debug_assert_eq!(t.len(), outer * prefix * dy * rest);
    debug_assert_eq!(a.len(), dy * q);
    let mut out = vec![0.0; outer * prefix * q * rest];
    for zp in 0..outer * prefix {
        for y in 0..dy {
            let src = &t[(zp * dy + y) * rest..(zp * dy + y + 1) * rest];
            for j in 0..q {
                let c = a[y * q + j];
                if c == 0.0 {
                    continue;
                }
                let dst = &mut out[(zp * q + j) * rest..(zp * q + j + 1) * rest];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
    }
    out
}

/// `T(y, ..., y)` for a flat `dz x dy^k` tensor.
pub(crate) fn diagonal(t: &[f64], dz: usize, dy: usize, degree: usize, y: &[f64]) -> Vec<f64> {
    let mut t = t.to_vec();
    for i in 0..degree {
        let rest = dy.pow((degree - i - 1) as u32);
        t = contract_slot(&t, dz, 1, dy, rest, y, 1);
    }
    t
}

pub(crate) fn left_multiply(matrix: &[f64], rows: usize, inner: usize, t: &[f64]) -> Vec<f64> {
    let cols = t.len() / inner;
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        let dst = &mut out[r * cols..(r + 1) * cols];
        for i in 0..inner {
            let c = matrix[r * inner + i];
            if c == 0.0 {
                continue;
            }
            for (d, s) in dst.iter_mut().zip(&t[i * cols..(i + 1) * cols]) {
                *d += c * s;
            }
        }
    }
    out
}

pub(crate) fn frobenius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn symmetrize_entries(t: &[f64], dz: usize, dy: usize, degree: usize, trailing: usize) -> Vec<f64> {
    use itertools::Itertools;

    if degree == 1 {
        return t.to_vec();
    }
    let perms: Vec<Vec<usize>> = (0..degree).permutations(degree).collect();
    let weight = 1.0 / perms.len() as f64;
    let block = dy.pow(degree as u32);
    let mut out = vec![0.0; t.len()];
    let mut idx = vec![0usize; degree];
    for flat in 0..block {
        let mut rem = flat;
        for slot in (0..degree).rev() {
            idx[slot] = rem % dy;
            rem /= dy;
        }
        for z in 0..dz {
            for r in 0..trailing {
                let sum: f64 = perms
                    .iter()
                    .map(|p| {
                        let src = p.iter().fold(0, |acc, &s| acc * dy + idx[s]);
                        t[(z * block + src) * trailing + r]
                    })
                    .sum();
                out[(z * block + flat) * trailing + r] = sum * weight;
            }
        }
    }
    out
}

/// Accumulates `sum_{k in degrees} sum_{j_1+..+j_k = n} b_k(a_{j_1}, .., a_{j_k})`
/// for every `n` in `1..=max_n`.
///
/// Partial contractions are shared between all index tuples with a common
/// prefix: the tuples are walked depth first, so `b_k(a_{j_1}, .., a_{j_i}, ...)`
/// is computed once per prefix `(j_1, .., j_i)`. Leaves are visited in
/// increasing `k` and, for fixed `k`, in lexicographic order of the parts, which
/// fixes the summation order of every output component.
pub(crate) struct CompositionSum<'a> {
    dz: usize,
    dy: usize,
    dx: usize,
    trailing: usize,
    max_n: usize,
    /// `inner[j - 1]` is the degree-`j` component; `None` marks zero.
    inner: Vec<Option<&'a [f64]>>,
    acc: Vec<Vec<f64>>,
}

impl<'a> CompositionSum<'a> {
    pub(crate) fn new(
        dz: usize,
        dy: usize,
        dx: usize,
        trailing: usize,
        max_n: usize,
        inner: &'a [MultilinearMap],
    ) -> Self {
        let inner = inner
            .iter()
            .take(max_n)
            .map(|m| (!m.is_zero()).then_some(m.entries.as_slice()))
            .collect();
        let acc = (1..=max_n)
            .map(|n| vec![0.0; dz * dx.pow(n as u32) * trailing])
            .collect();
        Self {
            dz,
            dy,
            dx,
            trailing,
            max_n,
            inner,
            acc,
        }
    }

    /// Adds the contributions of the degree-`k` outer component.
    pub(crate) fn add_degree(&mut self, k: usize, outer: &[f64]) {
        if k > self.max_n || outer.iter().all(|&x| x == 0.0) {
            return;
        }
        self.descend(outer, k, 0, 0);
    }

    fn descend(&mut self, t: &[f64], k: usize, filled: usize, sum: usize) {
        if filled == k {
            for (d, s) in self.acc[sum - 1].iter_mut().zip(t) {
                *d += s;
            }
            return;
        }
        let remaining = k - filled - 1;
        let max_j = (self.max_n - sum - remaining).min(self.inner.len());
        for j in 1..=max_j {
            let Some(a) = self.inner[j - 1] else { continue };
            let rest = self.dy.pow(remaining as u32) * self.trailing;
            let prefix = self.dx.pow(sum as u32);
            let q = self.dx.pow(j as u32);
            let next = contract_slot(t, self.dz, prefix, self.dy, rest, a, q);
            self.descend(&next, k, filled + 1, sum + j);
        }
    }

    pub(crate) fn finish(self) -> Vec<Vec<f64>> {
        self.acc
    }
}
