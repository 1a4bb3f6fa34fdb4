//! Ordered compositions of an integer, the index set of the composition sum.

use serde::Serialize;

use crate::error::{domain, Result};

/// An ordered tuple of `k` positive parts summing to `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CompositionIndex {
    pub n: usize,
    pub k: usize,
    pub parts: Vec<usize>,
}

/// All compositions of `n` into exactly `k` positive parts, in lexicographic
/// order. There are `C(n-1, k-1)` of them.
pub fn enumerate_compositions(n: usize, k: usize) -> Result<Vec<CompositionIndex>> {
    if n < 1 || k < 1 || k > n {
        return Err(domain(format!("compositions need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    let mut out = Vec::new();
    let mut parts = Vec::with_capacity(k);
    fill(n, k, &mut parts, &mut out, n, k);
    Ok(out)
}

fn fill(remaining: usize, slots: usize, parts: &mut Vec<usize>, out: &mut Vec<CompositionIndex>, n: usize, k: usize) {
    if slots == 1 {
        parts.push(remaining);
        out.push(CompositionIndex {
            n,
            k,
            parts: parts.clone(),
        });
        parts.pop();
        return;
    }
    // each of the later slots needs at least one
    for j in 1..=remaining - (slots - 1) {
        parts.push(j);
        fill(remaining - j, slots - 1, parts, out, n, k);
        parts.pop();
    }
}

/// Binomial coefficient, small arguments only.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
