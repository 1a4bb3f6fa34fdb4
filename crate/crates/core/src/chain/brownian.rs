//! Discretized Wiener paths.
//!
//! Every path is drawn from its own ChaCha8 stream: the key is `seed` and
//! the stream id is `path_index`, so path `p` is the same no matter how many
//! other paths are generated or in which order. Standard normals come from
//! the Box-Muller transform on pairs of 53-bit uniforms
//!
//! ```text
//! u1 = 1 - (x1 >> 11) * 2^-53,  u2 = (x2 >> 11) * 2^-53
//! z1 = sqrt(-2 ln u1) cos(2 pi u2),  z2 = sqrt(-2 ln u1) sin(2 pi u2)
//! ```
//!
//! consumed in order (step-major, noise coordinate minor). Increments are
//! `sqrt(dt) * z`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::TimeGrid;
use crate::algebra::check_finite;
use crate::error::{check_dim, domain, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianPath {
    grid: TimeGrid,
    noise_dim: usize,
    /// Flat `n_steps x noise_dim`.
    increments: Vec<f64>,
    seed: Option<u64>,
    path_index: u64,
    /// Global index of the first knot, used to look up time-dependent coefficients.
    knot_offset: usize,
}

struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// `n` standard normals from stream `(seed, stream)`.
pub fn standard_normals(seed: u64, stream: u64, n: usize) -> Vec<f64> {
    let mut g = GaussianStream::new(seed, stream);
    (0..n).map(|_| g.next()).collect()
}

impl BrownianPath {
    /// Samples `n_steps` i.i.d. `N(0, dt I_m)` increments.
    pub fn sample(grid: &TimeGrid, noise_dim: usize, seed: u64, path_index: u64) -> Result<Self> {
        if noise_dim == 0 {
            return Err(domain("noise dimension must be positive"));
        }
        let sd = grid.dt().sqrt();
        let increments = standard_normals(seed, path_index, grid.n_steps() * noise_dim)
            .into_iter()
            .map(|z| sd * z)
            .collect();
        Ok(Self {
            grid: grid.clone(),
            noise_dim,
            increments,
            seed: Some(seed),
            path_index,
            knot_offset: 0,
        })
    }

    /// Path with the given flat `n_steps x noise_dim` increments.
    pub fn from_increments(grid: &TimeGrid, noise_dim: usize, increments: Vec<f64>) -> Result<Self> {
        if noise_dim == 0 {
            return Err(domain("noise dimension must be positive"));
        }
        check_dim("increment count", grid.n_steps() * noise_dim, increments.len())?;
        check_finite(&increments, "Brownian increments")?;
        Ok(Self {
            grid: grid.clone(),
            noise_dim,
            increments,
            seed: None,
            path_index: 0,
            knot_offset: 0,
        })
    }

    /// All increments zero; drives deterministic runs.
    pub fn zero(grid: &TimeGrid, noise_dim: usize) -> Result<Self> {
        Self::from_increments(grid, noise_dim, vec![0.0; grid.n_steps() * noise_dim])
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn n_steps(&self) -> usize {
        self.grid.n_steps()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn path_index(&self) -> u64 {
        self.path_index
    }

    pub fn knot_offset(&self) -> usize {
        self.knot_offset
    }

    /// Increment over step `i`, i.e. `w(t_{i+1}) - w(t_i)`.
    pub fn increment(&self, i: usize) -> &[f64] {
        &self.increments[i * self.noise_dim..(i + 1) * self.noise_dim]
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// `w(end) - w(start)`, summed step by step.
    pub fn total(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.noise_dim];
        for i in 0..self.n_steps() {
            for (a, b) in w.iter_mut().zip(self.increment(i)) {
                *a += b;
            }
        }
        w
    }

    /// The part of the path between knots `from` and `to`.
    pub fn window(&self, from: usize, to: usize) -> Result<BrownianPath> {
        let grid = self.grid.window(from, to)?;
        Ok(BrownianPath {
            grid,
            noise_dim: self.noise_dim,
            increments: self.increments[from * self.noise_dim..to * self.noise_dim].to_vec(),
            seed: self.seed,
            path_index: self.path_index,
            knot_offset: self.knot_offset + from,
        })
    }

    /// Same path on a grid `factor` times coarser: each coarse increment is
    /// the in-order sum of `factor` fine ones.
    pub fn coarsen(&self, factor: usize) -> Result<BrownianPath> {
        let grid = self.grid.coarsen(factor)?;
        let m = self.noise_dim;
        let mut increments = vec![0.0; grid.n_steps() * m];
        for (i, chunk) in increments.chunks_mut(m).enumerate() {
            for s in i * factor..(i + 1) * factor {
                for (a, b) in chunk.iter_mut().zip(self.increment(s)) {
                    *a += b;
                }
            }
        }
        Ok(BrownianPath {
            grid,
            noise_dim: m,
            increments,
            seed: self.seed,
            path_index: self.path_index,
            knot_offset: 0,
        })
    }
}
