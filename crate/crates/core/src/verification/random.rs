use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{DiffusionFamily, DiffusionMap, FormalMapping, MultilinearMap};
use crate::chain::ConstantCoefficients;
use crate::error::Result;

fn uniform_entries<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect()
}

/// Formal mapping with entries uniform in `[-scale, scale]`.
pub fn random_mapping<R: Rng>(rng: &mut R, order: usize, dy: usize, dz: usize, scale: f64) -> Result<FormalMapping> {
    let components = (1..=order)
        .map(|k| MultilinearMap::new(k, dy, dz, uniform_entries(rng, dz * dy.pow(k as u32), scale)))
        .collect::<Result<_>>()?;
    FormalMapping::new(components)
}

pub fn random_diffusion<R: Rng>(rng: &mut R, order: usize, d: usize, m: usize, scale: f64) -> Result<DiffusionFamily> {
    let components = (1..=order)
        .map(|k| DiffusionMap::new(k, d, d, m, uniform_entries(rng, d * d.pow(k as u32) * m, scale)))
        .collect::<Result<_>>()?;
    DiffusionFamily::new(components)
}

/// Constant coefficients with uniform random entries, reproducible from `seed`.
pub fn random_coefficients(order: usize, d: usize, m: usize, scale: f64, seed: u64) -> Result<ConstantCoefficients> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drift = random_mapping(&mut rng, order, d, d, scale)?;
    let diffusion = random_diffusion(&mut rng, order, d, m, scale)?;
    ConstantCoefficients::new(drift, diffusion)
}
