//! Reproducible random streams.
//!
//! Every randomized routine in the crate draws from [`StabradRng`], which is
//! ChaCha with 8 rounds as implemented by `rand_chacha`. Its output for a
//! given 64-bit seed is platform independent, so sample clouds and restart
//! trajectories are reproducible across machines.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::linalg::{normalize, C64};

pub type StabradRng = rand_chacha::ChaCha8Rng;

/// Algorithm identity recorded in exported reports.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.9";

pub fn seeded(seed: u64) -> StabradRng {
    StabradRng::seed_from_u64(seed)
}

/// Independent stream `index` derived from a base seed.
pub fn substream(seed: u64, index: u64) -> StabradRng {
    let mut rng = StabradRng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn normal(rng: &mut StabradRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Circularly symmetric complex Gaussian with unit variance per component.
pub fn complex_normal(rng: &mut StabradRng) -> C64 {
    C64::new(normal(rng), normal(rng))
}

/// Uniformly distributed unit vector in C^n.
pub fn unit_vector(rng: &mut StabradRng, n: usize) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
        if normalize(&mut v) > 1e-300 {
            return v;
        }
    }
}

pub fn uniform(rng: &mut StabradRng) -> f64 {
    rng.random::<f64>()
}
