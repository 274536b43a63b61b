//! Seeded randomness. Every random routine takes its seed explicitly; there is
//! no hidden global generator.
//!
//! Child seeds for restarts, trials and sources come from [`derive_seed`], so
//! results do not depend on how work is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::C64;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child seed `index` of `seed` (splitmix64 finalizer over the pair).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn normal(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
pub fn complex_normal(rng: &mut SeededRng) -> C64 {
    let re = normal(rng);
    let im = normal(rng);
    C64::new(re, im)
}

/// Flat Dirichlet sample of length `k`.
pub fn dirichlet_uniform(rng: &mut SeededRng, k: usize) -> alloc::vec::Vec<f64> {
    let mut w: alloc::vec::Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= total;
    }
    w
}

pub fn sign(rng: &mut SeededRng) -> i8 {
    if rng.random::<bool>() {
        1
    } else {
        -1
    }
}
