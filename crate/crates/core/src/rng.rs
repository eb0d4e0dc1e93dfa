//! Seeding and complex Gaussian sampling.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded from a
//! 64-bit value, so results depend only on the seed and never on the platform
//! or on how trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, Complex64};

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent sub-seed for a named stream of a parent seed.
#[inline]
pub fn derive(seed: u64, stream: u64) -> u64 {
    mix64(mix64(seed) ^ mix64(stream.wrapping_add(0xA076_1D64_78BD_642F)))
}

/// Seed of trial `trial` at sweep point `point`.
pub fn trial_seed(base_seed: u64, point: u64, trial: u64) -> u64 {
    derive(derive(base_seed, point), trial)
}

/// Seed of the user drop of trial `trial`. It does not depend on the sweep
/// point, so every point of a sweep sees the same user positions in a given
/// trial.
pub fn drop_seed(base_seed: u64, trial: u64) -> u64 {
    derive(derive(base_seed, u64::MAX), trial)
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream identifiers used when one seed drives several draws.
pub mod stream {
    pub const GEOMETRY: u64 = 1;
    pub const FADING: u64 = 2;
    pub const PILOTS: u64 = 3;
    pub const SYMBOLS: u64 = 4;
}

/// One circularly symmetric complex Gaussian sample with the given variance.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = libm::sqrt(variance * 0.5);
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// `rows × cols` matrix of i.i.d. CN(0, variance) entries, filled column-major.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: f64,
) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_gaussian(rng, variance);
        }
    }
    m
}
