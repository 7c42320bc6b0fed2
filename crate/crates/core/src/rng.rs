//! Seeded random number helpers. Every stochastic choice in the crate draws
//! from a ChaCha8 stream created here so a single `u64` seed reproduces runs
//! bit-for-bit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Scalar;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a child stream; used to give restarts and substeps independent
/// but reproducible randomness.
pub fn child(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard normal draw converted into the working scalar type. Sampling is
/// done in f64 so f32 and f64 runs see the same underlying stream.
pub fn normal<T: Scalar>(rng: &mut SeededRng) -> T {
    let x: f64 = rng.sample(StandardNormal);
    T::of(x)
}

pub fn normal_vec<T: Scalar>(rng: &mut SeededRng, len: usize) -> Vec<T> {
    (0..len).map(|_| normal(rng)).collect()
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform<T: Scalar>(rng: &mut SeededRng, lo: f64, hi: f64) -> T {
    let x: f64 = rng.gen_range(lo..hi);
    T::of(x)
}

/// `count` distinct values from `0..n`, ascending. Floyd's algorithm keeps
/// this cheap when `count << n`.
pub fn sample_distinct(rng: &mut SeededRng, n: usize, count: usize) -> Vec<usize> {
    assert!(count <= n, "cannot draw {count} distinct values from {n}");
    let mut chosen = std::collections::BTreeSet::new();
    for j in (n - count)..n {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}
