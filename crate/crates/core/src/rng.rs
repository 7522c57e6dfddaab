//! Seeded pseudo-random numbers.
//!
//! The generator is xoshiro256** whose 256-bit state is filled from the `u64`
//! seed by SplitMix64 (the reference seeding of the xoshiro family). The
//! derived quantities are pinned so that other implementations can reproduce
//! every experiment:
//!
//! * `uniform()`: `(next_u64() >> 11) · 2^-53`, a value in `[0, 1)`;
//! * `gaussian_pair()`: Box–Muller on `u1 = 1 − uniform()`, `u2 = uniform()`
//!   (drawn in that order), returning `(r cos 2πu2, r sin 2πu2)` with
//!   `r = sqrt(−2 ln u1)`;
//! * `standard_normal()`: the first component of one `gaussian_pair()`;
//! * `complex_normal(σ)`: both components of one pair scaled by `σ/√2`, so
//!   that `E|z|² = σ²`.
//!
//! Independent streams are obtained with [`derive_seed`].

use core::f64::consts::{PI, SQRT_2};

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::C64;
#[allow(unused_imports)]
use num_traits::Float;

/// SplitMix64 output function applied to `x + γ`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `stream`-th independent sub-stream of `root`.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    splitmix64(root ^ splitmix64(stream))
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Xoshiro256StarStar,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..bound` (`bound > 0`), by rejection.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        (r * theta.cos(), r * theta.sin())
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.gaussian_pair().0
    }

    pub fn complex_normal(&mut self, std_dev: f64) -> C64 {
        let (a, b) = self.gaussian_pair();
        let k = std_dev / SQRT_2;
        C64::new(a * k, b * k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(17);
        let mut b = SeededRng::new(17);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = SeededRng::new(3);
        for _ in 0..10_000 {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = SeededRng::new(5);
        let n = 200_000;
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..n {
            let x = rng.standard_normal();
            m1 += x;
            m2 += x * x;
        }
        m1 /= n as f64;
        m2 /= n as f64;
        assert!(m1.abs() < 0.01, "mean {m1}");
        assert!((m2 - 1.0).abs() < 0.02, "second moment {m2}");
    }

    #[test]
    fn complex_normal_variance() {
        let mut rng = SeededRng::new(6);
        let n = 100_000;
        let mean_sq: f64 = (0..n)
            .map(|_| rng.complex_normal(2.0).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean_sq - 4.0).abs() < 0.1, "{mean_sq}");
    }

    #[test]
    fn derived_streams_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(9, 4), derive_seed(9, 4));
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = SeededRng::new(8);
        for _ in 0..1000 {
            assert!(rng.below(7) < 7);
        }
    }
}
