//! Deterministic random generators shared by the unit tests.

use num_complex::Complex64;

use crate::filter::{FilterParams, IndexConvention};

/// Small xorshift generator; good enough for test data, fully deterministic.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E3779B97F4A7C15).max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Stable poles with moduli in [0.05, max_radius] and pairwise distance > 0.05.
pub fn random_stable_poles(rng: &mut TestRng, s: usize, max_radius: f64) -> Vec<Complex64> {
    let mut poles: Vec<Complex64> = Vec::with_capacity(s);
    while poles.len() < s {
        let r = 0.05 + (max_radius - 0.05) * rng.uniform();
        let theta = (2.0 * rng.uniform() - 1.0) * std::f64::consts::PI;
        let cand = Complex64::from_polar(r, theta);
        if poles.iter().all(|z| (z - cand).norm() > 0.05) {
            poles.push(cand);
        }
    }
    poles
}

/// Random stable filter with complex weights in the unit square.
pub fn random_stable_params(rng: &mut TestRng, s: usize, max_radius: f64) -> FilterParams {
    let poles = random_stable_poles(rng, s, max_radius);
    let weights = (0..s)
        .map(|_| Complex64::new(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0))
        .collect();
    FilterParams::new(poles, weights, IndexConvention::OneToS).unwrap()
}
