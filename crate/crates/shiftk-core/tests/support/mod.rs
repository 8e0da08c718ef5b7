//! Shared helpers for the integration and acceptance suites. Independent of
//! the library's internals on purpose: plain xorshift randomness and a tiny
//! Jacobi eigensolver used as an oracle against the Gram machinery.

// Each test target compiles this module separately and uses a subset of it.
#![allow(dead_code)]
// Index loops mirror the matrix algebra they implement.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use shiftk_core::{FilterParams, IndexConvention};

pub struct Rng(u64);

impl Rng {
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

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.uniform() * (hi - lo + 1) as f64) as usize
    }

    /// Stable poles, pairwise separated, with moduli in [0.05, max_radius],
    /// avoiding the listed real exclusion points by `margin`.
    pub fn stable_poles_avoiding(
        &mut self,
        s: usize,
        max_radius: f64,
        exclusions: &[f64],
        margin: f64,
    ) -> Vec<Complex64> {
        let mut poles: Vec<Complex64> = Vec::with_capacity(s);
        while poles.len() < s {
            let r = 0.05 + (max_radius - 0.05) * self.uniform();
            let theta = (2.0 * self.uniform() - 1.0) * std::f64::consts::PI;
            let cand = Complex64::from_polar(r, theta);
            let clear_of_poles = poles.iter().all(|z| (z - cand).norm() > 0.05);
            let clear_of_exclusions = exclusions
                .iter()
                .all(|&x| (cand - Complex64::new(x, 0.0)).norm() > margin);
            if clear_of_poles && clear_of_exclusions && cand.norm() > margin {
                poles.push(cand);
            }
        }
        poles
    }

    pub fn stable_poles(&mut self, s: usize, max_radius: f64) -> Vec<Complex64> {
        self.stable_poles_avoiding(s, max_radius, &[], 0.0)
    }

    pub fn weights(&mut self, s: usize) -> Vec<Complex64> {
        (0..s)
            .map(|_| Complex64::new(2.0 * self.uniform() - 1.0, 2.0 * self.uniform() - 1.0))
            .collect()
    }

    pub fn params(&mut self, s: usize, max_radius: f64) -> FilterParams {
        let poles = self.stable_poles(s, max_radius);
        let weights = self.weights(s);
        FilterParams::new(poles, weights, IndexConvention::OneToS).unwrap()
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations. O(n^3) per
/// sweep and only suitable for small n, which is exactly what an independent
/// oracle should be.
pub fn hermitian_eigenvalues(matrix: &[Vec<Complex64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<Complex64>> = matrix.to_vec();
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p][q].norm_sqr();
            }
        }
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                let m = apq.norm();
                if m < 1e-300 {
                    continue;
                }
                // Factor the plane rotation as diag(1, e^{-i phi}) times a
                // real Givens rotation: with phi = arg(a_pq) the phased
                // 2x2 block becomes real symmetric and the classic Jacobi
                // angle applies.
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let phase = apq / m;
                let tau = (aqq - app) / (2.0 * m);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- A U with U = [[c, s], [-conj(phase) s, conj(phase) c]].
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = akp * c - akq * s * phase.conj();
                    a[k][q] = akp * s + akq * c * phase.conj();
                }
                // A <- U^H A.
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = apk * c - aqk * s * phase;
                    a[q][k] = apk * s + aqk * c * phase;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}
