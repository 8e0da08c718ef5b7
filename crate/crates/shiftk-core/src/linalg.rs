//! Dense Hermitian linear algebra just large enough for the Gram solvers:
//! an LL^H factorization, triangular solves and a power-iteration condition
//! estimate. Everything here is desk-scale (S up to a few hundred).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::ZERO; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| {
                let mut acc = Complex64::ZERO;
                for (a, b) in row.iter().zip(x.iter()) {
                    acc += a * b;
                }
                acc
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        let n = self.n;
        &mut self.data[i * n + j]
    }
}

/// Cholesky factorization `A = L L^H` of a Hermitian positive-definite matrix.
///
/// Succeeding is itself the positive-definiteness certificate: every pivot
/// must come out real and strictly positive.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<Complex64>,
}

impl Cholesky {
    pub fn factor(a: &CMatrix) -> Result<Self> {
        let n = a.n;
        let mut l = vec![Complex64::ZERO; n * n];
        for j in 0..n {
            let mut diag = a[(j, j)].re;
            for k in 0..j {
                diag -= l[j * n + k].norm_sqr();
            }
            if !(diag.is_finite() && diag > 0.0) {
                return Err(Error::Numeric(format!(
                    "matrix is not positive definite: pivot {j} = {diag:.3e}"
                )));
            }
            let ljj = diag.sqrt();
            l[j * n + j] = Complex64::new(ljj, 0.0);
            for i in j + 1..n {
                let mut acc = a[(i, j)];
                for k in 0..j {
                    acc -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = acc / ljj;
            }
        }
        Ok(Self { n, l })
    }

    /// Solves `A x = rhs` via the two triangular systems.
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut y = rhs.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[i * n + k];
                y[i] = y[i] - lik * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let lki = self.l[k * n + i].conj();
                y[i] = y[i] - lki * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        y
    }
}

/// Spectral condition estimate of a Hermitian positive-definite matrix from
/// power iteration on `A` and inverse iteration through its factorization.
pub fn condition_estimate(a: &CMatrix, chol: &Cholesky, iterations: usize) -> f64 {
    let n = a.n;
    if n == 1 {
        return 1.0;
    }
    let start: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0, 0.3 + 0.1 * i as f64))
        .collect();

    let normalize = |v: &mut Vec<Complex64>| {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for z in v.iter_mut() {
                *z /= norm;
            }
        }
        norm
    };

    let mut v = start.clone();
    let mut lambda_max = 0.0;
    normalize(&mut v);
    for _ in 0..iterations {
        let mut w = a.matvec(&v);
        lambda_max = normalize(&mut w);
        v = w;
    }

    let mut u = start;
    let mut inv_norm = 0.0;
    normalize(&mut u);
    for _ in 0..iterations {
        let mut w = chol.solve(&u);
        inv_norm = normalize(&mut w);
        u = w;
    }
    let lambda_min = if inv_norm > 0.0 { 1.0 / inv_norm } else { 0.0 };
    if lambda_min <= 0.0 {
        f64::INFINITY
    } else {
        lambda_max / lambda_min
    }
}
