//! The Cauchy-structured Gram matrix of geometric sequences, the optimal
//! weight solver, the performance criteria F_K and H_K, the closed-form lower
//! bounds and the identities used to verify them numerically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::pole_power;
use crate::linalg::{condition_estimate, CMatrix, Cholesky};
use crate::signal::{weighted_quadrature, ComplexSeq, FreqGrid};

/// Solvers refuse to work past this condition estimate.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Minimum pairwise pole distance before the Gram matrix is declared degenerate.
const DISTINCT_TOL: f64 = 1e-12;

/// Dense Gram matrix `C_{ss'} = 1 / (1 - a_s conj(a_{s'}))` of the geometric
/// sequences `(a_s^k)_k`, with its factorization and condition estimate.
///
/// Hermitian by construction and positive definite for distinct stable poles;
/// the factorization succeeding is the positive-definiteness check.
#[derive(Debug, Clone)]
pub struct CauchyGram {
    poles: Vec<Complex64>,
    matrix: CMatrix,
    chol: Cholesky,
    condition: f64,
}

/// Builds the Gram matrix for a pole vector, checking stability and
/// pairwise distinctness.
pub fn cauchy_gram(a: &[Complex64]) -> Result<CauchyGram> {
    CauchyGram::new(a)
}

impl CauchyGram {
    pub fn new(a: &[Complex64]) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Validation("empty pole vector".into()));
        }
        for (i, pole) in a.iter().enumerate() {
            let modulus = pole.norm();
            if !modulus.is_finite() || modulus >= 1.0 {
                return Err(Error::Stability { index: i, modulus });
            }
        }
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if (a[i] - a[j]).norm() <= DISTINCT_TOL {
                    return Err(Error::DegenerateConfiguration(format!(
                        "poles {i} and {j} coincide within {DISTINCT_TOL:.0e}"
                    )));
                }
            }
        }
        let n = a.len();
        // Fill the lower triangle and mirror it so Hermitian symmetry is exact.
        let mut matrix = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let entry = (Complex64::ONE - a[i] * a[j].conj()).finv();
                matrix[(i, j)] = entry;
                if i != j {
                    matrix[(j, i)] = entry.conj();
                }
            }
        }
        let chol = Cholesky::factor(&matrix).map_err(|e| match e {
            Error::Numeric(msg) => Error::DegenerateConfiguration(format!(
                "Gram matrix is not positive definite ({msg})"
            )),
            other => other,
        })?;
        let condition = condition_estimate(&matrix, &chol, 40);
        Ok(Self {
            poles: a.to_vec(),
            matrix,
            chol,
            condition,
        })
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn order(&self) -> usize {
        self.poles.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Spectral condition estimate from power/inverse iteration.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    fn check_conditioning(&self) -> Result<()> {
        if self.condition > CONDITION_LIMIT {
            return Err(Error::Conditioning {
                estimate: self.condition,
                limit: CONDITION_LIMIT,
            });
        }
        Ok(())
    }

    /// Solves `C x = rhs`.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if rhs.len() != self.order() {
            return Err(Error::Validation(format!(
                "rhs length {} does not match order {}",
                rhs.len(),
                self.order()
            )));
        }
        self.check_conditioning()?;
        Ok(self.chol.solve(rhs))
    }

    /// `C x` for residual checks.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.matrix.matvec(x)
    }

    /// `u = C^{-1} 1`, the vector behind the rational and mass identities.
    pub fn u_vector(&self) -> Result<Vec<Complex64>> {
        self.solve(&vec![Complex64::ONE; self.order()])
    }

    /// Largest entrywise deviation in the displacement identity
    /// `C - diag(a) C diag(conj(a)) = 1 1^T`.
    pub fn displacement_residual(&self) -> f64 {
        let n = self.order();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let lhs = self.matrix[(i, j)]
                    - self.poles[i] * self.matrix[(i, j)] * self.poles[j].conj();
                worst = worst.max((lhs - Complex64::ONE).norm());
            }
        }
        worst
    }
}

/// Displacement residual straight from the entry formula, without building
/// (or factoring) the Gram matrix. Large tightly-packed pole sets are
/// numerically semi-definite and refuse factorization, yet the identity
/// itself still holds entrywise; this checks it for them too.
pub fn displacement_residual_for(a: &[Complex64]) -> Result<f64> {
    for (i, pole) in a.iter().enumerate() {
        let modulus = pole.norm();
        if !modulus.is_finite() || modulus >= 1.0 {
            return Err(Error::Stability { index: i, modulus });
        }
    }
    let mut worst = 0.0f64;
    for &ai in a {
        for &aj in a {
            let entry = (Complex64::ONE - ai * aj.conj()).finv();
            let lhs = entry - ai * entry * aj.conj();
            worst = worst.max((lhs - Complex64::ONE).norm());
        }
    }
    Ok(worst)
}

/// The exact minimizer of the white-noise loss over `b` for fixed poles.
///
/// Stationarity of `1 + sum b_s conj(b_{s'}) C_{ss'} - 2 Re sum b_s a_s^K`
/// in `b` reads `C conj(b) = a^K`, so `b = conj(C^{-1} a^K)`.
pub fn optimal_b(a: &[Complex64], k: usize) -> Result<Vec<Complex64>> {
    let gram = CauchyGram::new(a)?;
    optimal_b_with(&gram, k)
}

/// [`optimal_b`] against an already-built Gram matrix.
pub fn optimal_b_with(gram: &CauchyGram, k: usize) -> Result<Vec<Complex64>> {
    let rhs: Vec<Complex64> = gram.poles().iter().map(|&a| pole_power(a, k)).collect();
    let q = gram.solve(&rhs)?;
    Ok(q.into_iter().map(|z| z.conj()).collect())
}

/// Performance criterion `F_K = <a^K, C^{-1} a^K>`, the complement of the
/// best achievable white-noise loss over `b`: `min_b L = 1 - F_K`.
pub fn f_criterion(a: &[Complex64], k: usize) -> Result<f64> {
    let gram = CauchyGram::new(a)?;
    f_criterion_with(&gram, k)
}

/// [`f_criterion`] against an already-built Gram matrix.
pub fn f_criterion_with(gram: &CauchyGram, k: usize) -> Result<f64> {
    let rhs: Vec<Complex64> = gram.poles().iter().map(|&a| pole_power(a, k)).collect();
    let q = gram.solve(&rhs)?;
    let mut acc = Complex64::ZERO;
    for (g, x) in rhs.iter().zip(q.iter()) {
        acc += g.conj() * x;
    }
    if acc.im.abs() >= 1e-10 {
        return Err(Error::Numeric(format!(
            "F_K has imaginary residue {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// White-noise lower bound `max(0, 1 - S/(K+1))` on the loss.
pub fn lower_bound_white(s: usize, k: usize) -> f64 {
    (1.0 - s as f64 / (k as f64 + 1.0)).max(0.0)
}

/// Autocorrelated lower bound `max(0, 1 - 3S / (K (1 - rho)))` on the loss.
pub fn lower_bound_auto(s: usize, k: usize, rho: f64) -> f64 {
    debug_assert!(k >= 1 && (0.0..1.0).contains(&rho));
    (1.0 - 3.0 * s as f64 / (k as f64 * (1.0 - rho))).max(0.0)
}

/// Unconstrained minimum `H_K` of the reweighted AR(1) objective over the
/// augmented pole set `a U {rho}`:
/// `H_K = 1 - (1 - rho^2) <g, C^{-1} g>` with `g_s = a_s^K / (1 - a_s rho)`.
///
/// A lower bound on [`crate::loss::loss_auto_closed`] for every weight
/// vector over the same poles. Requires `rho > 1e-6`: the augmented pole
/// degenerates at zero.
pub fn h_criterion(a: &[Complex64], k: usize, rho: f64) -> Result<f64> {
    if !(rho > 1e-6 && rho < 1.0) {
        return Err(Error::Validation(format!(
            "h_criterion needs rho in (1e-6, 1), got {rho}; use f_criterion for white noise"
        )));
    }
    let rho_c = Complex64::new(rho, 0.0);
    for (i, a_s) in a.iter().enumerate() {
        if (a_s - rho_c).norm() <= DISTINCT_TOL.max(1e-9) {
            return Err(Error::DegenerateConfiguration(format!(
                "pole {i} collides with the augmented pole rho = {rho}"
            )));
        }
    }
    let mut augmented = a.to_vec();
    augmented.push(rho_c);
    let gram = CauchyGram::new(&augmented)?;
    let g: Vec<Complex64> = augmented
        .iter()
        .map(|&a_s| pole_power(a_s, k) / (Complex64::ONE - a_s * rho))
        .collect();
    let x = gram.solve(&g)?;
    let mut acc = Complex64::ZERO;
    for (gi, xi) in g.iter().zip(x.iter()) {
        acc += gi.conj() * xi;
    }
    if acc.im.abs() >= 1e-10 {
        return Err(Error::Numeric(format!(
            "H_K quadratic form has imaginary residue {:.3e}",
            acc.im
        )));
    }
    Ok(1.0 - (1.0 - rho * rho) * acc.re)
}

/// Blaschke product `B(z) = prod_s (a_s - z) / (1 - z conj(a_s))`; unit
/// modulus on the unit circle.
pub fn blaschke_eval(a: &[Complex64], z: Complex64) -> Complex64 {
    a.iter()
        .map(|&a_s| (a_s - z) / (Complex64::ONE - z * a_s.conj()))
        .product()
}

/// Both sides of the first-moment identity
/// `sum_L L |w_L|^2 = (i/2pi) \int W'(w) conj(W(w)) dw`
/// for a causal sequence: the left by direct summation, the right by
/// quadrature with `W'` evaluated analytically.
pub fn verify_semi_parseval(w: &ComplexSeq, nodes: usize) -> Result<(f64, f64)> {
    if w.offset() < 0 {
        return Err(Error::Validation(
            "semi-Parseval identity needs a causal sequence".into(),
        ));
    }
    if nodes < 256 {
        return Err(Error::Validation(format!(
            "semi-Parseval quadrature needs at least 256 nodes, got {nodes}"
        )));
    }
    let lhs: f64 = w
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| (w.offset() + j as i64) as f64 * v.norm_sqr())
        .sum();

    let grid = FreqGrid::uniform_midpoint(nodes);
    let samples: Vec<Complex64> = grid
        .nodes()
        .iter()
        .map(|&omega| {
            let mut wv = Complex64::ZERO;
            let mut dwv = Complex64::ZERO;
            for (j, &v) in w.values().iter().enumerate() {
                let l = (w.offset() + j as i64) as f64;
                let phase = Complex64::from_polar(1.0, -omega * l);
                wv += v * phase;
                dwv += Complex64::new(0.0, -l) * v * phase;
            }
            Complex64::I * dwv * wv.conj()
        })
        .collect();
    let rhs = weighted_quadrature(&samples, &grid)?;
    if rhs.im.abs() >= 1e-8 * (1.0 + rhs.re.abs()) {
        return Err(Error::Numeric(format!(
            "semi-Parseval quadrature has imaginary residue {:.3e}",
            rhs.im
        )));
    }
    Ok((lhs, rhs.re))
}

/// Residual `||T z - lambda z|| / ||z||` of the asymptotic eigenpair of the
/// Toeplitz matrix `T(s,s') = 1 / (2 alpha - i (s - s') pi)` on the symmetric
/// index range, with `lambda = 2 / (e^{2 alpha} - e^{-2 alpha})` and
/// `z_s = (-1)^s`. Decreases as the size grows.
pub fn toeplitz_eigen_residual(alpha: f64, size: usize) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Validation(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if size < 3 || size.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "size must be odd and >= 3, got {size}"
        )));
    }
    let t = (size as i64 - 1) / 2;
    let lambda = 2.0 / ((2.0 * alpha).exp() - (-2.0 * alpha).exp());
    let mut residual_sq = 0.0;
    for s in -t..=t {
        let mut row = Complex64::ZERO;
        for s2 in -t..=t {
            let sign = if s2.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            row += sign / Complex64::new(2.0 * alpha, -std::f64::consts::PI * (s - s2) as f64);
        }
        let z_s = if s.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        residual_sq += (row - lambda * z_s).norm_sqr();
    }
    Ok((residual_sq / size as f64).sqrt())
}

/// Bound values for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValues {
    pub f_k: f64,
    pub lower_white: f64,
    pub h_k: Option<f64>,
    pub lower_auto: Option<f64>,
}

impl BoundValues {
    /// F_K and the white bound always; H_K and the autocorrelated bound when
    /// `rho > 1e-6`.
    pub fn compute(a: &[Complex64], k: usize, rho: Option<f64>) -> Result<Self> {
        let f_k = f_criterion(a, k)?;
        let lower_white = lower_bound_white(a.len(), k);
        let (h_k, lower_auto) = match rho {
            Some(r) if r > 1e-6 => (
                Some(h_criterion(a, k, r)?),
                Some(lower_bound_auto(a.len(), k.max(1), r)),
            ),
            _ => (None, None),
        };
        Ok(Self {
            f_k,
            lower_white,
            h_k,
            lower_auto,
        })
    }
}
