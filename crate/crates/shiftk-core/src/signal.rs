//! Complex sequence utilities: DTFT evaluation on frequency grids,
//! autocorrelation spectra and the quadrature rule the loss evaluations and
//! Parseval-style checks are built on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite truncation of a causal complex sequence, indexed from `offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeq {
    values: Vec<Complex64>,
    offset: i64,
}

impl ComplexSeq {
    /// Sequence starting at index 0.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        Self::with_offset(values, 0)
    }

    /// Sequence whose first stored entry sits at index `offset`.
    pub fn with_offset(values: Vec<Complex64>, offset: i64) -> Result<Self> {
        if let Some(bad) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite entry at position {bad}"
            )));
        }
        Ok(Self { values, offset })
    }

    /// Real-valued sequence starting at index 0.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Unit impulse at index `k`, stored as `k + 1` entries from 0.
    pub fn delta(k: usize) -> Self {
        let mut values = vec![Complex64::ZERO; k + 1];
        values[k] = Complex64::ONE;
        Self { values, offset: 0 }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_n |x_n|^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Node placement for quadrature grids on `[-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScheme {
    UniformMidpoint,
    UniformEndpoint,
}

/// Strictly increasing angular nodes in `[-pi, pi]` with their quadrature scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqGrid {
    nodes: Vec<f64>,
    scheme: GridScheme,
}

impl FreqGrid {
    /// `n` midpoint nodes of the uniform partition of `[-pi, pi]`.
    ///
    /// Integrands here are smooth and 2pi-periodic, for which this rule
    /// converges spectrally; it is exact on constants for every `n >= 1`.
    pub fn uniform_midpoint(n: usize) -> Self {
        let step = 2.0 * std::f64::consts::PI / n.max(1) as f64;
        let nodes = (0..n)
            .map(|j| -std::f64::consts::PI + (j as f64 + 0.5) * step)
            .collect();
        Self {
            nodes,
            scheme: GridScheme::UniformMidpoint,
        }
    }

    /// `n` equally spaced nodes including both endpoints `-pi` and `pi`
    /// (composite trapezoid weights). Requires `n >= 2`.
    pub fn uniform_endpoint(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(
                "endpoint grid needs at least 2 nodes".into(),
            ));
        }
        let step = 2.0 * std::f64::consts::PI / (n - 1) as f64;
        let nodes = (0..n)
            .map(|j| -std::f64::consts::PI + j as f64 * step)
            .collect();
        Ok(Self {
            nodes,
            scheme: GridScheme::UniformEndpoint,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature weight of node `j`, normalized so that the weights of a
    /// constant integrand sum to `2 pi`.
    fn weight(&self, j: usize) -> f64 {
        match self.scheme {
            GridScheme::UniformMidpoint => 2.0 * std::f64::consts::PI / self.nodes.len() as f64,
            GridScheme::UniformEndpoint => {
                let h = 2.0 * std::f64::consts::PI / (self.nodes.len() - 1) as f64;
                if j == 0 || j + 1 == self.nodes.len() {
                    0.5 * h
                } else {
                    h
                }
            }
        }
    }
}

/// AR(1) noise with autocorrelation `gamma(k) = rho^|k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    rho: f64,
}

impl NoiseModel {
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || !(0.0..1.0).contains(&rho) {
            return Err(Error::Validation(format!(
                "rho must lie in [0, 1), got {rho}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn white() -> Self {
        Self { rho: 0.0 }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `gamma(k) = rho^|k|`.
    pub fn autocorrelation(&self, k: i64) -> f64 {
        self.rho.powi(k.unsigned_abs().min(i32::MAX as u64) as i32)
    }
}

/// DTFT of a finite sequence evaluated at every node of `grid`:
/// `X(w_j) = sum_n x_n e^{-i w_j n}` with `n` running over the stored indices.
pub fn dtft_eval(seq: &ComplexSeq, grid: &FreqGrid) -> Vec<Complex64> {
    grid.nodes
        .iter()
        .map(|&omega| dtft_at(seq, omega))
        .collect()
}

/// DTFT of a finite sequence at a single angle.
pub fn dtft_at(seq: &ComplexSeq, omega: f64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for (j, &v) in seq.values.iter().enumerate() {
        let n = seq.offset + j as i64;
        acc += v * Complex64::from_polar(1.0, -omega * n as f64);
    }
    acc
}

/// Spectrum of the AR(1) autocorrelation:
/// `Gamma(e^{iw}) = (1 - rho^2) / |1 - rho e^{-iw}|^2`, identically 1 for white noise.
pub fn autocorr_spectrum(model: &NoiseModel, omega: f64) -> f64 {
    let rho = model.rho;
    let denom = (Complex64::ONE - rho * Complex64::from_polar(1.0, -omega)).norm_sqr();
    (1.0 - rho * rho) / denom
}

/// Quadrature approximation of `(1/2pi) \int_{-pi}^{pi} f`, with `f` sampled
/// on the grid nodes. The sample count must equal the grid length.
pub fn weighted_quadrature(samples: &[Complex64], grid: &FreqGrid) -> Result<Complex64> {
    if samples.len() != grid.len() {
        return Err(Error::Validation(format!(
            "sample count {} does not match grid length {}",
            samples.len(),
            grid.len()
        )));
    }
    let mut acc = Complex64::ZERO;
    for (j, &f) in samples.iter().enumerate() {
        acc += f * grid.weight(j);
    }
    Ok(acc / (2.0 * std::f64::consts::PI))
}

/// Real-sample convenience wrapper around [`weighted_quadrature`].
pub fn weighted_quadrature_real(samples: &[f64], grid: &FreqGrid) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::Validation(format!(
            "sample count {} does not match grid length {}",
            samples.len(),
            grid.len()
        )));
    }
    let mut acc = 0.0;
    for (j, &f) in samples.iter().enumerate() {
        acc += f * grid.weight(j);
    }
    Ok(acc / (2.0 * std::f64::consts::PI))
}

/// Tail mass `sum_{k > k_max} r^k = r^{k_max+1} / (1 - r)` of a geometric
/// sequence with ratio `0 <= r < 1`. Callers scale it by the relevant
/// coefficient mass so truncation tolerances stay explicit.
pub fn geometric_tail(r: f64, k_max: usize) -> f64 {
    debug_assert!((0.0..1.0).contains(&r));
    r.powi((k_max + 1).min(i32::MAX as usize) as i32) / (1.0 - r)
}
