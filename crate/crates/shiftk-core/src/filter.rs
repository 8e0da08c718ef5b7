//! The diagonal linear-recurrence filter: parameters, impulse response,
//! transfer function, the explicit shift-K parameterization and the
//! recurrent rollout that realizes the same convolution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{geometric_tail, ComplexSeq};

/// How the stored parameter vectors are indexed.
///
/// `OneToS` is the plain `s = 1..S` convention. `SymmetricT` means logical
/// indices `s = -T..T` with `S = 2T + 1`, stored in ascending `s`; formulas
/// involving `(-1)^s` always use the logical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexConvention {
    #[serde(rename = "one_to_S")]
    OneToS,
    #[serde(rename = "symmetric_T")]
    SymmetricT,
}

/// Poles `a` and weights `b` of the order-S diagonal recurrence with kernel
/// `c_k = sum_s b_s a_s^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterParams {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    convention: IndexConvention,
}

impl FilterParams {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>, convention: IndexConvention) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::Validation(format!(
                "pole/weight vectors must be non-empty and equal-length, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if convention == IndexConvention::SymmetricT && a.len().is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "symmetric_T convention needs odd length, got {}",
                a.len()
            )));
        }
        for (i, z) in a.iter().chain(b.iter()).enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::Validation(format!(
                    "non-finite parameter at flat position {i}"
                )));
            }
        }
        for (i, pole) in a.iter().enumerate() {
            let modulus = pole.norm();
            if modulus >= 1.0 {
                return Err(Error::Stability { index: i, modulus });
            }
        }
        Ok(Self { a, b, convention })
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.a
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.b
    }

    pub fn convention(&self) -> IndexConvention {
        self.convention
    }

    /// Number of poles, i.e. the state size S.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    /// Logical index of storage position `i` (`i` itself for `OneToS` is `i + 1`).
    pub fn logical_index(&self, i: usize) -> i64 {
        match self.convention {
            IndexConvention::OneToS => i as i64 + 1,
            IndexConvention::SymmetricT => i as i64 - (self.a.len() as i64 - 1) / 2,
        }
    }

    /// Largest pole modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `sum_s |b_s|`, the coefficient mass multiplying geometric tails.
    pub fn weight_mass(&self) -> f64 {
        self.b.iter().map(|z| z.norm()).sum()
    }

    /// Bound on the discarded impulse-response mass
    /// `sum_{k > k_max} |c_k| <= (sum_s |b_s|) r^{k_max+1} / (1 - r)`.
    pub fn impulse_tail_bound(&self, k_max: usize) -> f64 {
        self.weight_mass() * geometric_tail(self.spectral_radius(), k_max)
    }

    /// True when the stored vectors are exactly mirror conjugate-symmetric
    /// (`a[i] == conj(a[S-1-i])`, same for `b`), which makes the impulse
    /// response real. The shift-K grids are built this way.
    pub fn is_conjugate_symmetric(&self) -> bool {
        let n = self.a.len();
        (0..n).all(|i| {
            self.a[i] == self.a[n - 1 - i].conj() && self.b[i] == self.b[n - 1 - i].conj()
        })
    }
}

/// One task configuration: state size, shift lag, noise correlation, decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    /// State size (number of poles).
    pub s: usize,
    /// Shift lag of the target filter.
    pub k: usize,
    /// AR(1) correlation, in [0, 1).
    pub rho: f64,
    /// Decay parameter of the pole moduli.
    pub alpha: f64,
}

impl TaskSpec {
    pub fn new(s: usize, k: usize, rho: f64, alpha: f64) -> Result<Self> {
        let spec = Self { s, k, rho, alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s < 1 {
            return Err(Error::Validation("state size S must be >= 1".into()));
        }
        if !self.rho.is_finite() || !(0.0..1.0).contains(&self.rho) {
            return Err(Error::Validation(format!(
                "rho must lie in [0, 1), got {}",
                self.rho
            )));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::Validation(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// The shift-K target `d_k = 1_{k = K}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftKTarget {
    pub k: usize,
}

impl ShiftKTarget {
    pub fn new(k: usize) -> Self {
        Self { k }
    }

    pub fn kernel_at(&self, k: usize) -> f64 {
        if k == self.k {
            1.0
        } else {
            0.0
        }
    }
}

/// `a^k` with the convention `0^0 = 1`, evaluated in polar form so large
/// exponents keep full phase accuracy and conjugate pairs stay exact.
pub(crate) fn pole_power(a: Complex64, k: usize) -> Complex64 {
    if k == 0 {
        return Complex64::ONE;
    }
    if a == Complex64::ZERO {
        return Complex64::ZERO;
    }
    Complex64::from_polar(a.norm().powi(k.min(i32::MAX as usize) as i32), a.arg() * k as f64)
}

/// Kernel truncation `c_k = sum_s b_s a_s^k` for `k = 0..k_max`.
pub fn impulse_response(p: &FilterParams, k_max: usize) -> ComplexSeq {
    let s = p.order();
    let mut powers = vec![Complex64::ONE; s];
    let mut values = Vec::with_capacity(k_max + 1);
    for _ in 0..=k_max {
        let mut c = Complex64::ZERO;
        for (pw, b) in powers.iter().zip(p.b.iter()) {
            c += b * pw;
        }
        values.push(c);
        for (pw, a) in powers.iter_mut().zip(p.a.iter()) {
            *pw *= a;
        }
    }
    ComplexSeq::new(values).expect("finite parameters yield finite kernel")
}

/// Transfer function `C(e^{iw}) = sum_s b_s / (1 - a_s e^{-iw})`.
pub fn transfer_function(p: &FilterParams, omega: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, -omega);
    p.a.iter()
        .zip(p.b.iter())
        .map(|(&a, &b)| b / (Complex64::ONE - a * e))
        .sum()
}

/// The explicit shift-K parameterization on the symmetric index range:
/// `a_s = e^{-alpha/K} e^{i pi s / K}` and
/// `b_s = (-1)^s e^{-alpha} (e^{2 alpha} - e^{-2 alpha}) / (2K)` for `s = -T..T`.
///
/// At `alpha = 1/2` the poles are the S4D-Lin initialization with step `1/K`.
pub fn shiftk_init(spec: &TaskSpec) -> Result<FilterParams> {
    spec.validate()?;
    if spec.s.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "shift-K grid needs odd S (S = 2T + 1), got {}",
            spec.s
        )));
    }
    if spec.k < 1 {
        return Err(Error::Validation("shift lag K must be >= 1".into()));
    }
    let t = (spec.s as i64 - 1) / 2;
    let k = spec.k as f64;
    let modulus = (-spec.alpha / k).exp();
    let b_mag = (-spec.alpha).exp() * ((2.0 * spec.alpha).exp() - (-2.0 * spec.alpha).exp())
        / (2.0 * k);
    let mut a = Vec::with_capacity(spec.s);
    let mut b = Vec::with_capacity(spec.s);
    for s in -t..=t {
        a.push(Complex64::from_polar(modulus, std::f64::consts::PI * s as f64 / k));
        let sign = if s.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        b.push(Complex64::new(sign * b_mag, 0.0));
    }
    FilterParams::new(a, b, IndexConvention::SymmetricT)
}

/// Runs the diagonal recurrence `x_n = diag(a) x_{n-1} + b u_n`,
/// `y_n = sum_s x_{n,s}` from a zero state over the whole input.
pub fn rnn_rollout(p: &FilterParams, input: &ComplexSeq) -> ComplexSeq {
    let mut state = vec![Complex64::ZERO; p.order()];
    let mut out = Vec::with_capacity(input.len());
    for &u in input.values() {
        let mut y = Complex64::ZERO;
        for ((x, &a), &b) in state.iter_mut().zip(p.a.iter()).zip(p.b.iter()) {
            *x = a * *x + b * u;
            y += *x;
        }
        out.push(y);
    }
    ComplexSeq::with_offset(out, input.offset()).expect("finite state stays finite")
}

/// Wire format for [`FilterParams`]: complex entries as `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterParamsWire {
    convention: IndexConvention,
    a: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
}

impl Serialize for FilterParams {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = FilterParamsWire {
            convention: self.convention,
            a: self.a.iter().map(|z| [z.re, z.im]).collect(),
            b: self.b.iter().map(|z| [z.re, z.im]).collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FilterParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = FilterParamsWire::deserialize(deserializer)?;
        let to_complex = |v: Vec<[f64; 2]>| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        FilterParams::new(to_complex(wire.a), to_complex(wire.b), wire.convention)
            .map_err(serde::de::Error::custom)
    }
}
