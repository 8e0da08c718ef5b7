//! Closed-form asymptotic predictions: the upper-bound loss of the explicit
//! shift-K filter, its frequency-window limit, and the idealized-window loss.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::TaskSpec;

/// A value together with whether the asymptotic regime assumption held.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimate {
    pub value: f64,
    /// False when `S > K`; the formula is still evaluated but sits outside
    /// its `S/K -> 0` regime.
    pub in_regime: bool,
}

/// Asymptotic loss of the explicit shift-K filter:
/// `1 - e^{-2 alpha} (e^{2 alpha} - e^{-2 alpha}) / 2 * S / K`.
pub fn upper_bound_asymptotic(spec: &TaskSpec) -> BoundEstimate {
    let coeff = (-2.0 * spec.alpha).exp()
        * ((2.0 * spec.alpha).exp() - (-2.0 * spec.alpha).exp())
        / 2.0;
    BoundEstimate {
        value: 1.0 - coeff * spec.s as f64 / spec.k as f64,
        in_regime: spec.s <= spec.k,
    }
}

/// Limit of the transfer function at the rescaled frequency `Omega = K w / pi`
/// as `S, K -> inf` with `S/K -> 0`, for `S = 2T + 1`:
///
/// * interior (`|Omega| < T`):
///   `e^{-a}(e^{2a} - e^{-2a}) / (e^{a} e^{i pi Omega} - e^{-a} e^{-i pi Omega})`;
/// * exterior (`|Omega| > T`):
///   `(e^{-a}(e^{2a} - e^{-2a})/2) * i (-1)^{T+1} 2 floor(Omega)
///    / (2 pi (floor(Omega) - T)(floor(Omega) + T))`,
///   with floor rounding toward minus infinity.
///
/// The boundary `|Omega| = T` is excluded, as is the band `(T, T+1)` where
/// `floor(Omega) = T` makes the printed exterior formula singular.
pub fn window_limit(omega_rescaled: f64, t: usize, alpha: f64) -> Result<Complex64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Validation(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let t_f = t as f64;
    if (omega_rescaled.abs() - t_f).abs() < 1e-6 {
        return Err(Error::Domain(format!(
            "Omega = {omega_rescaled} is on the excluded window boundary +-T = {t_f}"
        )));
    }
    let coeff = (-alpha).exp() * ((2.0 * alpha).exp() - (-2.0 * alpha).exp());
    if omega_rescaled.abs() < t_f {
        let num = Complex64::new(coeff, 0.0);
        let den = alpha.exp() * Complex64::from_polar(1.0, std::f64::consts::PI * omega_rescaled)
            - (-alpha).exp()
                * Complex64::from_polar(1.0, -std::f64::consts::PI * omega_rescaled);
        Ok(num / den)
    } else {
        let n = omega_rescaled.floor();
        let denom = (n - t_f) * (n + t_f);
        if denom == 0.0 {
            return Err(Error::Domain(format!(
                "Omega = {omega_rescaled} falls in the transition band where the \
                 exterior formula is singular"
            )));
        }
        let sign = if (t + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        let value = Complex64::new(0.0, 1.0)
            * (coeff / 2.0)
            * sign
            * (2.0 * n / (2.0 * std::f64::consts::PI * denom));
        Ok(value)
    }
}

/// One evaluated point of the window limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowPoint {
    pub omega_rescaled: f64,
    pub t: usize,
    pub alpha: f64,
    pub value: Complex64,
}

impl WindowPoint {
    pub fn new(omega_rescaled: f64, t: usize, alpha: f64) -> Result<Self> {
        let value = window_limit(omega_rescaled, t, alpha)?;
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Numeric(format!(
                "window limit not finite at Omega = {omega_rescaled}"
            )));
        }
        Ok(Self {
            omega_rescaled,
            t,
            alpha,
            value,
        })
    }
}

/// Loss of the idealized rectangular-window filter under AR(1) noise:
/// `1 - (2/pi) arctan(((1+rho)/(1-rho)) tan(pi S / K))`.
///
/// Requires `S/K < 1/2` so the tangent stays on its principal branch. A
/// window of half-width `pi S / (2K)` would put `tan(pi S / (4K))` inside the
/// arctan instead; this function keeps the `tan(pi S / K)` form as the
/// reference formula, and the spectrum quadrature in `signal` lets callers
/// integrate over any window they prefer.
pub fn ideal_window_loss(spec: &TaskSpec) -> Result<f64> {
    spec.validate()?;
    let ratio = spec.s as f64 / spec.k as f64;
    if ratio >= 0.5 {
        return Err(Error::Domain(format!(
            "S/K = {ratio} leaves the principal tangent branch (needs S/K < 1/2)"
        )));
    }
    let gain = (1.0 + spec.rho) / (1.0 - spec.rho);
    Ok(1.0 - 2.0 / std::f64::consts::PI * (gain * (std::f64::consts::PI * ratio).tan()).atan())
}

/// CSV row for window sweeps: the limit value next to the actually evaluated
/// transfer function at the matching angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCsvRow {
    pub omega_rescaled: f64,
    pub t: usize,
    pub k: usize,
    pub alpha: f64,
    pub limit: Complex64,
    pub transfer: Complex64,
}

/// Writes window-sweep rows with the fixed column set
/// `Omega,T,K,alpha,re_limit,im_limit,re_transfer,im_transfer`.
pub fn write_window_csv<W: std::io::Write>(out: &mut W, rows: &[WindowCsvRow]) -> std::io::Result<()> {
    writeln!(out, "Omega,T,K,alpha,re_limit,im_limit,re_transfer,im_transfer")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            crate::csvfmt::float(r.omega_rescaled),
            r.t,
            r.k,
            crate::csvfmt::float(r.alpha),
            crate::csvfmt::float(r.limit.re),
            crate::csvfmt::float(r.limit.im),
            crate::csvfmt::float(r.transfer.re),
            crate::csvfmt::float(r.transfer.im),
        )?;
    }
    Ok(())
}
