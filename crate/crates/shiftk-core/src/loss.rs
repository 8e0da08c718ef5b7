//! Approximation error between a diagonal linear-recurrence filter and the
//! shift-K target, under white and AR(1) noise: exact closed forms, a
//! frequency-domain quadrature and a truncated time-domain oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::upper_bound_asymptotic;
use crate::bounds::{lower_bound_auto, lower_bound_white};
use crate::error::{Error, Result};
use crate::filter::{impulse_response, pole_power, transfer_function, FilterParams, TaskSpec};
use crate::signal::{autocorr_spectrum, weighted_quadrature_real, FreqGrid, NoiseModel};

/// Largest imaginary residue tolerated before a nominally real value is
/// declared an algebra error.
const IM_TOL: f64 = 1e-10;

/// Every way of measuring one configuration's loss, plus the bounds framing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub time_closed: f64,
    pub freq_quadrature: f64,
    pub oracle_truncated: f64,
    pub oracle_tail_bound: f64,
    pub lower_bound: f64,
    /// Only meaningful for shift-K parameterized filters.
    pub upper_asymptotic: Option<f64>,
}

fn real_part_checked(z: Complex64, what: &str) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Numeric(format!("{what} is not finite: {z}")));
    }
    if z.im.abs() >= IM_TOL {
        return Err(Error::Numeric(format!(
            "{what} has imaginary residue {:.3e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// White-noise loss in closed form:
/// `1 + sum_{s,s'} b_s conj(b_{s'}) / (1 - a_s conj(a_{s'})) - 2 Re sum_s b_s a_s^K`.
pub fn loss_white_closed(p: &FilterParams, k: usize) -> Result<f64> {
    let a = p.poles();
    let b = p.weights();
    let mut quad = Complex64::ZERO;
    for (&a_s, &b_s) in a.iter().zip(b.iter()) {
        for (&a_t, &b_t) in a.iter().zip(b.iter()) {
            quad += b_s * b_t.conj() / (Complex64::ONE - a_s * a_t.conj());
        }
    }
    let mut cross = Complex64::ZERO;
    for (&a_s, &b_s) in a.iter().zip(b.iter()) {
        cross += b_s * pole_power(a_s, k);
    }
    let quad = real_part_checked(quad, "white-noise quadratic term")?;
    Ok(1.0 + quad - 2.0 * cross.re)
}

/// AR(1) loss in closed form via the reweighted poles: `w_s = b_s a_s / (a_s - rho)`
/// with the augmented pole `a_{S+1} = rho` and `w_{S+1} = -rho sum_s w_s / a_s`.
///
/// Poles within 1e-9 of `rho` or of 0 make the reparameterization singular;
/// use [`loss_freq_quadrature`] for those configurations.
pub fn loss_auto_closed(p: &FilterParams, k: usize, rho: f64) -> Result<f64> {
    let noise = NoiseModel::new(rho)?;
    let rho = noise.rho();
    for (i, a_s) in p.poles().iter().enumerate() {
        if (a_s - Complex64::new(rho, 0.0)).norm() <= 1e-9 {
            return Err(Error::SingularConfiguration(format!(
                "pole {i} coincides with rho = {rho}"
            )));
        }
        if a_s.norm() <= 1e-9 {
            return Err(Error::SingularConfiguration(format!("pole {i} is zero")));
        }
    }

    let s_len = p.order();
    let mut poles = Vec::with_capacity(s_len + 1);
    let mut w = Vec::with_capacity(s_len + 1);
    let mut constraint = Complex64::ZERO;
    for (&a_s, &b_s) in p.poles().iter().zip(p.weights().iter()) {
        poles.push(a_s);
        let w_s = b_s * a_s / (a_s - rho);
        constraint += w_s / a_s;
        w.push(w_s);
    }
    poles.push(Complex64::new(rho, 0.0));
    w.push(-rho * constraint);

    let one_minus_rho2 = 1.0 - rho * rho;
    let mut cross = Complex64::ZERO;
    for (&a_s, &w_s) in poles.iter().zip(w.iter()) {
        cross += w_s * pole_power(a_s, k) / (Complex64::ONE - a_s * rho);
    }
    let mut quad = Complex64::ZERO;
    for (&a_s, &w_s) in poles.iter().zip(w.iter()) {
        for (&a_t, &w_t) in poles.iter().zip(w.iter()) {
            quad += w_s * w_t.conj() / (Complex64::ONE - a_s * a_t.conj());
        }
    }
    let quad = real_part_checked(quad, "autocorrelated quadratic term")?;
    Ok(1.0 - 2.0 * one_minus_rho2 * cross.re + one_minus_rho2 * quad)
}

/// Midpoint quadrature of
/// `(1/2pi) \int |C(e^{iw}) - e^{-iKw}|^2 Gamma(e^{iw}) dw` on `nodes` nodes.
pub fn loss_freq_quadrature(p: &FilterParams, k: usize, rho: f64, nodes: usize) -> Result<f64> {
    if nodes < 64 {
        return Err(Error::Validation(format!(
            "quadrature needs at least 64 nodes, got {nodes}"
        )));
    }
    let noise = NoiseModel::new(rho)?;
    let grid = FreqGrid::uniform_midpoint(nodes);
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&omega| {
            let c = transfer_function(p, omega);
            let d = Complex64::from_polar(1.0, -(k as f64) * omega);
            (c - d).norm_sqr() * autocorr_spectrum(&noise, omega)
        })
        .collect();
    weighted_quadrature_real(&samples, &grid)
}

/// Node count used for loss quadrature when the caller does not pick one:
/// 8192 scaled by `1/(1-rho)` (the spectrum sharpens as `rho -> 1`), capped
/// at 2^20.
pub fn default_loss_nodes(rho: f64) -> usize {
    let scaled = (8192.0 / (1.0 - rho)).ceil() as usize;
    scaled.min(1 << 20)
}

/// Truncated double-sum oracle
/// `sum_{k,k'=0}^{k_max} (c_k - d_k)(conj(c_{k'}) - conj(d_{k'})) rho^{|k-k'|}`
/// together with an explicit geometric bound on the discarded mass.
pub fn loss_truncated_oracle(
    p: &FilterParams,
    k: usize,
    rho: f64,
    k_max: usize,
) -> Result<(f64, f64)> {
    let _ = NoiseModel::new(rho)?;
    if k_max < k {
        return Err(Error::Validation(format!(
            "k_max = {k_max} would truncate the target spike at K = {k}"
        )));
    }
    let c = impulse_response(p, k_max);
    let mut e: Vec<Complex64> = c.values().to_vec();
    e[k] -= Complex64::ONE;

    let value = if rho == 0.0 {
        e.iter().map(|z| z.norm_sqr()).sum()
    } else {
        let mut rho_pow = vec![1.0f64; k_max + 1];
        for d in 1..=k_max {
            rho_pow[d] = rho_pow[d - 1] * rho;
        }
        let mut acc = Complex64::ZERO;
        for (i, &ei) in e.iter().enumerate() {
            for (j, &ej) in e.iter().enumerate() {
                let d = i.abs_diff(j);
                acc += ei * ej.conj() * rho_pow[d];
            }
        }
        real_part_checked(acc, "truncated oracle")?
    };

    // Discarded mass: rows/columns beyond k_max only contain filter terms, so
    // |tail| <= 2 (sum_{k > k_max} |c_k|) (sum_k |e_k|) with rho^{|k-k'|} <= 1.
    let tail_c = p.impulse_tail_bound(k_max);
    let r = p.spectral_radius();
    let e_mass = 1.0 + p.weight_mass() / (1.0 - r);
    let tail_bound = 2.0 * tail_c * (e_mass + tail_c);
    Ok((value, tail_bound))
}

impl LossReport {
    /// Evaluates every entry for one filter/task pair.
    ///
    /// `time_closed` uses the closed form matching `rho` (with the white form
    /// at `rho = 0`); a pole colliding with `rho` or 0 surfaces the
    /// singular-configuration error rather than silently switching routes.
    /// `upper_asymptotic` is filled only when `shiftk_parameterized` is set.
    pub fn compute(
        p: &FilterParams,
        spec: &TaskSpec,
        nodes: usize,
        k_max: usize,
        shiftk_parameterized: bool,
    ) -> Result<Self> {
        let time_closed = if spec.rho == 0.0 {
            loss_white_closed(p, spec.k)?
        } else {
            loss_auto_closed(p, spec.k, spec.rho)?
        };
        let freq_quadrature = loss_freq_quadrature(p, spec.k, spec.rho, nodes)?;
        let (oracle_truncated, oracle_tail_bound) =
            loss_truncated_oracle(p, spec.k, spec.rho, k_max)?;
        let lower_bound = if spec.rho == 0.0 {
            lower_bound_white(spec.s, spec.k)
        } else {
            lower_bound_auto(spec.s, spec.k.max(1), spec.rho)
        };
        let upper_asymptotic = if shiftk_parameterized {
            Some(upper_bound_asymptotic(spec).value)
        } else {
            None
        };
        let report = Self {
            time_closed,
            freq_quadrature,
            oracle_truncated,
            oracle_tail_bound,
            lower_bound,
            upper_asymptotic,
        };
        report.validate()?;
        Ok(report)
    }

    fn validate(&self) -> Result<()> {
        let entries = [
            self.time_closed,
            self.freq_quadrature,
            self.oracle_truncated,
            self.oracle_tail_bound,
            self.lower_bound,
            self.upper_asymptotic.unwrap_or(0.0),
        ];
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("loss report has non-finite entries".into()));
        }
        if self.time_closed < -1e-10 {
            return Err(Error::Numeric(format!(
                "negative loss {:.3e}",
                self.time_closed
            )));
        }
        Ok(())
    }

    /// Fixed CSV column order shared with the CLI.
    pub const CSV_HEADER: &'static str = "S,K,rho,alpha,time_closed,freq_quadrature,\
oracle_truncated,oracle_tail_bound,lower_bound,upper_asymptotic";

    /// One CSV row in the [`Self::CSV_HEADER`] column order; the optional
    /// upper bound is left empty when absent.
    pub fn csv_row(&self, spec: &TaskSpec) -> String {
        use crate::csvfmt::float;
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            spec.s,
            spec.k,
            float(spec.rho),
            float(spec.alpha),
            float(self.time_closed),
            float(self.freq_quadrature),
            float(self.oracle_truncated),
            float(self.oracle_tail_bound),
            float(self.lower_bound),
            self.upper_asymptotic.map(float).unwrap_or_default(),
        )
    }
}
