//! `shiftk window`: the frequency-window reproduction. For each rescaled
//! frequency `Omega = K w / pi` we emit the ratio `C(e^{iw}) / D(e^{iw})`
//! (`D = e^{-iKw}`) for three curves: the asymptotic limit, the filter with
//! asymptotic weights, and the filter with solved weights.

use num_complex::Complex64;
use rayon::prelude::*;
use shiftk_core::asymptotics::window_limit;
use shiftk_core::bounds::optimal_b;
use shiftk_core::csvfmt::float;
use shiftk_core::filter::{shiftk_init, transfer_function};
use shiftk_core::{FilterParams, TaskSpec};

use crate::config::{load, WindowConfig};
use crate::{commands::write_output, CliError, CommonArgs};

struct Row {
    omega_rescaled: f64,
    limit: Complex64,
    asymptotic_b: Complex64,
    solved_b: Complex64,
}

pub fn run(common: &CommonArgs) -> Result<(), CliError> {
    let mut config: WindowConfig = match &common.config {
        Some(path) => load(path)?,
        None => WindowConfig::default(),
    };
    if let Some(out) = &common.out {
        config.out = out.clone();
    }
    if config.s.is_multiple_of(2) {
        return Err(CliError::Config("window sweep needs odd S".into()));
    }
    let factor_ok = config.omega_factor.is_finite() && config.omega_factor > 0.0;
    if config.points < 2 || !factor_ok {
        return Err(CliError::Config(
            "need at least 2 points and a positive omega_factor".into(),
        ));
    }

    let spec = TaskSpec::new(config.s, config.k, 0.0, config.alpha)?;
    let t = (config.s - 1) / 2;
    let asymptotic = shiftk_init(&spec)?;
    let solved = FilterParams::new(
        asymptotic.poles().to_vec(),
        optimal_b(asymptotic.poles(), spec.k)?,
        asymptotic.convention(),
    )?;

    let t_f = t as f64;
    let span = config.omega_factor * t_f;
    let step = 2.0 * span / (config.points - 1) as f64;
    let omegas: Vec<f64> = (0..config.points)
        .map(|i| -span + step * i as f64)
        // The window boundary and the upper transition band are excluded
        // from the printed limit formula; skip those grid points.
        .filter(|w| (w.abs() - t_f).abs() > 1e-6 && !(*w > t_f && *w < t_f + 1.0))
        .collect();

    let rows: Vec<Result<Row, CliError>> = omegas
        .par_iter()
        .map(|&omega_rescaled| {
            let omega = std::f64::consts::PI * omega_rescaled / config.k as f64;
            // D = e^{-iK w}; dividing by it rescales all curves the same way.
            let d = Complex64::from_polar(1.0, -(config.k as f64) * omega);
            let limit = window_limit(omega_rescaled, t, config.alpha)?;
            Ok(Row {
                omega_rescaled,
                limit: limit / d,
                asymptotic_b: transfer_function(&asymptotic, omega) / d,
                solved_b: transfer_function(&solved, omega) / d,
            })
        })
        .collect();

    let mut out = String::new();
    out.push_str(
        "Omega,T,K,alpha,re_ratio_limit,im_ratio_limit,\
re_ratio_asymptotic_b,im_ratio_asymptotic_b,re_ratio_solved_b,im_ratio_solved_b\n",
    );
    for row in rows {
        let r = row?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            float(r.omega_rescaled),
            t,
            config.k,
            float(config.alpha),
            float(r.limit.re),
            float(r.limit.im),
            float(r.asymptotic_b.re),
            float(r.asymptotic_b.im),
            float(r.solved_b.re),
            float(r.solved_b.im),
        ));
    }
    write_output(&config.out, out.as_bytes())
}
