//! `shiftk loss`: fill a LossReport for every sweep point and emit CSV.

use rayon::prelude::*;
use shiftk_core::bounds::optimal_b;
use shiftk_core::filter::shiftk_init;
use shiftk_core::loss::default_loss_nodes;
use shiftk_core::{FilterParams, LossReport, TaskSpec};

use crate::config::{load, LossConfig, WeightChoice};
use crate::{commands::write_output, CliError, CommonArgs};

/// Caps keeping the truncated oracle tractable: the autocorrelated oracle is
/// a dense double sum, the white one is linear.
const KMAX_CAP_WHITE: usize = 200_000;
const KMAX_CAP_AUTO: usize = 20_000;

fn auto_k_max(p: &FilterParams, k: usize, rho: f64) -> usize {
    let cap = if rho == 0.0 {
        KMAX_CAP_WHITE
    } else {
        KMAX_CAP_AUTO
    };
    let mut k_max = (k + 64).min(cap);
    while k_max < cap && p.impulse_tail_bound(k_max) > 1e-10 {
        k_max = (k_max * 2).min(cap);
    }
    k_max
}

fn sweep_point(
    config: &LossConfig,
    loaded: Option<&FilterParams>,
    spec: &TaskSpec,
) -> Result<LossReport, CliError> {
    let (params, shiftk_parameterized) = match loaded {
        Some(p) => (p.clone(), false),
        None => {
            let p = shiftk_init(spec)?;
            let p = match config.weights {
                WeightChoice::Asymptotic => p,
                WeightChoice::Solved => {
                    let b = optimal_b(p.poles(), spec.k)?;
                    FilterParams::new(p.poles().to_vec(), b, p.convention())?
                }
            };
            (p, true)
        }
    };
    let nodes = config.nodes.unwrap_or_else(|| default_loss_nodes(spec.rho));
    let k_max = config
        .k_max
        .unwrap_or_else(|| auto_k_max(&params, spec.k, spec.rho))
        .max(spec.k);
    Ok(LossReport::compute(
        &params,
        spec,
        nodes,
        k_max,
        shiftk_parameterized,
    )?)
}

pub fn run(common: &CommonArgs) -> Result<(), CliError> {
    let mut config: LossConfig = match &common.config {
        Some(path) => load(path)?,
        None => LossConfig::default(),
    };
    if let Some(out) = &common.out {
        config.out = out.clone();
    }

    let loaded: Option<FilterParams> = match &config.params_file {
        Some(path) => Some(load(path)?),
        None => None,
    };

    let s_values: Vec<usize> = match &loaded {
        Some(p) => vec![p.order()],
        None => config.sweep.s.clone(),
    };
    if s_values.is_empty()
        || config.sweep.k.is_empty()
        || config.sweep.rho.is_empty()
        || config.sweep.alpha.is_empty()
    {
        return Err(CliError::Config("empty sweep range".into()));
    }

    let mut points = Vec::new();
    for &s in &s_values {
        for &k in &config.sweep.k {
            for &rho in &config.sweep.rho {
                for &alpha in &config.sweep.alpha {
                    points.push(TaskSpec::new(s, k, rho, alpha)?);
                }
            }
        }
    }

    // Evaluate in parallel; rows keep sweep order.
    let rows: Vec<Result<LossReport, CliError>> = points
        .par_iter()
        .map(|spec| sweep_point(&config, loaded.as_ref(), spec))
        .collect();

    let mut out = String::new();
    out.push_str(LossReport::CSV_HEADER);
    out.push('\n');
    for (spec, row) in points.iter().zip(rows) {
        let report = row?;
        out.push_str(&report.csv_row(spec));
        out.push('\n');
    }
    write_output(&config.out, out.as_bytes())
}
