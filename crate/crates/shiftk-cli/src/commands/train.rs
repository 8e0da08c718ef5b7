//! `shiftk train`: copy-task training runs. `single` writes one TrainRun;
//! the sweep modes write a summary CSV plus a JSON bundle of every run.

use rayon::prelude::*;
use serde::Serialize;
use shiftk_core::csvfmt::float;
use shiftk_core::experiments::{train, InitScheme};
use shiftk_core::{ArDatasetSpec, TrainConfig, TrainRun};

use crate::config::{load, TrainCmdConfig, TrainMode};
use crate::{commands::write_output, CliError, CommonArgs};

#[derive(Serialize)]
struct RunBundle<'a> {
    config: &'a TrainCmdConfig,
    runs: Vec<TrainRun>,
}

fn with_suffix(stem: &std::path::Path, suffix: &str) -> std::path::PathBuf {
    let mut name = stem.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    stem.with_file_name(name)
}

pub fn run(common: &CommonArgs) -> Result<(), CliError> {
    let mut config: TrainCmdConfig = match &common.config {
        Some(path) => load(path)?,
        None => TrainCmdConfig::default(),
    };
    if let Some(out) = &common.out {
        config.out = out.clone();
    }
    if let Some(seed) = common.seed {
        config.data.seed = seed;
        config.train.seed = seed;
    }
    if common.full {
        let full = config.full.clone().ok_or_else(|| {
            CliError::Config("--full requested but the config has no full-scale block".into())
        })?;
        config.data = full.data;
        config.train = full.train;
        if let Some(rho_sweep) = full.rho_sweep {
            config.rho_sweep = rho_sweep;
        }
        if let Some(kinit_sweep) = full.kinit_sweep {
            config.kinit_sweep = kinit_sweep;
        }
        if let Some(seed) = common.seed {
            config.data.seed = seed;
            config.train.seed = seed;
        }
    }
    config.data.validate()?;
    config.train.validate()?;

    match config.mode {
        TrainMode::Single => run_single(&config),
        TrainMode::CompareInit => run_compare(&config),
        TrainMode::KinitSweep => run_kinit(&config),
    }
}

fn run_single(config: &TrainCmdConfig) -> Result<(), CliError> {
    let run = train(&config.train, &config.data)?;
    write_output(
        &with_suffix(&config.out, ".json"),
        serde_json::to_string_pretty(&run)?.as_bytes(),
    )?;
    let mut curve = Vec::new();
    run.write_loss_curve_csv(&mut curve)?;
    write_output(&with_suffix(&config.out, "_curve.csv"), &curve)?;
    write_output(
        &with_suffix(&config.out, "_params.json"),
        serde_json::to_string_pretty(&run.final_params)?.as_bytes(),
    )?;
    Ok(())
}

/// One grid-vs-random pair per (rho, seed); summary row carries both MSEs.
fn run_compare(config: &TrainCmdConfig) -> Result<(), CliError> {
    if config.rho_sweep.is_empty() || config.seeds.is_empty() {
        return Err(CliError::Config(
            "compare_init needs rho_sweep and seeds".into(),
        ));
    }
    let mut jobs: Vec<(f64, u64, InitScheme)> = Vec::new();
    for &rho in &config.rho_sweep {
        for &seed in &config.seeds {
            jobs.push((rho, seed, InitScheme::ShiftkGrid));
            jobs.push((rho, seed, InitScheme::RandomPhase));
        }
    }
    let runs: Vec<Result<TrainRun, CliError>> = jobs
        .par_iter()
        .map(|&(rho, seed, scheme)| {
            let data = ArDatasetSpec {
                rho,
                seed: config.data.seed.wrapping_add(seed),
                ..config.data
            };
            // The grid parameterization needs odd S; an even configured S
            // (such as 128) drops to S - 1 for the grid runs only.
            let s = if scheme == InitScheme::ShiftkGrid && config.train.s.is_multiple_of(2) {
                config.train.s - 1
            } else {
                config.train.s
            };
            let train_cfg = TrainConfig {
                init_scheme: scheme,
                s,
                seed: config.train.seed.wrapping_add(seed),
                ..config.train
            };
            Ok(train(&train_cfg, &data)?)
        })
        .collect();
    let runs: Vec<TrainRun> = runs.into_iter().collect::<Result<_, _>>()?;

    let mut csv = String::from("rho,seed,final_mse_shiftk_grid,final_mse_random_phase\n");
    for pair in runs.chunks(2) {
        let (grid, random) = (&pair[0], &pair[1]);
        csv.push_str(&format!(
            "{},{},{},{}\n",
            float(grid.data_spec.rho),
            grid.config.seed,
            float(grid.final_mse),
            float(random.final_mse),
        ));
    }
    write_output(&with_suffix(&config.out, ".csv"), csv.as_bytes())?;
    let bundle = RunBundle { config, runs };
    write_output(
        &with_suffix(&config.out, ".json"),
        serde_json::to_string(&bundle)?.as_bytes(),
    )
}

fn run_kinit(config: &TrainCmdConfig) -> Result<(), CliError> {
    if config.kinit_sweep.is_empty() {
        return Err(CliError::Config("kinit_sweep is empty".into()));
    }
    let runs: Vec<Result<TrainRun, CliError>> = config
        .kinit_sweep
        .par_iter()
        .map(|&k_init| {
            let train_cfg = TrainConfig {
                k_init,
                ..config.train
            };
            Ok(train(&train_cfg, &config.data)?)
        })
        .collect();
    let runs: Vec<TrainRun> = runs.into_iter().collect::<Result<_, _>>()?;

    let mut csv = String::from("k_init,k_star,final_mse\n");
    for run in &runs {
        csv.push_str(&format!(
            "{},{},{}\n",
            run.config.k_init,
            run.data_spec.k_star(),
            float(run.final_mse),
        ));
    }
    write_output(&with_suffix(&config.out, ".csv"), csv.as_bytes())?;
    let bundle = RunBundle { config, runs };
    write_output(
        &with_suffix(&config.out, ".json"),
        serde_json::to_string(&bundle)?.as_bytes(),
    )
}
