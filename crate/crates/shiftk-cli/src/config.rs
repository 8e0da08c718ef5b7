//! Per-command JSON run configurations. Unknown keys are rejected so typos
//! fail loudly instead of silently running the default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shiftk_core::{ArDatasetSpec, InitScheme, TrainConfig};

use crate::CliError;

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Which weight vector a shift-K sweep uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightChoice {
    /// The closed-form asymptotic weights.
    Asymptotic,
    /// Weights from the Gram linear-system solve.
    Solved,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRanges {
    pub s: Vec<usize>,
    pub k: Vec<usize>,
    pub rho: Vec<f64>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossConfig {
    pub sweep: SweepRanges,
    /// Evaluate a loaded parameter file instead of the shift-K grid; the
    /// sweep's `s` list is ignored then.
    #[serde(default)]
    pub params_file: Option<PathBuf>,
    #[serde(default = "default_weight_choice")]
    pub weights: WeightChoice,
    /// Quadrature nodes; omitted scales 8192 by 1/(1-rho).
    #[serde(default)]
    pub nodes: Option<usize>,
    /// Oracle truncation; omitted picks the smallest k_max with a tail bound
    /// below 1e-10, capped to keep the double sum tractable.
    #[serde(default)]
    pub k_max: Option<usize>,
    pub out: PathBuf,
}

fn default_weight_choice() -> WeightChoice {
    WeightChoice::Asymptotic
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            sweep: SweepRanges {
                s: vec![51],
                k: vec![250, 500, 1000, 2000, 4000],
                rho: vec![0.0],
                alpha: vec![1.0],
            },
            params_file: None,
            weights: WeightChoice::Asymptotic,
            nodes: None,
            k_max: None,
            out: PathBuf::from("loss.csv"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub s: usize,
    pub k: usize,
    pub alpha: f64,
    /// The Omega grid spans [-factor * T, factor * T].
    pub omega_factor: f64,
    pub points: usize,
    pub out: PathBuf,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            s: 51,
            k: 500,
            alpha: 1.0,
            omega_factor: 3.0,
            points: 601,
            out: PathBuf::from("window.csv"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    /// One run; writes the TrainRun JSON, its loss curve and the final params.
    Single,
    /// Grid vs random-phase initialization over a rho sweep.
    CompareInit,
    /// Robustness of the grid initialization to the K_init guess.
    KinitSweep,
}

/// Complete full-scale variant swapped in by `--full`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleVariant {
    pub data: ArDatasetSpec,
    pub train: TrainConfig,
    #[serde(default)]
    pub rho_sweep: Option<Vec<f64>>,
    #[serde(default)]
    pub kinit_sweep: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainCmdConfig {
    pub mode: TrainMode,
    pub data: ArDatasetSpec,
    pub train: TrainConfig,
    /// rho values for `compare_init`.
    #[serde(default)]
    pub rho_sweep: Vec<f64>,
    /// K_init values for `kinit_sweep`.
    #[serde(default)]
    pub kinit_sweep: Vec<usize>,
    /// Seed offsets paired per run for the comparison modes.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Full-scale variant enabled by `--full`.
    #[serde(default)]
    pub full: Option<ScaleVariant>,
    /// Output stem: `<stem>.csv`, `<stem>.json`, `<stem>_curve.csv`, ...
    pub out: PathBuf,
}

fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2]
}

impl Default for TrainCmdConfig {
    fn default() -> Self {
        Self {
            mode: TrainMode::Single,
            data: ArDatasetSpec {
                n: 300,
                t_star: 50,
                rho: 0.7,
                num_samples: 2000,
                seed: 0,
                burn_in: 0,
            },
            train: TrainConfig {
                init_scheme: InitScheme::ShiftkGrid,
                k_init: 250,
                alpha: 1.0,
                s: 33,
                // Plain GD needs a far smaller rate than adaptive optimizers;
                // anything past ~2e-3 diverges on this objective.
                learning_rate: 1e-4,
                weight_decay: 1e-5,
                batch_size: 50,
                epochs: 20,
                seed: 0,
            },
            rho_sweep: vec![0.0, 0.2, 0.4, 0.6, 0.8],
            kinit_sweep: vec![250, 500, 1000, 2000, 4000, 8000],
            seeds: default_seeds(),
            full: None,
            out: PathBuf::from("train"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_verify_seed")]
    pub seed: u64,
    /// Randomized trials per check.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub perturb_cauchy: Option<f64>,
    pub out: PathBuf,
}

fn default_verify_seed() -> u64 {
    7
}

fn default_trials() -> usize {
    25
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: default_verify_seed(),
            trials: default_trials(),
            perturb_cauchy: None,
            out: PathBuf::from("verify_report.json"),
        }
    }
}
