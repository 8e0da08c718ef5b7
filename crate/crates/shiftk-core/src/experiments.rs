//! Synthetic copy-task experiments: AR(1) data generation, the two
//! initialization schemes, analytic gradients of the empirical objective and
//! plain minibatch gradient-descent training of the diagonal recurrence.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{shiftk_init, FilterParams, IndexConvention, TaskSpec};

/// Poles are clamped back to this modulus whenever a step pushes them out.
const STABILITY_RADIUS: f64 = 1.0 - 1e-6;

/// MSE past which a run is declared divergent.
const DIVERGENCE_LIMIT: f64 = 1e6;

/// AR(1) dataset description. `K* = n - t_star` is the shift the task asks for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArDatasetSpec {
    /// Sequence length N.
    pub n: usize,
    /// Target index in [1, N]; the label is `u_{t_star}`.
    pub t_star: usize,
    /// AR(1) correlation in [0, 1).
    pub rho: f64,
    pub num_samples: usize,
    pub seed: u64,
    /// Steps to run the recursion before recording `u_1` (the generator is
    /// non-stationary at the start; the default 0 keeps the plain recursion).
    #[serde(default)]
    pub burn_in: usize,
}

impl ArDatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.t_star == 0 || self.t_star > self.n {
            return Err(Error::Validation(format!(
                "need 1 <= t_star <= N, got t_star = {}, N = {}",
                self.t_star, self.n
            )));
        }
        if self.num_samples == 0 {
            return Err(Error::Validation("num_samples must be positive".into()));
        }
        if !self.rho.is_finite() || !(0.0..1.0).contains(&self.rho) {
            return Err(Error::Validation(format!(
                "rho must lie in [0, 1), got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// The shift this dataset trains: `K* = N - t_star`.
    pub fn k_star(&self) -> usize {
        self.n - self.t_star
    }
}

/// One generated sequence with its copy target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArSample {
    pub sequence: Vec<f64>,
    pub target: f64,
}

/// Parameter initialization for training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScheme {
    /// Phases on the regular grid `pi s / K_init`, `s = -T..T` (needs odd S).
    ShiftkGrid,
    /// Phases `epsilon pi` with `epsilon ~ U(-1, 1)`, same moduli and weights.
    RandomPhase,
}

/// Training configuration (data comes separately as [`ArDatasetSpec`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub init_scheme: InitScheme,
    pub k_init: usize,
    pub alpha: f64,
    /// Hidden size S.
    pub s: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.k_init == 0 || self.batch_size == 0 {
            return Err(Error::Validation(
                "S, K_init and batch_size must be positive".into(),
            ));
        }
        if self.init_scheme == InitScheme::ShiftkGrid && self.s.is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "shiftk_grid initialization needs odd S, got {}",
                self.s
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Validation("alpha must be positive".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Validation("learning rate must be >= 0".into()));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(Error::Validation("weight decay must be >= 0".into()));
        }
        Ok(())
    }
}

/// A finished training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRun {
    pub config: TrainConfig,
    pub data_spec: ArDatasetSpec,
    /// Empirical MSE over the full dataset after each epoch.
    pub loss_curve: Vec<f64>,
    pub final_mse: f64,
    pub final_params: FilterParams,
}

impl TrainRun {
    /// Loss-curve CSV with columns `epoch,mse`.
    pub fn write_loss_curve_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "epoch,mse")?;
        for (epoch, mse) in self.loss_curve.iter().enumerate() {
            writeln!(out, "{},{}", epoch + 1, crate::csvfmt::float(*mse))?;
        }
        Ok(())
    }
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    // 53 high bits -> [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u1 is shifted into (0, 1] so the log is finite.
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = uniform01(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Draws `num_samples` AR(1) sequences `u_n = rho u_{n-1} + eps_n` with
/// `eps_n ~ N(0, 1 - rho^2)` and `u_1 ~ U(0, 1)`, paired with the target
/// `u_{t_star}`. Bitwise deterministic given the seed.
pub fn gen_ar1(spec: &ArDatasetSpec) -> Result<Vec<ArSample>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sigma = (1.0 - spec.rho * spec.rho).sqrt();
    let mut samples = Vec::with_capacity(spec.num_samples);
    for _ in 0..spec.num_samples {
        let mut u = uniform01(&mut rng);
        for _ in 0..spec.burn_in {
            u = spec.rho * u + sigma * standard_normal(&mut rng);
        }
        let mut sequence = Vec::with_capacity(spec.n);
        sequence.push(u);
        for _ in 1..spec.n {
            u = spec.rho * u + sigma * standard_normal(&mut rng);
            sequence.push(u);
        }
        let target = sequence[spec.t_star - 1];
        samples.push(ArSample { sequence, target });
    }
    Ok(samples)
}

/// Builds the initial parameters for a run. Both schemes share the weight
/// formula `b_u = (-1)^u e^{-alpha}(e^{2 alpha} - e^{-2 alpha}) / (2 K_init)`.
pub fn init_scheme(config: &TrainConfig) -> Result<FilterParams> {
    config.validate()?;
    match config.init_scheme {
        InitScheme::ShiftkGrid => {
            let spec = TaskSpec::new(config.s, config.k_init, 0.0, config.alpha)?;
            shiftk_init(&spec)
        }
        InitScheme::RandomPhase => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let modulus = (-config.alpha / config.k_init as f64).exp();
            let b_mag = (-config.alpha).exp()
                * ((2.0 * config.alpha).exp() - (-2.0 * config.alpha).exp())
                / (2.0 * config.k_init as f64);
            let mut a = Vec::with_capacity(config.s);
            let mut b = Vec::with_capacity(config.s);
            for u in 1..=config.s {
                let eps = 2.0 * uniform01(&mut rng) - 1.0;
                a.push(Complex64::from_polar(modulus, eps * std::f64::consts::PI));
                let sign = if u % 2 == 0 { 1.0 } else { -1.0 };
                b.push(Complex64::new(sign * b_mag, 0.0));
            }
            FilterParams::new(a, b, IndexConvention::OneToS)
        }
    }
}

/// Per-sample forward pass: the weighted state sums `m_s` and their pole
/// sensitivities `r_s = d m_s / d a_s`, plus the scalar output.
fn forward(
    poles: &[Complex64],
    weights: &[Complex64],
    sequence: &[f64],
) -> (Vec<Complex64>, Vec<Complex64>, Complex64) {
    let s = poles.len();
    let mut m = vec![Complex64::ZERO; s];
    let mut r = vec![Complex64::ZERO; s];
    for &u in sequence {
        for i in 0..s {
            // Order matters: r uses the previous m.
            r[i] = poles[i] * r[i] + m[i];
            m[i] = poles[i] * m[i] + u;
        }
    }
    let mut y = Complex64::ZERO;
    for i in 0..s {
        y += weights[i] * m[i];
    }
    (m, r, y)
}

fn prediction_error(y: Complex64, target: f64, symmetric: bool) -> Complex64 {
    if symmetric {
        Complex64::new(y.re - target, 0.0)
    } else {
        y - Complex64::new(target, 0.0)
    }
}

/// Mean squared error of the final-step output against `u_{t_star}`. The
/// output's real part is used when the parameters form exact conjugate pairs
/// (the imaginary part is zero up to rounding there).
pub fn empirical_mse(p: &FilterParams, data: &[ArSample], t_star: usize) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Validation("empty dataset".into()));
    }
    let symmetric = p.is_conjugate_symmetric();
    let mut acc = 0.0;
    for sample in data {
        if sample.sequence.is_empty() || t_star == 0 || t_star > sample.sequence.len() {
            return Err(Error::Validation(format!(
                "t_star = {t_star} incompatible with sequence length {}",
                sample.sequence.len()
            )));
        }
        let target = sample.sequence[t_star - 1];
        let (_, _, y) = forward(p.poles(), p.weights(), &sample.sequence);
        acc += prediction_error(y, target, symmetric).norm_sqr();
    }
    Ok(acc / data.len() as f64)
}

/// Analytic gradients of [`empirical_mse`] with respect to the complex poles
/// and weights, packaged per coordinate as `d/d Re + i d/d Im` so each entry
/// compares directly against central finite differences.
pub fn loss_gradient(
    p: &FilterParams,
    batch: &[ArSample],
    t_star: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if batch.is_empty() {
        return Err(Error::Validation("empty batch".into()));
    }
    let symmetric = p.is_conjugate_symmetric();
    grad_for(p.poles(), p.weights(), batch, t_star, symmetric)
}

fn grad_for(
    poles: &[Complex64],
    weights: &[Complex64],
    batch: &[ArSample],
    t_star: usize,
    symmetric: bool,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let s = poles.len();
    let mut grad_a = vec![Complex64::ZERO; s];
    let mut grad_b = vec![Complex64::ZERO; s];
    for sample in batch {
        if t_star == 0 || t_star > sample.sequence.len() {
            return Err(Error::Validation(format!(
                "t_star = {t_star} incompatible with sequence length {}",
                sample.sequence.len()
            )));
        }
        let target = sample.sequence[t_star - 1];
        let (m, r, y) = forward(poles, weights, &sample.sequence);
        let e = prediction_error(y, target, symmetric);
        // d|e|^2/d z-bar = e * conj(dy/dz); packaged gradient is twice that.
        for i in 0..s {
            grad_a[i] += 2.0 * e * (weights[i] * r[i]).conj();
            grad_b[i] += 2.0 * e * m[i].conj();
        }
    }
    let scale = 1.0 / batch.len() as f64;
    for g in grad_a.iter_mut().chain(grad_b.iter_mut()) {
        *g *= scale;
    }
    Ok((grad_a, grad_b))
}

/// Enforces the mirrored conjugate pairing on a gradient so a symmetric
/// parameter set stays exactly symmetric under updates.
fn symmetrize(grad: &mut [Complex64]) {
    let n = grad.len();
    for i in 0..n / 2 {
        let avg = 0.5 * (grad[i] + grad[n - 1 - i].conj());
        grad[i] = avg;
        grad[n - 1 - i] = avg.conj();
    }
    if n % 2 == 1 {
        grad[n / 2] = Complex64::new(grad[n / 2].re, 0.0);
    }
}

/// Minibatch gradient descent with decoupled weight decay and a radial
/// stability clamp after every step. Deterministic given both seeds: batches
/// are visited in dataset order and gradient accumulation is sequential.
pub fn train(config: &TrainConfig, data_spec: &ArDatasetSpec) -> Result<TrainRun> {
    config.validate()?;
    let data = gen_ar1(data_spec)?;
    let init = init_scheme(config)?;
    let symmetric = init.is_conjugate_symmetric();
    let convention = init.convention();
    let mut poles = init.poles().to_vec();
    let mut weights = init.weights().to_vec();

    let mut loss_curve = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        if config.learning_rate > 0.0 {
            for batch in data.chunks(config.batch_size) {
                let (mut ga, mut gb) =
                    grad_for(&poles, &weights, batch, data_spec.t_star, symmetric)?;
                if symmetric {
                    symmetrize(&mut ga);
                    symmetrize(&mut gb);
                }
                let lr = config.learning_rate;
                let decay = 1.0 - lr * config.weight_decay;
                for i in 0..poles.len() {
                    poles[i] = poles[i] * decay - lr * ga[i];
                    weights[i] = weights[i] * decay - lr * gb[i];
                    let modulus = poles[i].norm();
                    if modulus >= STABILITY_RADIUS {
                        poles[i] *= STABILITY_RADIUS / modulus;
                    }
                }
            }
        }
        let p = FilterParams::new(poles.clone(), weights.clone(), convention)?;
        let mse = empirical_mse(&p, &data, data_spec.t_star)?;
        if !mse.is_finite() || mse > DIVERGENCE_LIMIT {
            return Err(Error::Divergence { epoch, mse });
        }
        loss_curve.push(mse);
    }

    let final_params = FilterParams::new(poles, weights, convention)?;
    let final_mse = *loss_curve.last().ok_or_else(|| {
        Error::Validation("training needs at least one epoch".into())
    })?;
    Ok(TrainRun {
        config: *config,
        data_spec: *data_spec,
        loss_curve,
        final_mse,
        final_params,
    })
}
