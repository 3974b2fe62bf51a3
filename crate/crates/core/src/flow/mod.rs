//! Toy conditional flow matching.
//!
//! Convention: `x0` is data, `x1` is noise, `x_t = (1 - t) x0 + t x1`, and the
//! model regresses `u = x1 - x0`. Sampling integrates from `t = 1` down to
//! `t = 0` with `x <- x - dt * v`.

mod checkpoint;
mod data;
mod eval;
mod model;

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointError, CheckpointHeader};
pub use data::{
    gaussian_mixture_2d, mixed_dataset, real_dataset, synthetic_dataset, ToyDataset, REAL_LABEL, REFERENCE_LABEL,
    SYNTHETIC_LABEL, TOY_COND_DIM, TOY_DATA_DIM,
};
pub use eval::energy_distance;
pub use model::{Cond, VelocityField, VelocityModel, DEFAULT_HIDDEN};

use crate::seed::{derive_seed, stream};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FlowError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset label {label} out of range for cond_dim {cond_dim}")]
    Label { label: usize, cond_dim: usize },
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("training diverged at step {step}: loss {loss}")]
    Diverged { step: usize, loss: f64 },
    #[error("n_steps must be >= 1")]
    ZeroSteps,
    #[error("sampler state became non-finite at step {0}")]
    NonFinite(usize),
}

fn check_dim(expected: usize, found: usize) -> Result<(), FlowError> {
    if expected != found {
        return Err(FlowError::Dimension { expected, found });
    }
    Ok(())
}

/// Point on the linear path between data `x0` and noise `x1`.
pub fn interpolate(x0: &[f64], x1: &[f64], t: f64) -> Vec<f64> {
    x0.iter().zip(x1).map(|(a, b)| (1.0 - t) * a + t * b).collect()
}

/// Flow-matching loss `|v - (x1 - x0)|^2` and its gradient w.r.t. all parameters.
pub fn flow_match_loss(
    model: &VelocityModel,
    x0: &[f64],
    x1: &[f64],
    t: f64,
    cond: Cond,
) -> Result<(f64, Vec<f64>), FlowError> {
    let mut grad = vec![0.0; model.n_params()];
    let loss = accumulate_loss(model, x0, x1, t, cond, 1.0, &mut grad)?;
    Ok((loss, grad))
}

/// Adds `scale * d loss / d params` to `grad` and returns the unscaled loss.
fn accumulate_loss(
    model: &VelocityModel,
    x0: &[f64],
    x1: &[f64],
    t: f64,
    cond: Cond,
    scale: f64,
    grad: &mut [f64],
) -> Result<f64, FlowError> {
    let d = model.data_dim();
    check_dim(d, x0.len())?;
    check_dim(d, x1.len())?;
    let xt = interpolate(x0, x1, t);
    let trace = model.forward_trace(&xt, t, cond);
    let mut loss = 0.0;
    let mut d_out = vec![0.0; d];
    for i in 0..d {
        let r = trace.out[i] - (x1[i] - x0[i]);
        loss += r * r;
        d_out[i] = 2.0 * r * scale;
    }
    model.backward(&trace, &d_out, grad);
    Ok(loss)
}

/// Learning-rate schedule over the training run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LrSchedule {
    Constant,
    /// Half-cosine decay from `learning_rate` to zero.
    #[default]
    Cosine,
}

impl LrSchedule {
    pub fn rate(self, base: f64, step: usize, steps: usize) -> f64 {
        match self {
            LrSchedule::Constant => base,
            LrSchedule::Cosine => 0.5 * base * (1.0 + (std::f64::consts::PI * step as f64 / steps as f64).cos()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub steps: usize,
    pub batch_size: usize,
    pub cond_dropout: f64,
    pub momentum: f64,
    #[serde(default)]
    pub schedule: LrSchedule,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { learning_rate: 0.02, steps: 3000, batch_size: 64, cond_dropout: 0.1, momentum: 0.9, schedule: LrSchedule::Cosine, seed: 0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |m: &str| Err(FlowError::Config(m.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if !(0.0..1.0).contains(&self.cond_dropout) {
            return bad("cond_dropout must lie in [0, 1)");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Minibatch SGD with heavy-ball momentum. Returns the per-step mean batch loss.
///
/// Each step draws `batch_size` dataset indices with replacement, a fresh
/// noise point and `t ~ U(0, 1)` per item, and nulls the condition with
/// probability `cond_dropout`. All draws come from one seeded stream, and the
/// batch is reduced in index order.
pub fn train(
    model: &VelocityModel,
    data: &ToyDataset,
    cfg: &TrainConfig,
) -> Result<(VelocityModel, Vec<f64>), FlowError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(FlowError::EmptyDataset);
    }
    check_dim(model.data_dim(), data.data_dim())?;
    if let Some(label) = data.labels().find(|&l| l >= model.cond_dim()) {
        return Err(FlowError::Label { label, cond_dim: model.cond_dim() });
    }

    let mut model = model.clone();
    let mut velocity = vec![0.0; model.n_params()];
    let mut grad = vec![0.0; model.n_params()];
    let mut trace = Vec::with_capacity(cfg.steps);
    let mut rng = stream(cfg.seed, 0);
    let d = model.data_dim();
    let scale = 1.0 / cfg.batch_size as f64;

    for step in 0..cfg.steps {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut total = 0.0;
        for _ in 0..cfg.batch_size {
            let (x0, data_cond) = data.get(rng.gen_range(0..data.len()));
            let x1: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let t: f64 = rng.gen();
            let cond = if rng.gen::<f64>() < cfg.cond_dropout { Cond::Null } else { data_cond };
            total += accumulate_loss(&model, x0, &x1, t, cond, scale, &mut grad)?;
        }
        let loss = total * scale;
        if !loss.is_finite() {
            return Err(FlowError::Diverged { step, loss });
        }
        trace.push(loss);
        let lr = cfg.schedule.rate(cfg.learning_rate, step, cfg.steps);
        for ((p, v), g) in model.params_mut().iter_mut().zip(&mut velocity).zip(&grad) {
            *v = cfg.momentum * *v - lr * g;
            *p += *v;
        }
        if !model.is_finite() {
            return Err(FlowError::Diverged { step, loss: f64::NAN });
        }
    }
    Ok((model, trace))
}

/// Seeded standard-normal starting point for the sampler.
pub fn initial_noise(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, 0);
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Integration time at Euler step `k` of `n_steps`.
pub fn step_time(k: usize, n_steps: usize) -> f64 {
    1.0 - k as f64 / n_steps as f64
}

/// One Euler step toward data: `x - dt * v`.
pub fn euler_step(x: &[f64], v: &[f64], dt: f64) -> Vec<f64> {
    x.iter().zip(v).map(|(a, b)| a - dt * b).collect()
}

/// Integrates the learned flow from seeded noise at `t = 1` to `t = 0`.
pub fn sample<F: VelocityField + ?Sized>(model: &F, cond: Cond, n_steps: usize, seed: u64) -> Result<Vec<f64>, FlowError> {
    if n_steps == 0 {
        return Err(FlowError::ZeroSteps);
    }
    let dt = 1.0 / n_steps as f64;
    let mut x = initial_noise(model.data_dim(), seed);
    for k in 0..n_steps {
        let v = model.velocity(&x, step_time(k, n_steps), cond);
        x = euler_step(&x, &v, dt);
        if x.iter().any(|c| !c.is_finite()) {
            return Err(FlowError::NonFinite(k));
        }
    }
    Ok(x)
}

/// `n` samples; sample `i` uses `derive_seed(seed, i)`.
pub fn sample_many<F: VelocityField + Sync + ?Sized>(
    model: &F,
    cond: Cond,
    n_steps: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, FlowError> {
    (0..n).into_par_iter().map(|i| sample(model, cond, n_steps, derive_seed(seed, i as u64))).collect()
}
