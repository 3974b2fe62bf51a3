//! Classifier-free guidance and SimDrop sampling over toy velocity fields.
//!
//! SimDrop combines a generator trained on mixed data with a reference model
//! that only captures the synthetic look:
//!
//! `v* = gen(l, t) - alpha * (ref(l, t_hat) - ref(l, n_hat)) + beta * (gen(l, t) - gen(l, n))`
//!
//! One forward pass of `gen(l, t)` serves both the base term and the CFG delta.

use crate::flow::{
    euler_step, initial_noise, mixed_dataset, sample_many, step_time, synthetic_dataset, train, Cond, FlowError,
    LrSchedule, ToyDataset, TrainConfig, VelocityField, VelocityModel, REFERENCE_LABEL, SYNTHETIC_LABEL, TOY_COND_DIM,
    TOY_DATA_DIM,
};
use crate::seed::{derive_seed, stream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

pub const ANGLE_BINS: usize = 36;
pub const DEFAULT_BETA: f64 = 0.3;
pub const ALPHA_GRID: [f64; 2] = [0.1, 0.2];
pub const DEFAULT_SAMPLER_STEPS: usize = 50;

#[derive(Debug, Error, PartialEq)]
pub enum GuidanceError {
    #[error("generator has data_dim {gen} but reference has {reference}")]
    DimMismatch { gen: usize, reference: usize },
    #[error("guidance weights must be finite and >= 0 (alpha {alpha}, beta {beta})")]
    BadWeight { alpha: f64, beta: f64 },
    #[error("experiment needs data_dim >= 3, got {0}")]
    TooFewDims(usize),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuidanceParams {
    pub alpha: f64,
    pub beta: f64,
    pub t: Cond,
    pub n: Cond,
    pub t_hat: Cond,
    pub n_hat: Cond,
}

impl Default for GuidanceParams {
    /// Marginal generation steered away from the synthetic tag, with the
    /// reference model prompted by its own training caption.
    fn default() -> Self {
        GuidanceParams {
            alpha: ALPHA_GRID[1],
            beta: DEFAULT_BETA,
            t: Cond::Null,
            n: Cond::Label(SYNTHETIC_LABEL),
            t_hat: Cond::Label(REFERENCE_LABEL),
            n_hat: Cond::Null,
        }
    }
}

impl GuidanceParams {
    pub fn validate(&self) -> Result<(), GuidanceError> {
        let ok = |w: f64| w.is_finite() && w >= 0.0;
        if !(ok(self.alpha) && ok(self.beta)) {
            return Err(GuidanceError::BadWeight { alpha: self.alpha, beta: self.beta });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuidedSamplerState {
    pub point: Vec<f64>,
    pub step: usize,
    pub time: f64,
}

impl GuidedSamplerState {
    pub fn start(point: Vec<f64>) -> Self {
        GuidedSamplerState { point, step: 0, time: 1.0 }
    }
}

/// `model(l, t_cond) - model(l, n_cond)` at integration time `time`.
pub fn guidance_delta<F: VelocityField + ?Sized>(model: &F, l: &[f64], time: f64, t_cond: Cond, n_cond: Cond) -> Vec<f64> {
    let a = model.velocity(l, time, t_cond);
    let b = model.velocity(l, time, n_cond);
    a.iter().zip(&b).map(|(x, y)| x - y).collect()
}

/// `base + beta * (base - gen(l, n))`, skipping the term entirely at `beta = 0`.
fn add_cfg<F: VelocityField + ?Sized>(gen: &F, l: &[f64], time: f64, n: Cond, beta: f64, v: &mut [f64], base: &[f64]) {
    if beta != 0.0 {
        let neg = gen.velocity(l, time, n);
        for ((vi, b), ni) in v.iter_mut().zip(base).zip(&neg) {
            *vi += beta * (b - ni);
        }
    }
}

fn advance(state: &GuidedSamplerState, v: &[f64], n_steps: usize) -> Result<GuidedSamplerState, FlowError> {
    let point = euler_step(&state.point, v, 1.0 / n_steps as f64);
    if point.iter().any(|c| !c.is_finite()) {
        return Err(FlowError::NonFinite(state.step));
    }
    let step = state.step + 1;
    Ok(GuidedSamplerState { point, step, time: step_time(step, n_steps) })
}

/// The effective SimDrop velocity at `state`.
pub fn simdrop_velocity<G: VelocityField + ?Sized, R: VelocityField + ?Sized>(
    gen: &G,
    reference: &R,
    state: &GuidedSamplerState,
    params: &GuidanceParams,
) -> Vec<f64> {
    let l = &state.point;
    let base = gen.velocity(l, state.time, params.t);
    let mut v = base.clone();
    if params.alpha != 0.0 {
        let dr = guidance_delta(reference, l, state.time, params.t_hat, params.n_hat);
        for (vi, d) in v.iter_mut().zip(&dr) {
            *vi -= params.alpha * d;
        }
    }
    add_cfg(gen, l, state.time, params.n, params.beta, &mut v, &base);
    v
}

/// One Euler step with the SimDrop velocity.
pub fn simdrop_step<G: VelocityField + ?Sized, R: VelocityField + ?Sized>(
    gen: &G,
    reference: &R,
    state: &GuidedSamplerState,
    params: &GuidanceParams,
    n_steps: usize,
) -> Result<GuidedSamplerState, GuidanceError> {
    if gen.data_dim() != reference.data_dim() {
        return Err(GuidanceError::DimMismatch { gen: gen.data_dim(), reference: reference.data_dim() });
    }
    if n_steps == 0 {
        return Err(FlowError::ZeroSteps.into());
    }
    let v = simdrop_velocity(gen, reference, state, params);
    Ok(advance(state, &v, n_steps)?)
}

/// One Euler step with plain classifier-free guidance of weight `beta`.
pub fn cfg_step<G: VelocityField + ?Sized>(
    gen: &G,
    state: &GuidedSamplerState,
    t: Cond,
    n: Cond,
    beta: f64,
    n_steps: usize,
) -> Result<GuidedSamplerState, GuidanceError> {
    if n_steps == 0 {
        return Err(FlowError::ZeroSteps.into());
    }
    let base = gen.velocity(&state.point, state.time, t);
    let mut v = base.clone();
    add_cfg(gen, &state.point, state.time, n, beta, &mut v, &base);
    Ok(advance(state, &v, n_steps)?)
}

/// Full guided trajectory from the seeded noise draw.
pub fn simdrop_sample<G: VelocityField + ?Sized, R: VelocityField + ?Sized>(
    gen: &G,
    reference: &R,
    params: &GuidanceParams,
    n_steps: usize,
    seed: u64,
) -> Result<Vec<f64>, GuidanceError> {
    let mut state = GuidedSamplerState::start(initial_noise(gen.data_dim(), seed));
    for _ in 0..n_steps {
        state = simdrop_step(gen, reference, &state, params, n_steps)?;
    }
    Ok(state.point)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub alpha: f64,
    pub beta: f64,
    pub n_samples: usize,
    pub covered_bins: usize,
    /// Fraction of the 36 ten-degree bins hit by at least one sample.
    pub angular_coverage: f64,
    /// Mean artifact coordinate; `None` when there are no samples.
    pub artifact_mean: Option<f64>,
    pub artifact_abs_mean: Option<f64>,
}

/// Angle bin of the `(x, y)` projection.
pub fn angle_bin(x: f64, y: f64) -> usize {
    let a = y.atan2(x).rem_euclid(TAU);
    ((a / TAU * ANGLE_BINS as f64) as usize).min(ANGLE_BINS - 1)
}

/// Coverage and artifact statistics of 3D toy samples.
pub fn summarize(samples: &[Vec<f64>], alpha: f64, beta: f64) -> ExperimentReport {
    let mut hit = [false; ANGLE_BINS];
    for s in samples {
        hit[angle_bin(s[0], s[1])] = true;
    }
    let covered_bins = hit.iter().filter(|h| **h).count();
    let n = samples.len();
    let (mean, abs_mean) = if n == 0 {
        (None, None)
    } else {
        let sum: f64 = samples.iter().map(|s| s[2]).sum();
        let abs: f64 = samples.iter().map(|s| s[2].abs()).sum();
        (Some(sum / n as f64), Some(abs / n as f64))
    };
    ExperimentReport {
        alpha,
        beta,
        n_samples: n,
        covered_bins,
        angular_coverage: covered_bins as f64 / ANGLE_BINS as f64,
        artifact_mean: mean,
        artifact_abs_mean: abs_mean,
    }
}

/// Draws `n_samples` guided samples (sample `i` seeded with
/// `derive_seed(seed, i)`) and summarizes them.
pub fn run_simdrop_experiment<G, R>(
    gen: &G,
    reference: &R,
    params: &GuidanceParams,
    n_samples: usize,
    n_steps: usize,
    seed: u64,
) -> Result<ExperimentReport, GuidanceError>
where
    G: VelocityField + Sync + ?Sized,
    R: VelocityField + Sync + ?Sized,
{
    params.validate()?;
    if gen.data_dim() < 3 {
        return Err(GuidanceError::TooFewDims(gen.data_dim()));
    }
    let samples = (0..n_samples)
        .into_par_iter()
        .map(|i| simdrop_sample(gen, reference, params, n_steps, derive_seed(seed, i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(&samples, params.alpha, params.beta))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seed: u64,
    pub n_steps: usize,
    /// CFG-only baseline (`alpha = 0`) first, then one row per alpha.
    pub runs: Vec<ExperimentReport>,
}

/// The CFG-only baseline followed by each alpha, sharing seeds so the rows
/// differ only in the guidance weight.
pub fn alpha_sweep<G, R>(
    gen: &G,
    reference: &R,
    base: &GuidanceParams,
    alphas: &[f64],
    n_samples: usize,
    n_steps: usize,
    seed: u64,
) -> Result<SweepReport, GuidanceError>
where
    G: VelocityField + Sync + ?Sized,
    R: VelocityField + Sync + ?Sized,
{
    let mut runs = Vec::with_capacity(alphas.len() + 1);
    for &alpha in std::iter::once(&0.0).chain(alphas) {
        let params = GuidanceParams { alpha, ..*base };
        runs.push(run_simdrop_experiment(gen, reference, &params, n_samples, n_steps, seed)?);
    }
    Ok(SweepReport { seed, n_steps, runs })
}

/// Recipe for the generator / reference pair used by the transfer experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferSetup {
    pub n_points: usize,
    /// Synthetic share of the generator's training set.
    pub ratio: f64,
    pub hidden: usize,
    pub gen: TrainConfig,
    pub reference: TrainConfig,
    /// Generator samples kept under the null condition while fine-tuning the reference.
    pub prior_samples: usize,
    pub sampler_steps: usize,
}

impl Default for TransferSetup {
    fn default() -> Self {
        let gen = TrainConfig {
            learning_rate: 0.02,
            steps: 4000,
            batch_size: 128,
            cond_dropout: 0.2,
            momentum: 0.9,
            schedule: LrSchedule::Cosine,
            seed: 0,
        };
        let reference = TrainConfig { learning_rate: 0.005, steps: 1000, cond_dropout: 0.0, ..gen.clone() };
        TransferSetup {
            n_points: 20_000,
            ratio: 0.5,
            hidden: crate::flow::DEFAULT_HIDDEN,
            gen,
            reference,
            prior_samples: 5000,
            sampler_steps: DEFAULT_SAMPLER_STEPS,
        }
    }
}

/// Fine-tunes a copy of `gen` on `synthetic` with prior preservation:
/// `prior_samples` draws from `gen` under the null condition are mixed in,
/// still labeled null, so the reference keeps the generator's unconditional
/// behaviour and its caption condition absorbs only the synthetic look.
pub fn train_reference(
    gen: &VelocityModel,
    synthetic: &ToyDataset,
    prior_samples: usize,
    sampler_steps: usize,
    cfg: &TrainConfig,
) -> Result<VelocityModel, FlowError> {
    let prior = sample_many(gen, Cond::Null, sampler_steps, prior_samples, derive_seed(cfg.seed, 1))?;
    let data = synthetic.clone().with_unconditional(prior).ok_or(FlowError::Dimension {
        expected: synthetic.data_dim(),
        found: gen.data_dim(),
    })?;
    Ok(train(gen, &data, cfg)?.0)
}

/// Trains the generator on mixed data and the reference on synthetic-only
/// data with reference captions, all seeded from `seed`.
pub fn train_transfer_models(setup: &TransferSetup, seed: u64) -> Result<(VelocityModel, VelocityModel), FlowError> {
    let mixed = mixed_dataset(setup.n_points, setup.ratio, &mut stream(seed, 0));
    let synthetic = synthetic_dataset(setup.n_points, REFERENCE_LABEL, &mut stream(seed, 1));
    let init = VelocityModel::new(TOY_DATA_DIM, TOY_COND_DIM, setup.hidden, &mut stream(seed, 2));
    let gen_cfg = TrainConfig { seed: derive_seed(seed, 3), ..setup.gen.clone() };
    let (gen, _) = train(&init, &mixed, &gen_cfg)?;
    let ref_cfg = TrainConfig { seed: derive_seed(seed, 4), ..setup.reference.clone() };
    let reference = train_reference(&gen, &synthetic, setup.prior_samples, setup.sampler_steps, &ref_cfg)?;
    Ok((gen, reference))
}
