//! Labeled toy point clouds.
//!
//! The 3D "transfer" toy: real points sit on the upper half of the unit
//! circle with an artifact coordinate `z ~ N(0, 0.1^2)`; synthetic points
//! cover the full circle but carry `z ~ N(2, 0.1^2)`.

use super::Cond;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use std::f64::consts::PI;

pub const TOY_DATA_DIM: usize = 3;
/// Labels 0..3 plus the null slot.
pub const TOY_COND_DIM: usize = 3;
pub const REAL_LABEL: usize = 0;
pub const SYNTHETIC_LABEL: usize = 1;
/// Caption that ignores the aspect the reference model should not steer.
pub const REFERENCE_LABEL: usize = 2;

const ARTIFACT_SIGMA: f64 = 0.1;
const SYNTHETIC_ARTIFACT_MEAN: f64 = 2.0;

/// Labeled points; a point may also carry the null condition, which is how
/// prior-preservation samples enter a fine-tuning set.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyDataset {
    points: Vec<(Vec<f64>, Cond)>,
    cond_dim: usize,
}

impl ToyDataset {
    /// `None` when a label is out of range or dimensions disagree.
    pub fn new(points: Vec<(Vec<f64>, usize)>, cond_dim: usize) -> Option<Self> {
        let dim = points.first().map(|p| p.0.len());
        let ok = points.iter().all(|(x, l)| *l < cond_dim && Some(x.len()) == dim);
        ok.then(|| ToyDataset { points: points.into_iter().map(|(x, l)| (x, Cond::Label(l))).collect(), cond_dim })
    }

    /// Appends points under the null condition. `None` on a dimension mismatch.
    pub fn with_unconditional(mut self, points: Vec<Vec<f64>>) -> Option<Self> {
        let dim = self.points.first().map(|p| p.0.len()).or(points.first().map(Vec::len));
        if points.iter().any(|x| Some(x.len()) != dim) {
            return None;
        }
        self.points.extend(points.into_iter().map(|x| (x, Cond::Null)));
        Some(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Zero for an empty dataset.
    pub fn data_dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.0.len())
    }

    pub fn cond_dim(&self) -> usize {
        self.cond_dim
    }

    pub fn get(&self, i: usize) -> (&[f64], Cond) {
        let (x, l) = &self.points[i];
        (x, *l)
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(|p| p.0.as_slice())
    }

    pub fn conds(&self) -> impl Iterator<Item = Cond> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// Labels of the labeled points (null-conditioned points are skipped).
    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().filter_map(|p| match p.1 {
            Cond::Label(l) => Some(l),
            Cond::Null => None,
        })
    }
}

fn circle_point<R: Rng>(rng: &mut R, max_angle: f64, z_mean: f64) -> Vec<f64> {
    let a = rng.gen::<f64>() * max_angle;
    let z = Normal::new(z_mean, ARTIFACT_SIGMA).expect("valid sigma").sample(rng);
    vec![a.cos(), a.sin(), z]
}

fn real_point<R: Rng>(rng: &mut R) -> Vec<f64> {
    circle_point(rng, PI, 0.0)
}

fn synthetic_point<R: Rng>(rng: &mut R) -> Vec<f64> {
    circle_point(rng, 2.0 * PI, SYNTHETIC_ARTIFACT_MEAN)
}

pub fn real_dataset<R: Rng>(n: usize, rng: &mut R) -> ToyDataset {
    let points = (0..n).map(|_| (real_point(rng), Cond::Label(REAL_LABEL))).collect();
    ToyDataset { points, cond_dim: TOY_COND_DIM }
}

/// Synthetic points captioned with `label`: `SYNTHETIC_LABEL` for the mixed
/// generator, `REFERENCE_LABEL` for the reference model.
pub fn synthetic_dataset<R: Rng>(n: usize, label: usize, rng: &mut R) -> ToyDataset {
    assert!(label < TOY_COND_DIM, "label {label} out of range");
    let points = (0..n).map(|_| (synthetic_point(rng), Cond::Label(label))).collect();
    ToyDataset { points, cond_dim: TOY_COND_DIM }
}

/// Each point is synthetic (label 1) with probability `ratio`, otherwise real.
pub fn mixed_dataset<R: Rng>(n: usize, ratio: f64, rng: &mut R) -> ToyDataset {
    assert!((0.0..=1.0).contains(&ratio), "ratio must lie in [0, 1]");
    let points = (0..n)
        .map(|_| {
            if rng.gen::<f64>() < ratio {
                (synthetic_point(rng), Cond::Label(SYNTHETIC_LABEL))
            } else {
                (real_point(rng), Cond::Label(REAL_LABEL))
            }
        })
        .collect();
    ToyDataset { points, cond_dim: TOY_COND_DIM }
}

/// Three-component 2D mixture used for the unconditional learning check.
pub const MIXTURE: [([f64; 2], f64, f64); 3] = [([-1.0, 0.0], 0.5, 0.4), ([1.0, 0.5], 0.4, 0.35), ([0.0, -1.0], 0.45, 0.25)];

pub fn gaussian_mixture_2d<R: Rng>(n: usize, rng: &mut R) -> ToyDataset {
    let points = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = MIXTURE[MIXTURE.len() - 1];
            for c in MIXTURE {
                acc += c.2;
                if u < acc {
                    chosen = c;
                    break;
                }
            }
            let (mean, sigma, _) = chosen;
            let x: Vec<f64> = (0..2).map(|i| mean[i] + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
            (x, Cond::Label(0))
        })
        .collect();
    ToyDataset { points, cond_dim: 1 }
}
