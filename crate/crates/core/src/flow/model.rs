//! Dense velocity network with hand-written backpropagation.
//!
//! Input is `[x (data_dim), t, one_hot(cond) (cond_dim + 1)]`, where the last
//! one-hot slot is the null condition. Two tanh hidden layers feed a linear
//! output of size `data_dim`. Parameters live in one flat vector:
//! `W1 | b1 | W2 | b2 | W3 | b3`, weights row-major `(out, in)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const DEFAULT_HIDDEN: usize = 64;

/// Conditioning label; `Null` drops the condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cond {
    Label(usize),
    Null,
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Label(i) => write!(f, "{i}"),
            Cond::Null => f.write_str("null"),
        }
    }
}

/// Anything that predicts a velocity at `(x, t)` under a condition.
pub trait VelocityField {
    fn data_dim(&self) -> usize;
    fn velocity(&self, x: &[f64], t: f64, cond: Cond) -> Vec<f64>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct VelocityModel {
    data_dim: usize,
    cond_dim: usize,
    hidden: usize,
    params: Vec<f64>,
}

/// Offsets of each parameter block within the flat vector.
#[derive(Clone, Copy, Debug)]
struct Layout {
    input: usize,
    hidden: usize,
    output: usize,
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    w3: usize,
    b3: usize,
    total: usize,
}

impl Layout {
    fn new(data_dim: usize, cond_dim: usize, hidden: usize) -> Self {
        let input = data_dim + 1 + cond_dim + 1;
        let w1 = 0;
        let b1 = w1 + hidden * input;
        let w2 = b1 + hidden;
        let b2 = w2 + hidden * hidden;
        let w3 = b2 + hidden;
        let b3 = w3 + data_dim * hidden;
        let total = b3 + data_dim;
        Layout { input, hidden, output: data_dim, w1, b1, w2, b2, w3, b3, total }
    }
}

/// Activations kept from a forward pass for the backward pass.
pub(crate) struct Trace {
    z: Vec<f64>,
    h1: Vec<f64>,
    h2: Vec<f64>,
    pub(crate) out: Vec<f64>,
}

fn dense(w: &[f64], b: &[f64], x: &[f64], out: &mut [f64]) {
    let n_in = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &w[i * n_in..(i + 1) * n_in];
        *o = b[i] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

impl VelocityModel {
    /// Random initialization: weights `N(0, 1/fan_in)`, zero biases.
    pub fn new<R: Rng>(data_dim: usize, cond_dim: usize, hidden: usize, rng: &mut R) -> Self {
        assert!(data_dim > 0 && hidden > 0, "dimensions must be positive");
        let l = Layout::new(data_dim, cond_dim, hidden);
        let mut params = vec![0.0; l.total];
        let mut fill = |start: usize, len: usize, fan_in: usize| {
            let scale = (1.0 / fan_in as f64).sqrt();
            for p in &mut params[start..start + len] {
                *p = scale * rng.sample::<f64, _>(StandardNormal);
            }
        };
        fill(l.w1, hidden * l.input, l.input);
        fill(l.w2, hidden * hidden, hidden);
        fill(l.w3, data_dim * hidden, hidden);
        VelocityModel { data_dim, cond_dim, hidden, params }
    }

    pub fn from_params(data_dim: usize, cond_dim: usize, hidden: usize, params: Vec<f64>) -> Option<Self> {
        (Layout::new(data_dim, cond_dim, hidden).total == params.len())
            .then_some(VelocityModel { data_dim, cond_dim, hidden, params })
    }

    pub fn param_count(data_dim: usize, cond_dim: usize, hidden: usize) -> usize {
        Layout::new(data_dim, cond_dim, hidden).total
    }

    pub fn cond_dim(&self) -> usize {
        self.cond_dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    fn layout(&self) -> Layout {
        Layout::new(self.data_dim, self.cond_dim, self.hidden)
    }

    /// Slot of `cond` in the one-hot block; out-of-range labels panic.
    fn cond_slot(&self, cond: Cond) -> usize {
        match cond {
            Cond::Label(i) => {
                assert!(i < self.cond_dim, "label {i} out of range for cond_dim {}", self.cond_dim);
                i
            }
            Cond::Null => self.cond_dim,
        }
    }

    pub(crate) fn forward_trace(&self, x: &[f64], t: f64, cond: Cond) -> Trace {
        assert_eq!(x.len(), self.data_dim, "input dimension mismatch");
        let l = self.layout();
        let p = &self.params;
        let mut z = vec![0.0; l.input];
        z[..self.data_dim].copy_from_slice(x);
        z[self.data_dim] = t;
        z[self.data_dim + 1 + self.cond_slot(cond)] = 1.0;

        let mut h1 = vec![0.0; l.hidden];
        dense(&p[l.w1..l.b1], &p[l.b1..l.w2], &z, &mut h1);
        h1.iter_mut().for_each(|v| *v = v.tanh());
        let mut h2 = vec![0.0; l.hidden];
        dense(&p[l.w2..l.b2], &p[l.b2..l.w3], &h1, &mut h2);
        h2.iter_mut().for_each(|v| *v = v.tanh());
        let mut out = vec![0.0; l.output];
        dense(&p[l.w3..l.b3], &p[l.b3..l.total], &h2, &mut out);
        Trace { z, h1, h2, out }
    }

    /// Accumulates `d loss / d params` into `grad` given `d loss / d out`.
    pub(crate) fn backward(&self, trace: &Trace, d_out: &[f64], grad: &mut [f64]) {
        let l = self.layout();
        let p = &self.params;
        let (h, o) = (l.hidden, l.output);

        for i in 0..o {
            grad[l.b3 + i] += d_out[i];
            for j in 0..h {
                grad[l.w3 + i * h + j] += d_out[i] * trace.h2[j];
            }
        }
        let mut d_h2 = vec![0.0; h];
        for j in 0..h {
            let mut s = 0.0;
            for i in 0..o {
                s += p[l.w3 + i * h + j] * d_out[i];
            }
            d_h2[j] = s * (1.0 - trace.h2[j] * trace.h2[j]);
        }

        for i in 0..h {
            grad[l.b2 + i] += d_h2[i];
            let row = l.w2 + i * h;
            for j in 0..h {
                grad[row + j] += d_h2[i] * trace.h1[j];
            }
        }
        let mut d_h1 = vec![0.0; h];
        for i in 0..h {
            let row = l.w2 + i * h;
            for j in 0..h {
                d_h1[j] += p[row + j] * d_h2[i];
            }
        }
        for j in 0..h {
            d_h1[j] *= 1.0 - trace.h1[j] * trace.h1[j];
        }

        let n_in = l.input;
        for i in 0..h {
            grad[l.b1 + i] += d_h1[i];
            let row = l.w1 + i * n_in;
            for (k, zk) in trace.z.iter().enumerate() {
                if *zk != 0.0 {
                    grad[row + k] += d_h1[i] * zk;
                }
            }
        }
    }
}

impl VelocityField for VelocityModel {
    fn data_dim(&self) -> usize {
        self.data_dim
    }

    fn velocity(&self, x: &[f64], t: f64, cond: Cond) -> Vec<f64> {
        self.forward_trace(x, t, cond).out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn layout_counts_parameters() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let m = VelocityModel::new(3, 3, 64, &mut rng);
        // input = 3 + 1 + 4 = 8
        assert_eq!(m.n_params(), 64 * 8 + 64 + 64 * 64 + 64 + 3 * 64 + 3);
        assert!(VelocityModel::from_params(3, 3, 64, vec![0.0; 10]).is_none());
    }

    #[test]
    fn null_and_labels_select_distinct_inputs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let m = VelocityModel::new(2, 2, 8, &mut rng);
        let x = [0.3, -0.2];
        let a = m.velocity(&x, 0.5, Cond::Label(0));
        let b = m.velocity(&x, 0.5, Cond::Label(1));
        let c = m.velocity(&x, 0.5, Cond::Null);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, m.velocity(&x, 0.5, Cond::Label(0)));
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn out_of_range_label_panics() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let m = VelocityModel::new(2, 2, 8, &mut rng);
        m.velocity(&[0.0, 0.0], 0.5, Cond::Label(2));
    }
}
