//! Feedforward neural network: one ReLU hidden layer, softmax output,
//! cross-entropy loss, trained by mini-batch gradient descent with
//! backpropagation. Includes a finite-difference gradient checker.

use rand::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::seeded_rng;
use crate::ssga::FeatureMask;

use super::LabeledSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FfnnConfig {
    pub hidden_units: usize,
    pub max_iterations: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub batch_size: usize,
    /// Loss-improvement tolerance for convergence detection.
    pub tolerance: f64,
    /// Epochs without improvement before training is declared converged.
    pub patience: usize,
}

impl Default for FfnnConfig {
    fn default() -> Self {
        Self {
            hidden_units: 100,
            max_iterations: 2000,
            learning_rate: 1e-3,
            seed: 0,
            batch_size: 16,
            tolerance: 1e-4,
            patience: 10,
        }
    }
}

impl FfnnConfig {
    pub(super) fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 {
            return Err(Error::Config("ffnn hidden_units must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("ffnn max_iterations must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("ffnn learning_rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("ffnn batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Network weights: input -> hidden (ReLU) -> output (softmax).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FfnnParams {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
    /// Hidden weights, row-major `hidden_dim x input_dim`.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// Output weights, row-major `output_dim x hidden_dim`.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl FfnnParams {
    pub(crate) fn init(input_dim: usize, hidden_dim: usize, output_dim: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed, "ffnn-init");
        let lim1 = (6.0 / (input_dim + hidden_dim) as f64).sqrt();
        let lim2 = (6.0 / (hidden_dim + output_dim) as f64).sqrt();
        let w1 = (0..hidden_dim * input_dim).map(|_| rng.gen_range(-lim1..lim1)).collect();
        let w2 = (0..output_dim * hidden_dim).map(|_| rng.gen_range(-lim2..lim2)).collect();
        Self {
            input_dim,
            hidden_dim,
            output_dim,
            w1,
            b1: vec![0.0; hidden_dim],
            w2,
            b2: vec![0.0; output_dim],
        }
    }

    fn hidden(&self, x: &[f64]) -> Vec<f64> {
        let mut z1 = self.b1.clone();
        for h in 0..self.hidden_dim {
            let row = &self.w1[h * self.input_dim..(h + 1) * self.input_dim];
            let mut s = 0.0;
            for (w, xi) in row.iter().zip(x) {
                s += w * xi;
            }
            z1[h] += s;
        }
        z1
    }

    /// Per-class log-odds (pre-softmax activations).
    pub fn decision_values(&self, x: &[f64]) -> Vec<f64> {
        let z1 = self.hidden(x);
        let a1: Vec<f64> = z1.iter().map(|&z| z.max(0.0)).collect();
        let mut z2 = self.b2.clone();
        for c in 0..self.output_dim {
            let row = &self.w2[c * self.hidden_dim..(c + 1) * self.hidden_dim];
            let mut s = 0.0;
            for (w, ai) in row.iter().zip(&a1) {
                s += w * ai;
            }
            z2[c] += s;
        }
        z2
    }

    /// Softmax class probabilities.
    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        softmax(&self.decision_values(x))
    }

    /// Mean cross-entropy loss over a batch.
    pub fn loss(&self, rows: &[Vec<f64>], y: &[usize]) -> f64 {
        let mut total = 0.0;
        for (x, &yi) in rows.iter().zip(y) {
            let p = self.probabilities(x);
            total -= p[yi].max(1e-300).ln();
        }
        total / rows.len() as f64
    }

    /// Backpropagated gradient of the mean loss, flattened in the same order
    /// as [`Self::flat_params`].
    pub fn grad(&self, rows: &[Vec<f64>], y: &[usize]) -> Vec<f64> {
        let mut g_w1 = vec![0.0; self.w1.len()];
        let mut g_b1 = vec![0.0; self.b1.len()];
        let mut g_w2 = vec![0.0; self.w2.len()];
        let mut g_b2 = vec![0.0; self.b2.len()];
        let scale = 1.0 / rows.len() as f64;
        for (x, &yi) in rows.iter().zip(y) {
            let z1 = self.hidden(x);
            let a1: Vec<f64> = z1.iter().map(|&z| z.max(0.0)).collect();
            let mut z2 = self.b2.clone();
            for c in 0..self.output_dim {
                let row = &self.w2[c * self.hidden_dim..(c + 1) * self.hidden_dim];
                for (w, ai) in row.iter().zip(&a1) {
                    z2[c] += w * ai;
                }
            }
            let p = softmax(&z2);
            // dL/dz2 = p - onehot(y)
            let mut dz2 = p;
            dz2[yi] -= 1.0;
            for c in 0..self.output_dim {
                let d = dz2[c] * scale;
                g_b2[c] += d;
                let row = &mut g_w2[c * self.hidden_dim..(c + 1) * self.hidden_dim];
                for (g, ai) in row.iter_mut().zip(&a1) {
                    *g += d * ai;
                }
            }
            // dL/dz1 = (W2^T dz2) * relu'(z1)
            for h in 0..self.hidden_dim {
                if z1[h] <= 0.0 {
                    continue;
                }
                let mut da = 0.0;
                for c in 0..self.output_dim {
                    da += self.w2[c * self.hidden_dim + h] * dz2[c];
                }
                let d = da * scale;
                g_b1[h] += d;
                let row = &mut g_w1[h * self.input_dim..(h + 1) * self.input_dim];
                for (g, xi) in row.iter_mut().zip(x) {
                    *g += d * xi;
                }
            }
        }
        let mut flat = g_w1;
        flat.extend(g_b1);
        flat.extend(g_w2);
        flat.extend(g_b2);
        flat
    }

    pub fn flat_params(&self) -> Vec<f64> {
        let mut flat = self.w1.clone();
        flat.extend(self.b1.iter());
        flat.extend(self.w2.iter());
        flat.extend(self.b2.iter());
        flat
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) {
        let mut cursor = 0;
        for dst in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            let len = dst.len();
            dst.copy_from_slice(&flat[cursor..cursor + len]);
            cursor += len;
        }
    }

    fn apply_gradient(&mut self, grad: &[f64], lr: f64) {
        let mut cursor = 0;
        for dst in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            for v in dst.iter_mut() {
                *v -= lr * grad[cursor];
                cursor += 1;
            }
        }
    }
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / total).collect()
}

/// Train by mini-batch gradient descent. Returns the parameters and whether
/// the loss plateaued (converged) before the iteration cap.
pub(super) fn fit(
    rows: &[Vec<f64>],
    y: &[usize],
    num_classes: usize,
    config: &FfnnConfig,
) -> (FfnnParams, bool) {
    let input_dim = rows[0].len();
    let mut params = FfnnParams::init(input_dim, config.hidden_units, num_classes, config.seed);
    let mut rng = seeded_rng(config.seed, "ffnn-batches");
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut best_loss = f64::INFINITY;
    let mut stale_epochs = 0;
    let mut converged = false;
    for _ in 0..config.max_iterations {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let batch_rows: Vec<Vec<f64>> = chunk.iter().map(|&i| rows[i].clone()).collect();
            let batch_y: Vec<usize> = chunk.iter().map(|&i| y[i]).collect();
            let grad = params.grad(&batch_rows, &batch_y);
            params.apply_gradient(&grad, config.learning_rate);
        }
        let loss = params.loss(rows, y);
        if loss < best_loss - config.tolerance {
            best_loss = loss;
            stale_epochs = 0;
        } else {
            stale_epochs += 1;
            if stale_epochs >= config.patience {
                converged = true;
                break;
            }
        }
    }
    (params, converged)
}

/// Compare the backpropagated gradient against central finite differences
/// (h = 1e-5) over every parameter; returns the largest relative error.
///
/// The toy set is used raw: full mask, no pipeline.
pub fn gradient_check(config: &FfnnConfig, toy_set: &LabeledSet) -> Result<f64> {
    config.validate()?;
    if toy_set.is_empty() {
        return Err(Error::Evaluation("gradient check needs a non-empty set".into()));
    }
    let mask = FeatureMask::all_ones();
    let rows: Vec<Vec<f64>> = toy_set.vectors.iter().map(|v| mask.select(&v.values)).collect();
    let label_set = toy_set.label_set();
    let y: Vec<usize> = toy_set
        .labels
        .iter()
        .map(|l| label_set.binary_search(l).expect("label present"))
        .collect();
    let params = FfnnParams::init(rows[0].len(), config.hidden_units, label_set.len(), config.seed);
    let analytic = params.grad(&rows, &y);
    Ok(max_relative_error(&params, &rows, &y, &analytic))
}

pub(crate) fn max_relative_error(
    params: &FfnnParams,
    rows: &[Vec<f64>],
    y: &[usize],
    analytic: &[f64],
) -> f64 {
    let h = 1e-5;
    let flat = params.flat_params();
    let mut probe = params.clone();
    let mut worst = 0.0f64;
    for k in 0..flat.len() {
        let mut plus = flat.clone();
        plus[k] += h;
        probe.set_flat_params(&plus);
        let up = probe.loss(rows, y);
        let mut minus = flat.clone();
        minus[k] -= h;
        probe.set_flat_params(&minus);
        let down = probe.loss(rows, y);
        let numeric = (up - down) / (2.0 * h);
        let denom = analytic[k].abs() + numeric.abs();
        let rel = if denom < 1e-8 { 0.0 } else { (analytic[k] - numeric).abs() / denom };
        worst = worst.max(rel);
    }
    worst
}

