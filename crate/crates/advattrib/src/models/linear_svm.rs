//! One-vs-rest linear SVM trained by dual coordinate descent on the L1-loss
//! (hinge) objective, with the bias folded in as a constant feature.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::SvmConfig;
use crate::seed::seeded_rng;

/// One weight vector per class; the last component of each is the bias.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearOvr {
    pub weights: Vec<Vec<f64>>,
}

impl LinearOvr {
    pub fn decision_values(&self, row: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| {
                let mut s = w[w.len() - 1];
                for (wi, xi) in w.iter().zip(row) {
                    s += wi * xi;
                }
                s
            })
            .collect()
    }
}

pub(super) fn fit(rows: &[Vec<f64>], y: &[usize], num_classes: usize, config: &SvmConfig) -> LinearOvr {
    let weights = (0..num_classes)
        .map(|class| {
            let targets: Vec<f64> =
                y.iter().map(|&yi| if yi == class { 1.0 } else { -1.0 }).collect();
            fit_binary(rows, &targets, config, class)
        })
        .collect();
    LinearOvr { weights }
}

/// Dual coordinate descent for one binary subproblem. Each coordinate update
/// has the closed form alpha_i <- clip(alpha_i - g_i / Q_ii, 0, C); the
/// primal weights are maintained incrementally. Stops when the largest
/// projected gradient violation falls below the tolerance.
fn fit_binary(rows: &[Vec<f64>], targets: &[f64], config: &SvmConfig, class: usize) -> Vec<f64> {
    let n = rows.len();
    let d = rows[0].len();
    // Augmented dimension: bias as a constant 1.0 feature.
    let q_diag: Vec<f64> =
        rows.iter().map(|r| r.iter().map(|x| x * x).sum::<f64>() + 1.0).collect();
    let mut w = vec![0.0; d + 1];
    let mut alpha = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = seeded_rng(config.seed, &format!("lsvm-class-{class}"));
    for _ in 0..config.max_epochs {
        order.shuffle(&mut rng);
        let mut max_violation = 0.0f64;
        for &i in &order {
            let xi = &rows[i];
            let yi = targets[i];
            let mut dot = w[d];
            for (wj, xj) in w.iter().zip(xi) {
                dot += wj * xj;
            }
            let g = yi * dot - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= config.c {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / q_diag[i]).clamp(0.0, config.c);
                let delta = (alpha[i] - old) * yi;
                if delta != 0.0 {
                    for (wj, xj) in w.iter_mut().zip(xi) {
                        *wj += delta * xj;
                    }
                    w[d] += delta;
                }
            }
        }
        if max_violation < config.tolerance {
            break;
        }
    }
    w
}
