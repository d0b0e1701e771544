//! One-vs-rest RBF-kernel SVM trained with a pairwise (SMO-style) dual
//! optimizer sized for desk-scale training sets.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GammaParam, SvmConfig};
use crate::error::{Error, Result};
use crate::seed::seeded_rng;

// Safety cap on optimizer sweeps; the pass-counter termination normally
// fires long before this.
const MAX_SWEEPS: usize = 5000;

/// Dual coefficients (alpha_i * y_i) per class over the shared support
/// matrix, plus per-class bias and the resolved kernel width.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RbfOvr {
    pub support: Vec<Vec<f64>>,
    pub dual_coef: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub gamma: f64,
}

impl RbfOvr {
    pub fn decision_values(&self, row: &[f64]) -> Vec<f64> {
        let k: Vec<f64> = self.support.iter().map(|s| rbf_kernel(s, row, self.gamma)).collect();
        self.dual_coef
            .iter()
            .zip(&self.bias)
            .map(|(coef, &b)| {
                let mut s = b;
                for (c, ki) in coef.iter().zip(&k) {
                    s += c * ki;
                }
                s
            })
            .collect()
    }
}

/// k(x, y) = exp(-gamma * ||x - y||^2)
pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let mut d2 = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        d2 += diff * diff;
    }
    (-gamma * d2).exp()
}

/// Resolve "scale" gamma: 1 / (active_features * Var(matrix entries)).
fn resolve_gamma(rows: &[Vec<f64>], gamma: GammaParam) -> f64 {
    match gamma {
        GammaParam::Value(g) => g,
        GammaParam::Scale => {
            let d = rows[0].len();
            let count = (rows.len() * d) as f64;
            let mean: f64 = rows.iter().flatten().sum::<f64>() / count;
            let var: f64 =
                rows.iter().flatten().map(|&x| (x - mean).powi(2)).sum::<f64>() / count;
            if var > 0.0 {
                1.0 / (d as f64 * var)
            } else {
                1.0
            }
        }
    }
}

pub(super) fn fit(
    rows: &[Vec<f64>],
    y: &[usize],
    num_classes: usize,
    config: &SvmConfig,
) -> Result<RbfOvr> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Training("rbf svm needs a non-empty training set".into()));
    }
    let gamma = resolve_gamma(rows, config.gamma);
    // Kernel matrix shared by every one-vs-rest subproblem.
    let mut kernel = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let k = rbf_kernel(&rows[i], &rows[j], gamma);
            kernel[i][j] = k;
            kernel[j][i] = k;
        }
    }
    let mut dual_coef = Vec::with_capacity(num_classes);
    let mut bias = Vec::with_capacity(num_classes);
    for class in 0..num_classes {
        let targets: Vec<f64> = y.iter().map(|&yi| if yi == class { 1.0 } else { -1.0 }).collect();
        let (coef, b) = smo_binary(&kernel, &targets, config, class);
        dual_coef.push(coef);
        bias.push(b);
    }
    Ok(RbfOvr { support: rows.to_vec(), dual_coef, bias, gamma })
}

/// Simplified SMO over one binary subproblem: sweep candidates violating the
/// KKT conditions, pair each with a random partner, and solve the
/// two-variable subproblem analytically. Terminates after `max_passes`
/// consecutive sweeps without an update.
fn smo_binary(kernel: &[Vec<f64>], targets: &[f64], config: &SvmConfig, class: usize) -> (Vec<f64>, f64) {
    let n = targets.len();
    let c = config.c;
    let tol = config.tolerance;
    let mut alpha = vec![0.0f64; n];
    let mut b = 0.0f64;
    let mut rng = seeded_rng(config.seed, &format!("rbfsvm-class-{class}"));

    let decision = |alpha: &[f64], b: f64, i: usize| -> f64 {
        let mut s = b;
        for j in 0..n {
            if alpha[j] != 0.0 {
                s += alpha[j] * targets[j] * kernel[j][i];
            }
        }
        s
    };

    let mut quiet_passes = 0;
    let mut sweeps = 0;
    while quiet_passes < config.max_passes && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut changed = 0;
        for i in 0..n {
            let e_i = decision(&alpha, b, i) - targets[i];
            let r_i = e_i * targets[i];
            if (r_i < -tol && alpha[i] < c) || (r_i > tol && alpha[i] > 0.0) {
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let e_j = decision(&alpha, b, j) - targets[j];
                let (a_i_old, a_j_old) = (alpha[i], alpha[j]);
                let (lo, hi) = if targets[i] != targets[j] {
                    ((a_j_old - a_i_old).max(0.0), (c + a_j_old - a_i_old).min(c))
                } else {
                    ((a_i_old + a_j_old - c).max(0.0), (a_i_old + a_j_old).min(c))
                };
                if lo >= hi {
                    continue;
                }
                let eta = 2.0 * kernel[i][j] - kernel[i][i] - kernel[j][j];
                if eta >= 0.0 {
                    continue;
                }
                let mut a_j = a_j_old - targets[j] * (e_i - e_j) / eta;
                a_j = a_j.clamp(lo, hi);
                if (a_j - a_j_old).abs() < 1e-7 {
                    continue;
                }
                let a_i = a_i_old + targets[i] * targets[j] * (a_j_old - a_j);
                let b1 = b - e_i
                    - targets[i] * (a_i - a_i_old) * kernel[i][i]
                    - targets[j] * (a_j - a_j_old) * kernel[i][j];
                let b2 = b - e_j
                    - targets[i] * (a_i - a_i_old) * kernel[i][j]
                    - targets[j] * (a_j - a_j_old) * kernel[j][j];
                b = if a_i > 0.0 && a_i < c {
                    b1
                } else if a_j > 0.0 && a_j < c {
                    b2
                } else {
                    0.5 * (b1 + b2)
                };
                alpha[i] = a_i;
                alpha[j] = a_j;
                changed += 1;
            }
        }
        if changed == 0 {
            quiet_passes += 1;
        } else {
            quiet_passes = 0;
        }
    }
    let coef = alpha.iter().zip(targets).map(|(a, y)| a * y).collect();
    (coef, b)
}
