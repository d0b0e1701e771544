//! Feature scaling and the composed preprocessing pipeline.
//!
//! One z-score scaler is fitted on the training matrix and applied to two
//! targets: "normalization" scales the training rows, "standardization"
//! scales evaluation/test rows with the same fitted parameters. Together with
//! the TFIDF toggle this yields the eight pipeline variants of the ablation.

use serde::{Deserialize, Serialize};

use crate::alphabet::ALPHABET_LEN;
use crate::corpus::{apply_tfidf, fit_tfidf, FeatureVector, TfidfModel};
use crate::error::{Error, Result};

/// Per-feature mean and population standard deviation of the training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mean: Vec<f64>,
    pub std_dev: Vec<f64>,
    pub fitted_on: usize,
}

/// Which preprocessing stages are enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineSpec {
    pub use_normalization: bool,
    pub use_standardization: bool,
    pub use_tfidf: bool,
}

impl Default for PipelineSpec {
    fn default() -> Self {
        Self { use_normalization: true, use_standardization: true, use_tfidf: true }
    }
}

impl PipelineSpec {
    pub const NONE: Self =
        Self { use_normalization: false, use_standardization: false, use_tfidf: false };

    /// All 8 stage combinations, in the ablation table's row order.
    pub fn all_variants() -> [PipelineSpec; 8] {
        let spec = |n, s, t| PipelineSpec {
            use_normalization: n,
            use_standardization: s,
            use_tfidf: t,
        };
        [
            spec(false, false, false),
            spec(true, true, true),
            spec(false, true, true),
            spec(true, false, true),
            spec(true, true, false),
            spec(true, false, false),
            spec(false, true, false),
            spec(false, false, true),
        ]
    }

    /// Row label matching the ablation table.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.use_normalization {
            parts.push("Normalization");
        }
        if self.use_standardization {
            parts.push("Standardization");
        }
        if self.use_tfidf {
            parts.push("TFIDF");
        }
        if parts.is_empty() {
            "None".to_string()
        } else {
            parts.join(", ")
        }
    }
}

/// Fit per-feature mean and population standard deviation.
pub fn fit_scaler(train_matrix: &[FeatureVector]) -> Result<ScalerParams> {
    let n = train_matrix.len();
    if n < 2 {
        return Err(Error::Fit(format!("scaler requires at least 2 rows, got {n}")));
    }
    let d = train_matrix[0].values.len();
    let mut mean = vec![0.0; d];
    for row in train_matrix {
        for (m, &x) in mean.iter_mut().zip(&row.values) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut var = vec![0.0; d];
    for row in train_matrix {
        for (j, &x) in row.values.iter().enumerate() {
            let delta = x - mean[j];
            var[j] += delta * delta;
        }
    }
    let std_dev = var.iter().map(|&v| (v / n as f64).sqrt()).collect();
    Ok(ScalerParams { mean, std_dev, fitted_on: n })
}

/// Z-score a vector; constant features (std 0) pass through centered only.
pub fn transform(params: &ScalerParams, v: &FeatureVector) -> FeatureVector {
    let values = v
        .values
        .iter()
        .zip(params.mean.iter().zip(&params.std_dev))
        .map(|(&x, (&m, &s))| {
            let divisor = if s == 0.0 { 1.0 } else { s };
            (x - m) / divisor
        })
        .collect();
    FeatureVector { values, doc_id: v.doc_id.clone() }
}

/// A pipeline fitted on a training matrix: optional TFIDF weighting followed
/// by an optional fitted z-score scaler, with separate application targets
/// for training rows and evaluation/test rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline {
    pub spec: PipelineSpec,
    pub tfidf: Option<TfidfModel>,
    pub scaler: Option<ScalerParams>,
}

/// Fit the pipeline stages on the training matrix. The scaler is fitted on
/// the TFIDF-weighted rows whenever either scaling target is enabled; fitting
/// never reads evaluation or test rows.
pub fn build_pipeline(spec: PipelineSpec, train_matrix: &[FeatureVector]) -> Result<FittedPipeline> {
    if train_matrix.is_empty() {
        return Err(Error::Fit("pipeline requires a non-empty training matrix".into()));
    }
    let tfidf = if spec.use_tfidf { Some(fit_tfidf(train_matrix)?) } else { None };
    let scaler = if spec.use_normalization || spec.use_standardization {
        let weighted: Vec<FeatureVector> = match &tfidf {
            Some(model) => train_matrix
                .iter()
                .map(|v| apply_tfidf(model, v))
                .collect::<Result<_>>()?,
            None => train_matrix.to_vec(),
        };
        Some(fit_scaler(&weighted)?)
    } else {
        None
    };
    Ok(FittedPipeline { spec, tfidf, scaler })
}

impl FittedPipeline {
    /// Identity pipeline over the 95-feature space.
    pub fn identity() -> Self {
        Self { spec: PipelineSpec::NONE, tfidf: None, scaler: None }
    }

    /// Transform a training row (scaled only when normalization is enabled).
    pub fn apply_train(&self, v: &FeatureVector) -> Result<FeatureVector> {
        self.apply(v, self.spec.use_normalization)
    }

    /// Transform an evaluation/test row (scaled only when standardization is enabled).
    pub fn apply_eval(&self, v: &FeatureVector) -> Result<FeatureVector> {
        self.apply(v, self.spec.use_standardization)
    }

    fn apply(&self, v: &FeatureVector, scale: bool) -> Result<FeatureVector> {
        if v.values.len() != ALPHABET_LEN {
            return Err(Error::Shape { expected: ALPHABET_LEN, got: v.values.len() });
        }
        let mut out = match &self.tfidf {
            Some(model) => apply_tfidf(model, v)?,
            None => v.clone(),
        };
        if scale {
            if let Some(scaler) = &self.scaler {
                out = transform(scaler, &out);
            }
        }
        Ok(out)
    }
}
