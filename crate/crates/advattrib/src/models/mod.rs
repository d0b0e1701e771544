//! Multiclass classifiers over masked, pipeline-processed feature vectors:
//! one-vs-rest linear SVM, one-vs-rest RBF-kernel SVM, and a feedforward
//! neural network, plus the dataset split protocol and accuracy evaluation.

mod ffnn;
mod linear_svm;
mod rbf_svm;

pub use ffnn::{gradient_check, FfnnConfig, FfnnParams};
pub use linear_svm::LinearOvr;
pub use rbf_svm::{rbf_kernel, RbfOvr};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::alphabet::ALPHABET_LEN;
use crate::corpus::{extract_unigrams, Document, FeatureVector};
use crate::error::{Error, Result};
use crate::scaling::FittedPipeline;
use crate::seed::seeded_rng;
use crate::ssga::FeatureMask;

/// Classifier families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lsvm,
    Rbfsvm,
    Ffnn,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Lsvm => "LSVM",
            ModelKind::Rbfsvm => "RBFSVM",
            ModelKind::Ffnn => "FFNN",
        }
    }
}

/// RBF kernel width: either explicit or derived from the training matrix as
/// `1 / (active_features * variance_of_matrix_entries)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaParam {
    Scale,
    Value(f64),
}

impl Serialize for GammaParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GammaParam::Scale => s.serialize_str("scale"),
            GammaParam::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for GammaParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(GammaParam::Value(v)),
            Repr::Str(s) if s == "scale" => Ok(GammaParam::Scale),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("unknown gamma: {s}"))),
        }
    }
}

/// Settings shared by both SVM solvers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub c: f64,
    pub gamma: GammaParam,
    /// SMO terminates after this many consecutive sweeps without an update.
    pub max_passes: usize,
    /// Epoch budget for the linear dual coordinate descent solver.
    pub max_epochs: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            gamma: GammaParam::Scale,
            max_passes: 10,
            max_epochs: 1000,
            tolerance: 1e-4,
            seed: 0,
        }
    }
}

impl SvmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::Config("svm c must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("svm tolerance must be positive".into()));
        }
        if let GammaParam::Value(g) = self.gamma {
            if !(g > 0.0) {
                return Err(Error::Config("svm gamma must be positive".into()));
            }
        }
        Ok(())
    }
}

/// A labeled collection of feature vectors.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LabeledSet {
    pub vectors: Vec<FeatureVector>,
    pub labels: Vec<u32>,
}

impl LabeledSet {
    pub fn new(vectors: Vec<FeatureVector>, labels: Vec<u32>) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::Shape { expected: vectors.len(), got: labels.len() });
        }
        Ok(Self { vectors, labels })
    }

    /// Extract unigram vectors from labeled documents.
    pub fn from_documents(docs: &[Document]) -> Result<Self> {
        let mut vectors = Vec::with_capacity(docs.len());
        let mut labels = Vec::with_capacity(docs.len());
        for doc in docs {
            let author = doc.author_id.ok_or_else(|| {
                Error::Config(format!("document {} has no author label", doc.doc_id))
            })?;
            vectors.push(extract_unigrams(doc)?);
            labels.push(author);
        }
        Ok(Self { vectors, labels })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Distinct labels, ascending.
    pub fn label_set(&self) -> Vec<u32> {
        let mut set: Vec<u32> = self.labels.clone();
        set.sort_unstable();
        set.dedup();
        set
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FeatureVector, u32)> {
        self.vectors.iter().zip(self.labels.iter().copied())
    }
}

/// Dataset split fractions. The fractions must sum to 1 and each partition
/// size (fraction x total) must be integral.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_frac: f64,
    pub eval_frac: f64,
    pub valid_frac: f64,
    pub test_frac: f64,
    pub seed: u64,
}

impl SplitSpec {
    /// The SVM allocation: 90% train / 10% test.
    pub fn svm(seed: u64) -> Self {
        Self { train_frac: 0.9, eval_frac: 0.0, valid_frac: 0.0, test_frac: 0.1, seed }
    }

    /// The FFNN allocation: 80% train / 10% validation / 10% test.
    pub fn ffnn(seed: u64) -> Self {
        Self { train_frac: 0.8, eval_frac: 0.0, valid_frac: 0.1, test_frac: 0.1, seed }
    }

    pub fn for_kind(kind: ModelKind, seed: u64) -> Self {
        match kind {
            ModelKind::Lsvm | ModelKind::Rbfsvm => Self::svm(seed),
            ModelKind::Ffnn => Self::ffnn(seed),
        }
    }

    fn quotas(&self, total: usize) -> Result<[usize; 4]> {
        let fracs = [self.train_frac, self.eval_frac, self.valid_frac, self.test_frac];
        let sum: f64 = fracs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split fractions sum to {sum}, expected 1")));
        }
        let mut quotas = [0usize; 4];
        for (q, f) in quotas.iter_mut().zip(fracs) {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Config(format!("split fraction {f} out of range")));
            }
            let exact = f * total as f64;
            let rounded = exact.round();
            if (exact - rounded).abs() > 1e-9 {
                return Err(Error::Config(format!(
                    "fraction {f} of {total} documents is not an integer"
                )));
            }
            *q = rounded as usize;
        }
        Ok(quotas)
    }
}

/// The four partitions produced by [`split_dataset`].
#[derive(Debug, Clone)]
pub struct SplitSets {
    pub train: LabeledSet,
    pub eval: LabeledSet,
    pub valid: LabeledSet,
    pub test: LabeledSet,
}

/// Deterministically split a labeled set, balancing authors across the cut:
/// documents are dealt in author round-robin rounds (author order and
/// per-author document order shuffled by the split seed), then partitioned by
/// the quota boundaries. Partitions are disjoint and exhaustive.
pub fn split_dataset(set: &LabeledSet, spec: &SplitSpec) -> Result<SplitSets> {
    let quotas = spec.quotas(set.len())?;
    let mut by_author: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &label) in set.labels.iter().enumerate() {
        by_author.entry(label).or_default().push(i);
    }
    let mut rng = seeded_rng(spec.seed, "split");
    let queues: Vec<Vec<usize>> = by_author
        .values()
        .map(|docs| {
            let mut docs = docs.clone();
            docs.shuffle(&mut rng);
            docs
        })
        .collect();
    let mut order: Vec<usize> = Vec::with_capacity(set.len());
    let mut round = 0;
    while order.len() < set.len() {
        let mut author_order: Vec<usize> = (0..queues.len()).collect();
        author_order.shuffle(&mut rng);
        for a in author_order {
            if round < queues[a].len() {
                order.push(queues[a][round]);
            }
        }
        round += 1;
    }
    let mut parts: Vec<LabeledSet> = Vec::with_capacity(4);
    let mut cursor = 0;
    for quota in quotas {
        let slice = &order[cursor..cursor + quota];
        cursor += quota;
        let vectors = slice.iter().map(|&i| set.vectors[i].clone()).collect();
        let labels = slice.iter().map(|&i| set.labels[i]).collect();
        parts.push(LabeledSet { vectors, labels });
    }
    let mut parts = parts.into_iter();
    Ok(SplitSets {
        train: parts.next().unwrap(),
        eval: parts.next().unwrap(),
        valid: parts.next().unwrap(),
        test: parts.next().unwrap(),
    })
}

/// Fitted weights, per classifier family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelParams {
    Linear(LinearOvr),
    Rbf(RbfOvr),
    Ffnn(FfnnParams),
}

/// A trained classifier together with everything needed to score a raw
/// feature vector: the fitted pipeline, the feature mask, and the label set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub pipeline: FittedPipeline,
    pub mask: FeatureMask,
    pub label_set: Vec<u32>,
    pub converged: bool,
}

/// Per-kind training configuration bundle.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub svm: SvmConfig,
    pub ffnn: FfnnConfig,
}

/// Train a classifier of `kind` on the masked, pipeline-processed training
/// set. The pipeline must already be fitted (on this or a superset of this
/// training data).
pub fn train(
    kind: ModelKind,
    config: &ModelConfig,
    train_set: &LabeledSet,
    mask: &FeatureMask,
    pipeline: &FittedPipeline,
) -> Result<TrainedModel> {
    if mask.count_active() == 0 {
        return Err(Error::EmptyMask);
    }
    let label_set = train_set.label_set();
    if label_set.len() < 2 {
        return Err(Error::Training(format!(
            "training set has {} class(es), need at least 2",
            label_set.len()
        )));
    }
    let rows = processed_rows(train_set, mask, pipeline, true)?;
    let y: Vec<usize> = train_set
        .labels
        .iter()
        .map(|l| label_set.binary_search(l).expect("label in label set"))
        .collect();
    let (params, converged) = match kind {
        ModelKind::Lsvm => {
            config.svm.validate()?;
            let model = linear_svm::fit(&rows, &y, label_set.len(), &config.svm);
            (ModelParams::Linear(model), true)
        }
        ModelKind::Rbfsvm => {
            config.svm.validate()?;
            let model = rbf_svm::fit(&rows, &y, label_set.len(), &config.svm)?;
            (ModelParams::Rbf(model), true)
        }
        ModelKind::Ffnn => {
            config.ffnn.validate()?;
            let (model, converged) = ffnn::fit(&rows, &y, label_set.len(), &config.ffnn);
            (ModelParams::Ffnn(model), converged)
        }
    };
    Ok(TrainedModel {
        kind,
        params,
        pipeline: pipeline.clone(),
        mask: mask.clone(),
        label_set,
        converged,
    })
}

fn processed_rows(
    set: &LabeledSet,
    mask: &FeatureMask,
    pipeline: &FittedPipeline,
    train_target: bool,
) -> Result<Vec<Vec<f64>>> {
    set.vectors
        .iter()
        .map(|v| {
            let processed =
                if train_target { pipeline.apply_train(v)? } else { pipeline.apply_eval(v)? };
            Ok(mask.select(&processed.values))
        })
        .collect()
}

impl TrainedModel {
    /// Per-class decision values for a raw 95-dim feature vector. The
    /// pipeline's evaluation transform and the mask are applied internally.
    pub fn decision_values(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        if v.values.len() != ALPHABET_LEN {
            return Err(Error::Shape { expected: ALPHABET_LEN, got: v.values.len() });
        }
        let processed = self.pipeline.apply_eval(v)?;
        let row = self.mask.select(&processed.values);
        Ok(match &self.params {
            ModelParams::Linear(m) => m.decision_values(&row),
            ModelParams::Rbf(m) => m.decision_values(&row),
            ModelParams::Ffnn(m) => m.decision_values(&row),
        })
    }

    /// Predicted author. Ties break toward the lowest author id.
    pub fn predict(&self, v: &FeatureVector) -> Result<u32> {
        let scores = self.decision_values(v)?;
        Ok(argmax_label(&self.label_set, &scores))
    }

    /// Gap between the best and second-best decision values.
    pub fn margin(&self, v: &FeatureVector) -> Result<f64> {
        Ok(top_two_margin(&self.decision_values(v)?))
    }
}

/// Argmax over scores, iterating labels in ascending order so that exact ties
/// resolve to the lowest author id.
pub fn argmax_label(label_set: &[u32], scores: &[f64]) -> u32 {
    debug_assert_eq!(label_set.len(), scores.len());
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    label_set[best]
}

/// Difference between the largest and second-largest score.
pub fn top_two_margin(scores: &[f64]) -> f64 {
    let mut top = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &s in scores {
        if s > top {
            second = top;
            top = s;
        } else if s > second {
            second = s;
        }
    }
    if second.is_finite() {
        top - second
    } else {
        0.0
    }
}

/// Fraction of correct predictions over a labeled set.
pub fn evaluate_accuracy(model: &TrainedModel, set: &LabeledSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::Evaluation("cannot evaluate on an empty set".into()));
    }
    let mut correct = 0usize;
    for (v, label) in set.iter() {
        if model.predict(v)? == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / set.len() as f64)
}
