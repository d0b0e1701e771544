//! Author corpora and unigram feature extraction.
//!
//! A corpus is a set of short writing samples, several per author. Features
//! are counts of the 95 printable-ASCII character unigrams, optionally
//! TFIDF-weighted. Synthetic corpora are generated from per-author character
//! distributions: each author's distribution is a Dirichlet perturbation of a
//! shared English-like base, so the `concentration` knob controls how
//! separable the authors are (larger concentration, more similar authors).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_distr::Gamma;
use serde::{Deserialize, Serialize};

use crate::alphabet::{self, ALPHABET_LEN};
use crate::error::{Error, Result};
use crate::seed::seeded_rng;

/// Configuration for synthetic corpus generation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub num_authors: usize,
    pub samples_per_author: usize,
    pub chars_per_sample: usize,
    pub seed: u64,
    /// First author label; authors are numbered consecutively from here.
    pub author_id_base: u32,
    /// Dirichlet concentration of style distributions around the base.
    /// As concentration grows, styles converge to the base distribution.
    pub concentration: f64,
    /// Number of distinct writing styles; 0 (the default) gives every author
    /// its own style. With fewer styles than authors, some authors share a
    /// style and become nearly confusable, which caps attainable accuracy
    /// independently of the feature subset in use.
    pub num_styles: usize,
    /// Dirichlet concentration of an author's distribution around its shared
    /// style; only used when authors share styles. Larger values make
    /// style-mates harder to tell apart.
    pub author_concentration: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            num_authors: 25,
            samples_per_author: 4,
            chars_per_sample: 2000,
            seed: 0,
            author_id_base: 1000,
            concentration: 50.0,
            num_styles: 0,
            author_concentration: 25_000.0,
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_authors < 2 {
            return Err(Error::Config("num_authors must be at least 2".into()));
        }
        if self.samples_per_author < 2 {
            return Err(Error::Config("samples_per_author must be at least 2".into()));
        }
        if self.chars_per_sample == 0 {
            return Err(Error::Config("chars_per_sample must be positive".into()));
        }
        if !(self.concentration > 0.0) {
            return Err(Error::Config("concentration must be positive".into()));
        }
        Ok(())
    }

    /// Total number of documents the config produces.
    pub fn total_documents(&self) -> usize {
        self.num_authors * self.samples_per_author
    }

    pub fn author_ids(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.num_authors).map(|a| self.author_id_base + a as u32)
    }
}

/// A single writing sample. `author_id` is absent for adversarial test
/// documents whose authorship is the thing in question.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub author_id: Option<u32>,
    pub text: String,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, author_id: Option<u32>, text: impl Into<String>) -> Self {
        Self { doc_id: doc_id.into(), author_id, text: text.into() }
    }
}

/// A 95-dimensional unigram feature vector (raw counts or weighted values).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub doc_id: String,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, doc_id: impl Into<String>) -> Result<Self> {
        if values.len() != ALPHABET_LEN {
            return Err(Error::Shape { expected: ALPHABET_LEN, got: values.len() });
        }
        Ok(Self { values, doc_id: doc_id.into() })
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Count unigrams of the 95-char alphabet; out-of-alphabet characters are ignored.
pub fn extract_unigrams(doc: &Document) -> Result<FeatureVector> {
    if doc.text.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let mut values = vec![0.0; ALPHABET_LEN];
    for c in doc.text.chars() {
        if let Some(j) = alphabet::index_of(c) {
            values[j] += 1.0;
        }
    }
    FeatureVector::new(values, doc.doc_id.clone())
}

/// Inverse-document-frequency weights fitted on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    pub document_frequency: Vec<u32>,
    pub num_documents: usize,
    pub idf: Vec<f64>,
}

/// Fit smoothed idf weights: `idf[j] = ln((1+N)/(1+df[j])) + 1`.
pub fn fit_tfidf(train_vectors: &[FeatureVector]) -> Result<TfidfModel> {
    if train_vectors.is_empty() {
        return Err(Error::Fit("tfidf requires at least one training vector".into()));
    }
    let n = train_vectors.len();
    let mut df = vec![0u32; ALPHABET_LEN];
    for v in train_vectors {
        for (j, &x) in v.values.iter().enumerate() {
            if x > 0.0 {
                df[j] += 1;
            }
        }
    }
    let idf: Vec<f64> = df
        .iter()
        .map(|&d| ((1.0 + n as f64) / (1.0 + f64::from(d))).ln() + 1.0)
        .collect();
    Ok(TfidfModel { document_frequency: df, num_documents: n, idf })
}

/// Weight a vector: `out[j] = tf[j] * idf[j]` with `tf[j] = values[j] / sum(values)`.
pub fn apply_tfidf(model: &TfidfModel, v: &FeatureVector) -> Result<FeatureVector> {
    let total = v.sum();
    if total <= 0.0 {
        return Err(Error::EmptyDocument);
    }
    let values = v
        .values
        .iter()
        .zip(&model.idf)
        .map(|(&x, &w)| (x / total) * w)
        .collect();
    FeatureVector::new(values, v.doc_id.clone())
}

/// Generate a synthetic corpus. Deterministic given the config (including seed).
pub fn generate_corpus(config: &CorpusConfig) -> Result<Vec<Document>> {
    config.validate()?;
    let base = base_distribution();
    let mut docs = Vec::with_capacity(config.total_documents());
    for a in 0..config.num_authors {
        let author_id = config.author_id_base + a as u32;
        let dist = author_distribution(&base, config, a);
        let weights = WeightedIndex::new(&dist)
            .map_err(|e| Error::Config(format!("invalid author distribution: {e}")))?;
        for s in 0..config.samples_per_author {
            let mut rng = seeded_rng(config.seed, &format!("corpus-doc-{a}-{s}"));
            let mut text = String::with_capacity(config.chars_per_sample);
            for _ in 0..config.chars_per_sample {
                text.push(alphabet::char_at(weights.sample(&mut rng)));
            }
            docs.push(Document::new(
                format!("{author_id}/sample{s:02}.txt"),
                Some(author_id),
                text,
            ));
        }
    }
    Ok(docs)
}

/// Draw one author's character distribution: Dirichlet(concentration * base).
fn author_distribution(base: &[f64], config: &CorpusConfig, author_index: usize) -> Vec<f64> {
    let mut rng = seeded_rng(config.seed, &format!("corpus-author-dist-{author_index}"));
    let mut draws = vec![0.0f64; ALPHABET_LEN];
    for (j, &b) in base.iter().enumerate() {
        let shape = (config.concentration * b).max(1e-6);
        let gamma = Gamma::new(shape, 1.0).expect("gamma shape is positive");
        draws[j] = gamma.sample(&mut rng);
    }
    let total: f64 = draws.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return base.to_vec();
    }
    for d in &mut draws {
        *d /= total;
    }
    draws
}

/// Shared English-like base distribution over the 95-char alphabet.
fn base_distribution() -> Vec<f64> {
    // Letter frequencies in percent (standard English counts).
    const LETTER_PCT: [(char, f64); 26] = [
        ('e', 12.70), ('t', 9.06), ('a', 8.17), ('o', 7.51), ('i', 6.97),
        ('n', 6.75), ('s', 6.33), ('h', 6.09), ('r', 5.99), ('d', 4.25),
        ('l', 4.03), ('c', 2.78), ('u', 2.76), ('m', 2.41), ('w', 2.36),
        ('f', 2.23), ('g', 2.02), ('y', 1.97), ('p', 1.93), ('b', 1.49),
        ('v', 0.98), ('k', 0.77), ('j', 0.15), ('x', 0.15), ('q', 0.10),
        ('z', 0.07),
    ];
    let mut w = vec![2e-4; ALPHABET_LEN];
    let mut add = |c: char, v: f64| {
        let j = alphabet::index_of(c).expect("base distribution uses alphabet chars");
        w[j] += v;
    };
    add(' ', 0.17);
    for (c, pct) in LETTER_PCT {
        add(c, pct / 100.0 * 0.66);
        add(c.to_ascii_uppercase(), pct / 100.0 * 0.045);
    }
    for d in '0'..='9' {
        add(d, 0.0012);
    }
    for (c, v) in [
        ('.', 0.009), (',', 0.012), ('\'', 0.004), ('"', 0.003), ('!', 0.001),
        ('?', 0.001), (';', 0.001), (':', 0.001), ('-', 0.002), ('(', 0.0005),
        (')', 0.0005),
    ] {
        add(c, v);
    }
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Write a corpus as one directory per author plus a `corpus.json` manifest.
pub fn write_corpus(dir: &Path, config: &CorpusConfig, docs: &[Document]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let manifest = serde_json::to_string_pretty(config)?;
    fs::write(dir.join("corpus.json"), manifest + "\n")?;
    let mut per_author: BTreeMap<u32, Vec<&Document>> = BTreeMap::new();
    for doc in docs {
        let author = doc
            .author_id
            .ok_or_else(|| Error::Config(format!("document {} has no author", doc.doc_id)))?;
        per_author.entry(author).or_default().push(doc);
    }
    for (author, samples) in per_author {
        let author_dir = dir.join(author.to_string());
        fs::create_dir_all(&author_dir)?;
        for (i, doc) in samples.iter().enumerate() {
            fs::write(author_dir.join(format!("sample{i:02}.txt")), &doc.text)?;
        }
    }
    Ok(())
}

/// Read a corpus directory written by [`write_corpus`]. Document order is
/// author id ascending, then sample index ascending.
pub fn read_corpus(dir: &Path) -> Result<(CorpusConfig, Vec<Document>)> {
    let manifest = fs::read_to_string(dir.join("corpus.json"))?;
    let config: CorpusConfig = serde_json::from_str(&manifest)?;
    let mut authors: Vec<u32> = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_type()?.is_dir() {
            if let Ok(id) = entry.file_name().to_string_lossy().parse::<u32>() {
                authors.push(id);
            }
        }
    }
    authors.sort_unstable();
    let mut docs = Vec::new();
    for author in authors {
        let author_dir = dir.join(author.to_string());
        let mut names: Vec<String> = fs::read_dir(&author_dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n.ends_with(".txt"))
            .collect();
        names.sort();
        for name in names {
            let text = fs::read_to_string(author_dir.join(&name))?;
            docs.push(Document::new(format!("{author}/{name}"), Some(author), text));
        }
    }
    Ok((config, docs))
}

/// Export labeled feature vectors as CSV: doc id, author id, then one column
/// per alphabet character (header labels the character codes in hex).
pub fn features_csv(rows: &[(FeatureVector, u32)]) -> String {
    let mut out = String::from("doc_id,author_id");
    for j in 0..ALPHABET_LEN {
        let _ = write!(out, ",0x{:02x}", 0x20 + j);
    }
    out.push('\n');
    for (v, author) in rows {
        let _ = write!(out, "{},{author}", v.doc_id);
        for x in &v.values {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    out
}
