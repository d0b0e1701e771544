//! Authorship attribution toolkit: unigram features over the 95 printable
//! ASCII characters, three from-scratch classifiers, steady-state GA feature
//! mask evolution, a mask-switching + input-anomaly defense, a kill-chain
//! attack simulator, and the statistics used to compare the algorithms.

pub mod alphabet;
pub mod corpus;
pub mod distributions;
pub mod error;
pub mod models;
pub mod scaling;
pub mod seed;
pub mod ssga;
pub mod stats;

pub use error::{Error, Result};
