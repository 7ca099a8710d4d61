//! Class-imbalance correction for tabular data.
//!
//! The crate balances a two-class dataset by synthesizing minority samples.
//! Its main method places each synthetic sample on a sphere around a real
//! minority parent and moves it along the sphere to maximize a kernel
//! density estimate of the minority posterior ratio, concentrating effort
//! inside an informative region found by entropy-based active learning.
//! Classic oversamplers (random, interpolation-based and their borderline
//! and adaptive variants) are included for comparison, together with an
//! evaluation harness (macro-F1, ROC-AUC, paired significance tests) and
//! PCA-based overlap diagnostics.
//!
//! Everything is deterministic for a fixed seed, including parallel runs.

pub mod active;
pub mod baselines;
pub mod data;
pub mod density;
pub mod error;
pub mod metrics;
pub mod nnet;
pub mod reduce;
pub(crate) mod seed;
pub mod sphere;
pub mod synth;

pub use error::{Error, Result};
