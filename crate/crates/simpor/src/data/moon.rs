//! Imbalanced two-moons generator.
//!
//! Two interleaving half-circles in 2-D with Gaussian coordinate noise. The
//! moons start balanced at `n_samples / 2` each; rows are then removed at
//! random from the second moon until the requested imbalance ratio holds.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Coordinate noise used when no explicit level is given. Calibrated so the
/// moons overlap enough that oversampling quality shows up in the scores:
/// at 0.15 a three-layer perceptron scores in the high 0.8s on macro-F1
/// after balancing, with visible spread between balancing methods.
pub const DEFAULT_NOISE: f64 = 0.15;

/// Generate an imbalanced two-moons dataset.
///
/// `n_samples` is the size before thinning and must be even and at least 4.
/// `imbalance_ratio` >= 1 sets the target majority/minority count ratio; the
/// minority keeps `ceil(n_samples/2 / imbalance_ratio)` rows. `noise` is the
/// standard deviation of the coordinate noise (0 disables it). Class `0` is
/// the upper moon (majority), class `1` the lower one (minority).
pub fn make_moon(
    n_samples: usize,
    imbalance_ratio: f64,
    noise: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_samples < 4 || !n_samples.is_multiple_of(2) {
        return Err(Error::config(format!(
            "n_samples must be even and >= 4, got {n_samples}"
        )));
    }
    if imbalance_ratio < 1.0 || imbalance_ratio.is_nan() {
        return Err(Error::config(format!(
            "imbalance_ratio must be >= 1, got {imbalance_ratio}"
        )));
    }
    if noise < 0.0 || !noise.is_finite() {
        return Err(Error::config(format!("noise must be >= 0, got {noise}")));
    }
    let half = n_samples / 2;
    let keep = (half as f64 / imbalance_ratio).ceil() as usize;
    if (half as f64) < imbalance_ratio {
        return Err(Error::config(format!(
            "imbalance_ratio {imbalance_ratio} would leave the minority under one row \
             ({half} per class before thinning)"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = |i: usize| {
        if half == 1 {
            0.0
        } else {
            PI * i as f64 / (half - 1) as f64
        }
    };
    // Upper moon, then lower moon, in angle order.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_samples);
    for i in 0..half {
        let t = angle(i);
        rows.push(vec![t.cos(), t.sin()]);
    }
    for i in 0..half {
        let t = angle(i);
        rows.push(vec![1.0 - t.cos(), 1.0 - t.sin() - 0.5]);
    }
    if noise > 0.0 {
        let dist = Normal::new(0.0, noise).expect("validated sigma");
        for row in &mut rows {
            for v in row.iter_mut() {
                *v += dist.sample(&mut rng);
            }
        }
    }

    // Thin the lower moon down to `keep` rows.
    let mut lower: Vec<usize> = (half..n_samples).collect();
    lower.shuffle(&mut rng);
    let mut kept_lower = lower[..keep].to_vec();
    kept_lower.sort_unstable();

    let mut out_rows = Vec::with_capacity(half + keep);
    let mut out_labels = Vec::with_capacity(half + keep);
    for row in rows.iter_mut().take(half) {
        out_rows.push(std::mem::take(row));
        out_labels.push("0".to_string());
    }
    for &i in &kept_lower {
        out_rows.push(std::mem::take(&mut rows[i]));
        out_labels.push("1".to_string());
    }
    Dataset::from_rows(out_rows, out_labels, vec!["x0".into(), "x1".into()])
}
