//! Entropy-based selection of the informative region.
//!
//! A small probe network is trained on a few labeled samples per class,
//! then repeatedly scores the not-yet-selected training rows. The rows where
//! the probe is least certain (highest normalized prediction entropy, which
//! concentrates near class boundaries) join the informative set in fixed
//! size batches, with the probe warm-started on the grown set between
//! batches, until the set reaches the requested share of the training data.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nnet::{self, MlpSpec, TrainedModel};
use crate::seed;

/// Settings for informative-region selection.
#[derive(Debug, Clone, Serialize)]
pub struct ActiveConfig {
    /// Fraction of the training set to select, in (0, 1].
    pub informative_portion: f64,
    /// Samples added per selection round.
    pub batch_size: usize,
    /// Random seed samples per class that bootstrap the probe.
    pub initial_per_class: usize,
    /// Probe network settings. Its `seed` field is ignored; the probe is
    /// seeded from `seed` here so one value controls the whole selection.
    pub probe: MlpSpec,
    /// Retrain (warm-start) the probe after each batch. Turning this off
    /// freezes the probe after the seed batch, so the ranking of untouched
    /// rows never changes between rounds.
    pub refit_per_round: bool,
    pub seed: u64,
}

impl Default for ActiveConfig {
    fn default() -> Self {
        ActiveConfig {
            informative_portion: 0.3,
            batch_size: 20,
            initial_per_class: 3,
            probe: MlpSpec::probe_default(),
            refit_per_round: true,
            seed: 0,
        }
    }
}

impl ActiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.informative_portion > 0.0 && self.informative_portion <= 1.0) {
            return Err(Error::config(format!(
                "informative_portion must be in (0, 1], got {}",
                self.informative_portion
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::config("selection batch_size must be positive"));
        }
        if self.initial_per_class == 0 {
            return Err(Error::config("initial_per_class must be positive"));
        }
        self.probe.validate()
    }
}

/// Normalized Shannon entropy of a discrete distribution.
///
/// Uses the log base equal to the number of outcomes, so the result lies in
/// [0, 1] with 1 at the uniform distribution; `0 log 0` counts as 0. The
/// input needs at least two entries, all in [0, 1], summing to 1 within
/// 1e-6.
pub fn entropy(probs: &[f64]) -> Result<f64> {
    if probs.len() < 2 {
        return Err(Error::data(format!(
            "entropy needs at least 2 outcomes, got {}",
            probs.len()
        )));
    }
    let mut sum = 0.0;
    for &p in probs {
        if !p.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&p) {
            return Err(Error::data(format!("probability {p} outside [0, 1]")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::data(format!("probabilities sum to {sum}, not 1")));
    }
    let ln_base = (probs.len() as f64).ln();
    let raw: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    Ok((raw / ln_base).clamp(0.0, 1.0))
}

/// Outcome of informative-region selection.
#[derive(Debug, Clone, Serialize)]
pub struct InformativeSet {
    /// Selected row indices into the training set, in selection order
    /// (seed batch first).
    pub indices: Vec<usize>,
    /// How many of `indices` each round contributed; the first entry is the
    /// seed batch.
    pub round_sizes: Vec<usize>,
    /// Probe entropy of each selected row at the moment it was chosen;
    /// `None` for the randomly drawn seed batch.
    pub entropies: Vec<Option<f64>>,
    /// Requested size, `round(informative_portion * n)`.
    pub target: usize,
    /// True when the seed batch alone already exceeded the target, so no
    /// entropy-guided rounds ran.
    pub degenerate: bool,
}

impl InformativeSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Boolean membership mask over `n` training rows.
    pub fn membership(&self, n: usize) -> Result<Vec<bool>> {
        let mut mask = vec![false; n];
        for &i in &self.indices {
            if i >= n {
                return Err(Error::data(format!(
                    "informative index {i} out of range ({n} rows)"
                )));
            }
            if mask[i] {
                return Err(Error::data(format!("informative index {i} repeated")));
            }
            mask[i] = true;
        }
        Ok(mask)
    }
}

/// Select the informative region of `train`.
///
/// Deterministic for a fixed config. Requires at least two classes with
/// rows; a class smaller than `initial_per_class` contributes all its rows
/// to the seed batch.
pub fn select_informative(train: &Dataset, cfg: &ActiveConfig) -> Result<InformativeSet> {
    cfg.validate()?;
    let n = train.len();
    if train.present_classes().len() < 2 {
        return Err(Error::data(
            "informative-region selection needs at least two classes",
        ));
    }
    let target = (cfg.informative_portion * n as f64).round() as usize;
    let target = target.max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut selected: Vec<usize> = Vec::with_capacity(target + cfg.batch_size);
    let mut entropies: Vec<Option<f64>> = Vec::new();
    let mut in_set = vec![false; n];
    for class in train.present_classes() {
        let mut members = train.class_members(class).to_vec();
        members.shuffle(&mut rng);
        for &i in members.iter().take(cfg.initial_per_class) {
            selected.push(i);
            entropies.push(None);
            in_set[i] = true;
        }
    }
    let mut round_sizes = vec![selected.len()];

    if selected.len() >= target {
        return Ok(InformativeSet {
            degenerate: selected.len() > target,
            target,
            round_sizes,
            entropies,
            indices: selected,
        });
    }

    let probe_spec = cfg.probe.clone().with_seed(seed::derive(cfg.seed, 1));
    let mut model: Option<TrainedModel> = None;
    while selected.len() < target {
        let current = train.subset(&selected)?;
        model = Some(match model {
            None => nnet::train(&probe_spec, &current)?,
            Some(prev) => {
                if cfg.refit_per_round {
                    nnet::fine_tune(&prev, &current)?
                } else {
                    prev
                }
            }
        });
        let probe = model.as_ref().expect("probe just set");

        let remaining: Vec<usize> = (0..n).filter(|&i| !in_set[i]).collect();
        if remaining.is_empty() {
            break;
        }
        let probs = probe.predict_proba(train.features().select(ndarray::Axis(0), &remaining).view())?;
        let mut scored: Vec<(f64, usize)> = Vec::with_capacity(remaining.len());
        for (row, &idx) in probs.rows().into_iter().zip(remaining.iter()) {
            let row_slice = row.as_slice().expect("contiguous row");
            scored.push((entropy(row_slice)?, idx));
        }
        // Highest entropy first; equal scores resolve to the lower index.
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        let take = cfg.batch_size.min(scored.len());
        for &(e, idx) in scored.iter().take(take) {
            selected.push(idx);
            entropies.push(Some(e));
            in_set[idx] = true;
        }
        round_sizes.push(take);
    }

    Ok(InformativeSet {
        indices: selected,
        round_sizes,
        entropies,
        target,
        degenerate: false,
    })
}
