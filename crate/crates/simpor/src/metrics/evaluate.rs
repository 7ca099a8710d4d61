//! Repeated-trial evaluation of balancing methods.
//!
//! One trial: stratified train/test split, min-max normalization fitted on
//! the training split, balancing of the training split only, classifier
//! training, then macro F1 and ROC-AUC on the untouched test split. Every
//! trial reseeds the split, the balancer and the classifier from the
//! harness seed, so reports are reproducible end to end.

use std::time::Instant;

use serde::Serialize;

use crate::baselines::{oversample, BaselineConfig};
use crate::data::{mean_std, min_max_normalize, stratified_split, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{macro_scores, roc_auc};
use crate::nnet::{train, MlpSpec};
use crate::seed;
use crate::synth::{balance, SimporConfig};

/// How to balance the training split before fitting the classifier.
#[derive(Debug, Clone)]
pub enum BalanceMethod {
    /// Train on the imbalanced split as-is.
    Identity,
    Baseline(BaselineConfig),
    Simpor(Box<SimporConfig>),
}

impl BalanceMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BalanceMethod::Identity => "none",
            BalanceMethod::Baseline(cfg) => cfg.kind.name(),
            BalanceMethod::Simpor(_) => "simpor",
        }
    }

    /// Same method with its embedded seed replaced.
    pub fn with_seed(&self, seed: u64) -> BalanceMethod {
        match self {
            BalanceMethod::Identity => BalanceMethod::Identity,
            BalanceMethod::Baseline(cfg) => BalanceMethod::Baseline(BaselineConfig {
                seed,
                ..cfg.clone()
            }),
            BalanceMethod::Simpor(cfg) => BalanceMethod::Simpor(Box::new(SimporConfig {
                seed,
                ..(**cfg).clone()
            })),
        }
    }

    /// Balance `train`, returning the new dataset and the synthetic count.
    pub fn apply(&self, train: &Dataset) -> Result<(Dataset, usize)> {
        match self {
            BalanceMethod::Identity => Ok((train.clone(), 0)),
            BalanceMethod::Baseline(cfg) => {
                let res = oversample(train, cfg)?;
                Ok((res.dataset, res.n_synthetic))
            }
            BalanceMethod::Simpor(cfg) => {
                let res = balance(train, cfg)?;
                Ok((res.dataset, res.synthetics.len()))
            }
        }
    }
}

/// Harness settings shared by every trial.
#[derive(Debug, Clone, Serialize)]
pub struct EvalSettings {
    /// Fraction of each class held out for testing.
    pub test_fraction: f64,
    pub trials: usize,
    /// Min-max normalize features, fitted on the training split.
    pub normalize: bool,
    /// Classifier trained per trial. Its `seed` is overridden per trial.
    pub model: MlpSpec,
    pub seed: u64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            test_fraction: 0.2,
            trials: 5,
            normalize: true,
            model: MlpSpec::evaluation_default(),
            seed: 0,
        }
    }
}

impl EvalSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::config(format!(
                "test_fraction must be in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be positive"));
        }
        self.model.validate()
    }
}

/// Scores from one train/test split.
#[derive(Debug, Clone, Serialize)]
pub struct TrialMetrics {
    pub trial: usize,
    pub macro_f1: f64,
    pub roc_auc: f64,
    pub n_synthetic: usize,
    pub balance_seconds: f64,
    pub train_seconds: f64,
}

/// All trials for one method plus their summary statistics.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub method: String,
    pub n_trials: usize,
    pub mean_macro_f1: f64,
    pub std_macro_f1: f64,
    pub mean_roc_auc: f64,
    pub std_roc_auc: f64,
    pub trials: Vec<TrialMetrics>,
}

impl EvaluationReport {
    fn from_trials(method: String, trials: Vec<TrialMetrics>) -> EvaluationReport {
        let f1s: Vec<f64> = trials.iter().map(|t| t.macro_f1).collect();
        let aucs: Vec<f64> = trials.iter().map(|t| t.roc_auc).collect();
        let (mean_f1, std_f1) = mean_std(&f1s);
        let (mean_auc, std_auc) = mean_std(&aucs);
        EvaluationReport {
            method,
            n_trials: trials.len(),
            mean_macro_f1: mean_f1,
            std_macro_f1: std_f1,
            mean_roc_auc: mean_auc,
            std_roc_auc: std_auc,
            trials,
        }
    }

    /// Per-trial macro F1 values in trial order.
    pub fn f1_values(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.macro_f1).collect()
    }

    /// Per-trial ROC-AUC values in trial order.
    pub fn auc_values(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.roc_auc).collect()
    }
}

// Per-trial seed streams.
const STREAM_SPLIT: u64 = 0;
const STREAM_BALANCE: u64 = 1;
const STREAM_MODEL: u64 = 2;

/// Run `settings.trials` independent trials of `method` on `ds`.
///
/// The positive class for ROC-AUC is the dataset's minority class. A fixed
/// `(settings, method)` pair gives bit-identical reports across runs.
pub fn evaluate(ds: &Dataset, method: &BalanceMethod, settings: &EvalSettings) -> Result<EvaluationReport> {
    settings.validate()?;
    let roles = ds.binary_roles()?;

    let mut trials = Vec::with_capacity(settings.trials);
    for trial in 0..settings.trials {
        let t = trial as u64;
        let split = stratified_split(
            ds,
            settings.test_fraction,
            seed::derive2(settings.seed, t, STREAM_SPLIT),
        )?;
        let (train_ds, test_ds) = if settings.normalize {
            let (train_ds, transform) = min_max_normalize(&split.train)?;
            (train_ds, transform.apply(&split.test)?)
        } else {
            (split.train, split.test)
        };

        let started = Instant::now();
        let trial_method = method.with_seed(seed::derive2(settings.seed, t, STREAM_BALANCE));
        let (balanced, n_synthetic) = trial_method.apply(&train_ds)?;
        let balance_seconds = started.elapsed().as_secs_f64();

        let spec = settings
            .model
            .clone()
            .with_seed(seed::derive2(settings.seed, t, STREAM_MODEL));
        let started = Instant::now();
        let model = train(&spec, &balanced)?;
        let train_seconds = started.elapsed().as_secs_f64();

        let proba = model.predict_proba(test_ds.features())?;
        let predicted = model.predict(test_ds.features())?;
        let scores = macro_scores(test_ds.labels(), &predicted, test_ds.num_classes())?;
        let auc = roc_auc(
            test_ds.labels(),
            &proba.column(roles.minority).to_vec(),
            roles.minority,
        )?;

        trials.push(TrialMetrics {
            trial,
            macro_f1: scores.f1,
            roc_auc: auc,
            n_synthetic,
            balance_seconds,
            train_seconds,
        });
    }
    Ok(EvaluationReport::from_trials(method.name().to_string(), trials))
}
