//! Shared flag groups and the builders that turn flags + config file into
//! library configs. Every flag here may also appear in the config file
//! under the same name; flags win.

use clap::Args;
use simpor::baselines::{BaselineConfig, BaselineKind};
use simpor::data::LabelColumn;
use simpor::density::BandwidthMode;
use simpor::metrics::{BalanceMethod, EvalSettings};
use simpor::synth::{NeighborScope, SimporConfig};
use simpor::{Error, Result};

use crate::fileconfig::{resolve, resolve_opt, FileConfig};

#[derive(Args, Clone, Debug)]
pub struct SimporOpts {
    /// Neighborhood size for radius sizing and parent rejection.
    #[arg(long)]
    pub k_neighbors: Option<usize>,
    /// Radius scale: the sphere radius is |N(0, (alpha * R)^2)|.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fraction of training rows selected as the informative region.
    #[arg(long)]
    pub informative_portion: Option<f64>,
    /// Rows added per active-learning round.
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Seed rows per class for the first probe fit.
    #[arg(long)]
    pub initial_per_class: Option<usize>,
    /// Refit the probe after each round (true) or score with the frozen
    /// seed-batch probe (false).
    #[arg(long)]
    pub refit_per_round: Option<bool>,
    /// Rejected parent draws tolerated per synthetic sample.
    #[arg(long)]
    pub rejection_limit: Option<usize>,
    /// Rows counted when sizing a neighborhood: all_classes or minority_only.
    #[arg(long)]
    pub neighbor_scope: Option<String>,
    /// Kernel bandwidth source: per_class or shared.
    #[arg(long)]
    pub bandwidth: Option<String>,
    /// Initial ascent step in radians along the sphere.
    #[arg(long)]
    pub step_angle: Option<f64>,
    /// Ascent iteration cap per synthetic sample.
    #[arg(long)]
    pub max_ascent_iters: Option<usize>,
    /// Stop when an accepted step improves the log-ratio by less than this.
    #[arg(long)]
    pub improvement_tol: Option<f64>,
    /// Probe network hidden sizes, e.g. 10,10.
    #[arg(long)]
    pub probe_hidden: Option<String>,
    #[arg(long)]
    pub probe_epochs: Option<usize>,
    #[arg(long)]
    pub probe_batch_size: Option<usize>,
    #[arg(long)]
    pub probe_lr: Option<f64>,
}

pub fn build_simpor(opts: &SimporOpts, cfg: &FileConfig, seed: u64) -> Result<SimporConfig> {
    let mut c = SimporConfig {
        seed,
        ..SimporConfig::default()
    };
    c.k_neighbors = resolve(opts.k_neighbors, cfg, "k_neighbors", c.k_neighbors)?;
    c.alpha = resolve(opts.alpha, cfg, "alpha", c.alpha)?;
    c.rejection_limit = resolve(opts.rejection_limit, cfg, "rejection_limit", c.rejection_limit)?;
    c.neighbor_scope = parse_scope(&resolve(
        opts.neighbor_scope.clone(),
        cfg,
        "neighbor_scope",
        "all_classes".to_string(),
    )?)?;
    c.bandwidth_mode = parse_bandwidth(&resolve(
        opts.bandwidth.clone(),
        cfg,
        "bandwidth",
        "per_class".to_string(),
    )?)?;

    let a = &mut c.active;
    a.informative_portion = resolve(
        opts.informative_portion,
        cfg,
        "informative_portion",
        a.informative_portion,
    )?;
    a.batch_size = resolve(opts.batch_size, cfg, "batch_size", a.batch_size)?;
    a.initial_per_class = resolve(
        opts.initial_per_class,
        cfg,
        "initial_per_class",
        a.initial_per_class,
    )?;
    a.refit_per_round = resolve(opts.refit_per_round, cfg, "refit_per_round", a.refit_per_round)?;
    if let Some(raw) = resolve_opt(opts.probe_hidden.clone(), cfg, "probe_hidden")? {
        a.probe.hidden = parse_layers(&raw)?;
    }
    a.probe.max_epochs = resolve(opts.probe_epochs, cfg, "probe_epochs", a.probe.max_epochs)?;
    a.probe.batch_size = resolve(
        opts.probe_batch_size,
        cfg,
        "probe_batch_size",
        a.probe.batch_size,
    )?;
    a.probe.learning_rate = resolve(opts.probe_lr, cfg, "probe_lr", a.probe.learning_rate)?;

    c.ascent.step_angle = resolve(opts.step_angle, cfg, "step_angle", c.ascent.step_angle)?;
    c.ascent.max_iters = resolve(opts.max_ascent_iters, cfg, "max_ascent_iters", c.ascent.max_iters)?;
    c.ascent.improvement_tol = resolve(
        opts.improvement_tol,
        cfg,
        "improvement_tol",
        c.ascent.improvement_tol,
    )?;
    c.validate()?;
    Ok(c)
}

#[derive(Args, Clone, Debug)]
pub struct EvalOpts {
    /// Independent train/test trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Held-out fraction per class.
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Min-max normalize features, fitted on the training split.
    #[arg(long)]
    pub normalize: Option<bool>,
    /// Classifier hidden sizes, e.g. 100,100,100.
    #[arg(long)]
    pub model_hidden: Option<String>,
    #[arg(long)]
    pub model_epochs: Option<usize>,
    #[arg(long)]
    pub model_batch_size: Option<usize>,
    #[arg(long)]
    pub model_lr: Option<f64>,
}

pub fn build_eval(opts: &EvalOpts, cfg: &FileConfig, seed: u64) -> Result<EvalSettings> {
    let mut s = EvalSettings {
        seed,
        ..EvalSettings::default()
    };
    s.trials = resolve(opts.trials, cfg, "trials", s.trials)?;
    s.test_fraction = resolve(opts.test_fraction, cfg, "test_fraction", s.test_fraction)?;
    s.normalize = resolve(opts.normalize, cfg, "normalize", s.normalize)?;
    if let Some(raw) = resolve_opt(opts.model_hidden.clone(), cfg, "model_hidden")? {
        s.model.hidden = parse_layers(&raw)?;
    }
    s.model.max_epochs = resolve(opts.model_epochs, cfg, "model_epochs", s.model.max_epochs)?;
    s.model.batch_size = resolve(
        opts.model_batch_size,
        cfg,
        "model_batch_size",
        s.model.batch_size,
    )?;
    s.model.learning_rate = resolve(opts.model_lr, cfg, "model_lr", s.model.learning_rate)?;
    s.validate()?;
    Ok(s)
}

/// Build the balancing method named by `name` ("none", a baseline, or
/// "simpor"). The embedded seed is a placeholder when the caller reseeds
/// per trial.
pub fn build_method(
    name: &str,
    opts: &SimporOpts,
    cfg: &FileConfig,
    seed: u64,
) -> Result<BalanceMethod> {
    match name {
        "none" | "identity" => Ok(BalanceMethod::Identity),
        "simpor" => Ok(BalanceMethod::Simpor(Box::new(build_simpor(opts, cfg, seed)?))),
        other => {
            let kind: BaselineKind = other.parse().map_err(|_| {
                Error::config(format!(
                    "unknown method '{other}' (expected none, ros, smote, \
                     borderline_smote, adasyn or simpor)"
                ))
            })?;
            let k_neighbors = resolve(opts.k_neighbors, cfg, "k_neighbors", 5)?;
            let baseline = BaselineConfig {
                kind,
                k_neighbors,
                seed,
            };
            baseline.validate()?;
            Ok(BalanceMethod::Baseline(baseline))
        }
    }
}

/// Effective method parameters for the report's provenance block.
pub fn method_config_json(method: &BalanceMethod) -> serde_json::Value {
    match method {
        BalanceMethod::Identity => serde_json::json!({}),
        BalanceMethod::Baseline(cfg) => {
            serde_json::to_value(cfg).expect("plain config serializes")
        }
        BalanceMethod::Simpor(cfg) => {
            serde_json::to_value(&**cfg).expect("plain config serializes")
        }
    }
}

/// "last", a zero-based column index, or a header name.
pub fn parse_label_column(raw: &str) -> LabelColumn {
    if raw == "last" {
        LabelColumn::Last
    } else if let Ok(index) = raw.parse::<usize>() {
        LabelColumn::Index(index)
    } else {
        LabelColumn::Name(raw.to_string())
    }
}

/// Comma-separated layer widths, e.g. "100,100,100".
pub fn parse_layers(raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::config(format!("invalid layer width '{part}' in '{raw}'")))
        })
        .collect()
}

fn parse_scope(raw: &str) -> Result<NeighborScope> {
    match raw {
        "all_classes" | "all" => Ok(NeighborScope::AllClasses),
        "minority_only" | "minority" => Ok(NeighborScope::MinorityOnly),
        other => Err(Error::config(format!(
            "neighbor_scope must be all_classes or minority_only, got '{other}'"
        ))),
    }
}

fn parse_bandwidth(raw: &str) -> Result<BandwidthMode> {
    match raw {
        "per_class" => Ok(BandwidthMode::PerClass),
        "shared" => Ok(BandwidthMode::Shared),
        other => Err(Error::config(format!(
            "bandwidth must be per_class or shared, got '{other}'"
        ))),
    }
}
