//! Minority oversampling by posterior-ratio maximization.
//!
//! [`balance`] fills the majority/minority gap with synthetic minority
//! samples. Each synthetic sample starts from a real minority parent, gets a
//! radius drawn from a folded normal scaled by the parent's neighborhood
//! size, and is then moved over the sphere of that radius to maximize the
//! minority posterior ratio (see [`crate::density`] and [`crate::sphere`]).
//!
//! Parents are drawn in two phases: first from minority rows inside the
//! informative region (so the region's class gap closes first), then from
//! the remaining minority rows. A parent draw is rejected when its k nearest
//! neighbors contain more rows of some other class than of its own, which
//! keeps parents out of deep majority territory; after a bounded number of
//! rejected draws the least-dominated candidate is used instead.
//!
//! Work items are generated serially from one master RNG, each carrying its
//! own derived seed, and only the per-sample sphere ascents run in parallel.
//! Results are collected in work-item order, so the output is byte-for-byte
//! identical regardless of thread count. The density objective is fitted on
//! the original rows once and never includes synthetic rows, which keeps
//! the per-sample maximizations independent of each other.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::active::{select_informative, ActiveConfig, InformativeSet};
use crate::data::Dataset;
use crate::density::{BandwidthMode, PosteriorRatioObjective};
use crate::error::{Error, Result};
use crate::seed;
use crate::sphere::{maximize_on_sphere, SphereAscentConfig};

/// Fallback neighborhood size when a parent's neighbors all coincide with it.
const ZERO_RANGE_EPSILON: f64 = 1e-9;
/// Radii are clipped to this many standard deviations.
const RADIUS_CLIP_SIGMAS: f64 = 4.0;

/// Which rows count as neighbors when sizing a parent's neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborScope {
    /// Neighbors come from every class.
    AllClasses,
    /// Neighbors come only from the parent's own (minority) class.
    MinorityOnly,
}

/// Which phase produced a synthetic sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Informative,
    Remaining,
}

/// Settings for [`balance`].
#[derive(Debug, Clone, Serialize)]
pub struct SimporConfig {
    /// Neighborhood size for radii and for parent rejection.
    pub k_neighbors: usize,
    /// Scale between neighborhood size and radius standard deviation.
    pub alpha: f64,
    /// Informative-region selection settings. Its `seed` is overridden;
    /// everything derives from `seed` here.
    pub active: ActiveConfig,
    /// Per-sample sphere ascent settings. Its `seed` is overridden too.
    pub ascent: SphereAscentConfig,
    /// Rejected parent draws tolerated per synthetic sample before falling
    /// back to the least-dominated candidate.
    pub rejection_limit: usize,
    pub neighbor_scope: NeighborScope,
    pub bandwidth_mode: BandwidthMode,
    pub seed: u64,
}

impl Default for SimporConfig {
    fn default() -> Self {
        SimporConfig {
            k_neighbors: 5,
            alpha: 0.6,
            active: ActiveConfig::default(),
            ascent: SphereAscentConfig::default(),
            rejection_limit: 50,
            neighbor_scope: NeighborScope::AllClasses,
            bandwidth_mode: BandwidthMode::PerClass,
            seed: 0,
        }
    }
}

impl SimporConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors == 0 {
            return Err(Error::config("k_neighbors must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::config(format!(
                "alpha must be positive and finite, got {}",
                self.alpha
            )));
        }
        if self.rejection_limit == 0 {
            return Err(Error::config("rejection_limit must be positive"));
        }
        self.active.validate()?;
        self.ascent.validate()
    }
}

/// One synthetic minority sample and how it was made.
#[derive(Debug, Clone)]
pub struct SyntheticSample {
    pub features: Array1<f64>,
    /// Class id (always the minority class).
    pub label: usize,
    /// Row index of the parent in the input dataset.
    pub parent_index: usize,
    /// Sphere radius used for this sample.
    pub radius: f64,
    /// Posterior log-ratio at the final position.
    pub f_log: f64,
    /// Posterior log-ratio at the random starting position.
    pub f_log_init: f64,
    pub iterations: usize,
    pub converged: bool,
    pub region: Region,
}

/// Counters and timings from one [`balance`] run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub n_original: usize,
    pub n_majority: usize,
    pub n_minority: usize,
    pub majority_label: String,
    pub minority_label: String,
    pub n_synthetic: usize,
    /// Synthetic samples parented inside the informative region.
    pub phase_informative: usize,
    /// Synthetic samples parented on the remaining minority rows.
    pub phase_remaining: usize,
    pub informative_target: usize,
    pub informative_size: usize,
    pub informative_degenerate: bool,
    /// Parent draws rejected by the neighborhood test.
    pub rejected_draws: usize,
    /// Samples that fell back to the least-dominated parent after
    /// `rejection_limit` rejected draws.
    pub rejection_fallbacks: usize,
    /// Parents whose k nearest neighbors all coincided with them.
    pub zero_range_parents: usize,
    /// Samples whose phase had no minority rows of its own, so parents came
    /// from the whole minority class instead.
    pub region_fallback_parents: usize,
    pub balance_seconds: f64,
}

/// Output of [`balance`].
#[derive(Debug, Clone)]
pub struct BalanceResult {
    /// Input rows in their original order, then the synthetic rows.
    pub dataset: Dataset,
    pub synthetics: Vec<SyntheticSample>,
    /// Selection details; `None` when the input was already balanced.
    pub informative: Option<InformativeSet>,
    pub report: RunReport,
}

/// Mean distance from row `index` to its `k` nearest other rows.
///
/// With [`NeighborScope::MinorityOnly`] only rows sharing the sample's label
/// count. Exhaustive scan; errors if fewer than `k` neighbors exist.
pub fn knn_range(ds: &Dataset, index: usize, k: usize, scope: NeighborScope) -> Result<f64> {
    if index >= ds.len() {
        return Err(Error::data(format!(
            "row {index} out of range ({} rows)",
            ds.len()
        )));
    }
    if k == 0 {
        return Err(Error::config("k must be positive"));
    }
    let feats = ds.features();
    let x = feats.row(index);
    let own = ds.labels()[index];
    let mut dists: Vec<f64> = Vec::with_capacity(ds.len() - 1);
    for j in 0..ds.len() {
        if j == index {
            continue;
        }
        if scope == NeighborScope::MinorityOnly && ds.labels()[j] != own {
            continue;
        }
        dists.push(crate::data::euclidean(x, feats.row(j)));
    }
    if dists.len() < k {
        return Err(Error::data(format!(
            "row {index} has only {} eligible neighbors, need {k}",
            dists.len()
        )));
    }
    dists.sort_by(f64::total_cmp);
    Ok(dists[..k].iter().sum::<f64>() / k as f64)
}

/// Draw a sphere radius: the absolute value of a normal draw with standard
/// deviation `alpha * range`, clipped to 4 standard deviations, redrawn on
/// an exact zero. A zero `range` falls back to a hair-width neighborhood so
/// duplicated parents still get a positive radius.
pub fn sample_radius(range: f64, alpha: f64, rng: &mut ChaCha8Rng) -> f64 {
    let effective = if range > 0.0 { range } else { ZERO_RANGE_EPSILON };
    let sigma = alpha * effective;
    let cap = RADIUS_CLIP_SIGMAS * sigma;
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    loop {
        let r = normal.sample(rng).abs().min(cap);
        if r > 0.0 {
            return r;
        }
    }
}

/// Verdict on a candidate parent.
#[derive(Debug, Clone)]
pub struct RejectDecision {
    pub accepted: bool,
    /// Neighbor counts per class id among the k nearest other rows.
    pub neighbor_counts: Vec<usize>,
    /// Largest other-class count minus own-class count; positive means the
    /// candidate is dominated by another class.
    pub excess: i64,
}

/// Test whether row `index` sits in territory dominated by another class:
/// among its `k` nearest other rows (all classes), does some other class
/// outnumber its own? Neighbor ties at equal distance resolve toward lower
/// row indices.
pub fn reject_candidate(ds: &Dataset, index: usize, k: usize) -> Result<RejectDecision> {
    if index >= ds.len() {
        return Err(Error::data(format!(
            "row {index} out of range ({} rows)",
            ds.len()
        )));
    }
    if k == 0 {
        return Err(Error::config("k must be positive"));
    }
    if k > ds.len() - 1 {
        return Err(Error::data(format!(
            "k = {k} but only {} other rows exist",
            ds.len() - 1
        )));
    }
    let feats = ds.features();
    let x = feats.row(index);
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(ds.len() - 1);
    for j in 0..ds.len() {
        if j != index {
            dists.push((crate::data::euclidean(x, feats.row(j)), j));
        }
    }
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut counts = vec![0usize; ds.num_classes()];
    for &(_, j) in dists.iter().take(k) {
        counts[ds.labels()[j]] += 1;
    }
    let own = ds.labels()[index];
    let max_other = counts
        .iter()
        .enumerate()
        .filter(|(c, _)| *c != own)
        .map(|(_, &n)| n)
        .max()
        .unwrap_or(0);
    Ok(RejectDecision {
        accepted: max_other <= counts[own],
        excess: max_other as i64 - counts[own] as i64,
        neighbor_counts: counts,
    })
}

struct WorkItem {
    parent: usize,
    radius: f64,
    region: Region,
    seed: u64,
}

/// Balance a two-class dataset by synthesizing minority samples.
///
/// The output keeps every input row unchanged (same order, same values) and
/// appends exactly `n_majority - n_minority` synthetic minority rows. An
/// already balanced input comes back untouched with zero synthetics.
/// Deterministic for a fixed config, independent of the rayon thread count.
pub fn balance(train: &Dataset, cfg: &SimporConfig) -> Result<BalanceResult> {
    cfg.validate()?;
    let roles = train.binary_roles()?;
    let started = Instant::now();

    if cfg.k_neighbors > train.len() - 1 {
        return Err(Error::config(format!(
            "k_neighbors = {} but the dataset has only {} other rows",
            cfg.k_neighbors,
            train.len() - 1
        )));
    }
    if cfg.neighbor_scope == NeighborScope::MinorityOnly
        && cfg.k_neighbors > roles.n_minority - 1
    {
        return Err(Error::config(format!(
            "k_neighbors = {} exceeds the {} other minority rows available \
             under the minority-only neighbor scope",
            cfg.k_neighbors,
            roles.n_minority - 1
        )));
    }

    let gap = roles.n_majority - roles.n_minority;
    let mut report = RunReport {
        n_original: train.len(),
        n_majority: roles.n_majority,
        n_minority: roles.n_minority,
        majority_label: train.label_names()[roles.majority].clone(),
        minority_label: train.label_names()[roles.minority].clone(),
        n_synthetic: gap,
        phase_informative: 0,
        phase_remaining: 0,
        informative_target: 0,
        informative_size: 0,
        informative_degenerate: false,
        rejected_draws: 0,
        rejection_fallbacks: 0,
        zero_range_parents: 0,
        region_fallback_parents: 0,
        balance_seconds: 0.0,
    };
    if gap == 0 {
        report.balance_seconds = started.elapsed().as_secs_f64();
        return Ok(BalanceResult {
            dataset: train.clone(),
            synthetics: Vec::new(),
            informative: None,
            report,
        });
    }

    let active_cfg = ActiveConfig {
        seed: seed::derive(cfg.seed, 1),
        ..cfg.active.clone()
    };
    let informative = select_informative(train, &active_cfg)?;
    let mask = informative.membership(train.len())?;
    report.informative_target = informative.target;
    report.informative_size = informative.len();
    report.informative_degenerate = informative.degenerate;

    let objective = PosteriorRatioObjective::from_dataset(train, cfg.bandwidth_mode)?;

    let minority_all = train.class_members(roles.minority);
    let pool_informative: Vec<usize> = minority_all
        .iter()
        .copied()
        .filter(|&i| mask[i])
        .collect();
    let pool_remaining: Vec<usize> = minority_all
        .iter()
        .copied()
        .filter(|&i| !mask[i])
        .collect();
    let majority_in_set = informative
        .indices
        .iter()
        .filter(|&&i| train.labels()[i] == roles.majority)
        .count();
    // Close the informative region's own class gap first, then the rest.
    let phase_informative = majority_in_set
        .saturating_sub(pool_informative.len())
        .min(gap);
    let phase_remaining = gap - phase_informative;
    report.phase_informative = phase_informative;
    report.phase_remaining = phase_remaining;

    let mut master = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, 2));
    let mut work: Vec<WorkItem> = Vec::with_capacity(gap);
    let mut counter: u64 = 0;
    let mut decisions: HashMap<usize, (bool, i64)> = HashMap::new();
    let mut ranges: HashMap<usize, f64> = HashMap::new();

    for (region, pool, count) in [
        (Region::Informative, &pool_informative, phase_informative),
        (Region::Remaining, &pool_remaining, phase_remaining),
    ] {
        if count == 0 {
            continue;
        }
        let pool: &[usize] = if pool.is_empty() {
            report.region_fallback_parents += count;
            minority_all
        } else {
            pool
        };
        let mut least_dominated: Option<usize> = None;
        for _ in 0..count {
            let mut attempts = 0;
            let parent = loop {
                let cand = pool[master.random_range(0..pool.len())];
                let (accepted, _) = *decisions.entry(cand).or_insert_with(|| {
                    let d = reject_candidate(train, cand, cfg.k_neighbors)
                        .expect("validated k and index");
                    (d.accepted, d.excess)
                });
                if accepted {
                    break cand;
                }
                report.rejected_draws += 1;
                attempts += 1;
                if attempts >= cfg.rejection_limit {
                    report.rejection_fallbacks += 1;
                    let fb = *least_dominated.get_or_insert_with(|| {
                        pool.iter()
                            .copied()
                            .min_by_key(|&i| {
                                let (_, excess) = *decisions.entry(i).or_insert_with(|| {
                                    let d = reject_candidate(train, i, cfg.k_neighbors)
                                        .expect("validated k and index");
                                    (d.accepted, d.excess)
                                });
                                (excess, i)
                            })
                            .expect("pool is non-empty")
                    });
                    break fb;
                }
            };
            let range = match ranges.get(&parent) {
                Some(&r) => r,
                None => {
                    let r = knn_range(train, parent, cfg.k_neighbors, cfg.neighbor_scope)?;
                    ranges.insert(parent, r);
                    r
                }
            };
            if range == 0.0 {
                report.zero_range_parents += 1;
            }
            let radius = sample_radius(range, cfg.alpha, &mut master);
            work.push(WorkItem {
                parent,
                radius,
                region,
                seed: seed::derive2(cfg.seed, parent as u64, counter),
            });
            counter += 1;
        }
    }

    let ascent_base = cfg.ascent.clone();
    let feats = train.features();
    let synthetics: Vec<SyntheticSample> = work
        .par_iter()
        .map(|item| -> Result<SyntheticSample> {
            let center = feats.row(item.parent);
            let ascent_cfg = SphereAscentConfig {
                seed: item.seed,
                ..ascent_base.clone()
            };
            let res = maximize_on_sphere(&objective, center, item.radius, &ascent_cfg)?;
            Ok(SyntheticSample {
                features: res.x,
                label: roles.minority,
                parent_index: item.parent,
                radius: item.radius,
                f_log: res.f_log,
                f_log_init: res.f_log_init,
                iterations: res.iterations,
                converged: res.converged,
                region: item.region,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Array2::zeros((synthetics.len(), train.dim()));
    for (mut row, s) in rows.rows_mut().into_iter().zip(synthetics.iter()) {
        row.assign(&s.features);
    }
    let dataset = train.with_synthetic_rows(rows.view(), roles.minority)?;
    report.balance_seconds = started.elapsed().as_secs_f64();

    Ok(BalanceResult {
        dataset,
        synthetics,
        informative: Some(informative),
        report,
    })
}

/// Write the balanced dataset as CSV with provenance columns: `synthetic`
/// flag plus, for synthetic rows, the parent row index, sphere radius,
/// final posterior log-ratio, and the phase that produced the row.
pub fn save_csv_with_provenance(result: &BalanceResult, path: impl AsRef<Path>) -> Result<()> {
    use std::io::Write;
    let ds = &result.dataset;
    let n_original = result.report.n_original;
    let file = std::fs::File::create(path.as_ref())?;
    let mut out = std::io::BufWriter::new(file);

    let mut header: Vec<String> = ds.feature_names().to_vec();
    header.extend(
        ["label", "synthetic", "parent_index", "radius", "f_log", "region"]
            .iter()
            .map(|s| s.to_string()),
    );
    header[ds.dim()] = ds.label_column().to_string();
    writeln!(out, "{}", header.join(","))?;

    let fmt = |v: f64| {
        let mut s = String::new();
        write!(s, "{v}").expect("write to string");
        s
    };
    for i in 0..ds.len() {
        let mut cells: Vec<String> = ds.features().row(i).iter().map(|&v| fmt(v)).collect();
        cells.push(ds.label_names()[ds.labels()[i]].clone());
        if i < n_original {
            cells.extend(["0", "", "", "", ""].iter().map(|s| s.to_string()));
        } else {
            let s = &result.synthetics[i - n_original];
            cells.push("1".to_string());
            cells.push(s.parent_index.to_string());
            cells.push(fmt(s.radius));
            cells.push(fmt(s.f_log));
            cells.push(
                match s.region {
                    Region::Informative => "informative",
                    Region::Remaining => "remaining",
                }
                .to_string(),
            );
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}
