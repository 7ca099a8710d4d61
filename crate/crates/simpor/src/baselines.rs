//! Classic minority-oversampling baselines.
//!
//! Four methods, each bringing a two-class dataset to exact parity by
//! appending synthetic minority rows:
//!
//! * [`random_oversample`] duplicates randomly drawn minority rows.
//! * [`smote`] interpolates between a random minority row and one of its k
//!   nearest minority neighbors.
//! * [`borderline_smote`] restricts parents to "danger" minority rows,
//!   those with at least half (but not all) majority rows among their k
//!   nearest neighbors, then interpolates toward minority neighbors.
//! * [`adasyn`] allocates more children to minority rows with more majority
//!   neighbors, then interpolates like SMOTE.
//!
//! All methods are deterministic for a fixed seed. Degenerate inputs fall
//! back rather than fail: a lone minority row is duplicated instead of
//! interpolated, an empty danger set widens to the whole minority class,
//! and a fully separated dataset gives ADASYN uniform weights. Fallbacks
//! are reported on [`OversampleResult`].

use ndarray::{Array1, Array2, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{euclidean, BinaryRoles, Dataset};
use crate::error::{Error, Result};

/// Which baseline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Ros,
    Smote,
    BorderlineSmote,
    Adasyn,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 4] = [
        BaselineKind::Ros,
        BaselineKind::Smote,
        BaselineKind::BorderlineSmote,
        BaselineKind::Adasyn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::Ros => "ros",
            BaselineKind::Smote => "smote",
            BaselineKind::BorderlineSmote => "borderline_smote",
            BaselineKind::Adasyn => "adasyn",
        }
    }
}

impl std::str::FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ros" => Ok(BaselineKind::Ros),
            "smote" => Ok(BaselineKind::Smote),
            "borderline_smote" | "borderline-smote" | "bl_smote" | "bl-smote" => {
                Ok(BaselineKind::BorderlineSmote)
            }
            "adasyn" => Ok(BaselineKind::Adasyn),
            other => Err(Error::config(format!(
                "unknown oversampler '{other}' (expected ros, smote, borderline_smote or adasyn)"
            ))),
        }
    }
}

/// Settings for [`oversample`].
#[derive(Debug, Clone, Serialize)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    /// Neighborhood size for interpolation and danger/weight computation.
    /// Clamped internally when fewer neighbors exist. Ignored by ROS.
    pub k_neighbors: usize,
    pub seed: u64,
}

impl BaselineConfig {
    pub fn new(kind: BaselineKind) -> Self {
        BaselineConfig {
            kind,
            k_neighbors: 5,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors == 0 {
            return Err(Error::config("k_neighbors must be positive"));
        }
        Ok(())
    }
}

/// A balanced dataset plus how it was produced.
#[derive(Debug, Clone)]
pub struct OversampleResult {
    /// Input rows in their original order, then the synthetic rows.
    pub dataset: Dataset,
    pub n_synthetic: usize,
    /// Parent row index for each synthetic row, in output order.
    pub parent_indices: Vec<usize>,
    /// Interpolation was impossible (single minority row), so that row was
    /// duplicated instead.
    pub duplication_fallback: bool,
    /// Borderline-SMOTE found no danger rows and drew parents from the
    /// whole minority class instead.
    pub danger_fallback: bool,
    /// ADASYN saw no majority neighbors anywhere and fell back to uniform
    /// weights.
    pub uniform_fallback: bool,
}

/// Run the baseline selected by `cfg`.
pub fn oversample(ds: &Dataset, cfg: &BaselineConfig) -> Result<OversampleResult> {
    cfg.validate()?;
    match cfg.kind {
        BaselineKind::Ros => random_oversample(ds, cfg.seed),
        BaselineKind::Smote => smote(ds, cfg.k_neighbors, cfg.seed),
        BaselineKind::BorderlineSmote => borderline_smote(ds, cfg.k_neighbors, cfg.seed),
        BaselineKind::Adasyn => adasyn(ds, cfg.k_neighbors, cfg.seed),
    }
}

/// Duplicate uniformly drawn minority rows until parity.
pub fn random_oversample(ds: &Dataset, seed: u64) -> Result<OversampleResult> {
    let roles = ds.binary_roles()?;
    let gap = roles.n_majority - roles.n_minority;
    let minority = ds.class_members(roles.minority);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let feats = ds.features();
    let mut rows = Vec::with_capacity(gap);
    let mut parents = Vec::with_capacity(gap);
    for _ in 0..gap {
        let p = minority[rng.random_range(0..minority.len())];
        rows.push(feats.row(p).to_owned());
        parents.push(p);
    }
    assemble(ds, &roles, rows, parents, false, false, false)
}

/// Interpolate between random minority rows and their minority neighbors.
pub fn smote(ds: &Dataset, k_neighbors: usize, seed: u64) -> Result<OversampleResult> {
    if k_neighbors == 0 {
        return Err(Error::config("k_neighbors must be positive"));
    }
    let roles = ds.binary_roles()?;
    let gap = roles.n_majority - roles.n_minority;
    let minority = ds.class_members(roles.minority);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    if minority.len() == 1 {
        let feats = ds.features();
        let rows = vec![feats.row(minority[0]).to_owned(); gap];
        let parents = vec![minority[0]; gap];
        return assemble(ds, &roles, rows, parents, gap > 0, false, false);
    }

    let k_eff = k_neighbors.min(minority.len() - 1);
    let mut neighbor_cache: Vec<Option<Vec<usize>>> = vec![None; ds.len()];
    let feats = ds.features();
    let mut rows = Vec::with_capacity(gap);
    let mut parents = Vec::with_capacity(gap);
    for _ in 0..gap {
        let p = minority[rng.random_range(0..minority.len())];
        let neighbors = neighbor_cache[p]
            .get_or_insert_with(|| nearest(feats, p, minority, k_eff));
        let q = neighbors[rng.random_range(0..neighbors.len())];
        let u: f64 = rng.random_range(0.0..1.0);
        rows.push(interpolate(feats, p, q, u));
        parents.push(p);
    }
    assemble(ds, &roles, rows, parents, false, false, false)
}

/// SMOTE with parents restricted to danger-zone minority rows.
pub fn borderline_smote(ds: &Dataset, k_neighbors: usize, seed: u64) -> Result<OversampleResult> {
    if k_neighbors == 0 {
        return Err(Error::config("k_neighbors must be positive"));
    }
    let roles = ds.binary_roles()?;
    let gap = roles.n_majority - roles.n_minority;
    let minority = ds.class_members(roles.minority);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    if minority.len() == 1 {
        let feats = ds.features();
        let rows = vec![feats.row(minority[0]).to_owned(); gap];
        let parents = vec![minority[0]; gap];
        return assemble(ds, &roles, rows, parents, gap > 0, false, false);
    }

    let danger = danger_minority_rows(ds, &roles, k_neighbors);
    let (pool, danger_fallback) = if danger.is_empty() {
        (minority.to_vec(), true)
    } else {
        (danger, false)
    };

    let k_eff = k_neighbors.min(minority.len() - 1);
    let mut neighbor_cache: Vec<Option<Vec<usize>>> = vec![None; ds.len()];
    let feats = ds.features();
    let mut rows = Vec::with_capacity(gap);
    let mut parents = Vec::with_capacity(gap);
    for _ in 0..gap {
        let p = pool[rng.random_range(0..pool.len())];
        let neighbors = neighbor_cache[p]
            .get_or_insert_with(|| nearest(feats, p, minority, k_eff));
        let q = neighbors[rng.random_range(0..neighbors.len())];
        let u: f64 = rng.random_range(0.0..1.0);
        rows.push(interpolate(feats, p, q, u));
        parents.push(p);
    }
    assemble(ds, &roles, rows, parents, false, danger_fallback, false)
}

/// SMOTE with per-parent child counts proportional to how many majority
/// rows sit among each parent's k nearest neighbors.
pub fn adasyn(ds: &Dataset, k_neighbors: usize, seed: u64) -> Result<OversampleResult> {
    if k_neighbors == 0 {
        return Err(Error::config("k_neighbors must be positive"));
    }
    let roles = ds.binary_roles()?;
    let gap = roles.n_majority - roles.n_minority;
    let minority = ds.class_members(roles.minority);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    if minority.len() == 1 {
        let feats = ds.features();
        let rows = vec![feats.row(minority[0]).to_owned(); gap];
        let parents = vec![minority[0]; gap];
        return assemble(ds, &roles, rows, parents, gap > 0, false, false);
    }

    let all: Vec<usize> = (0..ds.len()).collect();
    let k_all = k_neighbors.min(ds.len() - 1);
    let feats = ds.features();
    let raw: Vec<f64> = minority
        .iter()
        .map(|&i| {
            let nb = nearest(feats, i, &all, k_all);
            let majority_count = nb
                .iter()
                .filter(|&&j| ds.labels()[j] == roles.majority)
                .count();
            majority_count as f64 / k_all as f64
        })
        .collect();
    let total: f64 = raw.iter().sum();
    let (weights, uniform_fallback) = if total > 0.0 {
        (raw.iter().map(|r| r / total).collect::<Vec<f64>>(), false)
    } else {
        (vec![1.0 / raw.len() as f64; raw.len()], true)
    };
    let children = allocate_children(&weights, gap);

    let k_eff = k_neighbors.min(minority.len() - 1);
    let mut rows = Vec::with_capacity(gap);
    let mut parents = Vec::with_capacity(gap);
    for (slot, &count) in children.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let p = minority[slot];
        let neighbors = nearest(feats, p, minority, k_eff);
        for _ in 0..count {
            let q = neighbors[rng.random_range(0..neighbors.len())];
            let u: f64 = rng.random_range(0.0..1.0);
            rows.push(interpolate(feats, p, q, u));
            parents.push(p);
        }
    }
    assemble(ds, &roles, rows, parents, false, false, uniform_fallback)
}

/// Minority rows whose k nearest neighbors (any class) are at least half,
/// but not entirely, majority rows.
pub fn danger_minority_rows(ds: &Dataset, roles: &BinaryRoles, k_neighbors: usize) -> Vec<usize> {
    let all: Vec<usize> = (0..ds.len()).collect();
    let k = k_neighbors.min(ds.len() - 1);
    let feats = ds.features();
    ds.class_members(roles.minority)
        .iter()
        .copied()
        .filter(|&i| {
            let nb = nearest(feats, i, &all, k);
            let m = nb
                .iter()
                .filter(|&&j| ds.labels()[j] == roles.majority)
                .count();
            2 * m >= k && m < k
        })
        .collect()
}

/// Split `total` children across parents proportionally to `weights`:
/// floor each share, then hand out the remainder one at a time ordered by
/// descending weight (ties toward lower index).
pub(crate) fn allocate_children(weights: &[f64], total: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = weights
        .iter()
        .map(|w| (w * total as f64).floor() as usize)
        .collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    for slot in 0..total.saturating_sub(assigned) {
        counts[order[slot % order.len()]] += 1;
    }
    counts
}

/// Indices of the `k` nearest rows to `from` among `candidates`, excluding
/// `from` itself; distance ties resolve toward lower row indices.
fn nearest(feats: ArrayView2<'_, f64>, from: usize, candidates: &[usize], k: usize) -> Vec<usize> {
    let x = feats.row(from);
    let mut d: Vec<(f64, usize)> = candidates
        .iter()
        .copied()
        .filter(|&j| j != from)
        .map(|j| (euclidean(x, feats.row(j)), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.truncate(k);
    d.into_iter().map(|(_, j)| j).collect()
}

fn interpolate(feats: ArrayView2<'_, f64>, p: usize, q: usize, u: f64) -> Array1<f64> {
    let a = feats.row(p);
    let b = feats.row(q);
    let mut out = a.to_owned();
    out.scaled_add(u, &(&b - &a));
    out
}

fn assemble(
    ds: &Dataset,
    roles: &BinaryRoles,
    rows: Vec<Array1<f64>>,
    parents: Vec<usize>,
    duplication_fallback: bool,
    danger_fallback: bool,
    uniform_fallback: bool,
) -> Result<OversampleResult> {
    let mut mat = Array2::zeros((rows.len(), ds.dim()));
    for (mut row, src) in mat.rows_mut().into_iter().zip(rows.iter()) {
        row.assign(src);
    }
    let dataset = ds.with_synthetic_rows(mat.view(), roles.minority)?;
    Ok(OversampleResult {
        dataset,
        n_synthetic: rows.len(),
        parent_indices: parents,
        duplication_fallback,
        danger_fallback,
        uniform_fallback,
    })
}
