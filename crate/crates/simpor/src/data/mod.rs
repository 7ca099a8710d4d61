//! Dataset container and preprocessing utilities.
//!
//! A [`Dataset`] stores a dense feature matrix plus one class id per row.
//! Class ids are interned: the string labels found in the input are mapped to
//! `0..k` in order of first appearance, and the original names are kept so
//! output files can show them again. Derived datasets (splits, subsets,
//! balanced copies) share the same label universe, which keeps class ids
//! comparable across them.

mod csv_io;
mod moon;

pub use csv_io::{load_csv, save_csv, save_csv_flagged, LabelColumn, LoadReport};
pub use moon::{make_moon, DEFAULT_NOISE};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A borrowed view of one row together with its class id.
#[derive(Debug, Clone, Copy)]
pub struct LabeledSample<'a> {
    pub features: ArrayView1<'a, f64>,
    pub label: usize,
}

/// Majority/minority assignment for a two-class dataset.
///
/// Roles are decided by count; a tie goes to the class that appeared first
/// in the label universe, which keeps the choice deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryRoles {
    pub majority: usize,
    pub minority: usize,
    pub n_majority: usize,
    pub n_minority: usize,
}

/// In-memory tabular dataset with interned class labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    label_names: Vec<String>,
    feature_names: Vec<String>,
    /// Header name of the label column, kept for CSV output.
    pub(crate) label_column: String,
    /// Row indices of each class, ascending; one entry per label name.
    class_index: Vec<Vec<usize>>,
}

impl Dataset {
    /// Build a dataset from an already-interned representation.
    ///
    /// Every label must be a valid index into `label_names`; classes with no
    /// rows are allowed (they can appear in subsets). All feature values must
    /// be finite.
    pub fn new(
        features: Array2<f64>,
        labels: Vec<usize>,
        label_names: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::data("dataset has no rows"));
        }
        if features.ncols() == 0 {
            return Err(Error::data("dataset has no feature columns"));
        }
        if features.nrows() != labels.len() {
            return Err(Error::data(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::data(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                features.ncols()
            )));
        }
        if label_names.is_empty() {
            return Err(Error::data("empty label universe"));
        }
        if let Some(bad) = features.iter().position(|v| !v.is_finite()) {
            let (r, c) = (bad / features.ncols(), bad % features.ncols());
            return Err(Error::data(format!(
                "non-finite feature value at row {r}, column {c}"
            )));
        }
        let mut class_index = vec![Vec::new(); label_names.len()];
        for (i, &y) in labels.iter().enumerate() {
            let slot = class_index.get_mut(y).ok_or_else(|| {
                Error::data(format!("label id {y} out of range (universe size {})", label_names.len()))
            })?;
            slot.push(i);
        }
        Ok(Dataset {
            features,
            labels,
            label_names,
            feature_names,
            label_column: "label".to_string(),
            class_index,
        })
    }

    /// Build a dataset from raw rows and string labels, interning labels in
    /// order of first appearance.
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        labels: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::data(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if rows.is_empty() {
            return Err(Error::data("dataset has no rows"));
        }
        let dim = feature_names.len();
        let mut flat = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::data(format!(
                    "row {i} has {} values, expected {dim}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        let features = Array2::from_shape_vec((rows.len(), dim), flat)
            .map_err(|e| Error::data(format!("bad feature shape: {e}")))?;

        let mut label_names: Vec<String> = Vec::new();
        let mut ids = Vec::with_capacity(labels.len());
        for name in &labels {
            let id = match label_names.iter().position(|n| n == name) {
                Some(id) => id,
                None => {
                    label_names.push(name.clone());
                    label_names.len() - 1
                }
            };
            ids.push(id);
        }
        Dataset::new(features, ids, label_names, feature_names)
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of feature columns.
    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    /// Size of the label universe, including classes with zero rows here.
    pub fn num_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Header name used for the label column in CSV output.
    pub fn label_column(&self) -> &str {
        &self.label_column
    }

    pub fn set_label_column(&mut self, name: impl Into<String>) {
        self.label_column = name.into();
    }

    /// New dataset with the given rows/labels, inheriting this dataset's
    /// label universe, feature names and label column name.
    fn derived(&self, features: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        let mut ds = Dataset::new(
            features,
            labels,
            self.label_names.clone(),
            self.feature_names.clone(),
        )?;
        ds.label_column = self.label_column.clone();
        Ok(ds)
    }

    pub fn sample(&self, index: usize) -> LabeledSample<'_> {
        LabeledSample {
            features: self.features.row(index),
            label: self.labels[index],
        }
    }

    /// Row indices belonging to `class`, ascending.
    pub fn class_members(&self, class: usize) -> &[usize] {
        &self.class_index[class]
    }

    /// Per-class row counts, indexed by class id.
    pub fn class_counts(&self) -> Vec<usize> {
        self.class_index.iter().map(Vec::len).collect()
    }

    /// Classes that actually have rows here.
    pub fn present_classes(&self) -> Vec<usize> {
        (0..self.num_classes())
            .filter(|&c| !self.class_index[c].is_empty())
            .collect()
    }

    /// Copy the selected rows into a new dataset sharing this label universe.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::data("cannot build an empty subset"));
        }
        for &i in indices {
            if i >= self.len() {
                return Err(Error::data(format!(
                    "subset index {i} out of range ({} rows)",
                    self.len()
                )));
            }
        }
        let features = self.features.select(Axis(0), indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        self.derived(features, labels)
    }

    /// Append synthetic rows for one class, returning a new dataset.
    /// Original rows keep their indices; new rows follow them.
    pub fn with_synthetic_rows(&self, rows: ArrayView2<'_, f64>, class: usize) -> Result<Self> {
        if rows.ncols() != self.dim() {
            return Err(Error::data(format!(
                "synthetic rows have {} columns, dataset has {}",
                rows.ncols(),
                self.dim()
            )));
        }
        if class >= self.num_classes() {
            return Err(Error::data(format!("class id {class} out of range")));
        }
        let mut features = Array2::zeros((self.len() + rows.nrows(), self.dim()));
        features
            .slice_mut(ndarray::s![..self.len(), ..])
            .assign(&self.features);
        features
            .slice_mut(ndarray::s![self.len().., ..])
            .assign(&rows);
        let mut labels = self.labels.clone();
        labels.extend(std::iter::repeat_n(class, rows.nrows()));
        self.derived(features, labels)
    }

    /// Majority/minority split for a dataset with exactly two non-empty
    /// classes.
    pub fn binary_roles(&self) -> Result<BinaryRoles> {
        let present = self.present_classes();
        if present.len() != 2 {
            return Err(Error::data(format!(
                "expected exactly 2 classes with rows, found {}",
                present.len()
            )));
        }
        let (a, b) = (present[0], present[1]);
        let (na, nb) = (self.class_index[a].len(), self.class_index[b].len());
        // On a tie the first-appearing class is called the majority.
        let (majority, minority) = if nb > na { (b, a) } else { (a, b) };
        Ok(BinaryRoles {
            majority,
            minority,
            n_majority: self.class_index[majority].len(),
            n_minority: self.class_index[minority].len(),
        })
    }

    /// Majority count divided by minority count.
    pub fn imbalance_ratio(&self) -> Result<f64> {
        let roles = self.binary_roles()?;
        Ok(roles.n_majority as f64 / roles.n_minority as f64)
    }
}

/// Result of [`stratified_split`].
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
}

/// Split into train and test, preserving class proportions.
///
/// Each non-empty class contributes `round(count * test_fraction)` rows to
/// the test side, clamped so both sides keep at least one row per class.
/// Rows keep their original relative order within each side; which rows land
/// where is decided by a seeded shuffle.
pub fn stratified_split(ds: &Dataset, test_fraction: f64, seed: u64) -> Result<SplitPair> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::config(format!(
            "test_fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for class in 0..ds.num_classes() {
        let members = ds.class_members(class);
        if members.is_empty() {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::data(format!(
                "class '{}' has {} row(s); need at least 2 to split",
                ds.label_names()[class],
                members.len()
            )));
        }
        let mut shuffled = members.to_vec();
        shuffled.shuffle(&mut rng);
        let want = (members.len() as f64 * test_fraction).round() as usize;
        let n_test = want.clamp(1, members.len() - 1);
        test_idx.extend_from_slice(&shuffled[..n_test]);
        train_idx.extend_from_slice(&shuffled[n_test..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok(SplitPair {
        train: ds.subset(&train_idx)?,
        test: ds.subset(&test_idx)?,
    })
}

/// Per-column affine rescaling fitted on one dataset and reusable on others.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinMaxTransform {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl MinMaxTransform {
    /// Record each column's min and max.
    pub fn fit(ds: &Dataset) -> Self {
        let x = ds.features();
        let mut mins = vec![f64::INFINITY; ds.dim()];
        let mut maxs = vec![f64::NEG_INFINITY; ds.dim()];
        for row in x.rows() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        MinMaxTransform { mins, maxs }
    }

    /// Map each column to [0, 1] using the fitted range. Constant columns
    /// map to 0. Values outside the fitted range extrapolate linearly, so
    /// applying a transform fitted on train data to test data is safe.
    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        if self.mins.len() != ds.dim() {
            return Err(Error::data(format!(
                "transform fitted on {} columns, dataset has {}",
                self.mins.len(),
                ds.dim()
            )));
        }
        let mut features = ds.features().to_owned();
        for (j, mut col) in features.columns_mut().into_iter().enumerate() {
            let range = self.maxs[j] - self.mins[j];
            if range > 0.0 {
                col.mapv_inplace(|v| (v - self.mins[j]) / range);
            } else {
                col.fill(0.0);
            }
        }
        ds.derived(features, ds.labels().to_vec())
    }
}

/// Fit a min-max transform on `ds` and apply it, returning both.
pub fn min_max_normalize(ds: &Dataset) -> Result<(Dataset, MinMaxTransform)> {
    let transform = MinMaxTransform::fit(ds);
    let normalized = transform.apply(ds)?;
    Ok((normalized, transform))
}

/// Euclidean distance between two rows.
pub(crate) fn euclidean(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Mean and (population) standard deviation of a slice.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[allow(dead_code)]
pub(crate) fn column_means(x: ArrayView2<'_, f64>) -> Array1<f64> {
    x.mean_axis(Axis(0)).expect("non-empty matrix")
}
