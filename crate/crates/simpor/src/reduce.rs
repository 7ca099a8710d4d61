//! Principal component projection and a class-overlap diagnostic.
//!
//! [`Pca`] fits principal components with power iteration plus deflation on
//! the sample covariance matrix, good enough for the low component counts
//! used in plots and diagnostics. [`class_overlap_percent`] projects a
//! two-class dataset onto its first component and measures how much of the
//! minority class shares histogram bins with the majority class.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::data::Dataset;
use crate::error::{Error, Result};

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 10_000;

/// Histogram bins used by [`class_overlap_percent`] by default.
pub const DEFAULT_OVERLAP_BINS: usize = 20;

/// A fitted principal component basis.
#[derive(Debug, Clone)]
pub struct Pca {
    mean: Array1<f64>,
    /// One component per row, unit length, mutually orthogonal.
    components: Array2<f64>,
    explained_variance: Array1<f64>,
}

impl Pca {
    /// Fit `n_components` principal components of `data` (rows are samples).
    ///
    /// Components come out in order of decreasing explained variance, each
    /// unit length with its first nonzero coordinate positive so the basis
    /// is reproducible. Requires at least two samples and one feature.
    pub fn fit(data: ArrayView2<'_, f64>, n_components: usize) -> Result<Pca> {
        let (n, d) = data.dim();
        if n < 2 {
            return Err(Error::data(format!(
                "need at least 2 samples to fit principal components, got {n}"
            )));
        }
        if d == 0 {
            return Err(Error::data("data has no feature columns"));
        }
        if n_components == 0 || n_components > d {
            return Err(Error::config(format!(
                "n_components must be in 1..={d}, got {n_components}"
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("data contains non-finite values"));
        }

        let mean = data.mean_axis(ndarray::Axis(0)).expect("n >= 2");
        let centered = &data - &mean.view().insert_axis(ndarray::Axis(0));
        let mut cov = centered.t().dot(&centered) / (n - 1) as f64;

        let mut components = Array2::zeros((n_components, d));
        let mut explained = Array1::zeros(n_components);
        for c in 0..n_components {
            let (v, lambda) = dominant_eigenpair(&cov, components.slice(ndarray::s![..c, ..]));
            explained[c] = lambda.max(0.0);
            components.row_mut(c).assign(&v);
            // Deflate: remove the found direction from the covariance.
            let outer = v
                .view()
                .insert_axis(ndarray::Axis(1))
                .dot(&v.view().insert_axis(ndarray::Axis(0)));
            cov.scaled_add(-lambda, &outer);
        }
        Ok(Pca {
            mean,
            components,
            explained_variance: explained,
        })
    }

    /// Project rows onto the fitted components; output is (n, n_components).
    pub fn transform(&self, data: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if data.ncols() != self.mean.len() {
            return Err(Error::data(format!(
                "expected {} feature columns, got {}",
                self.mean.len(),
                data.ncols()
            )));
        }
        let centered = &data - &self.mean.view().insert_axis(ndarray::Axis(0));
        Ok(centered.dot(&self.components.t()))
    }

    pub fn components(&self) -> ArrayView2<'_, f64> {
        self.components.view()
    }

    pub fn explained_variance(&self) -> ArrayView1<'_, f64> {
        self.explained_variance.view()
    }

    pub fn mean(&self) -> ArrayView1<'_, f64> {
        self.mean.view()
    }
}

/// Fit and project in one step.
pub fn pca_project(data: ArrayView2<'_, f64>, n_components: usize) -> Result<Array2<f64>> {
    Pca::fit(data, n_components)?.transform(data)
}

/// Largest eigenpair of symmetric `cov` by power iteration, kept orthogonal
/// to the already-found `previous` components. A zero matrix (no variance
/// left) yields a deterministic unit vector orthogonal to `previous` with
/// eigenvalue zero.
fn dominant_eigenpair(cov: &Array2<f64>, previous: ArrayView2<'_, f64>) -> (Array1<f64>, f64) {
    let d = cov.nrows();
    let orthogonalize = |v: &mut Array1<f64>| {
        for p in previous.rows() {
            let proj = v.dot(&p);
            v.scaled_add(-proj, &p);
        }
    };

    let mut v = Array1::from_elem(d, 1.0 / (d as f64).sqrt());
    orthogonalize(&mut v);
    if norm(&v) < 1e-9 {
        v = fallback_direction(d, previous);
    }
    normalize(&mut v);

    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let mut next = cov.dot(&v);
        orthogonalize(&mut next);
        let len = norm(&next);
        if len < 1e-300 {
            // No variance along any remaining direction.
            let mut basis = fallback_direction(d, previous);
            normalize(&mut basis);
            return (fix_sign(basis), 0.0);
        }
        next /= len;
        let delta = (&next - &v).iter().map(|x| x * x).sum::<f64>().sqrt();
        lambda = len;
        v = next;
        if delta < POWER_TOL {
            break;
        }
    }
    (fix_sign(v), lambda)
}

/// First standard basis vector not spanned by `previous`, orthogonalized.
fn fallback_direction(d: usize, previous: ArrayView2<'_, f64>) -> Array1<f64> {
    for axis in 0..d {
        let mut e = Array1::zeros(d);
        e[axis] = 1.0;
        for p in previous.rows() {
            let proj = e.dot(&p);
            e.scaled_add(-proj, &p);
        }
        if norm(&e) > 1e-9 {
            return e;
        }
    }
    // previous spans everything; caller never asks for more than d.
    unreachable!("requested more components than dimensions")
}

fn fix_sign(mut v: Array1<f64>) -> Array1<f64> {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.mapv_inplace(|x| -x);
        }
    }
    v
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

fn normalize(v: &mut Array1<f64>) {
    let len = norm(v);
    if len > 0.0 {
        *v /= len;
    }
}

/// Share of the minority class that overlaps the majority class along the
/// first principal component, in percent.
///
/// Both classes are histogrammed over the same `bins` equal-width bins
/// spanning the projected range; the overlap is the per-bin minimum of the
/// two counts, summed and divided by the minority count. 0 means the
/// classes separate cleanly along the first component, 100 means the
/// minority class is fully inside majority territory. A degenerate
/// projection (all points equal) counts as full overlap.
pub fn class_overlap_percent(ds: &Dataset, bins: usize) -> Result<f64> {
    if bins == 0 {
        return Err(Error::config("bins must be positive"));
    }
    let roles = ds.binary_roles()?;
    let projected = pca_project(ds.features(), 1)?;
    let values = projected.column(0);

    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;

    let mut majority_hist = vec![0usize; bins];
    let mut minority_hist = vec![0usize; bins];
    for (i, &x) in values.iter().enumerate() {
        let bin = if width > 0.0 {
            (((x - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        if ds.labels()[i] == roles.majority {
            majority_hist[bin] += 1;
        } else {
            minority_hist[bin] += 1;
        }
    }
    let shared: usize = majority_hist
        .iter()
        .zip(&minority_hist)
        .map(|(&a, &b)| a.min(b))
        .sum();
    Ok(100.0 * shared as f64 / roles.n_minority as f64)
}
