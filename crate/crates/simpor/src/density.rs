//! Kernel density estimates and the class posterior ratio.
//!
//! Each class gets a Gaussian KDE over its training rows with an isotropic
//! bandwidth from Scott's rule, `n^(-1/(d+4))`. The objective maximized when
//! placing synthetic samples is the log ratio of minority to majority
//! posterior, with class priors taken from the empirical class frequencies:
//!
//! ```text
//! log f(x) = [log p1(x) + log pi1] - [log p0(x) + log pi0]
//! ```
//!
//! All densities are handled in log space through log-sum-exp, so the ratio
//! stays usable far from the data where the raw densities underflow. The
//! gradient of a KDE's log density is a softmax-weighted average of the
//! offsets to its support points divided by the squared bandwidth, which
//! gives the objective's gradient in closed form.

use ndarray::{Array1, Array2, ArrayView1};

use crate::data::Dataset;
use crate::error::{Error, Result};

const LOG_2PI: f64 = 1.8378770664093453;

/// Scott's rule bandwidth for `n` points in `d` dimensions.
pub fn scott_bandwidth(n: usize, d: usize) -> f64 {
    (n as f64).powf(-1.0 / (d as f64 + 4.0))
}

/// Choice of KDE bandwidths for the two class densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthMode {
    /// Each class applies Scott's rule to its own sample count.
    PerClass,
    /// Both classes share the bandwidth computed from the full set.
    Shared,
}

/// Gaussian kernel density estimate with one isotropic bandwidth.
#[derive(Debug, Clone)]
pub struct KdeModel {
    points: Array2<f64>,
    h: f64,
}

impl KdeModel {
    pub fn new(points: Array2<f64>, h: f64) -> Result<Self> {
        if points.nrows() == 0 {
            return Err(Error::data("KDE needs at least one support point"));
        }
        if points.ncols() == 0 {
            return Err(Error::data("KDE support points need at least 1 column"));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::config(format!(
                "KDE bandwidth must be positive and finite, got {h}"
            )));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("KDE support points must be finite"));
        }
        Ok(KdeModel { points, h })
    }

    /// Build with the bandwidth from Scott's rule on these points.
    pub fn with_scott_bandwidth(points: Array2<f64>) -> Result<Self> {
        let h = scott_bandwidth(points.nrows(), points.ncols());
        KdeModel::new(points, h)
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    /// log of the sum of unnormalized kernels, `log Σ exp(-||x-xi||²/2h²)`,
    /// via log-sum-exp.
    fn log_kernel_sum(&self, x: ArrayView1<'_, f64>) -> f64 {
        let mut exps = Vec::with_capacity(self.len());
        let inv_2h2 = 1.0 / (2.0 * self.h * self.h);
        let mut max = f64::NEG_INFINITY;
        for row in self.points.rows() {
            let mut d2 = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                d2 += (a - b) * (a - b);
            }
            let e = -d2 * inv_2h2;
            if e > max {
                max = e;
            }
            exps.push(e);
        }
        max + exps.iter().map(|e| (e - max).exp()).sum::<f64>().ln()
    }

    /// Like [`Self::log_kernel_sum`], also returning its gradient. The
    /// gradient is the kernel-softmax-weighted mean offset over h².
    fn log_kernel_sum_and_grad(&self, x: ArrayView1<'_, f64>) -> (f64, Array1<f64>) {
        let inv_2h2 = 1.0 / (2.0 * self.h * self.h);
        let mut exps = Vec::with_capacity(self.len());
        let mut max = f64::NEG_INFINITY;
        for row in self.points.rows() {
            let mut d2 = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                d2 += (a - b) * (a - b);
            }
            let e = -d2 * inv_2h2;
            if e > max {
                max = e;
            }
            exps.push(e);
        }
        let mut weight_sum = 0.0;
        let mut grad = Array1::<f64>::zeros(self.dim());
        for (row, &e) in self.points.rows().into_iter().zip(exps.iter()) {
            let w = (e - max).exp();
            weight_sum += w;
            for (g, (a, b)) in grad.iter_mut().zip(row.iter().zip(x.iter())) {
                *g += w * (a - b);
            }
        }
        let scale = 1.0 / (weight_sum * self.h * self.h);
        grad.mapv_inplace(|g| g * scale);
        (max + weight_sum.ln(), grad)
    }

    /// Normalized log density at `x`.
    pub fn log_density(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.check_query(x)?;
        let d = self.dim() as f64;
        Ok(self.log_kernel_sum(x)
            - (self.len() as f64).ln()
            - d * self.h.ln()
            - 0.5 * d * LOG_2PI)
    }

    /// Gradient of the log density at `x`.
    pub fn log_density_gradient(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        self.check_query(x)?;
        Ok(self.log_kernel_sum_and_grad(x).1)
    }

    fn check_query(&self, x: ArrayView1<'_, f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::data(format!(
                "query has {} coordinates, KDE expects {}",
                x.len(),
                self.dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("query point must be finite"));
        }
        Ok(())
    }
}

/// Empirical class priors `(majority, minority)` for a two-class dataset.
pub fn empirical_priors(ds: &Dataset) -> Result<(f64, f64)> {
    let roles = ds.binary_roles()?;
    let n = ds.len() as f64;
    Ok((roles.n_majority as f64 / n, roles.n_minority as f64 / n))
}

/// Log ratio of minority posterior to majority posterior, built from two
/// classwise KDEs and class priors.
#[derive(Debug, Clone)]
pub struct PosteriorRatioObjective {
    kde_minority: KdeModel,
    kde_majority: KdeModel,
    log_prior_minority: f64,
    log_prior_majority: f64,
}

impl PosteriorRatioObjective {
    /// Assemble from parts. Priors must be positive and sum to 1 within
    /// 1e-9; the KDEs must agree on dimension.
    pub fn new(
        kde_minority: KdeModel,
        kde_majority: KdeModel,
        prior_minority: f64,
        prior_majority: f64,
    ) -> Result<Self> {
        if kde_minority.dim() != kde_majority.dim() {
            return Err(Error::data(format!(
                "class KDEs disagree on dimension: {} vs {}",
                kde_minority.dim(),
                kde_majority.dim()
            )));
        }
        if !(prior_minority > 0.0 && prior_majority > 0.0) {
            return Err(Error::config("class priors must be positive"));
        }
        if (prior_minority + prior_majority - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "class priors must sum to 1, got {}",
                prior_minority + prior_majority
            )));
        }
        Ok(PosteriorRatioObjective {
            kde_minority,
            kde_majority,
            log_prior_minority: prior_minority.ln(),
            log_prior_majority: prior_majority.ln(),
        })
    }

    /// Fit both class KDEs and priors from a two-class dataset.
    pub fn from_dataset(ds: &Dataset, mode: BandwidthMode) -> Result<Self> {
        let roles = ds.binary_roles()?;
        let minority_rows = ds
            .features()
            .select(ndarray::Axis(0), ds.class_members(roles.minority));
        let majority_rows = ds
            .features()
            .select(ndarray::Axis(0), ds.class_members(roles.majority));
        let (h_min, h_maj) = match mode {
            BandwidthMode::PerClass => (
                scott_bandwidth(minority_rows.nrows(), ds.dim()),
                scott_bandwidth(majority_rows.nrows(), ds.dim()),
            ),
            BandwidthMode::Shared => {
                let h = scott_bandwidth(ds.len(), ds.dim());
                (h, h)
            }
        };
        let (prior_majority, prior_minority) = empirical_priors(ds)?;
        PosteriorRatioObjective::new(
            KdeModel::new(minority_rows, h_min)?,
            KdeModel::new(majority_rows, h_maj)?,
            prior_minority,
            prior_majority,
        )
    }

    pub fn dim(&self) -> usize {
        self.kde_minority.dim()
    }

    pub fn kde_minority(&self) -> &KdeModel {
        &self.kde_minority
    }

    pub fn kde_majority(&self) -> &KdeModel {
        &self.kde_majority
    }

    pub fn priors(&self) -> (f64, f64) {
        (
            self.log_prior_majority.exp(),
            self.log_prior_minority.exp(),
        )
    }

    /// `log f(x)`: minority log posterior minus majority log posterior.
    pub fn log_ratio(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        let num = self.kde_minority.log_density(x)? + self.log_prior_minority;
        let den = self.kde_majority.log_density(x)? + self.log_prior_majority;
        Ok(num - den)
    }

    /// Gradient of `log f` at `x`.
    pub fn log_ratio_gradient(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        let g_min = self.kde_minority.log_density_gradient(x)?;
        let g_maj = self.kde_majority.log_density_gradient(x)?;
        Ok(g_min - g_maj)
    }
}
