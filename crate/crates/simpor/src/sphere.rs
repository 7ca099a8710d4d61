//! Gradient ascent constrained to a sphere.
//!
//! Synthetic samples live on a sphere of radius `r` around their parent.
//! Starting from a seeded random point on the sphere, each iteration
//! projects the objective gradient onto the tangent plane and moves along
//! the great circle in that direction. The step is an angle; if it does not
//! improve the objective it halves (up to a fixed number of times), which
//! keeps the accepted objective values strictly increasing. Ascent stops at
//! a stationary point, when the improvement drops below a tolerance, or at
//! the iteration cap. The position re-projects onto the sphere after every
//! accepted step so rounding error cannot accumulate in the radius.

use ndarray::{Array1, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::density::PosteriorRatioObjective;
use crate::error::{Error, Result};

/// Step-angle halvings tried per iteration before giving up.
const MAX_HALVINGS: usize = 20;
/// Tangent gradients below this norm count as stationary.
const STATIONARY_TOL: f64 = 1e-14;

/// Settings for [`maximize_on_sphere`].
#[derive(Debug, Clone, Serialize)]
pub struct SphereAscentConfig {
    /// Initial step angle in radians.
    pub step_angle: f64,
    pub max_iters: usize,
    /// Stop once an accepted step improves the objective by less than this.
    pub improvement_tol: f64,
    /// Seed for the random starting point.
    pub seed: u64,
}

impl Default for SphereAscentConfig {
    fn default() -> Self {
        SphereAscentConfig {
            step_angle: 0.05,
            max_iters: 300,
            improvement_tol: 1e-8,
            seed: 0,
        }
    }
}

impl SphereAscentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_angle > 0.0 && self.step_angle.is_finite()) {
            return Err(Error::config(format!(
                "step_angle must be positive and finite, got {}",
                self.step_angle
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be positive"));
        }
        if self.improvement_tol < 0.0 || self.improvement_tol.is_nan() {
            return Err(Error::config(format!(
                "improvement_tol must be >= 0, got {}",
                self.improvement_tol
            )));
        }
        Ok(())
    }
}

/// Where the ascent ended.
#[derive(Debug, Clone)]
pub struct AscentResult {
    /// Final point, on the sphere.
    pub x: Array1<f64>,
    /// Objective log-ratio at `x`.
    pub f_log: f64,
    /// Objective log-ratio at the random starting point.
    pub f_log_init: f64,
    /// Gradient iterations performed.
    pub iterations: usize,
    /// True when ascent stopped on its own (stationary point or improvement
    /// below tolerance) rather than by hitting `max_iters`.
    pub converged: bool,
    /// Objective value at the start and after every accepted step, in
    /// order. Non-decreasing by construction; kept so callers can audit
    /// the ascent.
    pub trace: Vec<f64>,
}

/// Remove from `g` its component along the unit vector `u`.
pub fn tangent_project(g: ArrayView1<'_, f64>, u: ArrayView1<'_, f64>) -> Array1<f64> {
    let along = g.dot(&u);
    let mut out = g.to_owned();
    out.scaled_add(-along, &u);
    out
}

/// Move `x` along the great circle of the sphere `(center, radius)` in the
/// direction of the unit tangent `t`, by `angle` radians. Assumes `x` lies
/// on the sphere and `t` is orthogonal to the radial direction.
pub fn geodesic_step(
    center: ArrayView1<'_, f64>,
    x: ArrayView1<'_, f64>,
    t: ArrayView1<'_, f64>,
    radius: f64,
    angle: f64,
) -> Array1<f64> {
    let (sin, cos) = angle.sin_cos();
    let mut out = center.to_owned();
    ndarray::Zip::from(&mut out).and(&x).and(&center).for_each(|o, &xi, &ci| {
        *o += (xi - ci) * cos;
    });
    out.scaled_add(radius * sin, &t);
    out
}

/// Uniformly random direction in `d` dimensions.
pub fn random_unit_vector(d: usize, rng: &mut ChaCha8Rng) -> Array1<f64> {
    loop {
        let v: Array1<f64> = Array1::from_shape_fn(d, |_| StandardNormal.sample(rng));
        let norm = v.dot(&v).sqrt();
        if norm > 1e-9 {
            return v / norm;
        }
    }
}

/// Pull a point that drifted off the sphere back onto it.
fn reproject(center: ArrayView1<'_, f64>, x: &mut Array1<f64>, radius: f64) {
    let mut radial = &*x - &center;
    let norm = radial.dot(&radial).sqrt();
    if norm > 0.0 {
        radial.mapv_inplace(|v| v * (radius / norm));
    }
    *x = &center + &radial;
}

/// Maximize the posterior log-ratio on the sphere `(center, radius)`.
///
/// In one dimension the sphere is the two points `center ± radius`; both are
/// evaluated and the better one returned. Deterministic for a fixed config.
pub fn maximize_on_sphere(
    obj: &PosteriorRatioObjective,
    center: ArrayView1<'_, f64>,
    radius: f64,
    cfg: &SphereAscentConfig,
) -> Result<AscentResult> {
    cfg.validate()?;
    if center.len() != obj.dim() {
        return Err(Error::data(format!(
            "center has {} coordinates, objective expects {}",
            center.len(),
            obj.dim()
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::config(format!(
            "sphere radius must be positive and finite, got {radius}"
        )));
    }
    if center.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("sphere center must be finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    if obj.dim() == 1 {
        // The "sphere" is two points; check them exhaustively. A random
        // sign decides the nominal starting point.
        let sign = if random_unit_vector(1, &mut rng)[0] >= 0.0 {
            1.0
        } else {
            -1.0
        };
        let first = Array1::from_elem(1, center[0] + sign * radius);
        let second = Array1::from_elem(1, center[0] - sign * radius);
        let f_first = obj.log_ratio(first.view())?;
        let f_second = obj.log_ratio(second.view())?;
        if !f_first.is_finite() || !f_second.is_finite() {
            return Err(Error::numerical(
                "posterior ratio non-finite on the candidate sphere",
            ));
        }
        let (x, f_log) = if f_second > f_first {
            (second, f_second)
        } else {
            (first, f_first)
        };
        let mut trace = vec![f_first];
        if f_log > f_first {
            trace.push(f_log);
        }
        return Ok(AscentResult {
            x,
            f_log,
            f_log_init: f_first,
            iterations: 1,
            converged: true,
            trace,
        });
    }

    let u0 = random_unit_vector(obj.dim(), &mut rng);
    let mut x = center.to_owned() + u0 * radius;
    let mut f = obj.log_ratio(x.view())?;
    if !f.is_finite() {
        return Err(Error::numerical(
            "posterior ratio non-finite at the starting point",
        ));
    }
    let f_log_init = f;
    let mut trace = vec![f];
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        iterations += 1;
        let grad = obj.log_ratio_gradient(x.view())?;
        if grad.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical(
                "posterior ratio gradient non-finite during ascent",
            ));
        }
        let radial = (&x - &center) / radius;
        let tangent = tangent_project(grad.view(), radial.view());
        let tnorm = tangent.dot(&tangent).sqrt();
        if tnorm <= STATIONARY_TOL {
            converged = true;
            break;
        }
        let t_unit = tangent / tnorm;

        let mut angle = cfg.step_angle;
        let mut improvement = None;
        for _ in 0..MAX_HALVINGS {
            let mut cand = geodesic_step(center, x.view(), t_unit.view(), radius, angle);
            reproject(center, &mut cand, radius);
            let fc = obj.log_ratio(cand.view())?;
            if fc > f {
                improvement = Some(fc - f);
                x = cand;
                f = fc;
                trace.push(f);
                break;
            }
            angle *= 0.5;
        }
        match improvement {
            // No angle in the search range improves: treat as a local max.
            None => {
                converged = true;
                break;
            }
            Some(delta) if delta < cfg.improvement_tol => {
                converged = true;
                break;
            }
            Some(_) => {}
        }
    }

    Ok(AscentResult {
        x,
        f_log: f,
        f_log_init,
        iterations,
        converged,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::KdeModel;
    use approx::assert_relative_eq;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::Rng;

    /// Objective with one support point per class and a shared bandwidth:
    /// log f is then linear in x up to constants, and its maximum over any
    /// sphere is at `center + r * normalize(p_min - p_maj)`.
    fn two_point_objective(p_min: [f64; 2], p_maj: [f64; 2], h: f64) -> PosteriorRatioObjective {
        PosteriorRatioObjective::new(
            KdeModel::new(array![[p_min[0], p_min[1]]], h).unwrap(),
            KdeModel::new(array![[p_maj[0], p_maj[1]]], h).unwrap(),
            0.3,
            0.7,
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn tangent_projection_is_orthogonal(
            g in proptest::collection::vec(-10.0f64..10.0, 3),
            u in proptest::collection::vec(-1.0f64..1.0, 3),
        ) {
            let g = Array1::from_vec(g);
            let u = Array1::from_vec(u);
            let norm = u.dot(&u).sqrt();
            prop_assume!(norm > 1e-3);
            let u = u / norm;
            let t = tangent_project(g.view(), u.view());
            prop_assert!(t.dot(&u).abs() < 1e-12 * (1.0 + g.dot(&g).sqrt()));
            // Projecting twice changes nothing.
            let t2 = tangent_project(t.view(), u.view());
            for (a, b) in t.iter().zip(t2.iter()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn geodesic_step_preserves_radius(
            seed in 0u64..500,
            angle in 0.001f64..3.0,
            radius in 0.01f64..100.0,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let center = Array1::from_shape_fn(3, |_| rng.random_range(-5.0..5.0));
            let u = random_unit_vector(3, &mut rng);
            let x = &center + &(u.clone() * radius);
            let g = Array1::from_shape_fn(3, |_| rng.random_range(-2.0..2.0));
            let t = tangent_project(g.view(), u.view());
            let tnorm = t.dot(&t).sqrt();
            prop_assume!(tnorm > 1e-6);
            let t = t / tnorm;
            let stepped = geodesic_step(center.view(), x.view(), t.view(), radius, angle);
            let r2 = (&stepped - &center).mapv(|v| v * v).sum().sqrt();
            prop_assert!((r2 - radius).abs() <= 1e-12 * radius.max(1.0),
                "radius drifted from {radius} to {r2}");
        }
    }

    #[test]
    fn geodesic_step_zero_angle_is_identity() {
        let center = array![1.0, -2.0];
        let x = array![1.0, -1.0];
        let t = array![1.0, 0.0];
        let stepped = geodesic_step(center.view(), x.view(), t.view(), 1.0, 0.0);
        assert_relative_eq!(stepped[0], x[0], epsilon = 1e-15);
        assert_relative_eq!(stepped[1], x[1], epsilon = 1e-15);
    }

    #[test]
    fn geodesic_step_quarter_turn() {
        let center = array![0.0, 0.0];
        let x = array![2.0, 0.0];
        let t = array![0.0, 1.0];
        let stepped = geodesic_step(
            center.view(),
            x.view(),
            t.view(),
            2.0,
            std::f64::consts::FRAC_PI_2,
        );
        assert_relative_eq!(stepped[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(stepped[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn random_unit_vectors_have_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [1usize, 2, 3, 7] {
            let v = random_unit_vector(d, &mut rng);
            assert_relative_eq!(v.dot(&v).sqrt(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ascent_finds_the_analytic_maximum() {
        // With one support point per class and equal bandwidths, log f is
        // linear, so the sphere maximum is along p_min - p_maj.
        let obj = two_point_objective([4.0, 1.0], [-3.0, -2.0], 1.5);
        let center = array![0.5, 0.5];
        let radius = 0.8;
        let dir = array![7.0f64, 3.0];
        let dir = &dir / dir.dot(&dir).sqrt();
        let expected = &center + &(dir * radius);

        let res = maximize_on_sphere(&obj, center.view(), radius, &SphereAscentConfig::default())
            .unwrap();
        assert!(res.converged);
        assert_relative_eq!(res.x[0], expected[0], epsilon = 1e-4);
        assert_relative_eq!(res.x[1], expected[1], epsilon = 1e-4);
        assert!(res.f_log >= res.f_log_init);
    }

    #[test]
    fn accepted_values_never_decrease() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..25 {
            let p_min = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let p_maj = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let obj = two_point_objective(p_min, p_maj, rng.random_range(0.3..2.0));
            let center = array![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let radius = rng.random_range(0.05..1.5);
            let res = maximize_on_sphere(
                &obj,
                center.view(),
                radius,
                &SphereAscentConfig {
                    seed: trial,
                    ..SphereAscentConfig::default()
                },
            )
            .unwrap();
            assert!(
                res.f_log >= res.f_log_init - 1e-12,
                "trial {trial}: end {} below start {}",
                res.f_log,
                res.f_log_init
            );
            let r = (&res.x - &center).mapv(|v| v * v).sum().sqrt();
            assert_relative_eq!(r, radius, max_relative = 1e-9);
        }
    }

    #[test]
    fn uniform_objective_converges_immediately() {
        // Identical class KDEs and equal priors: log f is 0 everywhere.
        let pts = array![[0.0, 0.0], [1.0, 1.0]];
        let obj = PosteriorRatioObjective::new(
            KdeModel::new(pts.clone(), 0.9).unwrap(),
            KdeModel::new(pts, 0.9).unwrap(),
            0.5,
            0.5,
        )
        .unwrap();
        let res = maximize_on_sphere(
            &obj,
            array![0.4, 0.2].view(),
            0.3,
            &SphereAscentConfig::default(),
        )
        .unwrap();
        assert!(res.converged);
        assert!(res.iterations <= 1);
        assert_relative_eq!(res.f_log, 0.0, epsilon = 1e-12);
        assert_relative_eq!(res.f_log_init, 0.0, epsilon = 1e-12);
        let r = (&res.x - &array![0.4, 0.2]).mapv(|v| v * v).sum().sqrt();
        assert_relative_eq!(r, 0.3, max_relative = 1e-9);
    }

    #[test]
    fn one_dimension_checks_both_points() {
        let obj = PosteriorRatioObjective::new(
            KdeModel::new(array![[5.0]], 1.0).unwrap(),
            KdeModel::new(array![[0.0]], 1.0).unwrap(),
            0.5,
            0.5,
        )
        .unwrap();
        let res = maximize_on_sphere(
            &obj,
            array![1.0].view(),
            0.5,
            &SphereAscentConfig::default(),
        )
        .unwrap();
        // 1.5 is closer to the minority point at 5 than 0.5 is.
        assert_relative_eq!(res.x[0], 1.5, epsilon = 1e-12);
        assert!(res.converged);

        let obj_flip = PosteriorRatioObjective::new(
            KdeModel::new(array![[-5.0]], 1.0).unwrap(),
            KdeModel::new(array![[5.0]], 1.0).unwrap(),
            0.5,
            0.5,
        )
        .unwrap();
        let res = maximize_on_sphere(
            &obj_flip,
            array![1.0].view(),
            0.5,
            &SphereAscentConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(res.x[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn deterministic_per_seed() {
        let obj = two_point_objective([2.0, 2.0], [-1.0, 0.0], 0.8);
        let cfg = SphereAscentConfig {
            seed: 11,
            ..SphereAscentConfig::default()
        };
        let a = maximize_on_sphere(&obj, array![0.0, 0.0].view(), 0.5, &cfg).unwrap();
        let b = maximize_on_sphere(&obj, array![0.0, 0.0].view(), 0.5, &cfg).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.f_log, b.f_log);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn rejects_bad_arguments() {
        let obj = two_point_objective([1.0, 0.0], [0.0, 0.0], 1.0);
        let cfg = SphereAscentConfig::default();
        assert!(maximize_on_sphere(&obj, array![0.0].view(), 0.5, &cfg).is_err());
        assert!(maximize_on_sphere(&obj, array![0.0, 0.0].view(), 0.0, &cfg).is_err());
        assert!(maximize_on_sphere(&obj, array![0.0, 0.0].view(), -1.0, &cfg).is_err());
        let bad = SphereAscentConfig {
            step_angle: 0.0,
            ..SphereAscentConfig::default()
        };
        assert!(maximize_on_sphere(&obj, array![0.0, 0.0].view(), 0.5, &bad).is_err());
    }

    #[test]
    fn beats_a_dense_grid_on_random_instances() {
        // Small version of the acceptance check: ascent should match or
        // beat the best of 200 evenly spaced circle points within 1e-3.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut hits = 0;
        let trials = 20;
        for trial in 0..trials {
            let n_maj = rng.random_range(5..15);
            let n_min = rng.random_range(2..6);
            let mut pts = |n: usize| {
                ndarray::Array2::from_shape_fn((n, 2), |_| rng.random_range(0.0..1.0f64))
            };
            let minority = pts(n_min);
            let majority = pts(n_maj);
            let center = minority.row(0).to_owned();
            let prior_min = n_min as f64 / (n_min + n_maj) as f64;
            let obj = PosteriorRatioObjective::new(
                KdeModel::with_scott_bandwidth(minority).unwrap(),
                KdeModel::with_scott_bandwidth(majority).unwrap(),
                prior_min,
                1.0 - prior_min,
            )
            .unwrap();
            let radius = rng.random_range(0.02..0.15);

            let res = maximize_on_sphere(
                &obj,
                center.view(),
                radius,
                &SphereAscentConfig {
                    seed: trial,
                    ..SphereAscentConfig::default()
                },
            )
            .unwrap();

            let grid_best = (0..200)
                .map(|k| {
                    let theta = 2.0 * std::f64::consts::PI * k as f64 / 200.0;
                    let p = array![
                        center[0] + radius * theta.cos(),
                        center[1] + radius * theta.sin()
                    ];
                    obj.log_ratio(p.view()).unwrap()
                })
                .fold(f64::NEG_INFINITY, f64::max);

            if res.f_log >= grid_best - 1e-3 {
                hits += 1;
            }
        }
        assert!(hits >= 19, "ascent matched the grid on only {hits}/{trials}");
    }
}
