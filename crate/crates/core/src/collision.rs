//! Collision probability estimators for two uncertain spheres: the
//! chi-squared upper bound plus the comparison baselines (Monte Carlo,
//! single-sum approximate integral, bounding volume, maximum density,
//! linearized chance constraint, rectangular box).

use crate::error::{Error, Result};
use crate::gaussian::{
    chi2_cdf, chi2_inv_cdf, eigen_sym, gaussian_pdf, lambda_max_of_inverse, normal_cdf,
    relative_belief, sqrt_psd, GaussianBelief, Matrix, Vector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::time::Instant;

/// A spherical rigid body with a Gaussian-distributed center.
#[derive(Debug, Clone)]
pub struct Body {
    pub center: GaussianBelief,
    pub radius: f64,
}

impl Body {
    pub fn new(center: GaussianBelief, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "radius must be > 0, got {radius}"
            )));
        }
        let n = center.dim();
        if n != 2 && n != 3 {
            return Err(Error::InvalidConfig(format!(
                "body dimension must be 2 or 3, got {n}"
            )));
        }
        Ok(Self { center, radius })
    }
}

/// A robot/obstacle pair with the derived quantities every estimator needs:
/// the squared contact distance `alpha = (r1+s1)^2` and the relative belief
/// `w = robot.center - obstacle.center`.
#[derive(Debug, Clone)]
pub struct CollisionQuery {
    pub robot: Body,
    pub obstacle: Body,
    pub alpha: f64,
    pub w: GaussianBelief,
}

impl CollisionQuery {
    pub fn new(robot: Body, obstacle: Body) -> Result<Self> {
        let w = relative_belief(&robot.center, &obstacle.center)?;
        let r = robot.radius + obstacle.radius;
        Ok(Self {
            robot,
            obstacle,
            alpha: r * r,
            w,
        })
    }

    pub fn dim(&self) -> usize {
        self.w.dim()
    }

    /// Contact distance r1 + s1.
    pub fn contact_radius(&self) -> f64 {
        self.alpha.sqrt()
    }
}

/// Result of one estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityEstimate {
    pub value: f64,
    /// Wilson 95% half-width for Monte Carlo methods.
    pub half_width_95: Option<f64>,
    /// Wall time of the call, seconds.
    pub wall_time: f64,
}

impl ProbabilityEstimate {
    fn point(value: f64) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            half_width_95: None,
            wall_time: 0.0,
        }
    }
}

/// Chi-squared upper bound on the collision probability:
/// F_chi(λ_max(Σ_w⁻¹)·max(0, α − ‖μ_w‖²), n).
pub fn bound_collision_probability(q: &CollisionQuery) -> Result<ProbabilityEstimate> {
    let lam = lambda_max_of_inverse(&q.w.cov)?;
    let arg = (lam * (q.alpha - q.w.mean.norm_squared())).max(0.0);
    let p = chi2_cdf(arg, q.dim())?;
    Ok(ProbabilityEstimate::point(p))
}

/// Chance-constraint margin g = F_chi⁻¹(ε) − λ_max(Σ⁻¹)·(α − 2·x_relᵀμ + μᵀμ).
///
/// The constraint holds iff g ≥ 0. g is affine in `x_rel`; see
/// [`constraint_margin_gradient`].
pub fn constraint_margin(
    x_rel: &Vector,
    mu: &Vector,
    sigma: &Matrix,
    alpha: f64,
    eps: f64,
) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidProbability(eps));
    }
    if x_rel.len() != mu.len() {
        return Err(Error::DimensionMismatch(x_rel.len(), mu.len()));
    }
    let lam = lambda_max_of_inverse(sigma)?;
    let threshold = chi2_inv_cdf(eps, mu.len())?;
    Ok(threshold - lam * (alpha - 2.0 * x_rel.dot(mu) + mu.norm_squared()))
}

/// Gradient of [`constraint_margin`] with respect to `x_rel`: 2·λ_max·μ.
pub fn constraint_margin_gradient(mu: &Vector, sigma: &Matrix) -> Result<Vector> {
    let lam = lambda_max_of_inverse(sigma)?;
    Ok(mu * (2.0 * lam))
}

const MC_CHUNK: usize = 1 << 16;

/// Monte Carlo estimate of the collision probability by sampling both center
/// distributions. Deterministic for a given (seed, n_samples): samples are
/// drawn in fixed-size chunks, each on its own counter-based substream, so
/// the result does not depend on scheduling.
pub fn mc_collision_probability(
    q: &CollisionQuery,
    n_samples: usize,
    seed: u64,
) -> Result<ProbabilityEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be >= 1".into()));
    }
    let n = q.dim();
    let sr = sqrt_psd(&q.robot.center.cov)?;
    let ss = sqrt_psd(&q.obstacle.center.cov)?;
    let r_contact = q.contact_radius();
    let mut hits = 0usize;
    let n_chunks = n_samples.div_ceil(MC_CHUNK);
    for chunk in 0..n_chunks {
        let count = MC_CHUNK.min(n_samples - chunk * MC_CHUNK);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64 + 1);
        let mut z = Vector::zeros(n);
        for _ in 0..count {
            for i in 0..n {
                z[i] = StandardNormal.sample(&mut rng);
            }
            let x = &q.robot.center.mean + &sr * &z;
            for i in 0..n {
                z[i] = StandardNormal.sample(&mut rng);
            }
            let s = &q.obstacle.center.mean + &ss * &z;
            if (x - s).norm() <= r_contact {
                hits += 1;
            }
        }
    }
    let p_hat = hits as f64 / n_samples as f64;
    Ok(ProbabilityEstimate {
        value: p_hat,
        half_width_95: Some(wilson_half_width(hits, n_samples)),
        wall_time: 0.0,
    })
}

/// Wilson 95% interval half-width for `hits` successes in `n` trials.
pub fn wilson_half_width(hits: usize, n: usize) -> f64 {
    let z = 1.959963984540054_f64;
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / (1.0 + z2 / nf)
}

/// Collision-ball volume for contact radius `r` in `n` dimensions.
fn ball_volume(r: f64, n: usize) -> f64 {
    match n {
        2 => std::f64::consts::PI * r * r,
        3 => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
        _ => unreachable!(),
    }
}

/// Single-summation approximation of the collision integral: samples robot
/// centers and averages obstacle-density × collision-ball-volume. Requires a
/// nonsingular obstacle covariance.
pub fn lambert_single_sum(
    q: &CollisionQuery,
    n_samples: usize,
    seed: u64,
) -> Result<ProbabilityEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be >= 1".into()));
    }
    if lambda_max_of_inverse(&q.obstacle.center.cov).is_err() {
        return Err(Error::DeterministicObstacle);
    }
    let n = q.dim();
    let volume = ball_volume(q.contact_radius(), n);
    // zero-variance robot collapses to a single density evaluation
    let robot_deterministic = q.robot.center.cov.iter().all(|&v| v == 0.0);
    if robot_deterministic {
        let p = gaussian_pdf(&q.robot.center.mean, &q.obstacle.center)? * volume;
        return Ok(ProbabilityEstimate::point(p));
    }
    let sr = sqrt_psd(&q.robot.center.cov)?;
    let mut acc = 0.0;
    let n_chunks = n_samples.div_ceil(MC_CHUNK);
    for chunk in 0..n_chunks {
        let count = MC_CHUNK.min(n_samples - chunk * MC_CHUNK);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64 + 1);
        let mut z = Vector::zeros(n);
        for _ in 0..count {
            for i in 0..n {
                z[i] = StandardNormal.sample(&mut rng);
            }
            let x = &q.robot.center.mean + &sr * &z;
            acc += gaussian_pdf(&x, &q.obstacle.center)?;
        }
    }
    Ok(ProbabilityEstimate::point(acc / n_samples as f64 * volume))
}

/// Binary overlap test after inflating each body by k_sigma standard
/// deviations along its worst axis.
pub fn bounding_volume_check(q: &CollisionQuery, k_sigma: f64) -> Result<ProbabilityEstimate> {
    let (vals_r, _) = eigen_sym(&q.robot.center.cov)?;
    let (vals_s, _) = eigen_sym(&q.obstacle.center.cov)?;
    let inflation = k_sigma * (vals_r[0].max(0.0).sqrt() + vals_s[0].max(0.0).sqrt());
    let dist = q.w.mean.norm();
    let hit = dist <= q.contact_radius() + inflation;
    Ok(ProbabilityEstimate::point(if hit { 1.0 } else { 0.0 }))
}

/// Upper bound = collision-ball volume × maximum of the relative-position
/// density over the closed ball, clamped to 1. The maximizer is μ_w when it
/// lies inside the ball; otherwise the boundary point of minimum Mahalanobis
/// distance (closed form for isotropic Σ, 1-D search in the eigenbasis
/// otherwise).
pub fn max_density_approximation(q: &CollisionQuery) -> Result<ProbabilityEstimate> {
    lambda_max_of_inverse(&q.w.cov)?;
    let n = q.dim();
    let r = q.contact_radius();
    let mu = &q.w.mean;
    let x_star = if mu.norm() <= r {
        mu.clone()
    } else {
        let (vals, qm) = eigen_sym(&q.w.cov)?;
        let spread = (vals[0] - vals[n - 1]).abs();
        if spread <= 1e-12 * vals[0] {
            mu * (r / mu.norm())
        } else {
            // x(ν) = (Σ⁻¹ + νI)⁻¹Σ⁻¹μ in the eigenbasis; ‖x(ν)‖ decreases
            // monotonically from ‖μ‖, so bisect ν until ‖x(ν)‖ = r
            let m = qm.transpose() * mu;
            let norm_at = |nu: f64| -> f64 {
                let mut s = 0.0;
                for i in 0..n {
                    let xi = m[i] / (1.0 + nu * vals[i]);
                    s += xi * xi;
                }
                s.sqrt()
            };
            let mut hi = 1.0;
            while norm_at(hi) > r {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if norm_at(mid) > r {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let nu = 0.5 * (lo + hi);
            let mut x = Vector::zeros(n);
            for i in 0..n {
                x[i] = m[i] / (1.0 + nu * vals[i]);
            }
            &qm * x
        }
    };
    let density = gaussian_pdf(&x_star, &q.w)?;
    Ok(ProbabilityEstimate::point(density * ball_volume(r, n)))
}

/// Linearized chance constraint: Φ((r1+s1 − ‖μ_w‖)/√(aᵀΣ_w a)) with
/// a = μ_w/‖μ_w‖.
pub fn linearized_chance_constraint(q: &CollisionQuery) -> Result<ProbabilityEstimate> {
    let mu = &q.w.mean;
    let norm = mu.norm();
    if norm == 0.0 {
        return Err(Error::CoincidentMeans);
    }
    lambda_max_of_inverse(&q.w.cov)?;
    let a = mu / norm;
    let var = (a.transpose() * &q.w.cov * &a)[0];
    let p = normal_cdf((q.contact_radius() - norm) / var.sqrt());
    Ok(ProbabilityEstimate::point(p))
}

/// Probability that w lies in the box circumscribing the collision ball,
/// evaluated axis-by-axis in the eigenbasis of Σ_w. Singular axes degrade to
/// 0/1 indicators.
pub fn rectangular_box_probability(q: &CollisionQuery) -> Result<ProbabilityEstimate> {
    let n = q.dim();
    let b = q.contact_radius();
    let (vals, qm) = eigen_sym(&q.w.cov)?;
    let m = qm.transpose() * &q.w.mean;
    let trace: f64 = q.w.cov.diagonal().iter().sum();
    let mut p = 1.0;
    for i in 0..n {
        let var = vals[i];
        if var <= 1e-14 * trace.max(1e-300) {
            if m[i].abs() > b {
                p = 0.0;
            }
        } else {
            let sd = var.sqrt();
            p *= normal_cdf((b - m[i]) / sd) - normal_cdf((-b - m[i]) / sd);
        }
    }
    Ok(ProbabilityEstimate::point(p))
}

/// Stable method identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bound,
    MonteCarlo,
    Lambert,
    BoundingVolume,
    MaxDensity,
    ChanceLinear,
    RectBox,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Bound,
        Method::MonteCarlo,
        Method::Lambert,
        Method::BoundingVolume,
        Method::MaxDensity,
        Method::ChanceLinear,
        Method::RectBox,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Method::Bound => "bound",
            Method::MonteCarlo => "mc",
            Method::Lambert => "lambert",
            Method::BoundingVolume => "bounding-volume",
            Method::MaxDensity => "max-density",
            Method::ChanceLinear => "chance-linear",
            Method::RectBox => "rect-box",
        }
    }

    pub fn from_id(id: &str) -> Result<Method> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.id() == id)
            .ok_or_else(|| Error::UnknownMethod(id.into()))
    }
}

/// Runs one estimator, recording wall time.
pub fn estimate(
    method: Method,
    q: &CollisionQuery,
    n_samples: usize,
    seed: u64,
) -> Result<ProbabilityEstimate> {
    let start = Instant::now();
    let mut est = match method {
        Method::Bound => bound_collision_probability(q)?,
        Method::MonteCarlo => mc_collision_probability(q, n_samples, seed)?,
        Method::Lambert => lambert_single_sum(q, n_samples, seed)?,
        Method::BoundingVolume => bounding_volume_check(q, 3.0)?,
        Method::MaxDensity => max_density_approximation(q)?,
        Method::ChanceLinear => linearized_chance_constraint(q)?,
        Method::RectBox => rectangular_box_probability(q)?,
    };
    est.wall_time = start.elapsed().as_secs_f64();
    Ok(est)
}

/// Per-call timing statistics, milliseconds.
#[derive(Debug, Clone, Copy)]
pub struct Timing {
    pub mean_ms: f64,
    pub std_ms: f64,
}

/// Times `repetitions` calls of a method (after one untimed warm-up call).
/// Standard deviation uses the n−1 denominator.
pub fn benchmark_method(
    method: Method,
    q: &CollisionQuery,
    repetitions: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Timing> {
    if repetitions < 2 {
        return Err(Error::InvalidConfig("repetitions must be >= 2".into()));
    }
    estimate(method, q, n_samples, seed)?; // warm-up
    let mut times = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        times.push(estimate(method, q, n_samples, seed)?.wall_time * 1e3);
    }
    let mean = times.iter().sum::<f64>() / repetitions as f64;
    let var =
        times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (repetitions as f64 - 1.0);
    Ok(Timing {
        mean_ms: mean,
        std_ms: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn vec2(x: f64, y: f64) -> Vector {
        Vector::from_vec(vec![x, y])
    }

    fn diag2(a: f64, b: f64) -> Matrix {
        Matrix::from_diagonal(&Vector::from_vec(vec![a, b]))
    }

    /// Robot N((0.38, 0), diag(0.04, 0.04)) r = 0.2; obstacle deterministic
    /// at the origin, s = 0.2.
    pub(crate) fn table1_query() -> CollisionQuery {
        let robot = Body::new(
            GaussianBelief::new(vec2(0.38, 0.0), diag2(0.04, 0.04)).unwrap(),
            0.2,
        )
        .unwrap();
        let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
        CollisionQuery::new(robot, obstacle).unwrap()
    }

    #[test]
    fn bound_reproduces_table1() {
        let q = table1_query();
        let est = bound_collision_probability(&q).unwrap();
        assert!((est.value - 0.1772).abs() < 5e-4, "got {}", est.value);
    }

    #[test]
    fn bound_zero_beyond_contact() {
        let robot = Body::new(
            GaussianBelief::new(vec2(1.0, 0.0), diag2(0.01, 0.01)).unwrap(),
            0.2,
        )
        .unwrap();
        let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        assert_eq!(bound_collision_probability(&q).unwrap().value, 0.0);
    }

    #[test]
    fn bound_concentric_closed_form() {
        let robot = Body::new(
            GaussianBelief::new(vec2(0.0, 0.0), diag2(0.04, 0.04)).unwrap(),
            0.2,
        )
        .unwrap();
        let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        let est = bound_collision_probability(&q).unwrap();
        assert_abs_diff_eq!(est.value, 1.0 - (-2.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn bound_rejects_singular() {
        let robot = Body::new(GaussianBelief::deterministic(vec2(0.38, 0.0)), 0.2).unwrap();
        let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        assert!(matches!(
            bound_collision_probability(&q),
            Err(Error::DegenerateCovariance)
        ));
    }

    #[test]
    fn margin_boundary_case() {
        // at eps equal to the bound itself the margin sits at zero
        let q = table1_query();
        let eps = bound_collision_probability(&q).unwrap().value;
        let g = constraint_margin(&q.w.mean, &q.w.mean, &q.w.cov, q.alpha, eps).unwrap();
        assert!(g.abs() < 1e-9, "margin {g}");
    }

    #[test]
    fn margin_far_obstacle_positive() {
        let mu = vec2(10.0, 0.0);
        let g = constraint_margin(&mu, &mu, &diag2(0.04, 0.04), 0.16, 0.1).unwrap();
        assert!(g > 0.0);
    }

    #[test]
    fn margin_violated_below_bound() {
        // eps = 0.1 < 0.1772 means the Table 1 pose violates the constraint
        let q = table1_query();
        let g = constraint_margin(&q.w.mean, &q.w.mean, &q.w.cov, q.alpha, 0.1).unwrap();
        assert!(g < 0.0, "margin {g}");
    }

    #[test]
    fn margin_rejects_bad_eps() {
        let mu = vec2(1.0, 0.0);
        assert!(constraint_margin(&mu, &mu, &diag2(0.1, 0.1), 0.16, 0.0).is_err());
        assert!(constraint_margin(&mu, &mu, &diag2(0.1, 0.1), 0.16, 1.0).is_err());
    }

    #[test]
    fn mc_deterministic_cases() {
        let mk = |d: f64| {
            let robot = Body::new(GaussianBelief::deterministic(vec2(d, 0.0)), 0.2).unwrap();
            let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
            CollisionQuery::new(robot, obstacle).unwrap()
        };
        assert_eq!(
            mc_collision_probability(&mk(0.3), 100, 0).unwrap().value,
            1.0
        );
        assert_eq!(
            mc_collision_probability(&mk(0.5), 100, 0).unwrap().value,
            0.0
        );
        // boundary contact counts as collision
        assert_eq!(
            mc_collision_probability(&mk(0.4), 100, 0).unwrap().value,
            1.0
        );
    }

    #[test]
    fn mc_reproducible() {
        let q = table1_query();
        let a = mc_collision_probability(&q, 20_000, 42).unwrap();
        let b = mc_collision_probability(&q, 20_000, 42).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.half_width_95, b.half_width_95);
    }

    #[test]
    fn lambert_zero_variance_robot() {
        let robot = Body::new(GaussianBelief::deterministic(vec2(0.38, 0.0)), 0.2).unwrap();
        let obstacle = Body::new(
            GaussianBelief::new(vec2(0.0, 0.0), diag2(0.04, 0.04)).unwrap(),
            0.2,
        )
        .unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        let est = lambert_single_sum(&q, 10, 0).unwrap();
        let expected = gaussian_pdf(&vec2(0.38, 0.0), &q.obstacle.center).unwrap()
            * std::f64::consts::PI
            * 0.16;
        assert_abs_diff_eq!(est.value, expected, epsilon = 1e-12);
    }

    #[test]
    fn lambert_both_uncertain_matches_closed_form() {
        // E[p_obs(x)]·V = V·N(0.38; 0, 0.08·I) ≈ 0.406
        let robot = Body::new(
            GaussianBelief::new(vec2(0.38, 0.0), diag2(0.04, 0.04)).unwrap(),
            0.2,
        )
        .unwrap();
        let obstacle = Body::new(
            GaussianBelief::new(vec2(0.0, 0.0), diag2(0.04, 0.04)).unwrap(),
            0.2,
        )
        .unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        let est = lambert_single_sum(&q, 200_000, 3).unwrap();
        let convolved = GaussianBelief::new(vec2(0.0, 0.0), diag2(0.08, 0.08)).unwrap();
        let expected =
            gaussian_pdf(&vec2(0.38, 0.0), &convolved).unwrap() * std::f64::consts::PI * 0.16;
        assert!((expected - 0.406).abs() < 1e-3);
        assert!((est.value - expected).abs() < 0.01, "est {}", est.value);
    }

    #[test]
    fn lambert_rejects_deterministic_obstacle() {
        let q = table1_query();
        assert!(matches!(
            lambert_single_sum(&q, 10, 0),
            Err(Error::DeterministicObstacle)
        ));
    }

    #[test]
    fn lambert_far_apart_near_zero() {
        let robot = Body::new(
            GaussianBelief::new(vec2(50.0, 0.0), diag2(0.04, 0.04)).unwrap(),
            0.2,
        )
        .unwrap();
        let obstacle = Body::new(
            GaussianBelief::new(vec2(0.0, 0.0), diag2(0.04, 0.04)).unwrap(),
            0.2,
        )
        .unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        assert!(lambert_single_sum(&q, 1000, 0).unwrap().value < 1e-12);
    }

    #[test]
    fn bounding_volume_table1_and_edges() {
        let q = table1_query();
        assert_eq!(bounding_volume_check(&q, 3.0).unwrap().value, 1.0);
        let mk = |d: f64| {
            let robot = Body::new(GaussianBelief::deterministic(vec2(d, 0.0)), 0.2).unwrap();
            let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
            CollisionQuery::new(robot, obstacle).unwrap()
        };
        assert_eq!(bounding_volume_check(&mk(0.5), 3.0).unwrap().value, 0.0);
        assert_eq!(bounding_volume_check(&mk(0.4), 3.0).unwrap().value, 1.0);
    }

    #[test]
    fn max_density_table1_clamps_to_one() {
        let q = table1_query();
        assert_eq!(max_density_approximation(&q).unwrap().value, 1.0);
    }

    #[test]
    fn max_density_far_near_zero() {
        let robot = Body::new(
            GaussianBelief::new(vec2(20.0, 0.0), diag2(0.04, 0.04)).unwrap(),
            0.2,
        )
        .unwrap();
        let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        assert!(max_density_approximation(&q).unwrap().value < 1e-12);
    }

    #[test]
    fn max_density_anisotropic_matches_grid_search() {
        let robot = Body::new(
            GaussianBelief::new(
                vec2(0.6, 0.3),
                Matrix::from_row_slice(2, 2, &[0.05, 0.02, 0.02, 0.03]),
            )
            .unwrap(),
            0.2,
        )
        .unwrap();
        let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        let est = max_density_approximation(&q).unwrap();
        // dense grid over the ball as independent check
        let r = q.contact_radius();
        let mut best = 0.0f64;
        let steps = 400;
        for i in 0..=steps {
            for j in 0..=steps {
                let x = -r + 2.0 * r * i as f64 / steps as f64;
                let y = -r + 2.0 * r * j as f64 / steps as f64;
                if x * x + y * y <= r * r {
                    let p = gaussian_pdf(&vec2(x, y), &q.w).unwrap();
                    best = best.max(p);
                }
            }
        }
        let grid_value = (best * std::f64::consts::PI * r * r).clamp(0.0, 1.0);
        assert!(
            (est.value - grid_value).abs() < 2e-3,
            "{} vs {}",
            est.value,
            grid_value
        );
    }

    #[test]
    fn chance_linear_table1() {
        let q = table1_query();
        let est = linearized_chance_constraint(&q).unwrap();
        assert!((est.value - 0.5398).abs() < 5e-4, "got {}", est.value);
    }

    #[test]
    fn chance_linear_edges() {
        let mk = |d: f64, var: f64| {
            let robot = Body::new(
                GaussianBelief::new(vec2(d, 0.0), diag2(var, var)).unwrap(),
                0.2,
            )
            .unwrap();
            let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
            CollisionQuery::new(robot, obstacle).unwrap()
        };
        assert_abs_diff_eq!(
            linearized_chance_constraint(&mk(0.4, 0.04)).unwrap().value,
            0.5,
            epsilon = 1e-12
        );
        let est = linearized_chance_constraint(&mk(1.0, 0.04)).unwrap();
        assert!((est.value - normal_cdf(-3.0)).abs() < 1e-12);
        assert!(matches!(
            linearized_chance_constraint(&mk(0.0, 0.04)),
            Err(Error::CoincidentMeans)
        ));
    }

    #[test]
    fn rect_box_table1_derived_value() {
        let q = table1_query();
        let est = rectangular_box_probability(&q).unwrap();
        let expected = (normal_cdf(0.1) - normal_cdf(-3.9)) * (normal_cdf(2.0) - normal_cdf(-2.0));
        assert_abs_diff_eq!(est.value, expected, epsilon = 1e-12);
        assert!((est.value - 0.5153).abs() < 1e-3);
    }

    #[test]
    fn rect_box_deterministic_inside() {
        let robot = Body::new(GaussianBelief::deterministic(vec2(0.1, 0.0)), 0.2).unwrap();
        let obstacle = Body::new(GaussianBelief::deterministic(vec2(0.0, 0.0)), 0.2).unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        assert_eq!(rectangular_box_probability(&q).unwrap().value, 1.0);
    }

    #[test]
    fn method_ids_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_id(m.id()).unwrap(), m);
        }
        assert!(matches!(
            Method::from_id("nope"),
            Err(Error::UnknownMethod(_))
        ));
    }

    #[test]
    fn benchmark_needs_two_reps() {
        let q = table1_query();
        assert!(benchmark_method(Method::Bound, &q, 1, 0, 0).is_err());
        let t = benchmark_method(Method::Bound, &q, 5, 0, 0).unwrap();
        assert!(t.mean_ms >= 0.0 && t.std_ms >= 0.0 && t.std_ms.is_finite());
    }
}
