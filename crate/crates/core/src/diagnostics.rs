//! Verifiers and oracles for the method's guarantees.
//!
//! - [`check_fixed_point`] certifies a `(centers, assignment)` pair: the
//!   assignment is a Voronoi partition under `g` and the cost gradient
//!   vanishes, both up to declared tolerances.
//! - [`check_centroidal`] tests whether centers sit at their cluster means.
//! - [`huber_exact_center`] solves the Huber zero-gradient equation by
//!   iterative reweighting, independently of the gradient method.
//! - [`sample_assumptions`] probes metric axioms, the monotone link between
//!   `g` and `f`, gradient Lipschitz ratios and co-coercivity on random
//!   samples from a domain.
//! - [`check_trace`] checks cost descent and square-summability of the
//!   gradient norms along a run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::divergence::{sq_dist, DivergencePair};
use crate::engine::{center_gradient, cluster_sums};
use crate::error::{Error, Result};
use crate::types::{Assignment, Centers, DataSet, IterationTrace, UpdateRule};

/// Relative tolerance of the centroidal check.
pub const CENTROIDAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidalReport {
    pub ok: bool,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub voronoi_ok: bool,
    /// `max_y g(x(c(y)), y) - min_j g(x(j), y)`.
    pub voronoi_margin: f64,
    /// Point attaining the margin.
    pub worst_point: usize,
    /// Stationarity measure compared against `grad_tol`: the Frobenius norm
    /// of `grad_x J` for unconstrained pairs, the tangent-cone projected norm
    /// on the restricted simplex for Jensen-Shannon.
    pub grad_norm: f64,
    /// Frobenius norm of the unprojected gradient.
    pub raw_grad_norm: f64,
    pub is_fixed_point: bool,
    /// Reported for Bregman-type pairs only.
    pub centroidal: Option<CentroidalReport>,
    pub assign_tol: f64,
    pub grad_tol: f64,
}

/// `1e-9 * (1 + largest metric value between a point and its center)`.
pub fn default_assign_tol(
    centers: &Centers,
    assignment: &Assignment,
    data: &DataSet,
    pair: &DivergencePair,
) -> f64 {
    let scale = data
        .points()
        .zip(assignment.as_slice())
        .map(|(y, &c)| pair.metric_unchecked(centers.center(c), y))
        .fold(0.0, f64::max);
    1e-9 * (1.0 + scale)
}

pub fn check_fixed_point(
    centers: &Centers,
    assignment: &Assignment,
    data: &DataSet,
    pair: &DivergencePair,
    assign_tol: f64,
    grad_tol: f64,
) -> Result<FixedPointReport> {
    let grad = center_gradient(centers, assignment, data, pair)?;

    let mut margin = f64::NEG_INFINITY;
    let mut worst_point = 0;
    for (n, y) in data.points().enumerate() {
        let own = pair.metric_unchecked(centers.center(assignment.cluster_of(n)), y);
        let best = centers
            .rows()
            .map(|c| pair.metric_unchecked(c, y))
            .fold(f64::INFINITY, f64::min);
        if own - best > margin {
            margin = own - best;
            worst_point = n;
        }
    }

    let raw_grad_norm = grad.norm();
    let grad_norm = if pair.is_constrained() {
        (0..centers.k())
            .map(|i| pair.stationarity(centers.center(i), grad.row(i)).powi(2))
            .sum::<f64>()
            .sqrt()
    } else {
        raw_grad_norm
    };

    let centroidal = if pair.is_bregman() {
        let (ok, max_deviation) = check_centroidal(centers, assignment, data)?;
        Some(CentroidalReport { ok, max_deviation })
    } else {
        None
    };

    let voronoi_ok = margin <= assign_tol;
    Ok(FixedPointReport {
        voronoi_ok,
        voronoi_margin: margin,
        worst_point,
        grad_norm,
        raw_grad_norm,
        is_fixed_point: voronoi_ok && grad_norm <= grad_tol,
        centroidal,
        assign_tol,
        grad_tol,
    })
}

/// True iff every nonempty cluster's center is within
/// `1e-6 * (1 + ‖x(i)‖)` of the cluster's weighted mean. Also returns the
/// largest center-to-mean distance.
pub fn check_centroidal(
    centers: &Centers,
    assignment: &Assignment,
    data: &DataSet,
) -> Result<(bool, f64)> {
    if centers.dim() != data.dim() || assignment.len() != data.len() || assignment.k() != centers.k() {
        return Err(Error::Shape("centers, assignment and data disagree".into()));
    }
    let d = data.dim();
    let (sums, mass) = cluster_sums(centers.k(), assignment, data);
    let mut ok = true;
    let mut max_dev: f64 = 0.0;
    for (i, &m) in mass.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let x = centers.center(i);
        let dev = x
            .iter()
            .zip(&sums[i * d..(i + 1) * d])
            .map(|(xi, s)| (xi - s / m).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        ok &= dev <= CENTROIDAL_TOL * (1.0 + norm);
        max_dev = max_dev.max(dev);
    }
    Ok((ok, max_dev))
}

/// Points and weights of cluster `i`.
pub fn cluster_members<'a>(
    assignment: &Assignment,
    data: &'a DataSet,
    i: usize,
) -> (Vec<&'a [f64]>, Vec<f64>) {
    data.points()
        .zip(data.weights())
        .zip(assignment.as_slice())
        .filter(|(_, &c)| c == i)
        .map(|((y, &p), _)| (y, p))
        .unzip()
}

/// One application of the Huber self-consistency map: the weighted mean with
/// weight `p_y` for points within `δ` of `x` and `p_y δ / ‖x − y‖` beyond.
fn huber_reweighted_mean(points: &[&[f64]], weights: &[f64], delta: f64, x: &[f64]) -> Vec<f64> {
    let mut num = vec![0.0; x.len()];
    let mut den = 0.0;
    for (y, &p) in points.iter().zip(weights) {
        let r = sq_dist(x, y).sqrt();
        // A point coinciding with the iterate is at distance 0 <= δ.
        let w = if r <= delta { p } else { p * delta / r };
        den += w;
        for (nj, &yj) in num.iter_mut().zip(y.iter()) {
            *nj += w * yj;
        }
    }
    num.iter().map(|v| v / den).collect()
}

/// `‖x − T(x)‖` for the Huber self-consistency map `T`.
pub fn huber_self_consistency_residual(
    points: &[&[f64]],
    weights: &[f64],
    delta: f64,
    x: &[f64],
) -> f64 {
    sq_dist(x, &huber_reweighted_mean(points, weights, delta, x)).sqrt()
}

/// Minimizer of `Σ p_y φ_δ(‖x − y‖)` over one cluster, by fixed-point
/// iteration of the reweighted-mean map until successive iterates differ by
/// at most `tol`.
pub fn huber_exact_center(
    points: &[&[f64]],
    weights: &[f64],
    delta: f64,
    init: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::InsufficientData("cluster is empty".into()));
    }
    if points.len() != weights.len() {
        return Err(Error::Shape(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    if points.iter().any(|y| y.len() != init.len()) {
        return Err(Error::Shape("points and init differ in dimension".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidValue(format!("delta must be positive, got {delta}")));
    }
    let mut x = init.to_vec();
    let mut change = f64::INFINITY;
    for _ in 0..max_iters {
        let next = huber_reweighted_mean(points, weights, delta, &x);
        change = sq_dist(&next, &x).sqrt();
        x = next;
        if change <= tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iters: max_iters,
        last_change: change,
    })
}

/// Source of random points in a pair's domain.
pub trait DomainSampler {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// Uniform in the cube `[-half_width, half_width]^d`.
#[derive(Debug, Clone, Copy)]
pub struct BoxSampler {
    pub dim: usize,
    pub half_width: f64,
}

impl DomainSampler for BoxSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dim)
            .map(|_| rng.random_range(-self.half_width..=self.half_width))
            .collect()
    }
}

/// `ε + (1 − dε) w` with `w ~ Dirichlet(concentration)`, i.e. a point of the
/// restricted simplex. Small concentrations put mass near the boundary.
#[derive(Debug, Clone, Copy)]
pub struct SimplexSampler {
    pub dim: usize,
    pub epsilon: f64,
    pub concentration: f64,
}

impl DomainSampler for SimplexSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let gamma = Gamma::new(self.concentration, 1.0).expect("positive concentration");
        let raw: Vec<f64> = (0..self.dim).map(|_| gamma.sample(rng) + 1e-300).collect();
        let total: f64 = raw.iter().sum();
        let mass = 1.0 - self.dim as f64 * self.epsilon;
        raw.iter().map(|w| self.epsilon + mass * w / total).collect()
    }
}

/// Outcome of [`sample_assumptions`]; margins are worst cases over all
/// samples and `*_violations` count samples outside tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub samples: usize,
    pub symmetry_violations: usize,
    pub max_symmetry_gap: f64,
    pub triangle_violations: usize,
    /// Largest `g(x,y) − g(x,z) − g(z,y)`.
    pub worst_triangle_excess: f64,
    pub identity_violations: usize,
    pub monotone_violations: usize,
    pub lipschitz_violations: usize,
    pub max_lipschitz_ratio: f64,
    pub lipschitz_bound: f64,
    pub cocoercivity_violations: usize,
    /// Smallest `⟨Δ∇, x − z⟩ − ‖Δ∇‖² / L`.
    pub worst_cocoercivity_slack: f64,
}

impl AssumptionReport {
    pub fn metric_violations(&self) -> usize {
        self.symmetry_violations + self.triangle_violations + self.identity_violations
    }

    pub fn total_violations(&self) -> usize {
        self.metric_violations()
            + self.monotone_violations
            + self.lipschitz_violations
            + self.cocoercivity_violations
    }
}

/// Draws `n` triples `(x, z, y)` and checks the metric axioms of `g`, the
/// monotone link `g(x,y) ≤ g(z,y) ⇒ f(x,y) ≤ f(z,y)`, the gradient Lipschitz
/// ratio against the pair's smoothness bound and co-coercivity.
pub fn sample_assumptions(
    pair: &DivergencePair,
    sampler: &dyn DomainSampler,
    n: usize,
    seed: u64,
) -> Result<AssumptionReport> {
    let dim = sampler.dim();
    pair.check_dim(dim)?;
    let symmetry_tol = if pair.is_constrained() { 1e-12 } else { 0.0 };
    let l = pair.smoothness_bound().value();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = AssumptionReport {
        samples: n,
        symmetry_violations: 0,
        max_symmetry_gap: 0.0,
        triangle_violations: 0,
        worst_triangle_excess: f64::NEG_INFINITY,
        identity_violations: 0,
        monotone_violations: 0,
        lipschitz_violations: 0,
        max_lipschitz_ratio: 0.0,
        lipschitz_bound: l,
        cocoercivity_violations: 0,
        worst_cocoercivity_slack: f64::INFINITY,
    };
    for _ in 0..n {
        let x = sampler.sample(&mut rng);
        let z = sampler.sample(&mut rng);
        let y = sampler.sample(&mut rng);

        let gxy = pair.metric(&x, &y)?;
        let gyx = pair.metric(&y, &x)?;
        let gap = (gxy - gyx).abs();
        r.max_symmetry_gap = r.max_symmetry_gap.max(gap);
        if gap > symmetry_tol {
            r.symmetry_violations += 1;
        }

        let gxz = pair.metric(&x, &z)?;
        let gzy = pair.metric(&z, &y)?;
        let excess = gxy - gxz - gzy;
        r.worst_triangle_excess = r.worst_triangle_excess.max(excess);
        if excess > 1e-9 {
            r.triangle_violations += 1;
        }

        if pair.metric(&x, &x)? > 1e-12 || (x != y && gxy <= 0.0) {
            r.identity_violations += 1;
        }

        let (fxy, fzy) = (pair.loss(&x, &y)?, pair.loss(&z, &y)?);
        if (gxy <= gzy && fxy > fzy + 1e-12) || (gzy <= gxy && fzy > fxy + 1e-12) {
            r.monotone_violations += 1;
        }

        let gx = pair.grad(&x, &y)?;
        let gz = pair.grad(&z, &y)?;
        let dg: Vec<f64> = gx.iter().zip(&gz).map(|(a, b)| a - b).collect();
        let dg_sq: f64 = dg.iter().map(|v| v * v).sum();
        let dx = sq_dist(&x, &z).sqrt();
        if dx > 0.0 {
            let ratio = dg_sq.sqrt() / dx;
            r.max_lipschitz_ratio = r.max_lipschitz_ratio.max(ratio);
            if ratio > l + 1e-9 {
                r.lipschitz_violations += 1;
            }
        }
        let inner: f64 = dg.iter().zip(x.iter().zip(&z)).map(|(g, (a, b))| g * (a - b)).sum();
        let slack = inner - dg_sq / l;
        r.worst_cocoercivity_slack = r.worst_cocoercivity_slack.min(slack);
        if slack < -1e-9 {
            r.cocoercivity_violations += 1;
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub monotone: bool,
    /// Index of the first record whose cost rose beyond the slack.
    pub first_violation: Option<usize>,
    pub max_ascent: f64,
    /// `c(α) = α (1 − α L / 2)`; absent for non-gradient rules or when
    /// `α ≥ 2/L`.
    pub descent_constant: Option<f64>,
    /// `Σ_t ‖∇_t‖²` over all steps taken.
    pub squared_gradient_sum: f64,
    /// `(J_0 − J_final) / c(α)` plus slack.
    pub squared_gradient_bound: Option<f64>,
    pub square_summable: bool,
    pub passed: bool,
}

/// Checks that costs are non-increasing within `1e-9 * max(1, J_0)` and that
/// `Σ_t ‖∇_t‖² ≤ (J_0 − J_final) / c(α)`.
///
/// For projected runs the gradient norm is replaced by the step length
/// divided by `α`, which satisfies the same inequality.
pub fn check_trace(trace: &IterationTrace) -> TraceReport {
    let j0 = trace.initial_cost();
    let slack = 1e-9 * j0.max(1.0);
    let first_violation = trace.first_ascent();
    let max_ascent = trace
        .records
        .windows(2)
        .map(|w| w[1].cost - w[0].cost)
        .fold(0.0, f64::max);

    let projected = trace.projection_events > 0;
    let steps = trace.records.len().saturating_sub(1);
    let squared_gradient_sum: f64 = trace.records[..steps]
        .iter()
        .map(|r| {
            if projected {
                (r.step_norm / trace.alpha).powi(2)
            } else {
                r.grad_norm.powi(2)
            }
        })
        .sum();

    let c = trace.alpha * (1.0 - trace.alpha * trace.l_bound / 2.0);
    let descent_constant = (trace.update_rule == UpdateRule::Gradient
        && trace.reseed_events == 0
        && c > 0.0)
        .then_some(c);
    let squared_gradient_bound =
        descent_constant.map(|c| (j0 - trace.final_cost() + slack) / c);
    let square_summable = squared_gradient_bound.is_none_or(|b| squared_gradient_sum <= b);
    let monotone = first_violation.is_none();
    TraceReport {
        monotone,
        first_violation,
        max_ascent,
        descent_constant,
        squared_gradient_sum,
        squared_gradient_bound,
        square_summable,
        passed: monotone && square_summable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{assign, run};
    use crate::types::{make_dataset, StepConfig};
    use approx::assert_relative_eq;

    #[test]
    fn centroidal_at_exact_means() {
        let data = make_dataset(vec![0.0, 2.0, 10.0, 14.0], 1, None, None).unwrap();
        let a = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let c = Centers::new(vec![1.0, 12.0], 2, 1).unwrap();
        assert_eq!(check_centroidal(&c, &a, &data).unwrap(), (true, 0.0));
        let c = Centers::new(vec![1.5, 12.0], 2, 1).unwrap();
        let (ok, dev) = check_centroidal(&c, &a, &data).unwrap();
        assert!(!ok);
        assert_eq!(dev, 0.5);
    }

    #[test]
    fn means_are_stationary_for_squared_euclidean() {
        let data = make_dataset(vec![0.0, 2.0, 10.0, 14.0], 1, None, None).unwrap();
        let a = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let c = Centers::new(vec![1.0, 12.0], 2, 1).unwrap();
        let pair = DivergencePair::squared_euclidean();
        let rep = check_fixed_point(&c, &a, &data, &pair, 1e-9, 1e-12).unwrap();
        assert!(rep.grad_norm <= 1e-12);
        assert!(rep.is_fixed_point);
        assert_eq!(rep.centroidal.unwrap().ok, true);
    }

    #[test]
    fn swapped_points_break_the_certificate() {
        let data = make_dataset(vec![0.0, 2.0, 10.0, 14.0], 1, None, None).unwrap();
        let a = Assignment::new(vec![0, 1, 0, 1], 2).unwrap();
        let c = Centers::new(vec![1.0, 12.0], 2, 1).unwrap();
        let pair = DivergencePair::squared_euclidean();
        let rep = check_fixed_point(&c, &a, &data, &pair, 1e-9, 1e-8).unwrap();
        assert!(!rep.voronoi_ok);
        assert!(rep.voronoi_margin > 0.0);
        assert!(!rep.is_fixed_point);
    }

    #[test]
    fn huber_center_reduces_to_mean_when_all_points_are_near() {
        let pts: Vec<&[f64]> = vec![&[0.0, 0.0], &[0.2, 0.0], &[0.0, 0.4]];
        let w = [0.25, 0.25, 0.5];
        let x = huber_exact_center(&pts, &w, 1.0, &[0.0, 0.0], 1e-14, 1000).unwrap();
        assert_relative_eq!(x[0], 0.05, epsilon = 1e-13);
        assert_relative_eq!(x[1], 0.2, epsilon = 1e-13);
    }

    #[test]
    fn huber_center_of_single_point() {
        let pts: Vec<&[f64]> = vec![&[3.0, -1.0]];
        let x = huber_exact_center(&pts, &[1.0], 0.5, &[40.0, 40.0], 1e-12, 1000).unwrap();
        assert_relative_eq!(x[0], 3.0, epsilon = 1e-11);
        assert_relative_eq!(x[1], -1.0, epsilon = 1e-11);
    }

    #[test]
    fn huber_center_with_outlier() {
        // Golden value 0.5: grid search (step 1e-6 on [-1, 11]) of
        // (2 φ_1(|x|) + φ_1(|x − 10|)) / 3.
        let pts: Vec<&[f64]> = vec![&[0.0], &[0.0], &[10.0]];
        let w = [1.0 / 3.0; 3];
        let x = huber_exact_center(&pts, &w, 1.0, &[10.0 / 3.0], 1e-12, 10_000).unwrap();
        assert_relative_eq!(x[0], 0.5, epsilon = 1e-10);
        assert!(huber_self_consistency_residual(&pts, &w, 1.0, &x) <= 1e-12);
    }

    #[test]
    fn huber_center_errors() {
        let pts: Vec<&[f64]> = vec![];
        assert!(huber_exact_center(&pts, &[], 1.0, &[0.0], 1e-9, 10).is_err());
        let pts: Vec<&[f64]> = vec![&[0.0], &[0.0], &[10.0]];
        let e = huber_exact_center(&pts, &[1.0 / 3.0; 3], 1.0, &[5.0], 1e-300, 3).unwrap_err();
        assert!(matches!(e, Error::NoConvergence { iters: 3, .. }));
    }

    #[test]
    fn euclidean_metric_axioms_hold() {
        let r = sample_assumptions(
            &DivergencePair::squared_euclidean(),
            &BoxSampler { dim: 3, half_width: 5.0 },
            1000,
            3,
        )
        .unwrap();
        assert_eq!(r.metric_violations(), 0);
        assert_eq!(r.total_violations(), 0);
    }

    #[test]
    fn simplex_sampler_stays_in_domain() {
        let s = SimplexSampler { dim: 6, epsilon: 0.05, concentration: 0.5 };
        let pair = DivergencePair::jensen_shannon(0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            pair.check_point(&s.sample(&mut rng)).unwrap();
        }
    }

    #[test]
    fn trace_check_flags_injected_ascent() {
        let data = make_dataset(vec![0.0, 1.0, 9.0, 10.0, 11.0], 1, None, None).unwrap();
        let pair = DivergencePair::squared_euclidean();
        let init = Centers::new(vec![0.0, 1.0], 2, 1).unwrap();
        let r = run(&data, &pair, init, &StepConfig::new(1.0)).unwrap();
        let report = check_trace(&r.trace);
        assert!(report.passed, "{report:?}");

        let mut bad = r.trace.clone();
        bad.records[3].cost += 1.0;
        let report = check_trace(&bad);
        assert!(!report.monotone);
        assert_eq!(report.first_violation, Some(3));
    }

    #[test]
    fn default_assign_tol_scales_with_distances() {
        let data = make_dataset(vec![0.0, 100.0], 1, None, None).unwrap();
        let c = Centers::new(vec![0.0, 50.0], 2, 1).unwrap();
        let pair = DivergencePair::squared_euclidean();
        let a = assign(&c, &data, &pair, None).unwrap();
        assert_relative_eq!(default_assign_tol(&c, &a, &data, &pair), 51e-9, max_relative = 1e-12);
    }
}
