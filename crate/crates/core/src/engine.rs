//! The alternating method.
//!
//! Iteration `t` reassigns every point to a nearest center of `x_t` under
//! `g`, giving `C_{t+1}`, and then moves every center by one gradient step on
//! `J(., C_{t+1})`:
//!
//! ```text
//! x_{t+1}(i) = x_t(i) - α Σ_{y ∈ C_{t+1}(i)} p_y ∇_x f(x_t(i), y)
//! ```
//!
//! The loop stops once a reassignment changes nothing and the gradient norm
//! is below tolerance, i.e. at a fixed point up to the tolerances.

use serde::{Deserialize, Serialize};

use crate::dataio::accuracy;
use crate::divergence::{sq_dist, DivergencePair, PairKind};
use crate::error::{Error, Result};
use crate::types::{
    Assignment, Centers, DataSet, IterationRecord, IterationTrace, StepConfig, TerminationReason,
    UpdateRule,
};

/// Relative tolerance for ties in the reassignment step.
pub const TIE_TOL: f64 = 1e-12;

/// `K × d` matrix of per-cluster gradient blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterGradient {
    k: usize,
    d: usize,
    values: Vec<f64>,
}

impl CenterGradient {
    pub fn from_values(values: Vec<f64>, k: usize, d: usize) -> Result<Self> {
        if values.len() != k * d {
            return Err(Error::Shape(format!(
                "{} values cannot form a {k}x{d} gradient",
                values.len()
            )));
        }
        Ok(CenterGradient { k, d, values })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Frobenius norm, i.e. the Euclidean norm in `R^{Kd}`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn check_shapes(centers: &Centers, data: &DataSet, pair: &DivergencePair) -> Result<()> {
    if centers.dim() != data.dim() {
        return Err(Error::Shape(format!(
            "centers have dimension {} but data has dimension {}",
            centers.dim(),
            data.dim()
        )));
    }
    pair.check_dim(data.dim())
}

fn check_assignment(assignment: &Assignment, centers: &Centers, data: &DataSet) -> Result<()> {
    if assignment.len() != data.len() || assignment.k() != centers.k() {
        return Err(Error::Shape(format!(
            "assignment covers {} points in {} clusters, expected {} points in {}",
            assignment.len(),
            assignment.k(),
            data.len(),
            centers.k()
        )));
    }
    Ok(())
}

fn check_domain(centers: &Centers, data: &DataSet, pair: &DivergencePair) -> Result<()> {
    if pair.is_constrained() {
        for c in centers.rows() {
            pair.check_point(c)?;
        }
        for y in data.points() {
            pair.check_point(y)?;
        }
    }
    Ok(())
}

/// Reassigns every point to a center minimizing `g(x(i), y)`.
///
/// When several centers tie within `1e-12 * (1 + min)` the previous cluster
/// is kept if it is among them, otherwise the lowest index wins.
pub fn assign(
    centers: &Centers,
    data: &DataSet,
    pair: &DivergencePair,
    prev: Option<&Assignment>,
) -> Result<Assignment> {
    check_shapes(centers, data, pair)?;
    if let Some(p) = prev {
        check_assignment(p, centers, data)?;
    }
    check_domain(centers, data, pair)?;
    Ok(assign_unchecked(centers, data, pair, prev))
}

fn assign_unchecked(
    centers: &Centers,
    data: &DataSet,
    pair: &DivergencePair,
    prev: Option<&Assignment>,
) -> Assignment {
    let k = centers.k();
    let mut dist = vec![0.0; k];
    let cluster_of = data
        .points()
        .enumerate()
        .map(|(n, y)| {
            for (di, c) in dist.iter_mut().zip(centers.rows()) {
                *di = pair.metric_unchecked(c, y);
            }
            let min = dist.iter().copied().fold(f64::INFINITY, f64::min);
            let bound = min + TIE_TOL * (1.0 + min);
            match prev.map(|p| p.cluster_of(n)) {
                Some(c) if dist[c] <= bound => c,
                _ => dist.iter().position(|&v| v <= bound).unwrap_or(0),
            }
        })
        .collect();
    Assignment::new(cluster_of, k).expect("indices come from 0..k")
}

/// `J(x, C) = Σ_i Σ_{y ∈ C(i)} p_y f(x(i), y)`.
pub fn cost(
    centers: &Centers,
    assignment: &Assignment,
    data: &DataSet,
    pair: &DivergencePair,
) -> Result<f64> {
    check_shapes(centers, data, pair)?;
    check_assignment(assignment, centers, data)?;
    check_domain(centers, data, pair)?;
    Ok(cost_unchecked(centers, assignment, data, pair))
}

fn cost_unchecked(
    centers: &Centers,
    assignment: &Assignment,
    data: &DataSet,
    pair: &DivergencePair,
) -> f64 {
    data.points()
        .zip(data.weights())
        .zip(assignment.as_slice())
        .map(|((y, &p), &c)| p * pair.loss_unchecked(centers.center(c), y))
        .sum()
}

/// Block `i` is `Σ_{y ∈ C(i)} p_y ∇_x f(x(i), y)`; zero for empty clusters.
pub fn center_gradient(
    centers: &Centers,
    assignment: &Assignment,
    data: &DataSet,
    pair: &DivergencePair,
) -> Result<CenterGradient> {
    check_shapes(centers, data, pair)?;
    check_assignment(assignment, centers, data)?;
    check_domain(centers, data, pair)?;
    Ok(center_gradient_unchecked(centers, assignment, data, pair))
}

fn center_gradient_unchecked(
    centers: &Centers,
    assignment: &Assignment,
    data: &DataSet,
    pair: &DivergencePair,
) -> CenterGradient {
    let d = centers.dim();
    let mut values = vec![0.0; centers.k() * d];
    for ((y, &p), &c) in data.points().zip(data.weights()).zip(assignment.as_slice()) {
        pair.add_scaled_grad(centers.center(c), y, p, &mut values[c * d..(c + 1) * d]);
    }
    CenterGradient {
        k: centers.k(),
        d,
        values,
    }
}

/// `x - α ∇`.
pub fn gradient_step(centers: &Centers, grad: &CenterGradient, alpha: f64) -> Result<Centers> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidConfig(format!("step size must be positive, got {alpha}")));
    }
    if grad.k() != centers.k() || grad.dim() != centers.dim() {
        return Err(Error::Shape(format!(
            "gradient is {}x{} but centers are {}x{}",
            grad.k(),
            grad.dim(),
            centers.k(),
            centers.dim()
        )));
    }
    if grad.as_slice().iter().any(|g| !g.is_finite()) {
        return Err(Error::Numerical("non-finite gradient".into()));
    }
    let values = centers
        .as_slice()
        .iter()
        .zip(grad.as_slice())
        .map(|(x, g)| x - alpha * g)
        .collect();
    Centers::new(values, centers.k(), centers.dim())
}

/// Moves every nonempty cluster's center to its weighted mean.
pub fn lloyd_step(centers: &Centers, assignment: &Assignment, data: &DataSet) -> Result<Centers> {
    if centers.dim() != data.dim() {
        return Err(Error::Shape(format!(
            "centers have dimension {} but data has dimension {}",
            centers.dim(),
            data.dim()
        )));
    }
    check_assignment(assignment, centers, data)?;
    let (sums, mass) = cluster_sums(centers.k(), assignment, data);
    let d = centers.dim();
    let mut values = centers.as_slice().to_vec();
    for (i, &m) in mass.iter().enumerate() {
        if m > 0.0 {
            for j in 0..d {
                values[i * d + j] = sums[i * d + j] / m;
            }
        }
    }
    Centers::new(values, centers.k(), d)
}

/// Per-cluster weighted coordinate sums and cluster masses `μ(C(i))`.
pub(crate) fn cluster_sums(k: usize, assignment: &Assignment, data: &DataSet) -> (Vec<f64>, Vec<f64>) {
    let d = data.dim();
    let mut sums = vec![0.0; k * d];
    let mut mass = vec![0.0; k];
    for ((y, &p), &c) in data.points().zip(data.weights()).zip(assignment.as_slice()) {
        mass[c] += p;
        for (s, &v) in sums[c * d..(c + 1) * d].iter_mut().zip(y) {
            *s += p * v;
        }
    }
    (sums, mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSizeMode {
    /// `α = safety / L_f`. With probability weights every cluster mass is at
    /// most one, so `L_f` bounds the smoothness of `J`.
    Theory,
    /// `α = 1 / (2N)` as used in the MNIST experiments.
    PaperMnist,
}

impl std::str::FromStr for StepSizeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(StepSizeMode::Theory),
            "paper_mnist" => Ok(StepSizeMode::PaperMnist),
            other => Err(Error::InvalidConfig(format!("unknown step-size mode `{other}`"))),
        }
    }
}

pub fn estimate_step_size(
    pair: &DivergencePair,
    data: &DataSet,
    mode: StepSizeMode,
    safety: f64,
) -> Result<f64> {
    match mode {
        StepSizeMode::Theory => {
            if !(safety > 0.0 && safety < 2.0) {
                return Err(Error::InvalidConfig(format!(
                    "safety factor must lie in (0, 2), got {safety}"
                )));
            }
            Ok(safety / pair.smoothness_bound().value())
        }
        StepSizeMode::PaperMnist => Ok(1.0 / (2.0 * data.len() as f64)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub trace: IterationTrace,
    pub final_centers: Centers,
    pub final_assignment: Assignment,
    pub alpha_used: f64,
    pub l_bound_used: f64,
    pub grad_tol_used: f64,
}

/// Runs the alternating method from `init` until a fixed point or the
/// iteration budget.
///
/// Records are indexed from `t = 0`; the final record describes the
/// returned pair `(x_T, C_{T+1})`. With the gradient rule and `α < 2/L_f`
/// the recorded costs are non-increasing.
pub fn run(
    data: &DataSet,
    pair: &DivergencePair,
    init: Centers,
    config: &StepConfig,
) -> Result<RunResult> {
    check_shapes(&init, data, pair)?;
    check_domain(&init, data, pair)?;
    let l_bound = pair.smoothness_bound().value();
    config.validate(Some(l_bound))?;
    if config.update_rule == UpdateRule::Lloyd && pair.kind() == PairKind::Huber {
        return Err(Error::UnsupportedUpdate(
            "the Huber loss has no closed-form center; use the gradient rule".into(),
        ));
    }

    let k = init.k();
    let score_accuracy = data
        .classes()
        .is_some_and(|classes| classes.len() == k);

    let mut x = init;
    let mut prev: Option<Assignment> = None;
    let mut records = Vec::new();
    let mut grad_tol = None;
    let mut projection_events = 0;
    let mut reseed_events = 0;

    for t in 0.. {
        let c = assign_unchecked(&x, data, pair, prev.as_ref());
        let reassigned = prev.as_ref().map_or(data.len(), |p| c.diff_count(p));
        let j = cost_unchecked(&x, &c, data, pair);
        let g = center_gradient_unchecked(&x, &c, data, pair);
        let grad_norm = g.norm();
        if !(j.is_finite() && grad_norm.is_finite()) {
            return Err(Error::Numerical(format!("non-finite state at iteration {t}")));
        }
        let stationarity = if pair.is_constrained() {
            (0..k)
                .map(|i| pair.stationarity(x.center(i), g.row(i)).powi(2))
                .sum::<f64>()
                .sqrt()
        } else {
            grad_norm
        };
        let tol = *grad_tol.get_or_insert_with(|| config.grad_tol.resolve(j));
        let accuracy = if score_accuracy {
            Some(accuracy(&c, data.labels().expect("labels checked"))?)
        } else {
            None
        };
        let mut record = IterationRecord {
            iter: t,
            cost: j,
            grad_norm,
            stationarity,
            reassigned,
            accuracy,
            step_norm: 0.0,
            projected: false,
        };

        let termination = if t > 0 && reassigned == 0 && stationarity <= tol {
            Some(TerminationReason::FixedPoint)
        } else if t >= config.max_iters {
            Some(TerminationReason::MaxIters)
        } else {
            None
        };
        if let Some(termination) = termination {
            records.push(record);
            return Ok(RunResult {
                trace: IterationTrace {
                    records,
                    termination,
                    alpha: config.alpha,
                    l_bound,
                    update_rule: config.update_rule,
                    projection_events,
                    reseed_events,
                },
                final_centers: x,
                final_assignment: c,
                alpha_used: config.alpha,
                l_bound_used: l_bound,
                grad_tol_used: tol,
            });
        }

        let next = match config.update_rule {
            UpdateRule::Gradient => gradient_step(&x, &g, config.alpha)?,
            UpdateRule::Lloyd => lloyd_step(&x, &c, data)?,
        };
        let mut values = next.as_slice().to_vec();
        let d = x.dim();
        if pair.is_constrained() {
            for row in values.chunks_exact_mut(d) {
                record.projected |= pair.project(row);
            }
            if record.projected {
                projection_events += 1;
            }
        }
        if config.reseed_empty {
            reseed_events += reseed_empty_clusters(&mut values, d, &x, &c, data, pair);
        }
        record.step_norm = sq_dist(&values, x.as_slice()).sqrt();
        records.push(record);
        x = Centers::new(values, k, d)?;
        prev = Some(c);
    }
    unreachable!("the loop only exits by returning")
}

/// Moves each empty cluster's center onto the point that currently pays
/// the largest loss; each point is used at most once per call.
fn reseed_empty_clusters(
    values: &mut [f64],
    d: usize,
    x: &Centers,
    c: &Assignment,
    data: &DataSet,
    pair: &DivergencePair,
) -> usize {
    let sizes = c.sizes();
    let empty: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] == 0).collect();
    if empty.is_empty() {
        return 0;
    }
    let mut losses: Vec<(usize, f64)> = data
        .points()
        .enumerate()
        .map(|(n, y)| (n, pair.loss_unchecked(x.center(c.cluster_of(n)), y)))
        .collect();
    losses.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (&cluster, &(n, _)) in empty.iter().zip(&losses) {
        values[cluster * d..(cluster + 1) * d].copy_from_slice(data.point(n));
    }
    empty.len().min(losses.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{make_dataset, GradTolerance};
    use approx::assert_relative_eq;

    fn line(points: &[f64]) -> DataSet {
        make_dataset(points.to_vec(), 1, None, None).unwrap()
    }

    fn centers1(v: &[f64]) -> Centers {
        Centers::new(v.to_vec(), v.len(), 1).unwrap()
    }

    fn sq() -> DivergencePair {
        DivergencePair::squared_euclidean()
    }

    #[test]
    fn nearest_center() {
        let a = assign(&centers1(&[1.0, 9.0]), &line(&[0.0, 10.0]), &sq(), None).unwrap();
        assert_eq!(a.as_slice(), &[0, 1]);
    }

    #[test]
    fn ties_are_sticky_then_lowest_index() {
        let data = line(&[5.0, 0.0]);
        let c = centers1(&[1.0, 9.0]);
        let prev = Assignment::new(vec![1, 1], 2).unwrap();
        let a = assign(&c, &data, &sq(), Some(&prev)).unwrap();
        assert_eq!(a.as_slice(), &[1, 0]);
        let a = assign(&c, &data, &sq(), None).unwrap();
        assert_eq!(a.as_slice(), &[0, 0]);
    }

    #[test]
    fn assign_shape_errors() {
        let data = line(&[0.0, 1.0]);
        let c = Centers::new(vec![0.0; 4], 2, 2).unwrap();
        assert!(matches!(assign(&c, &data, &sq(), None).unwrap_err(), Error::Shape(_)));
        let js = DivergencePair::jensen_shannon(0.1).unwrap();
        let data = make_dataset(vec![0.5, 0.5, 0.3, 0.7], 2, None, None).unwrap();
        let c = Centers::new(vec![0.5, 0.5, 0.95, 0.05], 2, 2).unwrap();
        assert!(matches!(assign(&c, &data, &js, None).unwrap_err(), Error::DomainViolation(_)));
    }

    #[test]
    fn cost_of_single_cluster() {
        let data = line(&[0.0, 2.0]);
        let c = centers1(&[1.0, 50.0]);
        let a = Assignment::new(vec![0, 0], 2).unwrap();
        assert_eq!(cost(&c, &a, &data, &sq()).unwrap(), 0.5);
        // The empty cluster's center does not enter the cost.
        let c2 = centers1(&[1.0, -7.0]);
        assert_eq!(cost(&c2, &a, &data, &sq()).unwrap(), 0.5);
    }

    #[test]
    fn cost_zero_when_centers_coincide() {
        let data = line(&[0.0, 2.0]);
        let c = centers1(&[0.0, 2.0]);
        let a = Assignment::new(vec![0, 1], 2).unwrap();
        assert_eq!(cost(&c, &a, &data, &sq()).unwrap(), 0.0);
    }

    #[test]
    fn gradient_blocks() {
        let data = line(&[0.0, 2.0]);
        let a = Assignment::new(vec![0, 0], 2).unwrap();
        let g = center_gradient(&centers1(&[1.0, 5.0]), &a, &data, &sq()).unwrap();
        assert_eq!(g.as_slice(), &[0.0, 0.0]);

        let data = make_dataset(vec![0.0, 4.0], 1, Some(vec![3.0, 1.0]), None).unwrap();
        let a = Assignment::new(vec![0, 1], 2).unwrap();
        let g = center_gradient(&centers1(&[1.0, 5.0]), &a, &data, &sq()).unwrap();
        assert_eq!(g.as_slice(), &[0.75 * 1.0, 0.25 * 1.0]);
    }

    #[test]
    fn huber_gradient_block_is_clipped() {
        let data = make_dataset(vec![3.0, 0.0, 100.0, 0.0], 2, Some(vec![1.0, 1e-300]), None).unwrap();
        let a = Assignment::new(vec![0, 1], 2).unwrap();
        let c = Centers::new(vec![0.0, 0.0, 100.0, 0.0], 2, 2).unwrap();
        let g = center_gradient(&c, &a, &data, &DivergencePair::huber(1.0).unwrap()).unwrap();
        assert_relative_eq!(g.row(0).iter().map(|v| v * v).sum::<f64>().sqrt(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gradient_step_examples() {
        let data = make_dataset(vec![0.0, 1e6], 1, Some(vec![1.0, 1e-300]), None).unwrap();
        let a = Assignment::new(vec![0, 1], 2).unwrap();
        let c = centers1(&[1.0, 1e6]);
        let g = center_gradient(&c, &a, &data, &sq()).unwrap();
        assert_eq!(gradient_step(&c, &g, 1.0).unwrap().as_slice(), &[0.0, 1e6]);
        assert_eq!(gradient_step(&c, &g, 0.5).unwrap().as_slice(), &[0.5, 1e6]);

        let zero = CenterGradient::from_values(vec![0.0, 0.0], 2, 1).unwrap();
        assert_eq!(gradient_step(&c, &zero, 0.3).unwrap(), c);

        let bad = CenterGradient::from_values(vec![f64::NAN, 0.0], 2, 1).unwrap();
        assert!(matches!(gradient_step(&c, &bad, 0.3).unwrap_err(), Error::Numerical(_)));
    }

    #[test]
    fn unit_step_on_unit_mass_lands_on_mean() {
        let data = make_dataset(vec![0.0, 1.0, 5.0], 1, Some(vec![0.2, 0.3, 0.5]), None).unwrap();
        let a = Assignment::new(vec![0, 0, 0], 2).unwrap();
        let c = centers1(&[-4.0, 100.0]);
        let g = center_gradient(&c, &a, &data, &sq()).unwrap();
        let next = gradient_step(&c, &g, 1.0).unwrap();
        assert_relative_eq!(next.center(0)[0], 2.8, epsilon = 1e-15);
    }

    #[test]
    fn lloyd_examples() {
        let a = Assignment::new(vec![0, 0], 2).unwrap();
        let c = lloyd_step(&centers1(&[7.0, 3.0]), &a, &line(&[0.0, 2.0])).unwrap();
        assert_eq!(c.as_slice(), &[1.0, 3.0]);
        let data = make_dataset(vec![0.0, 4.0], 1, Some(vec![0.75, 0.25]), None).unwrap();
        let c = lloyd_step(&centers1(&[7.0, 3.0]), &a, &data).unwrap();
        assert_eq!(c.as_slice(), &[1.0, 3.0]);
    }

    #[test]
    fn step_size_modes() {
        let data = make_dataset((0..2000).map(f64::from).collect(), 1, None, None).unwrap();
        assert_eq!(estimate_step_size(&sq(), &data, StepSizeMode::PaperMnist, 1.0).unwrap(), 1.0 / 4000.0);
        let h = DivergencePair::huber(1.0).unwrap();
        assert_eq!(estimate_step_size(&h, &data, StepSizeMode::Theory, 1.0).unwrap(), 0.5);
        assert_eq!(estimate_step_size(&sq(), &data, StepSizeMode::Theory, 1.0).unwrap(), 1.0);
        assert!(estimate_step_size(&sq(), &data, StepSizeMode::Theory, 2.0).is_err());
    }

    #[test]
    fn zero_budget_records_initial_state_only() {
        let mut cfg = StepConfig::new(1.0);
        cfg.max_iters = 0;
        let r = run(&line(&[0.0, 1.0, 10.0, 11.0]), &sq(), centers1(&[0.0, 10.0]), &cfg).unwrap();
        assert_eq!(r.trace.records.len(), 1);
        assert_eq!(r.trace.termination, TerminationReason::MaxIters);
    }

    #[test]
    fn already_fixed_point_stays_put() {
        let mut cfg = StepConfig::new(1.0);
        cfg.grad_tol = GradTolerance::Absolute(1e-12);
        let init = centers1(&[0.5, 10.5]);
        let r = run(&line(&[0.0, 1.0, 10.0, 11.0]), &sq(), init.clone(), &cfg).unwrap();
        assert_eq!(r.trace.termination, TerminationReason::FixedPoint);
        assert_eq!(r.trace.records.last().unwrap().reassigned, 0);
        for (a, b) in r.final_centers.as_slice().iter().zip(init.as_slice()) {
            assert!((a - b).abs() <= cfg.alpha * 1e-12);
        }
    }

    #[test]
    fn lloyd_with_huber_is_rejected() {
        let mut cfg = StepConfig::new(0.5);
        cfg.update_rule = UpdateRule::Lloyd;
        let e = run(&line(&[0.0, 1.0]), &DivergencePair::huber(1.0).unwrap(), centers1(&[0.0, 1.0]), &cfg)
            .unwrap_err();
        assert!(matches!(e, Error::UnsupportedUpdate(_)));
    }

    #[test]
    fn alpha_above_two_over_l_is_rejected() {
        let cfg = StepConfig::new(1.0);
        let e = run(&line(&[0.0, 1.0]), &DivergencePair::huber(1.0).unwrap(), centers1(&[0.0, 1.0]), &cfg)
            .unwrap_err();
        assert!(matches!(e, Error::InvalidConfig(_)));
    }

    #[test]
    fn empty_cluster_keeps_its_center() {
        let cfg = StepConfig::new(1.0);
        let r = run(&line(&[0.0, 1.0]), &sq(), centers1(&[0.0, 1000.0]), &cfg).unwrap();
        assert_eq!(r.final_centers.center(1), &[1000.0]);
        assert_eq!(r.final_assignment.sizes(), vec![2, 0]);
        assert_eq!(r.trace.termination, TerminationReason::FixedPoint);
    }

    #[test]
    fn reseeding_moves_empty_center_onto_data() {
        let mut cfg = StepConfig::new(1.0);
        cfg.reseed_empty = true;
        let r = run(&line(&[0.0, 1.0, 10.0]), &sq(), centers1(&[0.0, 1000.0]), &cfg).unwrap();
        assert!(r.trace.reseed_events >= 1);
        assert_ne!(r.final_centers.center(1), &[1000.0]);
    }
}
