//! Domain types shared by every module.
//!
//! All types are immutable after construction; the constructors validate
//! their invariants so downstream code can rely on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the sum of normalized weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// `N` weighted points in `d` dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DataSetRepr", into = "DataSetRepr")]
pub struct DataSet {
    n: usize,
    d: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    labels: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct DataSetRepr {
    d: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<u32>>,
}

impl TryFrom<DataSetRepr> for DataSet {
    type Error = Error;

    fn try_from(r: DataSetRepr) -> Result<Self> {
        // Stored weights are already normalized; keep their exact bits.
        build_dataset(r.points, r.d, Weights::Normalized(r.weights), r.labels)
    }
}

impl From<DataSet> for DataSetRepr {
    fn from(d: DataSet) -> Self {
        DataSetRepr {
            d: d.d,
            points: d.points,
            weights: d.weights,
            labels: d.labels,
        }
    }
}

/// Builds a validated dataset from row-major `points` of dimension `d`.
///
/// Weights default to uniform `1/N`; supplied weights must be positive and
/// are normalized to sum to one.
pub fn make_dataset(
    points: Vec<f64>,
    d: usize,
    weights: Option<Vec<f64>>,
    labels: Option<Vec<u32>>,
) -> Result<DataSet> {
    let weights = match weights {
        None => Weights::Uniform,
        Some(w) => Weights::Raw(w),
    };
    build_dataset(points, d, weights, labels)
}

enum Weights {
    Uniform,
    Raw(Vec<f64>),
    Normalized(Vec<f64>),
}

fn build_dataset(
    points: Vec<f64>,
    d: usize,
    weights: Weights,
    labels: Option<Vec<u32>>,
) -> Result<DataSet> {
    if d == 0 {
        return Err(Error::Shape("dimension must be at least 1".into()));
    }
    if points.len() % d != 0 {
        return Err(Error::Shape(format!(
            "{} coordinates do not form rows of dimension {d}",
            points.len()
        )));
    }
    let n = points.len() / d;
    if n < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least 2 points, got {n}"
        )));
    }
    if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidValue(format!(
            "non-finite coordinate at point {}, dim {}",
            pos / d,
            pos % d
        )));
    }
    let first = &points[..d];
    if points.chunks_exact(d).all(|p| p == first) {
        return Err(Error::DegenerateData("all points are identical".into()));
    }

    let weights = match weights {
        Weights::Uniform => vec![1.0 / n as f64; n],
        Weights::Raw(w) | Weights::Normalized(w) if w.len() != n => {
            return Err(Error::Shape(format!("{} weights for {n} points", w.len())));
        }
        Weights::Normalized(w) => {
            if let Some((index, &value)) = w.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::InvalidWeight { index, value });
            }
            w
        }
        Weights::Raw(w) => {
            if let Some((index, &value)) = w
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v > 0.0))
            {
                return Err(Error::InvalidWeight { index, value });
            }
            let total: f64 = w.iter().sum();
            if !total.is_finite() {
                return Err(Error::InvalidValue("weight sum overflows".into()));
            }
            w.into_iter().map(|v| v / total).collect()
        }
    };
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Numerical(format!(
            "normalized weights sum to {total}"
        )));
    }

    if let Some(l) = &labels {
        if l.len() != n {
            return Err(Error::Shape(format!("{} labels for {n} points", l.len())));
        }
    }

    Ok(DataSet {
        n,
        d,
        points,
        weights,
        labels,
    })
}

impl DataSet {
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; a dataset holds at least two points.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.points.chunks_exact(self.d)
    }

    pub fn raw_points(&self) -> &[f64] {
        &self.points
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    /// Distinct labels in ascending order.
    pub fn classes(&self) -> Option<Vec<u32>> {
        self.labels.as_ref().map(|l| {
            let mut c = l.clone();
            c.sort_unstable();
            c.dedup();
            c
        })
    }

    /// Same points and labels with the coordinates replaced.
    pub(crate) fn with_points(&self, points: Vec<f64>) -> Result<DataSet> {
        build_dataset(
            points,
            self.d,
            Weights::Normalized(self.weights.clone()),
            self.labels.clone(),
        )
    }

    /// Axis-aligned bounding box as `(min, max)` per coordinate.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.d];
        let mut hi = vec![f64::NEG_INFINITY; self.d];
        for p in self.points() {
            for (j, &v) in p.iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        (lo, hi)
    }

    /// Weighted mean of all points.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.d];
        for (p, &w) in self.points().zip(&self.weights) {
            for (cj, &v) in c.iter_mut().zip(p) {
                *cj += w * v;
            }
        }
        c
    }
}

/// `K` stacked center vectors, row `i` is the center of cluster `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Centers {
    k: usize,
    d: usize,
    values: Vec<f64>,
}

impl Centers {
    pub fn new(values: Vec<f64>, k: usize, d: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidValue(format!("need K >= 2 centers, got {k}")));
        }
        if d == 0 || values.len() != k * d {
            return Err(Error::Shape(format!(
                "{} values cannot form {k} centers of dimension {d}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite center coordinate".into()));
        }
        Ok(Centers { k, d, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != d) {
            return Err(Error::Shape("center rows differ in length".into()));
        }
        let values = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Centers::new(values, rows.len(), d)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Euclidean norm of the stacked vector in `R^{Kd}`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Centers {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Centers::from_rows(&rows)
    }
}

impl From<Centers> for Vec<Vec<f64>> {
    fn from(c: Centers) -> Self {
        c.rows().map(<[f64]>::to_vec).collect()
    }
}

/// Total map from point index to cluster index in `0..K`.
///
/// Empty clusters are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AssignmentRepr", into = "AssignmentRepr")]
pub struct Assignment {
    k: usize,
    cluster_of: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentRepr {
    k: usize,
    cluster_of: Vec<usize>,
}

impl TryFrom<AssignmentRepr> for Assignment {
    type Error = Error;

    fn try_from(r: AssignmentRepr) -> Result<Self> {
        Assignment::new(r.cluster_of, r.k)
    }
}

impl From<Assignment> for AssignmentRepr {
    fn from(a: Assignment) -> Self {
        AssignmentRepr {
            k: a.k,
            cluster_of: a.cluster_of,
        }
    }
}

impl Assignment {
    pub fn new(cluster_of: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = cluster_of.iter().find(|&&c| c >= k) {
            return Err(Error::Shape(format!("cluster index {bad} outside 0..{k}")));
        }
        Ok(Assignment { k, cluster_of })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_of.is_empty()
    }

    pub fn cluster_of(&self, point: usize) -> usize {
        self.cluster_of[point]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.cluster_of
    }

    /// Number of points in each cluster.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &c in &self.cluster_of {
            s[c] += 1;
        }
        s
    }

    /// Number of points whose cluster differs from `other`.
    pub fn diff_count(&self, other: &Assignment) -> usize {
        self.cluster_of
            .iter()
            .zip(&other.cluster_of)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Copy with one point moved to another cluster.
    pub fn with_moved(&self, point: usize, cluster: usize) -> Result<Assignment> {
        let mut c = self.cluster_of.clone();
        *c.get_mut(point)
            .ok_or_else(|| Error::Shape(format!("point {point} out of range")))? = cluster;
        Assignment::new(c, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    /// One gradient step on the cluster cost.
    Gradient,
    /// Exact weighted-mean update.
    Lloyd,
}

/// Gradient-norm threshold used by the stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradTolerance {
    Absolute(f64),
    /// `factor * (1 + J_0)` where `J_0` is the first recorded cost.
    RelativeToInitialCost(f64),
}

impl GradTolerance {
    pub fn resolve(self, initial_cost: f64) -> f64 {
        match self {
            GradTolerance::Absolute(t) => t,
            GradTolerance::RelativeToInitialCost(f) => f * (1.0 + initial_cost),
        }
    }
}

impl Default for GradTolerance {
    fn default() -> Self {
        GradTolerance::RelativeToInitialCost(1e-8)
    }
}

/// Parameters of one run of the alternating method.
///
/// Ties in the reassignment step always keep the previous cluster when it
/// is among the minimizers and otherwise take the lowest index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub alpha: f64,
    pub max_iters: usize,
    pub grad_tol: GradTolerance,
    pub seed: u64,
    pub update_rule: UpdateRule,
    /// Skip the `alpha < 2 / L` guard.
    pub unsafe_alpha: bool,
    /// Move centers of empty clusters onto the worst-served point. Breaks the
    /// descent guarantee; off by default.
    pub reseed_empty: bool,
}

impl StepConfig {
    pub fn new(alpha: f64) -> Self {
        StepConfig {
            alpha,
            max_iters: 10_000,
            grad_tol: GradTolerance::default(),
            seed: 0,
            update_rule: UpdateRule::Gradient,
            unsafe_alpha: false,
            reseed_empty: false,
        }
    }

    pub fn validate(&self, smoothness: Option<f64>) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "step size must be positive, got {}",
                self.alpha
            )));
        }
        let tol = match self.grad_tol {
            GradTolerance::Absolute(t) | GradTolerance::RelativeToInitialCost(t) => t,
        };
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gradient tolerance must be positive, got {tol}"
            )));
        }
        if let Some(l) = smoothness {
            if self.update_rule == UpdateRule::Gradient && !self.unsafe_alpha && self.alpha >= 2.0 / l {
                return Err(Error::InvalidConfig(format!(
                    "step size {} violates alpha < 2/L = {}",
                    self.alpha,
                    2.0 / l
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    FixedPoint,
    MaxIters,
}

/// State of iteration `t`: cost `J(x_t, C_{t+1})` together with the gradient
/// that the next step would take.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub cost: f64,
    /// Frobenius norm of `grad_x J(x_t, C_{t+1})`.
    pub grad_norm: f64,
    /// Measure used by the stopping rule. Equals `grad_norm` for
    /// unconstrained pairs; for the Jensen-Shannon pair it is the norm of the
    /// gradient projected onto the tangent cone of the restricted simplex.
    pub stationarity: f64,
    /// Points whose cluster changed in this reassignment (all points at t=0).
    pub reassigned: usize,
    pub accuracy: Option<f64>,
    /// `||x_{t+1} - x_t||`, zero for the final record.
    pub step_norm: f64,
    /// The update left the feasible set and was projected back.
    pub projected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub termination: TerminationReason,
    pub alpha: f64,
    pub l_bound: f64,
    pub update_rule: UpdateRule,
    /// Number of steps whose result had to be projected into the domain.
    pub projection_events: usize,
    /// Number of times an empty cluster was reseeded.
    pub reseed_events: usize,
}

impl IterationTrace {
    pub fn costs(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.cost)
    }

    pub fn initial_cost(&self) -> f64 {
        self.records.first().map_or(0.0, |r| r.cost)
    }

    pub fn final_cost(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cost)
    }

    /// Index of the first record whose cost exceeds its predecessor by more
    /// than `1e-9 * max(1, J_0)`.
    pub fn first_ascent(&self) -> Option<usize> {
        let slack = 1e-9 * self.initial_cost().max(1.0);
        self.records
            .windows(2)
            .position(|w| w[1].cost > w[0].cost + slack)
            .map(|i| i + 1)
    }

    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_default_weights() {
        let d = make_dataset(vec![0.0, 1.0], 1, None, None).unwrap();
        assert_eq!(d.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn weights_are_normalized() {
        let d = make_dataset(vec![0.0, 1.0], 1, Some(vec![2.0, 2.0]), None).unwrap();
        assert_eq!(d.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn identical_points_rejected() {
        let e = make_dataset(vec![0.0, 0.0], 1, None, None).unwrap_err();
        assert!(matches!(e, Error::DegenerateData(_)));
    }

    #[test]
    fn single_point_rejected() {
        let e = make_dataset(vec![1.0, 2.0], 2, None, None).unwrap_err();
        assert!(matches!(e, Error::DegenerateData(_)));
    }

    #[test]
    fn non_finite_rejected() {
        let e = make_dataset(vec![0.0, f64::NAN], 1, None, None).unwrap_err();
        assert!(matches!(e, Error::InvalidValue(_)));
        let e = make_dataset(vec![0.0, f64::INFINITY], 1, None, None).unwrap_err();
        assert!(matches!(e, Error::InvalidValue(_)));
    }

    #[test]
    fn non_positive_weight_rejected() {
        for bad in [0.0, -1.0, f64::NAN] {
            let e = make_dataset(vec![0.0, 1.0], 1, Some(vec![1.0, bad]), None).unwrap_err();
            assert!(matches!(e, Error::InvalidWeight { index: 1, .. }));
        }
    }

    #[test]
    fn label_length_checked() {
        let e = make_dataset(vec![0.0, 1.0], 1, None, Some(vec![1])).unwrap_err();
        assert!(matches!(e, Error::Shape(_)));
    }

    #[test]
    fn centers_need_two_rows() {
        assert!(Centers::new(vec![1.0], 1, 1).is_err());
        assert!(Centers::new(vec![1.0, 2.0], 2, 1).is_ok());
        assert!(Centers::new(vec![1.0, f64::NAN], 2, 1).is_err());
    }

    #[test]
    fn assignment_rejects_out_of_range() {
        assert!(Assignment::new(vec![0, 2], 2).is_err());
        let a = Assignment::new(vec![0, 1, 1], 3).unwrap();
        assert_eq!(a.sizes(), vec![1, 2, 0]);
    }

    #[test]
    fn alpha_guard() {
        let mut c = StepConfig::new(1.0);
        assert!(c.validate(Some(2.0)).is_err());
        c.alpha = 0.99;
        assert!(c.validate(Some(2.0)).is_ok());
        c.alpha = 1.5;
        c.unsafe_alpha = true;
        assert!(c.validate(Some(2.0)).is_ok());
        c.alpha = 0.0;
        assert!(c.validate(None).is_err());
    }

    #[test]
    fn dataset_deserialization_validates() {
        let d = make_dataset(vec![0.0, 1.0, 3.0], 1, Some(vec![1.0, 1.0, 2.0]), Some(vec![0, 0, 1])).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        let back: DataSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"d":1,"points":[0.0,0.0],"weights":[0.5,0.5]}"#;
        assert!(serde_json::from_str::<DataSet>(bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalized_weights_sum_to_one(
                w in proptest::collection::vec(1e-6f64..1e6, 2..200)
            ) {
                let n = w.len();
                let pts: Vec<f64> = (0..n).map(|i| i as f64).collect();
                let d = make_dataset(pts, 1, Some(w), None).unwrap();
                let s: f64 = d.weights().iter().sum();
                prop_assert!((s - 1.0).abs() <= WEIGHT_SUM_TOL);
                prop_assert!(d.weights().iter().all(|&p| p > 0.0 && p < 1.0));
            }

            #[test]
            fn partition_is_total(
                cl in proptest::collection::vec(0usize..5, 1..100)
            ) {
                let a = Assignment::new(cl.clone(), 5).unwrap();
                prop_assert_eq!(a.sizes().iter().sum::<usize>(), cl.len());
            }
        }
    }
}
