//! Metric/loss pairs `(g, f)`.
//!
//! `g` drives the reassignment step and `f` the center update. Every shipped
//! loss is written as `f = h(g)` with `h` nondecreasing on `[0, inf)`, so a
//! point that is closer under `g` never costs more under `f`.
//!
//! | kind               | `g(x, y)`               | `f(x, y)`                 | `L_f`        |
//! |--------------------|-------------------------|---------------------------|--------------|
//! | squared Euclidean  | `‖x − y‖`               | `½‖x − y‖²`               | 1            |
//! | Mahalanobis(A)     | `‖x − y‖_A`             | `½(x − y)ᵀA(x − y)`       | `λ_max(A)`   |
//! | Huber(δ)           | `‖x − y‖`               | `φ_δ(‖x − y‖)`            | 2            |
//! | Jensen-Shannon(ε)  | `sqrt(D_JS(y ∥ x))`     | `D_JS(y ∥ x)`             | `1/ε`        |
//!
//! The Jensen-Shannon pair is only defined on the restricted simplex
//! `P_ε = { p : Σ p_i = 1, p_i ≥ ε }`.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetry tolerance for the Mahalanobis matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Tolerance on `Σ p_i = 1` for simplex arguments.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;
/// Slack below `ε` still accepted as inside `P_ε`.
pub const SIMPLEX_FLOOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    #[serde(rename = "sqeuclid")]
    SquaredEuclidean,
    #[serde(rename = "mahalanobis")]
    Mahalanobis,
    #[serde(rename = "huber")]
    Huber,
    #[serde(rename = "js")]
    JensenShannon,
}

impl PairKind {
    pub const ALL: [PairKind; 4] = [
        PairKind::SquaredEuclidean,
        PairKind::Mahalanobis,
        PairKind::Huber,
        PairKind::JensenShannon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairKind::SquaredEuclidean => "sqeuclid",
            PairKind::Mahalanobis => "mahalanobis",
            PairKind::Huber => "huber",
            PairKind::JensenShannon => "js",
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PairKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqeuclid" => Ok(PairKind::SquaredEuclidean),
            "mahalanobis" => Ok(PairKind::Mahalanobis),
            "huber" => Ok(PairKind::Huber),
            "js" => Ok(PairKind::JensenShannon),
            other => Err(Error::InvalidConfig(format!("unknown pair kind `{other}`"))),
        }
    }
}

/// Upper bound on the Lipschitz constant of `grad_x f(., y)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SmoothnessBound(f64);

impl SmoothnessBound {
    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Inner {
    SquaredEuclidean,
    Mahalanobis {
        d: usize,
        a: Vec<f64>,
        lambda_max: f64,
    },
    Huber {
        delta: f64,
    },
    JensenShannon {
        epsilon: f64,
    },
}

/// A validated `(g, f)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairSpec", into = "PairSpec")]
pub struct DivergencePair {
    inner: Inner,
}

/// Declarative description of a pair, as found in config files and saved
/// run artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub kind: PairKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Row-major rows of `A`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

impl TryFrom<PairSpec> for DivergencePair {
    type Error = Error;

    fn try_from(s: PairSpec) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidConfig(format!("pair `{}` needs `{name}`", s.kind)))
        };
        match s.kind {
            PairKind::SquaredEuclidean => Ok(DivergencePair::squared_euclidean()),
            PairKind::Huber => DivergencePair::huber(need(s.delta, "delta")?),
            PairKind::JensenShannon => DivergencePair::jensen_shannon(need(s.epsilon, "epsilon")?),
            PairKind::Mahalanobis => {
                let rows = s.matrix.clone().ok_or_else(|| {
                    Error::InvalidConfig("pair `mahalanobis` needs `matrix`".into())
                })?;
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Shape("Mahalanobis matrix must be square".into()));
                }
                DivergencePair::mahalanobis(rows.into_iter().flatten().collect(), d)
            }
        }
    }
}

impl From<DivergencePair> for PairSpec {
    fn from(p: DivergencePair) -> Self {
        let mut spec = PairSpec {
            kind: p.kind(),
            delta: None,
            epsilon: None,
            matrix: None,
        };
        match p.inner {
            Inner::SquaredEuclidean => {}
            Inner::Huber { delta } => spec.delta = Some(delta),
            Inner::JensenShannon { epsilon } => spec.epsilon = Some(epsilon),
            Inner::Mahalanobis { d, a, .. } => {
                spec.matrix = Some(a.chunks_exact(d).map(<[f64]>::to_vec).collect())
            }
        }
        spec
    }
}

impl DivergencePair {
    pub fn squared_euclidean() -> Self {
        DivergencePair {
            inner: Inner::SquaredEuclidean,
        }
    }

    /// `a` is a row-major `d × d` symmetric positive-definite matrix.
    pub fn mahalanobis(a: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 || a.len() != d * d {
            return Err(Error::Shape(format!(
                "{} entries do not form a {d}x{d} matrix",
                a.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("non-finite matrix entry".into()));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if (a[i * d + j] - a[j * d + i]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidValue(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let m = DMatrix::from_row_slice(d, d, &a);
        if m.clone().cholesky().is_none() {
            return Err(Error::InvalidValue("matrix is not positive definite".into()));
        }
        let eig = SymmetricEigen::new(m);
        let lambda_min = eig.eigenvalues.min();
        let lambda_max = eig.eigenvalues.max();
        if lambda_min <= 0.0 {
            return Err(Error::InvalidValue(format!(
                "matrix is not positive definite (smallest eigenvalue {lambda_min:e})"
            )));
        }
        Ok(DivergencePair {
            inner: Inner::Mahalanobis { d, a, lambda_max },
        })
    }

    pub fn huber(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidValue(format!("Huber delta must be positive, got {delta}")));
        }
        Ok(DivergencePair {
            inner: Inner::Huber { delta },
        })
    }

    /// The dimension-dependent requirement `ε < 1/d` is checked by
    /// [`DivergencePair::check_dim`].
    pub fn jensen_shannon(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidValue(format!(
                "Jensen-Shannon epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(DivergencePair {
            inner: Inner::JensenShannon { epsilon },
        })
    }

    pub fn kind(&self) -> PairKind {
        match self.inner {
            Inner::SquaredEuclidean => PairKind::SquaredEuclidean,
            Inner::Mahalanobis { .. } => PairKind::Mahalanobis,
            Inner::Huber { .. } => PairKind::Huber,
            Inner::JensenShannon { .. } => PairKind::JensenShannon,
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self.inner {
            Inner::Huber { delta } => Some(delta),
            _ => None,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self.inner {
            Inner::JensenShannon { epsilon } => Some(epsilon),
            _ => None,
        }
    }

    pub fn spec(&self) -> PairSpec {
        self.clone().into()
    }

    /// Pairs whose zero-gradient center is the weighted mean of the cluster.
    pub fn has_mean_center(&self) -> bool {
        matches!(
            self.inner,
            Inner::SquaredEuclidean | Inner::Mahalanobis { .. }
        )
    }

    /// Pairs whose loss is a divergence of Bregman type and for which the
    /// centroidal check is reported.
    pub fn is_bregman(&self) -> bool {
        !matches!(self.inner, Inner::Huber { .. })
    }

    /// Whether centers must be kept inside a bounded domain.
    pub fn is_constrained(&self) -> bool {
        matches!(self.inner, Inner::JensenShannon { .. })
    }

    pub fn smoothness_bound(&self) -> SmoothnessBound {
        SmoothnessBound(match self.inner {
            Inner::SquaredEuclidean => 1.0,
            Inner::Mahalanobis { lambda_max, .. } => lambda_max,
            Inner::Huber { .. } => 2.0,
            Inner::JensenShannon { epsilon } => 1.0 / epsilon,
        })
    }

    /// Checks that the pair can operate on `d`-dimensional points.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self.inner {
            Inner::Mahalanobis { d: md, .. } if md != d => Err(Error::Shape(format!(
                "Mahalanobis matrix is {md}x{md} but points have dimension {d}"
            ))),
            Inner::JensenShannon { epsilon } if !(d >= 2 && epsilon < 1.0 / d as f64) => {
                Err(Error::InvalidValue(format!(
                    "epsilon {epsilon} must be below 1/d = {} for P_eps to be nonempty",
                    1.0 / d as f64
                )))
            }
            _ => Ok(()),
        }
    }

    /// Checks that `x` lies in the pair's domain.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("non-finite coordinate".into()));
        }
        if let Inner::JensenShannon { epsilon } = self.inner {
            let sum: f64 = x.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
                return Err(Error::DomainViolation(format!("coordinates sum to {sum}")));
            }
            if let Some((i, v)) = x.iter().enumerate().find(|(_, &v)| v < epsilon - SIMPLEX_FLOOR_TOL) {
                return Err(Error::DomainViolation(format!(
                    "coordinate {i} is {v}, below epsilon {epsilon}"
                )));
            }
        }
        Ok(())
    }

    fn check_args(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::Shape(format!(
                "arguments have dimensions {} and {}",
                x.len(),
                y.len()
            )));
        }
        self.check_dim(x.len())?;
        self.check_point(x)?;
        self.check_point(y)
    }

    /// `g(x, y)`.
    pub fn metric(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_args(x, y)?;
        Ok(self.metric_unchecked(x, y))
    }

    /// `f(x, y)`.
    pub fn loss(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_args(x, y)?;
        Ok(self.loss_unchecked(x, y))
    }

    /// `grad_x f(x, y)`.
    pub fn grad(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_args(x, y)?;
        let mut out = vec![0.0; x.len()];
        self.add_scaled_grad(x, y, 1.0, &mut out);
        Ok(out)
    }

    pub(crate) fn metric_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.inner {
            Inner::SquaredEuclidean | Inner::Huber { .. } => sq_dist(x, y).sqrt(),
            Inner::Mahalanobis { d, a, .. } => quad_form(a, *d, x, y).sqrt(),
            Inner::JensenShannon { .. } => js_divergence(x, y).sqrt(),
        }
    }

    pub(crate) fn loss_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.inner {
            Inner::SquaredEuclidean => 0.5 * sq_dist(x, y),
            Inner::Mahalanobis { d, a, .. } => 0.5 * quad_form(a, *d, x, y),
            Inner::Huber { delta } => huber(sq_dist(x, y).sqrt(), *delta),
            Inner::JensenShannon { .. } => js_divergence(x, y),
        }
    }

    /// `out += scale * grad_x f(x, y)`.
    pub(crate) fn add_scaled_grad(&self, x: &[f64], y: &[f64], scale: f64, out: &mut [f64]) {
        match &self.inner {
            Inner::SquaredEuclidean => {
                for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
                    *o += scale * (xi - yi);
                }
            }
            Inner::Mahalanobis { d, a, .. } => {
                for (row, o) in a.chunks_exact(*d).zip(out.iter_mut()) {
                    let av: f64 = row.iter().zip(x.iter().zip(y)).map(|(aij, (xj, yj))| aij * (xj - yj)).sum();
                    *o += scale * av;
                }
            }
            Inner::Huber { delta } => {
                let r = sq_dist(x, y).sqrt();
                let s = if r <= *delta { scale } else { scale * delta / r };
                for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
                    *o += s * (xi - yi);
                }
            }
            Inner::JensenShannon { .. } => {
                for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
                    *o += scale * 0.5 * (2.0 * xi / (xi + yi)).ln();
                }
            }
        }
    }

    /// Euclidean projection onto the pair's domain. Returns true when `x`
    /// moved. A no-op for unconstrained pairs.
    pub fn project(&self, x: &mut [f64]) -> bool {
        match self.inner {
            Inner::JensenShannon { epsilon } => project_restricted_simplex(x, epsilon),
            _ => false,
        }
    }

    /// Norm of `-grad` projected onto the tangent cone of the domain at `x`.
    ///
    /// Zero exactly at constrained stationary points. For unconstrained pairs
    /// this is `‖grad‖`.
    pub fn stationarity(&self, x: &[f64], grad: &[f64]) -> f64 {
        match self.inner {
            Inner::JensenShannon { epsilon } => simplex_tangent_residual(x, grad, epsilon),
            _ => grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
        }
    }
}

pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn quad_form(a: &[f64], d: usize, x: &[f64], y: &[f64]) -> f64 {
    let mut q = 0.0;
    for (i, row) in a.chunks_exact(d).enumerate() {
        let vi = x[i] - y[i];
        let av: f64 = row.iter().zip(x.iter().zip(y)).map(|(aij, (xj, yj))| aij * (xj - yj)).sum();
        q += vi * av;
    }
    q.max(0.0)
}

/// Huber function `φ_δ(r)` for `r ≥ 0`.
pub fn huber(r: f64, delta: f64) -> f64 {
    if r <= delta {
        0.5 * r * r
    } else {
        delta * r - 0.5 * delta * delta
    }
}

/// `D_JS(y ∥ x) = ½ KL(y ∥ m) + ½ KL(x ∥ m)` with `m = (x + y) / 2`.
pub fn js_divergence(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let m = xi + yi;
        s += yi * (2.0 * yi / m).ln() + xi * (2.0 * xi / m).ln();
    }
    (0.5 * s).max(0.0)
}

/// Projects `x` onto `{ p : Σ p_i = 1, p_i ≥ ε }` in place.
fn project_restricted_simplex(x: &mut [f64], epsilon: f64) -> bool {
    let d = x.len();
    let radius = 1.0 - d as f64 * epsilon;
    let sum: f64 = x.iter().sum();
    if (sum - 1.0).abs() <= f64::EPSILON * d as f64 && x.iter().all(|&v| v >= epsilon) {
        return false;
    }
    // Shifted problem: u = x - ε on the simplex of mass `radius`.
    let mut u: Vec<f64> = x.iter().map(|v| v - epsilon).collect();
    let mut sorted = u.clone();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - radius) / (j + 1) as f64;
        if v - t > 0.0 {
            tau = t;
        }
    }
    for ui in u.iter_mut() {
        *ui = (*ui - tau).max(0.0);
    }
    for (xi, ui) in x.iter_mut().zip(&u) {
        *xi = epsilon + ui;
    }
    true
}

/// `‖Π_T(-g)‖` for the tangent cone `T = { v : Σ v_i = 0, v_i ≥ 0 on active i }`.
fn simplex_tangent_residual(x: &[f64], g: &[f64], epsilon: f64) -> f64 {
    let active: Vec<bool> = x.iter().map(|&v| v <= epsilon + SIMPLEX_FLOOR_TOL).collect();
    let free: Vec<f64> = g.iter().zip(&active).filter(|(_, &a)| !a).map(|(&gi, _)| gi).collect();
    let mut bound: Vec<f64> = g.iter().zip(&active).filter(|(_, &a)| a).map(|(&gi, _)| gi).collect();
    bound.sort_unstable_by(f64::total_cmp);
    if free.is_empty() {
        return 0.0;
    }
    // The projected direction is v_i = λ - g_i on free coordinates and
    // max(0, λ - g_i) on active ones, with λ chosen so that Σ v_i = 0.
    let mut sum: f64 = free.iter().sum();
    let mut count = free.len() as f64;
    let mut lambda = sum / count;
    for &b in &bound {
        if b >= lambda {
            break;
        }
        sum += b;
        count += 1.0;
        lambda = sum / count;
    }
    let mut r = 0.0;
    for (&gi, &a) in g.iter().zip(&active) {
        let v = lambda - gi;
        let v = if a { v.max(0.0) } else { v };
        r += v * v;
    }
    r.sqrt()
}
