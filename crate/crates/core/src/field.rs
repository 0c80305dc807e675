//! Points, convex domains, and the scalar/vector fields that live on them.
//!
//! Every field carries its [`Domain`]; all evaluators are pure and reentrant so
//! that the dominance sweeps can fan out across threads.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Containment slack used by every domain membership test.
pub const CONTAINMENT_TOL: f64 = 1e-12;

/// A finite vector in ℝ^m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("point coordinates"));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "point coordinate {bad} is not finite"
            )));
        }
        Ok(Point(coords))
    }

    pub fn scalar(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite scalar point {x}");
        Point(vec![x])
    }

    /// Internal constructor for values produced by arithmetic on valid points.
    pub(crate) fn from_vec(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        distance(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    fn ensure_same_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `{x ∈ ℝ^dim | x ≥ 0, Σx = mass}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    pub mass: f64,
    pub dim: usize,
}

impl Simplex {
    pub fn new(mass: f64, dim: usize) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "simplex mass must be positive, got {mass}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("simplex dimension must be positive".into()));
        }
        Ok(Simplex { mass, dim })
    }

    fn contains(&self, x: &[f64]) -> bool {
        let tol = CONTAINMENT_TOL * self.mass.max(1.0);
        x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - self.mass).abs() <= tol
    }

    fn vertices(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|j| {
                let mut v = vec![0.0; self.dim];
                v[j] = self.mass;
                v
            })
            .collect()
    }

    fn barycenter(&self) -> Vec<f64> {
        vec![self.mass / self.dim as f64; self.dim]
    }
}

/// A closed convex set: a box, a simplex, or a product of simplexes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Domain {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Simplex(Simplex),
    Product { factors: Vec<Simplex> },
}

impl Domain {
    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        Domain::boxed(vec![lower], vec![upper])
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::Empty("box bounds"));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidArgument(format!(
                    "invalid box bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(Domain::Box { lower, upper })
    }

    pub fn simplex(mass: f64, dim: usize) -> Result<Self> {
        Ok(Domain::Simplex(Simplex::new(mass, dim)?))
    }

    pub fn product(factors: Vec<Simplex>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Empty("product factors"));
        }
        Ok(Domain::Product { factors })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lower, .. } => lower.len(),
            Domain::Simplex(s) => s.dim,
            Domain::Product { factors } => factors.iter().map(|s| s.dim).sum(),
        }
    }

    /// Simplex blocks as `(offset, simplex)`; empty for boxes.
    pub(crate) fn blocks(&self) -> Vec<(usize, Simplex)> {
        match self {
            Domain::Box { .. } => Vec::new(),
            Domain::Simplex(s) => vec![(0, *s)],
            Domain::Product { factors } => {
                let mut off = 0;
                factors
                    .iter()
                    .map(|s| {
                        let b = (off, *s);
                        off += s.dim;
                        b
                    })
                    .collect()
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Domain::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (lo, hi))| *v >= lo - CONTAINMENT_TOL && *v <= hi + CONTAINMENT_TOL),
            _ => self
                .blocks()
                .iter()
                .all(|(off, s)| s.contains(&x[*off..off + s.dim])),
        }
    }

    pub fn ensure_contains(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        if !self.contains(p.coords()) {
            return Err(Error::OutsideDomain {
                point: p.coords().to_vec(),
            });
        }
        Ok(())
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Box { lower, upper } => distance(lower, upper),
            _ => self
                .blocks()
                .iter()
                .map(|(_, s)| {
                    if s.dim > 1 {
                        2.0 * s.mass * s.mass
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Extreme points: box corners, simplex vertices, or all vertex combinations of a product.
    pub fn vertices(&self) -> Vec<Point> {
        match self {
            Domain::Box { lower, upper } => {
                let d = lower.len();
                (0..1usize << d)
                    .map(|mask| {
                        Point::from_vec(
                            (0..d)
                                .map(|j| if mask >> j & 1 == 1 { upper[j] } else { lower[j] })
                                .collect(),
                        )
                    })
                    .collect()
            }
            _ => {
                let per_block: Vec<Vec<Vec<f64>>> =
                    self.blocks().iter().map(|(_, s)| s.vertices()).collect();
                cartesian(&per_block).into_iter().map(Point::from_vec).collect()
            }
        }
    }

    pub(crate) fn barycenter(&self) -> Point {
        match self {
            Domain::Box { lower, upper } => {
                Point::from_vec(lower.iter().zip(upper).map(|(a, b)| 0.5 * (a + b)).collect())
            }
            _ => Point::from_vec(
                self.blocks()
                    .iter()
                    .flat_map(|(_, s)| s.barycenter())
                    .collect(),
            ),
        }
    }
}

/// Concatenates one choice from each list, in lexicographic order.
pub(crate) fn cartesian(lists: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for item in list {
                let mut v = prefix.clone();
                v.extend_from_slice(item);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A continuous `f : X → ℝ`.
#[derive(Clone)]
pub struct ScalarField {
    eval: ScalarFn,
    domain: Domain,
    label: String,
}

impl ScalarField {
    pub fn new<F>(label: impl Into<String>, domain: Domain, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        ScalarField {
            eval: Arc::new(f),
            domain,
            label: label.into(),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Raw evaluation, no domain check.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        self.domain.ensure_contains(p)?;
        Ok(self.value(p.coords()))
    }

    pub fn negated(&self) -> ScalarField {
        let inner = self.eval.clone();
        ScalarField {
            eval: Arc::new(move |x| -inner(x)),
            domain: self.domain.clone(),
            label: format!("neg:{}", self.label),
        }
    }

    pub fn with_domain(&self, domain: Domain) -> Result<ScalarField> {
        if domain.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: domain.dim(),
            });
        }
        Ok(ScalarField {
            eval: self.eval.clone(),
            domain,
            label: self.label.clone(),
        })
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

/// A continuous `c : X → ℝ^m` with `m = dim X`.
#[derive(Clone)]
pub struct VectorField {
    eval: VectorFn,
    domain: Domain,
    label: String,
}

impl VectorField {
    pub fn new<F>(label: impl Into<String>, domain: Domain, f: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        VectorField {
            eval: Arc::new(f),
            domain,
            label: label.into(),
        }
    }

    /// A one-dimensional field `c(x) = f(x)`, i.e. a scalar function read as a vector field.
    pub fn from_fn_1d<F>(label: impl Into<String>, domain: Domain, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        assert_eq!(domain.dim(), 1, "from_fn_1d needs a one-dimensional domain");
        VectorField::new(label, domain, move |x, out| out[0] = f(x[0]))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    #[inline]
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        (self.eval)(x, out)
    }

    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.eval_into(x, &mut out);
        out
    }

    pub fn eval(&self, p: &Point) -> Result<Point> {
        self.domain.ensure_contains(p)?;
        Point::new(self.value(p.coords()))
    }

    pub fn negated(&self) -> VectorField {
        let inner = self.eval.clone();
        VectorField {
            eval: Arc::new(move |x, out| {
                inner(x, out);
                for v in out.iter_mut() {
                    *v = -*v;
                }
            }),
            domain: self.domain.clone(),
            label: format!("neg:{}", self.label),
        }
    }

    /// Multiplies every output by `k`.
    pub fn scaled(&self, k: f64) -> VectorField {
        let inner = self.eval.clone();
        VectorField {
            eval: Arc::new(move |x, out| {
                inner(x, out);
                for v in out.iter_mut() {
                    *v *= k;
                }
            }),
            domain: self.domain.clone(),
            label: format!("{k}*{}", self.label),
        }
    }

    pub fn with_domain(&self, domain: Domain) -> Result<VectorField> {
        if domain.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: domain.dim(),
            });
        }
        Ok(VectorField {
            eval: self.eval.clone(),
            domain,
            label: self.label.clone(),
        })
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

/// `εx + (1−ε)y`, the point on the segment from `y` (ε = 0) to `x` (ε = 1).
pub fn segment_point(x: &Point, y: &Point, eps: f64) -> Result<Point> {
    x.ensure_same_dim(y)?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "segment parameter {eps} outside [0, 1]"
        )));
    }
    let mut out = vec![0.0; x.dim()];
    segment_into(x.coords(), y.coords(), eps, &mut out);
    Ok(Point::from_vec(out))
}

#[inline]
pub(crate) fn segment_into(x: &[f64], y: &[f64], eps: f64, out: &mut [f64]) {
    let one_minus = 1.0 - eps;
    for ((o, a), b) in out.iter_mut().zip(x).zip(y) {
        *o = eps * a + one_minus * b;
    }
}

/// Finite-difference gradient together with a flag telling whether any
/// component fell back to a one-sided difference at a box face.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdGradient {
    pub grad: Point,
    pub one_sided: bool,
}

/// Central-difference gradient; one-sided on any axis where a box face is within `h`.
pub fn gradient_fd(f: &ScalarField, p: &Point, h: f64) -> Result<FdGradient> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!("step h must be positive, got {h}")));
    }
    if p.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: p.dim(),
        });
    }
    let mut grad = vec![0.0; p.dim()];
    let one_sided = fd_into(f, p.coords(), h, &mut grad);
    Ok(FdGradient {
        grad: Point::new(grad)?,
        one_sided,
    })
}

fn fd_into(f: &ScalarField, p: &[f64], h: f64, out: &mut [f64]) -> bool {
    let bounds = match f.domain() {
        Domain::Box { lower, upper } => Some((lower, upper)),
        _ => None,
    };
    let mut probe = p.to_vec();
    let mut one_sided = false;
    for j in 0..p.len() {
        let (can_back, can_fwd) = match bounds {
            Some((lo, hi)) => (p[j] - h >= lo[j], p[j] + h <= hi[j]),
            None => (true, true),
        };
        let eval_at = |probe: &mut Vec<f64>, v: f64| {
            probe[j] = v;
            f.value(probe)
        };
        out[j] = match (can_back, can_fwd) {
            (true, true) | (false, false) => {
                let fp = eval_at(&mut probe, p[j] + h);
                let fm = eval_at(&mut probe, p[j] - h);
                (fp - fm) / (2.0 * h)
            }
            (false, true) => {
                one_sided = true;
                let fp = eval_at(&mut probe, p[j] + h);
                let f0 = eval_at(&mut probe, p[j]);
                (fp - f0) / h
            }
            (true, false) => {
                one_sided = true;
                let f0 = eval_at(&mut probe, p[j]);
                let fm = eval_at(&mut probe, p[j] - h);
                (f0 - fm) / h
            }
        };
        probe[j] = p[j];
    }
    one_sided
}

/// The vector field `∇f` realised by finite differences with step `h`.
pub fn gradient_field(f: &ScalarField, h: f64) -> Result<VectorField> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!("step h must be positive, got {h}")));
    }
    let g = f.clone();
    Ok(VectorField::new(
        format!("grad:{}", f.label()),
        f.domain().clone(),
        move |x, out| {
            fd_into(&g, x, h, out);
        },
    ))
}
