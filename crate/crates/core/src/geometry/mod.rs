//! Geometry kernels for the four supported quasi-metric spaces.
//!
//! | kind       | points                         | distance                         |
//! |------------|--------------------------------|----------------------------------|
//! | Euclidean  | `R^n`                          | `‖x - y‖`                        |
//! | Polyhedral | `R^n` (or `span(W)`)           | `max_i w_iᵀ(x - y)`              |
//! | Sphere     | unit vectors in `R^n`          | `arccos⟨x, y⟩`                   |
//! | Lorentz    | upper sheet of `⟨x,x⟩_L = -1`  | `arcosh(-⟨x, y⟩_L)`              |
//!
//! All functions are pure. Checked entry points validate dimensions and
//! membership; the `*_raw` kernels used by the trainer skip validation.

mod conic;
pub mod poincare;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::consts::{
    DEGENERATE_SQ, IDEMPOTENT_SLACK, MAX_POLYHEDRAL_DIM, MEMBERSHIP_TOL, SHORT_VECTOR, TANGENT_TOL,
};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Euclidean,
    Polyhedral,
    Sphere,
    Lorentz,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 4] = [
        GeometryKind::Euclidean,
        GeometryKind::Polyhedral,
        GeometryKind::Sphere,
        GeometryKind::Lorentz,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GeometryKind::Euclidean => "euclidean",
            GeometryKind::Polyhedral => "polyhedral",
            GeometryKind::Sphere => "sphere",
            GeometryKind::Lorentz => "lorentz",
        }
    }

    /// Whether the distance is symmetric (a true metric).
    pub fn is_metric(self) -> bool {
        !matches!(self, GeometryKind::Polyhedral)
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(GeometryKind::Euclidean),
            "polyhedral" => Ok(GeometryKind::Polyhedral),
            "sphere" | "spherical" => Ok(GeometryKind::Sphere),
            "lorentz" | "hyperbolic" => Ok(GeometryKind::Lorentz),
            other => Err(invalid(format!("unknown geometry {other:?}"))),
        }
    }
}

/// Which argument of `d(x, y)` a gradient is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wrt {
    First,
    Second,
}

/// A point of a [`QuasiMetricSpace`], in ambient coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ManifoldPoint(Vec<f64>);

impl ManifoldPoint {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        ManifoldPoint(coords)
    }
}

impl AsRef<[f64]> for ManifoldPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A tangent vector in ambient coordinates. Its base point is whichever point
/// it was computed for; tangency is checked where it is consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(Vec<f64>);

impl TangentVector {
    pub fn new(coords: Vec<f64>) -> Self {
        TangentVector(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, factor: f64) -> TangentVector {
        TangentVector(self.0.iter().map(|v| v * factor).collect())
    }
}

/// A geometry tag plus the parameters needed to evaluate it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiMetricSpace {
    kind: GeometryKind,
    dim: usize,
    generators: Vec<Vec<f64>>,
    /// Orthonormal basis of `span(W)` when it is a proper subspace of `R^dim`.
    subspace: Option<Vec<Vec<f64>>>,
}

impl QuasiMetricSpace {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("euclidean space needs dim >= 1"));
        }
        Ok(Self::plain(GeometryKind::Euclidean, dim))
    }

    /// Unit sphere embedded in `coords` ambient coordinates (`S^{coords-1}`).
    pub fn sphere(coords: usize) -> Result<Self> {
        if coords < 2 {
            return Err(invalid("sphere needs at least 2 ambient coordinates"));
        }
        Ok(Self::plain(GeometryKind::Sphere, coords))
    }

    /// Hyperbolic space `L^n`, stored with `n + 1` coordinates.
    pub fn lorentz(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("lorentz space needs n >= 1"));
        }
        Ok(Self::plain(GeometryKind::Lorentz, n + 1))
    }

    /// Polyhedral quasi-metric on all of `R^n`; requires `coni(W) = R^n`.
    pub fn polyhedral(generators: Vec<Vec<f64>>) -> Result<Self> {
        let space = Self::polyhedral_on_span(generators)?;
        if space.subspace.is_some() {
            return Err(invalid(
                "conic hull of generators is a proper subspace, not the whole space",
            ));
        }
        Ok(space)
    }

    /// Polyhedral quasi-metric on `span(W)`; requires `coni(W) = span(W)`.
    /// Points and tangent vectors are confined to the span.
    pub fn polyhedral_on_span(generators: Vec<Vec<f64>>) -> Result<Self> {
        let dim = generators
            .first()
            .map(Vec::len)
            .ok_or_else(|| invalid("polyhedral space needs at least one generator"))?;
        if dim == 0 || dim > MAX_POLYHEDRAL_DIM {
            return Err(invalid(format!(
                "polyhedral dimension must be in 1..={MAX_POLYHEDRAL_DIM}, got {dim}"
            )));
        }
        if generators.iter().any(|w| w.len() != dim) {
            return Err(invalid("generators have inconsistent lengths"));
        }
        if generators.iter().flatten().any(|c| !c.is_finite()) {
            return Err(invalid("generators must be finite"));
        }
        if !conic::cone_is_subspace(&generators) {
            return Err(invalid(
                "conic hull of generators is not a linear space (some -w_i is not a nonnegative combination)",
            ));
        }
        let basis = conic::span_basis(&generators);
        if basis.is_empty() {
            return Err(invalid("generators are all zero"));
        }
        let subspace = (basis.len() < dim).then_some(basis);
        Ok(QuasiMetricSpace {
            kind: GeometryKind::Polyhedral,
            dim,
            generators,
            subspace,
        })
    }

    /// Polyhedral space whose generators are the `n + 1` vertices of a regular
    /// simplex centered at the origin of `R^n`. This is the zero-sum hyperplane
    /// geometry of Order Embeddings written in an orthonormal basis.
    pub fn polyhedral_simplex(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("simplex polyhedral space needs n >= 1"));
        }
        // Helmert basis h_k = (1, .., 1, -k, 0, ..) / sqrt(k (k + 1)), k = 1..=n.
        let generators = (0..=n)
            .map(|j| {
                (1..=n)
                    .map(|k| {
                        let norm = ((k * (k + 1)) as f64).sqrt();
                        match j.cmp(&k) {
                            std::cmp::Ordering::Less => 1.0 / norm,
                            std::cmp::Ordering::Equal => -(k as f64) / norm,
                            std::cmp::Ordering::Greater => 0.0,
                        }
                    })
                    .collect()
            })
            .collect();
        Self::polyhedral(generators)
    }

    /// Default space for a kind; polyhedral uses [`Self::polyhedral_simplex`].
    /// `dim` is the CLI convention: ambient coordinates for the sphere,
    /// intrinsic dimension otherwise.
    pub fn from_kind(kind: GeometryKind, dim: usize) -> Result<Self> {
        match kind {
            GeometryKind::Euclidean => Self::euclidean(dim),
            GeometryKind::Polyhedral => Self::polyhedral_simplex(dim),
            GeometryKind::Sphere => Self::sphere(dim),
            GeometryKind::Lorentz => Self::lorentz(dim),
        }
    }

    fn plain(kind: GeometryKind, dim: usize) -> Self {
        QuasiMetricSpace {
            kind,
            dim,
            generators: Vec::new(),
            subspace: None,
        }
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    /// Ambient coordinate count.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn is_symmetric(&self) -> bool {
        self.kind.is_metric()
    }

    /// Origin, north pole `e_0`, or the hyperboloid apex `(1, 0, .., 0)`.
    pub fn base_point(&self) -> ManifoldPoint {
        let mut coords = vec![0.0; self.dim];
        if matches!(self.kind, GeometryKind::Sphere | GeometryKind::Lorentz) {
            coords[0] = 1.0;
        }
        ManifoldPoint(coords)
    }

    /// Validates `coords` and wraps them as a point of this space.
    pub fn point(&self, coords: Vec<f64>) -> Result<ManifoldPoint> {
        self.check_member(&coords)?;
        Ok(ManifoldPoint(coords))
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(invalid(format!(
                "dimension mismatch: expected {} coordinates, got {}",
                self.dim,
                v.len()
            )));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(invalid("coordinates must be finite"));
        }
        Ok(())
    }

    /// Membership residual: how far `x` is from satisfying the space invariant.
    pub fn membership_residual(&self, x: &[f64]) -> f64 {
        match self.kind {
            GeometryKind::Euclidean => 0.0,
            GeometryKind::Polyhedral => match &self.subspace {
                None => 0.0,
                Some(basis) => {
                    let proj = project_onto(basis, x);
                    let off = x
                        .iter()
                        .zip(&proj)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    off / norm(x).max(1.0)
                }
            },
            GeometryKind::Sphere => (norm(x) - 1.0).abs(),
            GeometryKind::Lorentz => {
                if x[0] <= 0.0 {
                    return f64::INFINITY;
                }
                (minkowski(x, x) + 1.0).abs() / (x[0] * x[0]).max(1.0)
            }
        }
    }

    pub fn check_member(&self, x: &[f64]) -> Result<()> {
        self.check_dim(x)?;
        let r = self.membership_residual(x);
        if r > MEMBERSHIP_TOL {
            return Err(invalid(format!(
                "point is not on the {} manifold (residual {r:e})",
                self.kind
            )));
        }
        Ok(())
    }

    fn check_tangent(&self, x: &[f64], v: &[f64]) -> Result<()> {
        self.check_dim(v)?;
        let (inner, scale) = match self.kind {
            GeometryKind::Euclidean => return Ok(()),
            GeometryKind::Polyhedral => {
                if self.membership_residual(v) > MEMBERSHIP_TOL {
                    return Err(invalid("tangent vector leaves the generator span"));
                }
                return Ok(());
            }
            GeometryKind::Sphere => (dot(x, v), norm(v)),
            GeometryKind::Lorentz => (minkowski(x, v), norm(x) * norm(v)),
        };
        if inner.abs() > TANGENT_TOL * scale.max(1.0) {
            return Err(invalid(format!(
                "vector is not tangent at the base point (inner product {inner:e})"
            )));
        }
        Ok(())
    }

    pub fn distance(&self, x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
        self.check_member(&x.0)?;
        self.check_member(&y.0)?;
        Ok(self.distance_raw(&x.0, &y.0))
    }

    /// Riemannian gradient (or polyhedral subgradient) of `d(x, y)` with respect
    /// to the chosen argument, as a tangent vector at that argument.
    pub fn distance_grad(
        &self,
        x: &ManifoldPoint,
        y: &ManifoldPoint,
        wrt: Wrt,
    ) -> Result<TangentVector> {
        self.check_member(&x.0)?;
        self.check_member(&y.0)?;
        let mut out = vec![0.0; self.dim];
        if self.distance_grad_raw(&x.0, &y.0, wrt, &mut out) {
            Ok(TangentVector(out))
        } else {
            Err(Error::DegenerateGradient)
        }
    }

    pub fn exp_map(&self, x: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
        self.check_member(&x.0)?;
        self.check_tangent(&x.0, &v.0)?;
        let mut out = x.0.clone();
        self.exp_map_raw(&mut out, &v.0);
        Ok(ManifoldPoint(out))
    }

    pub fn project_to_manifold(&self, p: &[f64]) -> Result<ManifoldPoint> {
        self.check_dim(p)?;
        let mut out = p.to_vec();
        if !self.project_raw(&mut out) {
            return Err(Error::DegenerateInput(
                "cannot project the zero vector onto the sphere".into(),
            ));
        }
        Ok(ManifoldPoint(out))
    }

    pub fn tangent_project(&self, x: &ManifoldPoint, g: &[f64]) -> Result<TangentVector> {
        self.check_member(&x.0)?;
        self.check_dim(g)?;
        let mut out = g.to_vec();
        self.tangent_project_raw(&x.0, &mut out);
        Ok(TangentVector(out))
    }

    // ---- unchecked kernels ----

    pub(crate) fn distance_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        // Exact zero for identical points; arccos/arcosh near 1 would give ~1e-8.
        if x == y {
            return 0.0;
        }
        match self.kind {
            GeometryKind::Euclidean => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            GeometryKind::Polyhedral => {
                let (_, best) = self.polyhedral_argmax(x, y);
                best
            }
            GeometryKind::Sphere => dot(x, y).clamp(-1.0, 1.0).acos(),
            GeometryKind::Lorentz => (-minkowski(x, y)).max(1.0).acosh(),
        }
    }

    /// Lowest-index maximiser of `w_iᵀ(x - y)` and the maximum.
    fn polyhedral_argmax(&self, x: &[f64], y: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, w) in self.generators.iter().enumerate() {
            let s: f64 = w.iter().zip(x.iter().zip(y)).map(|(w, (a, b))| w * (a - b)).sum();
            if s > best.1 {
                best = (i, s);
            }
        }
        best
    }

    /// Writes the gradient into `out`; returns false when it is undefined.
    pub(crate) fn distance_grad_raw(&self, x: &[f64], y: &[f64], wrt: Wrt, out: &mut [f64]) -> bool {
        if self.kind == GeometryKind::Polyhedral {
            let (i, _) = self.polyhedral_argmax(x, y);
            let sign = if wrt == Wrt::First { 1.0 } else { -1.0 };
            for (o, w) in out.iter_mut().zip(&self.generators[i]) {
                *o = sign * w;
            }
            return true;
        }
        // Symmetric spaces: the gradient at `at` points away from `other`.
        let (at, other) = match wrt {
            Wrt::First => (x, y),
            Wrt::Second => (y, x),
        };
        match self.kind {
            GeometryKind::Euclidean => {
                for ((o, a), b) in out.iter_mut().zip(at).zip(other) {
                    *o = a - b;
                }
                let n2 = dot(out, out);
                if n2 <= DEGENERATE_SQ {
                    return false;
                }
                let n = n2.sqrt();
                out.iter_mut().for_each(|o| *o /= n);
            }
            GeometryKind::Sphere => {
                let c = dot(at, other);
                for ((o, a), b) in out.iter_mut().zip(at).zip(other) {
                    *o = b - c * a;
                }
                let n2 = dot(out, out);
                if n2 <= DEGENERATE_SQ {
                    return false;
                }
                let n = n2.sqrt();
                out.iter_mut().for_each(|o| *o /= -n);
            }
            GeometryKind::Lorentz => {
                let c = minkowski(at, other);
                for ((o, a), b) in out.iter_mut().zip(at).zip(other) {
                    *o = b + c * a;
                }
                let n2 = minkowski(out, out);
                if n2 <= DEGENERATE_SQ {
                    return false;
                }
                let n = n2.sqrt();
                out.iter_mut().for_each(|o| *o /= -n);
            }
            GeometryKind::Polyhedral => unreachable!(),
        }
        true
    }

    /// `x <- exp_x(v)` followed by projection onto the manifold.
    pub(crate) fn exp_map_raw(&self, x: &mut [f64], v: &[f64]) {
        match self.kind {
            GeometryKind::Euclidean | GeometryKind::Polyhedral => {
                for (a, b) in x.iter_mut().zip(v) {
                    *a += b;
                }
            }
            GeometryKind::Sphere => {
                let n = norm(v);
                if n < SHORT_VECTOR {
                    return;
                }
                let (s, c) = n.sin_cos();
                for (a, b) in x.iter_mut().zip(v) {
                    *a = *a * c + b / n * s;
                }
            }
            GeometryKind::Lorentz => {
                let n = minkowski(v, v).max(0.0).sqrt();
                if n < SHORT_VECTOR {
                    return;
                }
                let (s, c) = (n.sinh(), n.cosh());
                for (a, b) in x.iter_mut().zip(v) {
                    *a = *a * c + b / n * s;
                }
            }
        }
        self.project_raw(x);
    }

    /// Returns false only for the zero vector on the sphere.
    pub(crate) fn project_raw(&self, p: &mut [f64]) -> bool {
        match self.kind {
            GeometryKind::Euclidean => {}
            GeometryKind::Polyhedral => {
                if let Some(basis) = &self.subspace {
                    let proj = project_onto(basis, p);
                    // Leave points already in the span alone so projection is idempotent.
                    let off = p.iter().zip(&proj).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    if off > IDEMPOTENT_SLACK * norm(p).max(1.0) {
                        p.copy_from_slice(&proj);
                    }
                }
            }
            GeometryKind::Sphere => {
                let n = norm(p);
                if n == 0.0 {
                    return false;
                }
                if (n - 1.0).abs() > IDEMPOTENT_SLACK {
                    p.iter_mut().for_each(|c| *c /= n);
                }
            }
            GeometryKind::Lorentz => {
                let spatial: f64 = p[1..].iter().map(|c| c * c).sum();
                p[0] = (1.0 + spatial).sqrt();
            }
        }
        true
    }

    pub(crate) fn tangent_project_raw(&self, x: &[f64], g: &mut [f64]) {
        match self.kind {
            GeometryKind::Euclidean => {}
            GeometryKind::Polyhedral => {
                self.project_raw(g);
            }
            GeometryKind::Sphere => {
                let c = dot(x, g);
                for (a, b) in g.iter_mut().zip(x) {
                    *a -= c * b;
                }
            }
            GeometryKind::Lorentz => {
                let c = minkowski(x, g);
                for (a, b) in g.iter_mut().zip(x) {
                    *a += c * b;
                }
            }
        }
    }

    /// Inner product of two tangent vectors under the space's metric.
    pub fn tangent_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        match self.kind {
            GeometryKind::Lorentz => minkowski(u, v),
            _ => dot(u, v),
        }
    }
}

fn project_onto(basis: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for b in basis {
        let c = dot(b, x);
        for (o, bi) in out.iter_mut().zip(b) {
            *o += c * bi;
        }
    }
    out
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minkowski bilinear form `-a_0 b_0 + Σ_{k>=1} a_k b_k`.
pub fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
}
