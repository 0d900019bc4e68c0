//! Convex bodies containing the origin in their interior.
//!
//! Every representation answers support and radial queries; smooth kinds
//! also expose derivatives of the 1-homogeneous support extension, used by
//! [`crate::geometry`]. All evaluations are pure functions of immutable body
//! data, so bodies can be shared freely across threads.

mod cap;
pub mod poly;
pub mod polytope;
pub mod search;
pub mod spec;
pub mod support_expr;

use serde::{Deserialize, Serialize};

pub use cap::CapBody;
pub use poly::Polynomial;
pub use polytope::Polytope;
pub use spec::BodySpec;
pub use support_expr::{DerivativeMode, SupportBody, SupportExpr};

use crate::error::{Error, Result};
use crate::linalg::{check_dim, check_unit, inverse, is_symmetric, spd_sqrt, unit_ball_volume, Matrix, Vector};
use crate::quadrature::{self, SphereRule};

/// Closed halfspace `{x : x·normal <= offset}` with unit normal and positive
/// offset (so the origin is strictly inside).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let h = Self { normal, offset };
        h.validate()?;
        Ok(h)
    }

    /// Normalizes `normal` and rescales `offset` accordingly.
    pub fn from_raw(normal: &Vector, offset: f64) -> Result<Self> {
        let norm = normal.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidBody("halfspace normal must be nonzero".into()));
        }
        Self::new(normal / norm, offset / norm)
    }

    pub fn validate(&self) -> Result<()> {
        if (self.normal.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidBody(format!("halfspace normal not unit (|v| = {})", self.normal.norm())));
        }
        if self.offset <= 0.0 || !self.offset.is_finite() {
            return Err(Error::InvalidBody(format!("halfspace offset must be positive, got {}", self.offset)));
        }
        Ok(())
    }

    /// `offset - normal·x`; nonnegative inside.
    pub fn slack(&self, x: &Vector) -> f64 {
        self.offset - self.normal.dot(x)
    }

    /// Image under `x ↦ A x`, given `A^{-T}`.
    pub fn mapped(&self, a_inv_t: &Matrix) -> Self {
        let w = a_inv_t * &self.normal;
        let norm = w.norm();
        Self { normal: w / norm, offset: self.offset / norm }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub radius: f64,
    pub dim: usize,
}

/// `A·Bⁿ` for symmetric positive definite `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    matrix: Matrix,
    shape: Matrix,
    inverse: Matrix,
    det: f64,
}

impl Ellipsoid {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::InvalidBody("ellipsoid matrix must be square with n >= 2".into()));
        }
        if !is_symmetric(&matrix, 1e-12) {
            return Err(Error::InvalidBody("ellipsoid matrix must be symmetric".into()));
        }
        let eig = matrix.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return Err(Error::InvalidBody("ellipsoid matrix must be positive definite".into()));
        }
        let inverse = inverse(&matrix)?;
        let shape = &matrix * &matrix;
        let det = matrix.determinant();
        Ok(Self { matrix, shape, inverse, det })
    }

    /// The ellipsoid `M·Bⁿ` for any invertible `M`.
    pub fn from_map(m: &Matrix) -> Result<Self> {
        inverse(m)?;
        Self::new(spd_sqrt(&(m * m.transpose()))?)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Lazily evaluated polar body `base*`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarBody {
    pub base: Box<ConvexBody>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    Support(SupportBody),
    Polytope(Polytope),
    Cap(CapBody),
    Polar(PolarBody),
}

impl ConvexBody {
    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || dim < 2 {
            return Err(Error::InvalidBody(format!("ball needs radius > 0 and n >= 2 (r = {radius}, n = {dim})")));
        }
        Ok(Self::Ball(Ball { radius, dim }))
    }

    pub fn ellipsoid(matrix: Matrix) -> Result<Self> {
        Ok(Self::Ellipsoid(Ellipsoid::new(matrix)?))
    }

    pub fn ellipsoid_diag(axes: &[f64]) -> Result<Self> {
        Self::ellipsoid(Matrix::from_diagonal(&Vector::from_row_slice(axes)))
    }

    pub fn support_body(dim: usize, expr: SupportExpr) -> Result<Self> {
        Self::from_support(SupportBody::new(dim, expr)?)
    }

    pub fn from_support(body: SupportBody) -> Result<Self> {
        let k = Self::Support(body);
        k.check_origin_interior()?;
        Ok(k)
    }

    pub fn lnorm(dim: usize, s: u32) -> Result<Self> {
        Self::support_body(dim, SupportExpr::LNorm { s })
    }

    pub fn perturbed_ball(dim: usize, eps: f64, poly: &str) -> Result<Self> {
        Self::support_body(dim, SupportExpr::PerturbedBall { eps, poly: Polynomial::parse(poly, dim)? })
    }

    pub fn polytope_from_vertices(points: Vec<Vector>) -> Result<Self> {
        Ok(Self::Polytope(Polytope::from_vertices(points)?))
    }

    pub fn capped(base: ConvexBody, caps: Vec<Halfspace>) -> Result<Self> {
        Ok(Self::Cap(CapBody::new(base, caps)?))
    }

    /// The square `[-a, a]²`.
    pub fn square(a: f64) -> Result<Self> {
        let v = |x: f64, y: f64| Vector::from_row_slice(&[x, y]);
        Self::polytope_from_vertices(vec![v(a, a), v(-a, a), v(-a, -a), v(a, -a)])
    }

    /// The cube `[-a, a]³`.
    pub fn cube(a: f64) -> Result<Self> {
        let mut pts = Vec::with_capacity(8);
        for x in [-a, a] {
            for y in [-a, a] {
                for z in [-a, a] {
                    pts.push(Vector::from_row_slice(&[x, y, z]));
                }
            }
        }
        Self::polytope_from_vertices(pts)
    }

    /// The unit ball of the ℓ¹ norm in dimension `n ∈ {2, 3}`.
    pub fn cross_polytope(dim: usize) -> Result<Self> {
        let mut pts = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut p = Vector::zeros(dim);
                p[i] = s;
                pts.push(p);
            }
        }
        Self::polytope_from_vertices(pts)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball(b) => b.dim,
            Self::Ellipsoid(e) => e.dim(),
            Self::Support(s) => s.dim,
            Self::Polytope(p) => p.dim(),
            Self::Cap(c) => c.dim(),
            Self::Polar(p) => p.base.dim(),
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            Self::Ball(_) => "ball".into(),
            Self::Ellipsoid(_) => "ellipsoid".into(),
            Self::Support(_) => "support body".into(),
            Self::Polytope(_) => "polytope".into(),
            Self::Cap(_) => "capped body".into(),
            Self::Polar(p) => format!("polar of {}", p.base.kind_name()),
        }
    }

    /// True for representations with a twice differentiable support
    /// function: balls, ellipsoids, catalog support bodies and polars of those.
    pub fn is_smooth(&self) -> bool {
        match self {
            Self::Ball(_) | Self::Ellipsoid(_) | Self::Support(_) => true,
            Self::Polytope(_) | Self::Cap(_) => false,
            Self::Polar(p) => p.base.is_smooth(),
        }
    }

    /// True when the body is an ellipsoid centered at the origin.
    pub fn is_ellipsoid(&self) -> bool {
        match self {
            Self::Ball(_) | Self::Ellipsoid(_) => true,
            Self::Support(s) => s.is_centered_ellipsoid(),
            Self::Polar(p) => p.base.is_ellipsoid(),
            _ => false,
        }
    }

    /// True when some part of the boundary is flat with positive area
    /// (polytopes and capped bodies with an active cap).
    pub fn has_facets(&self) -> bool {
        match self {
            Self::Polytope(_) => true,
            Self::Cap(c) => c.has_active_cap(),
            _ => false,
        }
    }

    /// Support function `h(K, u)` at a unit direction.
    pub fn support(&self, u: &Vector) -> Result<f64> {
        check_dim(u, self.dim())?;
        check_unit(u)?;
        self.support_ext(u)
    }

    /// The 1-homogeneous extension `H(z) = |z|·h(K, z/|z|)`.
    pub fn support_ext(&self, z: &Vector) -> Result<f64> {
        match self {
            Self::Ball(b) => Ok(b.radius * z.norm()),
            Self::Ellipsoid(e) => Ok(z.dot(&(&e.shape * z)).sqrt()),
            Self::Support(s) => Ok(s.value(z)),
            Self::Polytope(p) => Ok(p.support_ext(z)),
            Self::Cap(c) => c.support_ext(z),
            Self::Polar(p) => p.base.gauge(z),
        }
    }

    /// Radial function `ρ(K, u)` at a unit direction.
    pub fn radial(&self, u: &Vector) -> Result<f64> {
        check_dim(u, self.dim())?;
        check_unit(u)?;
        Ok(1.0 / self.gauge(u)?)
    }

    /// Gauge (Minkowski functional) `|z| / ρ(K, z/|z|)`; equals the support
    /// extension of the polar body.
    pub fn gauge(&self, z: &Vector) -> Result<f64> {
        match self {
            Self::Ball(b) => Ok(z.norm() / b.radius),
            Self::Ellipsoid(e) => Ok((&e.inverse * z).norm()),
            Self::Support(s) => {
                let r = z.norm();
                let u = z / r;
                let sol = search::radial_from_support(&u, |w| s.value(w), |w| s.derivatives(w))?;
                Ok(r / sol.value)
            }
            Self::Polytope(p) => Ok(1.0 / p.radial_ext(z)),
            Self::Cap(c) => c.gauge(z),
            Self::Polar(p) => p.base.support_ext(z),
        }
    }

    /// Exterior unit normal at the boundary point `ρ(K,u)·u`, for bodies that
    /// are smooth there.
    pub fn normal_at_radial(&self, u: &Vector) -> Result<Vector> {
        check_dim(u, self.dim())?;
        check_unit(u)?;
        match self {
            Self::Ball(_) => Ok(u.clone()),
            Self::Ellipsoid(e) => Ok((&e.inverse * &e.inverse * u).normalize()),
            Self::Support(s) => Ok(search::radial_from_support(u, |w| s.value(w), |w| s.derivatives(w))?.normal),
            Self::Polar(p) => Ok(crate::geometry::gradient_map(&p.base, u)?.normalize()),
            Self::Polytope(_) | Self::Cap(_) => {
                crate::geometry::gauge_gradient_fd(self, &(u * self.radial(u)?)).map(|g| g.normalize())
            }
        }
    }

    /// Value, gradient and Hessian of the support extension where the
    /// representation provides them in closed form.
    pub fn analytic_support_derivatives(&self, z: &Vector) -> Option<(f64, Vector, Matrix)> {
        match self {
            Self::Ball(b) => {
                let r = z.norm();
                let n = z.len();
                let hess = (Matrix::identity(n, n) - z * z.transpose() / (r * r)) * (b.radius / r);
                Some((b.radius * r, z * (b.radius / r), hess))
            }
            Self::Ellipsoid(e) => {
                let qz = &e.shape * z;
                let h = z.dot(&qz).sqrt();
                let hess = &e.shape / h - (&qz * qz.transpose()) / h.powi(3);
                Some((h, qz / h, hess))
            }
            Self::Support(s) if s.mode == DerivativeMode::Analytic => Some(s.derivatives(z)),
            _ => None,
        }
    }

    /// The polar body `K* = {x : x·y <= 1 for all y ∈ K}`.
    pub fn polar(&self) -> ConvexBody {
        match self {
            Self::Ball(b) => Self::Ball(Ball { radius: 1.0 / b.radius, dim: b.dim }),
            Self::Ellipsoid(e) => Self::Ellipsoid(
                Ellipsoid::new(e.inverse.clone()).expect("inverse of an SPD matrix is SPD"),
            ),
            Self::Polytope(p) => Self::Polytope(p.polar()),
            Self::Support(_) | Self::Cap(_) => Self::Polar(PolarBody { base: Box::new(self.clone()) }),
            Self::Polar(p) => (*p.base).clone(),
        }
    }

    /// The image `A·K`.
    pub fn apply_linear(&self, a: &Matrix) -> Result<ConvexBody> {
        let n = self.dim();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.nrows() });
        }
        let a_inv = inverse(a)?;
        Ok(match self {
            Self::Ball(b) => Self::Ellipsoid(Ellipsoid::from_map(&(a * b.radius))?),
            Self::Ellipsoid(e) => Self::Ellipsoid(Ellipsoid::from_map(&(a * &e.matrix))?),
            Self::Support(s) => Self::Support(s.mapped(a)),
            Self::Polytope(p) => Self::Polytope(p.apply_linear(a)?),
            Self::Cap(c) => Self::Cap(c.apply_linear(a)?),
            // (A K)* = A^{-T} K*
            Self::Polar(p) => Self::Polar(PolarBody { base: Box::new(p.base.apply_linear(&a_inv.transpose())?) }),
        })
    }

    /// Translate by `t`; the origin must stay interior.
    pub fn translated(&self, t: &Vector) -> Result<ConvexBody> {
        check_dim(t, self.dim())?;
        if t.amax() == 0.0 {
            return Ok(self.clone());
        }
        let out = match self {
            Self::Ball(_) | Self::Ellipsoid(_) => {
                let shape = match self {
                    Self::Ball(b) => Matrix::identity(b.dim, b.dim) * (b.radius * b.radius),
                    Self::Ellipsoid(e) => e.shape.clone(),
                    _ => unreachable!(),
                };
                let body = SupportBody::new(self.dim(), SupportExpr::QForm { matrix: shape })?;
                Self::Support(body.translated(t))
            }
            Self::Support(s) => Self::Support(s.translated(t)),
            Self::Polytope(p) => Self::Polytope(p.translated(t)?),
            Self::Cap(c) => Self::Cap(c.translated(t)?),
            Self::Polar(_) => {
                return Err(Error::Unsupported { op: "translate", kind: self.kind_name() });
            }
        };
        out.check_origin_interior()?;
        Ok(out)
    }

    /// `(|K|, centroid)`. Closed forms for balls, ellipsoids and polytopes;
    /// otherwise cone-measure quadrature at the default rule for the
    /// dimension.
    pub fn volume_and_centroid(&self) -> Result<(f64, Vector)> {
        let n = self.dim();
        match self {
            Self::Ball(b) => Ok((unit_ball_volume(n) * b.radius.powi(n as i32), Vector::zeros(n))),
            Self::Ellipsoid(e) => Ok((unit_ball_volume(n) * e.det, Vector::zeros(n))),
            Self::Polytope(p) => Ok(p.volume_and_centroid()),
            _ => self.volume_and_centroid_with(&SphereRule::default_for(n)?),
        }
    }

    /// As [`Self::volume_and_centroid`] but with an explicit rule for the
    /// quadrature-based kinds.
    pub fn volume_and_centroid_with(&self, rule: &SphereRule) -> Result<(f64, Vector)> {
        match self {
            Self::Ball(_) | Self::Ellipsoid(_) | Self::Polytope(_) => self.volume_and_centroid(),
            _ => {
                let n = self.dim() as f64;
                let (mass, moment) = quadrature::cone_moments(self, rule)?;
                let volume = mass / n;
                Ok((volume, moment / ((n + 1.0) * volume)))
            }
        }
    }

    pub fn volume(&self) -> Result<f64> {
        Ok(self.volume_and_centroid()?.0)
    }

    /// Translate so that the centroid sits at the origin.
    pub fn center_at_centroid(&self) -> Result<ConvexBody> {
        if matches!(self, Self::Ball(_) | Self::Ellipsoid(_)) {
            return Ok(self.clone());
        }
        let (_, c) = self.volume_and_centroid()?;
        if c.amax() <= 1e-12 {
            return Ok(self.clone());
        }
        self.translated(&(-c))
    }

    /// Checks `h(K,u) > 0` and `ρ(K,u) > 0` at probe directions.
    pub fn check_origin_interior(&self) -> Result<()> {
        for u in search::coarse_directions(self.dim()) {
            let h = self.support_ext(&u)?;
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidBody(format!(
                    "origin not interior: support {h} at direction {:?}",
                    u.as_slice()
                )));
            }
        }
        Ok(())
    }
}
