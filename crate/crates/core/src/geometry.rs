//! Curvature calculus on the unit sphere.
//!
//! Everything is derived from the 1-homogeneous support extension `H` of a
//! smooth body: the boundary point with exterior normal `u` is `∇H(u)` and
//! the curvature function is the determinant of the Hessian of `H` restricted
//! to `u^⊥`.

use serde::Serialize;

use crate::bodies::{ConvexBody, DerivativeMode};
use crate::error::{Error, Result};
use crate::linalg::{check_dim, check_unit, tangent_basis, Matrix, Vector};

/// Central-difference step on tangent coordinates.
pub const FD_STEP: f64 = 1e-4;
/// `f <= FLAT_TOL · h^{n-1}` marks a flat normal direction.
pub const FLAT_TOL: f64 = 1e-10;
/// `f < -NONCONVEX_TOL · h^{n-1}` is reported as a non-convex body.
pub const NONCONVEX_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPointData {
    pub u: Vector,
    pub x: Vector,
    pub h: f64,
    pub f: f64,
    pub alpha: f64,
    pub kappa0: f64,
    pub flat: bool,
}

/// Support value, gradient and tangential Hessian at a unit direction.
struct Jet {
    h: f64,
    x: Vector,
    hess: Matrix,
}

fn smooth_kind(k: &ConvexBody) -> Result<()> {
    if k.is_smooth() {
        Ok(())
    } else {
        Err(Error::Unsupported { op: "curvature", kind: k.kind_name() })
    }
}

fn jet(k: &ConvexBody, u: &Vector) -> Result<Jet> {
    check_dim(u, k.dim())?;
    check_unit(u)?;
    smooth_kind(k)?;
    let e = tangent_basis(u);
    if let Some((h, g, hess)) = k.analytic_support_derivatives(u) {
        return Ok(Jet { h, x: g, hess: e.transpose() * hess * &e });
    }
    let value = |z: &Vector| k.support_ext(z);
    fd_jet(u, &e, value)
}

fn fd_jet<F>(u: &Vector, e: &Matrix, value: F) -> Result<Jet>
where
    F: Fn(&Vector) -> Result<f64>,
{
    let m = e.ncols();
    let d = FD_STEP;
    let at = |s: &[(usize, f64)]| -> Result<f64> {
        let mut z = u.clone();
        for &(i, t) in s {
            z += e.column(i) * t;
        }
        value(&z)
    };
    let h0 = value(u)?;
    let mut grad = Vector::zeros(m);
    let mut hess = Matrix::zeros(m, m);
    for i in 0..m {
        let p = at(&[(i, d)])?;
        let q = at(&[(i, -d)])?;
        grad[i] = (p - q) / (2.0 * d);
        hess[(i, i)] = (p - 2.0 * h0 + q) / (d * d);
        for j in 0..i {
            let pp = at(&[(i, d), (j, d)])?;
            let pm = at(&[(i, d), (j, -d)])?;
            let mp = at(&[(i, -d), (j, d)])?;
            let mm = at(&[(i, -d), (j, -d)])?;
            let v = (pp - pm - mp + mm) / (4.0 * d * d);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(Jet { h: h0, x: u * h0 + e * grad, hess })
}

/// Boundary point `x(u) = ∇H(u)` with exterior normal `u`.
pub fn gradient_map(k: &ConvexBody, u: &Vector) -> Result<Vector> {
    Ok(jet(k, u)?.x)
}

fn classify(h: f64, f: f64, n: usize) -> Result<(f64, bool)> {
    let scale = h.powi(n as i32 - 1);
    if !f.is_finite() {
        return Err(Error::NonConvex { value: f });
    }
    if f < -NONCONVEX_TOL * scale {
        return Err(Error::NonConvex { value: f });
    }
    if f <= FLAT_TOL * scale {
        return Ok((0.0, true));
    }
    Ok((f, false))
}

/// Curvature function `f(K, u)`, the product of the principal radii of
/// curvature at `x(u)`. Values within the flat tolerance are clamped to 0.
pub fn curvature_function(k: &ConvexBody, u: &Vector) -> Result<f64> {
    Ok(boundary_point_data(k, u)?.f)
}

pub fn alpha(k: &ConvexBody, u: &Vector) -> Result<f64> {
    Ok(boundary_point_data(k, u)?.alpha)
}

/// `κ₀` at `x(u)`: `1/α` when `f > 0`, and 0 in flat directions.
pub fn kappa0(k: &ConvexBody, u: &Vector) -> Result<f64> {
    Ok(boundary_point_data(k, u)?.kappa0)
}

pub fn boundary_point_data(k: &ConvexBody, u: &Vector) -> Result<BoundaryPointData> {
    let j = jet(k, u)?;
    let n = u.len();
    let raw = if j.hess.nrows() == 1 { j.hess[(0, 0)] } else { j.hess.determinant() };
    let (f, mut flat) = classify(j.h, raw, n)?;
    let mut alpha = j.h.powi(n as i32 + 1) * f;
    if alpha < 1e-300 {
        alpha = 0.0;
        flat = true;
    }
    let kappa0 = if flat { 0.0 } else { 1.0 / alpha };
    Ok(BoundaryPointData { u: u.clone(), x: j.x, h: j.h, f: if flat { 0.0 } else { f }, alpha, kappa0, flat })
}

/// Jacobian of `u ↦ ρ(K*, u)·u` from the sphere onto `∂K*`:
/// `ρ(K*,u)^{n-1} / (u·n*)` with `n*` the exterior normal of `K*` there.
pub fn radial_jacobian(k: &ConvexBody, u: &Vector) -> Result<f64> {
    let polar = k.polar();
    let rho = polar.radial(u)?;
    let normal = polar.normal_at_radial(u)?;
    let c = u.dot(&normal);
    if !(c > 0.0) {
        return Err(Error::InvalidBody(format!("degenerate normal at radial point (u·n = {c})")));
    }
    Ok(rho.powi(u.len() as i32 - 1) / c)
}

/// Finite-difference gradient of the gauge at `x`; the normal direction of
/// the boundary at smooth boundary points.
pub fn gauge_gradient_fd(k: &ConvexBody, x: &Vector) -> Result<Vector> {
    let n = x.len();
    let d = FD_STEP * x.norm();
    let mut g = Vector::zeros(n);
    for i in 0..n {
        let mut p = x.clone();
        let mut q = x.clone();
        p[i] += d;
        q[i] -= d;
        g[i] = (k.gauge(&p)? - k.gauge(&q)?) / (2.0 * d);
    }
    Ok(g)
}

/// Boundary data of a support body from analytic derivatives and from
/// central differences.
pub fn compare_fd(k: &ConvexBody, u: &Vector) -> Result<(BoundaryPointData, BoundaryPointData)> {
    match k {
        ConvexBody::Support(s) => {
            let fd = ConvexBody::Support(s.clone().with_mode(DerivativeMode::FiniteDifference));
            Ok((boundary_point_data(k, u)?, boundary_point_data(&fd, u)?))
        }
        other => Err(Error::Unsupported { op: "finite-difference comparison", kind: other.kind_name() }),
    }
}
