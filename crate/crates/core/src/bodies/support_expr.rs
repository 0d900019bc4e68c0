//! Smooth bodies given by a catalog support expression, optionally mapped by
//! a linear transformation and translated. The stored support extension is
//!
//! `H(z) = H_expr(Mᵀ z) + t·z`
//!
//! which is the support function of `M·K_expr + t`.

use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, spd_sqrt, Matrix, Vector};

/// Support function expressions from the fixed catalog.
#[derive(Clone, Debug, PartialEq)]
pub enum SupportExpr {
    /// `h(u) = (Σ u_i^s)^{1/s}` for an even integer `s >= 2`; the body is the
    /// unit ball of the dual `ℓ^{s/(s-1)}` norm.
    LNorm { s: u32 },
    /// `h(u) = sqrt(uᵀ Q u)` for symmetric positive definite `Q`.
    QForm { matrix: Matrix },
    /// `h(u) = 1 + eps·P(u)` on the sphere, extended 1-homogeneously.
    PerturbedBall { eps: f64, poly: Polynomial },
}

/// How geometry obtains derivatives of a support expression.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    #[default]
    Analytic,
    FiniteDifference,
}

impl SupportExpr {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            SupportExpr::LNorm { s } => {
                if *s < 2 || s % 2 != 0 {
                    return Err(Error::InvalidBody(format!("lnorm exponent must be an even integer >= 2, got {s}")));
                }
            }
            SupportExpr::QForm { matrix } => {
                if matrix.nrows() != dim || !is_symmetric(matrix, 1e-12) {
                    return Err(Error::InvalidBody("qform matrix must be symmetric n×n".into()));
                }
                spd_sqrt(matrix)?;
            }
            SupportExpr::PerturbedBall { eps, poly } => {
                if !eps.is_finite() {
                    return Err(Error::InvalidBody("perturbation eps must be finite".into()));
                }
                if poly.dim != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: poly.dim });
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, z: &Vector) -> f64 {
        match self {
            SupportExpr::LNorm { s } => {
                let m = z.amax();
                if m == 0.0 {
                    return 0.0;
                }
                let sum: f64 = z.iter().map(|&x| (x / m).powi(*s as i32)).sum();
                m * sum.powf(1.0 / *s as f64)
            }
            SupportExpr::QForm { matrix } => z.dot(&(matrix * z)).sqrt(),
            SupportExpr::PerturbedBall { eps, poly } => {
                let r = z.norm();
                let pert: f64 = poly
                    .terms
                    .iter()
                    .map(|m| m.eval(z) * r.powi(1 - m.degree() as i32))
                    .sum();
                r + eps * pert
            }
        }
    }

    /// Value, gradient and Hessian of the 1-homogeneous extension at `z ≠ 0`.
    pub fn derivatives(&self, z: &Vector) -> (f64, Vector, Matrix) {
        let n = z.len();
        match self {
            SupportExpr::LNorm { s } => {
                let s_i = *s as i32;
                let sf = *s as f64;
                let m = z.amax();
                let w = z / m;
                let sum: f64 = w.iter().map(|&x| x.powi(s_i)).sum();
                let value = m * sum.powf(1.0 / sf);
                let a = sum.powf((1.0 - sf) / sf);
                let b = sum.powf((1.0 - 2.0 * sf) / sf);
                let grad = w.map(|x| x.powi(s_i - 1) * a);
                let w1 = w.map(|x| x.powi(s_i - 1));
                let mut hess = -(&w1 * w1.transpose()) * b;
                for i in 0..n {
                    hess[(i, i)] += w[i].powi(s_i - 2) * a;
                }
                hess *= (sf - 1.0) / m;
                (value, grad, hess)
            }
            SupportExpr::QForm { matrix } => {
                let qz = matrix * z;
                let value = z.dot(&qz).sqrt();
                let grad = &qz / value;
                let hess = matrix / value - (&qz * qz.transpose()) / value.powi(3);
                (value, grad, hess)
            }
            SupportExpr::PerturbedBall { eps, poly } => {
                let r = z.norm();
                let id = Matrix::identity(n, n);
                let mut value = r;
                let mut grad = z / r;
                let mut hess = (&id - (z * z.transpose()) / (r * r)) / r;
                for mono in &poly.terms {
                    // g = M(z)·|z|^k, k = 1 - deg
                    let k = 1 - mono.degree() as i32;
                    let kf = k as f64;
                    let mv = mono.eval(z);
                    let mg = mono.gradient(z);
                    let mh = mono.hessian(z);
                    let rk = r.powi(k);
                    let rk2 = r.powi(k - 2);
                    let rk4 = r.powi(k - 4);
                    value += eps * mv * rk;
                    grad += (&mg * rk + z * (kf * mv * rk2)) * *eps;
                    let cross = &mg * z.transpose() + z * mg.transpose();
                    let h = &mh * rk
                        + cross * (kf * rk2)
                        + (&id * rk2 + (z * z.transpose()) * ((kf - 2.0) * rk4)) * (kf * mv);
                    hess += h * *eps;
                }
                (value, grad, hess)
            }
        }
    }
}

/// A smooth body from the support catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportBody {
    pub dim: usize,
    pub expr: SupportExpr,
    /// Linear image `M`; `None` is the identity.
    pub map: Option<Matrix>,
    /// Translation `t`.
    pub offset: Option<Vector>,
    pub mode: DerivativeMode,
}

impl SupportBody {
    pub fn new(dim: usize, expr: SupportExpr) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidBody(format!("dimension must be >= 2, got {dim}")));
        }
        expr.validate(dim)?;
        Ok(Self { dim, expr, map: None, offset: None, mode: DerivativeMode::Analytic })
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    fn inner_arg(&self, z: &Vector) -> Vector {
        match &self.map {
            Some(m) => m.transpose() * z,
            None => z.clone(),
        }
    }

    pub fn value(&self, z: &Vector) -> f64 {
        let mut v = self.expr.value(&self.inner_arg(z));
        if let Some(t) = &self.offset {
            v += t.dot(z);
        }
        v
    }

    pub fn derivatives(&self, z: &Vector) -> (f64, Vector, Matrix) {
        let (mut v, mut g, mut h) = self.expr.derivatives(&self.inner_arg(z));
        if let Some(m) = &self.map {
            g = m * g;
            h = m * h * m.transpose();
        }
        if let Some(t) = &self.offset {
            v += t.dot(z);
            g += t;
        }
        (v, g, h)
    }

    pub fn mapped(&self, a: &Matrix) -> Self {
        let mut out = self.clone();
        out.map = Some(match &self.map {
            Some(m) => a * m,
            None => a.clone(),
        });
        out.offset = self.offset.as_ref().map(|t| a * t);
        out
    }

    pub fn translated(&self, t: &Vector) -> Self {
        let mut out = self.clone();
        out.offset = Some(match &self.offset {
            Some(o) => o + t,
            None => t.clone(),
        });
        out
    }

    /// True when the body is an ellipsoid (quadratic form, possibly mapped)
    /// centered at the origin.
    pub fn is_centered_ellipsoid(&self) -> bool {
        matches!(self.expr, SupportExpr::QForm { .. })
            && self.offset.as_ref().is_none_or(|t| t.amax() == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(expr: &SupportExpr, z: &Vector) {
        let (v, g, h) = expr.derivatives(z);
        assert!((v - expr.value(z)).abs() < 1e-13);
        let step = 1e-6;
        for i in 0..z.len() {
            let mut zp = z.clone();
            zp[i] += step;
            let mut zm = z.clone();
            zm[i] -= step;
            let fd = (expr.value(&zp) - expr.value(&zm)) / (2.0 * step);
            assert!((fd - g[i]).abs() < 1e-7, "grad {i}: {fd} vs {}", g[i]);
            let gd = (expr.derivatives(&zp).1 - expr.derivatives(&zm).1) / (2.0 * step);
            for k in 0..z.len() {
                assert!((gd[k] - h[(k, i)]).abs() < 1e-6, "hess {k}{i}: {} vs {}", gd[k], h[(k, i)]);
            }
        }
        // Euler relations for a 1-homogeneous function
        assert!((g.dot(z) - v).abs() < 1e-12);
        assert!((&h * z).amax() < 1e-10);
    }

    #[test]
    fn catalog_derivatives_match_finite_differences() {
        let z2 = Vector::from_row_slice(&[0.6, -0.9]);
        let z3 = Vector::from_row_slice(&[0.3, 0.5, -0.7]);
        fd_check(&SupportExpr::LNorm { s: 4 }, &z2);
        fd_check(&SupportExpr::LNorm { s: 8 }, &z3);
        fd_check(
            &SupportExpr::QForm { matrix: Matrix::from_row_slice(2, 2, &[4.0, 0.5, 0.5, 1.0]) },
            &z2,
        );
        fd_check(
            &SupportExpr::PerturbedBall { eps: 0.1, poly: Polynomial::parse("u1^2*u2", 2).unwrap() },
            &z2,
        );
        fd_check(
            &SupportExpr::PerturbedBall {
                eps: 0.05,
                poly: Polynomial::parse("u1*u2*u3 - u3^2 + 0.5*u1", 3).unwrap(),
            },
            &z3,
        );
    }

    #[test]
    fn lnorm_is_large_s_stable() {
        let e = SupportExpr::LNorm { s: 64 };
        let z = Vector::from_row_slice(&[3.0, 4.0]);
        assert!((e.value(&z) - 4.0 * (1.0 + (0.75f64).powi(64)).powf(1.0 / 64.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_odd_lnorm() {
        assert!(SupportBody::new(2, SupportExpr::LNorm { s: 3 }).is_err());
        assert!(SupportBody::new(2, SupportExpr::LNorm { s: 0 }).is_err());
    }
}
