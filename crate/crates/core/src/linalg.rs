//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Tolerance on `|u| - 1` for arguments that must be unit directions.
pub const UNIT_TOL: f64 = 1e-9;

pub fn check_unit(u: &Vector) -> Result<()> {
    let norm = u.norm();
    if (norm - 1.0).abs() > UNIT_TOL || !norm.is_finite() {
        return Err(Error::NonUnitDirection { norm });
    }
    Ok(())
}

pub fn check_dim(u: &Vector, n: usize) -> Result<()> {
    if u.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.len() });
    }
    Ok(())
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// `(n-1)`-dimensional measure of the unit sphere `S^{n-1}`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Orthonormal basis of `u^⊥` (as columns), built by Gram–Schmidt from the
/// `n - 1` coordinate axes least aligned with `u`. Deterministic: ties are
/// broken by axis index.
pub fn tangent_basis(u: &Vector) -> Matrix {
    let n = u.len();
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&a, &b| {
        u[a].abs()
            .partial_cmp(&u[b].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut basis: Vec<Vector> = Vec::with_capacity(n - 1);
    for &axis in axes.iter().take(n - 1) {
        let mut e = Vector::zeros(n);
        e[axis] = 1.0;
        // twice for numerical orthogonality
        for _ in 0..2 {
            let d = e.dot(u);
            e -= u * d;
            for b in &basis {
                let d = e.dot(b);
                e -= b * d;
            }
        }
        let norm = e.norm();
        basis.push(e / norm);
    }
    Matrix::from_columns(&basis)
}

pub fn is_symmetric(a: &Matrix, tol: f64) -> bool {
    a.is_square() && (0..a.nrows()).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= tol))
}

/// Square root of a symmetric positive definite matrix; errors when some
/// eigenvalue is not positive.
pub fn spd_sqrt(a: &Matrix) -> Result<Matrix> {
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
        return Err(Error::InvalidBody(format!(
            "matrix is not positive definite (eigenvalues {:?})",
            eig.eigenvalues.as_slice()
        )));
    }
    let sqrt_vals = eig.eigenvalues.map(f64::sqrt);
    let q = &eig.eigenvectors;
    Ok(q * Matrix::from_diagonal(&sqrt_vals) * q.transpose())
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let det = a.determinant();
    if !det.is_finite() || det.abs() < 1e-300 {
        return Err(Error::SingularMatrix { det });
    }
    a.clone().try_inverse().ok_or(Error::SingularMatrix { det })
}

/// Rotation of the plane spanned by axes `i` and `j` by `angle`.
pub fn plane_rotation(n: usize, i: usize, j: usize, angle: f64) -> Matrix {
    let mut r = Matrix::identity(n, n);
    let (s, c) = angle.sin_cos();
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(i, j)] = -s;
    r[(j, i)] = s;
    r
}

pub fn unit_from_angle(theta: f64) -> Vector {
    Vector::from_vec(vec![theta.cos(), theta.sin()])
}

pub fn normalized(v: &Vector) -> Vector {
    v / v.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        let pi = std::f64::consts::PI;
        assert!((unit_ball_volume(2) - pi).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * pi / 3.0).abs() < 1e-15);
        assert!((unit_sphere_area(3) - 4.0 * pi).abs() < 1e-14);
        assert!((unit_ball_volume(4) - pi * pi / 2.0).abs() < 1e-14);
    }

    #[test]
    fn tangent_basis_is_orthonormal_and_orthogonal_to_u() {
        for u in [
            Vector::from_vec(vec![1.0, 0.0, 0.0]),
            normalized(&Vector::from_vec(vec![0.3, -0.4, 0.2])),
            normalized(&Vector::from_vec(vec![1.0, 1.0, 1.0, 1.0])),
        ] {
            let e = tangent_basis(&u);
            assert_eq!(e.ncols(), u.len() - 1);
            let gram = e.transpose() * &e;
            assert!((gram - Matrix::identity(u.len() - 1, u.len() - 1)).abs().max() < 1e-14);
            assert!((e.transpose() * &u).abs().max() < 1e-14);
        }
    }

    #[test]
    fn non_unit_rejected() {
        assert!(check_unit(&Vector::from_vec(vec![1.0, 1.0])).is_err());
        assert!(check_unit(&Vector::from_vec(vec![0.6, 0.8])).is_ok());
    }

    #[test]
    fn spd_sqrt_squares_back() {
        let a = Matrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let s = spd_sqrt(&a).unwrap();
        assert!((&s * &s - a).abs().max() < 1e-12);
        assert!(spd_sqrt(&Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])).is_err());
    }
}
