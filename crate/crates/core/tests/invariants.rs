use affsurf_core::geometry::gradient_map;
use affsurf_core::{ConvexBody, Matrix, Vector};
use approx::assert_relative_eq;
use proptest::prelude::*;

fn unit(theta: f64, phi: f64, n: usize) -> Vector {
    if n == 2 {
        Vector::from_row_slice(&[theta.cos(), theta.sin()])
    } else {
        Vector::from_row_slice(&[phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()])
    }
}

fn bodies() -> Vec<ConvexBody> {
    vec![
        ConvexBody::ball(1.5, 2).unwrap(),
        ConvexBody::ellipsoid_diag(&[2.0, 0.7]).unwrap(),
        ConvexBody::ellipsoid_diag(&[1.2, 1.0, 0.6]).unwrap(),
        ConvexBody::perturbed_ball(2, 0.1, "u1^2*u2").unwrap(),
        ConvexBody::perturbed_ball(3, 0.1, "u1*u2*u3").unwrap(),
        ConvexBody::lnorm(2, 4).unwrap(),
        ConvexBody::square(1.0).unwrap(),
        ConvexBody::cross_polytope(3).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radial_of_polar_is_reciprocal_support(idx in 0usize..8, theta in 0.0..6.283f64, phi in 0.1..3.04f64) {
        let k = &bodies()[idx];
        let u = unit(theta, phi, k.dim());
        let h = k.support(&u).unwrap();
        let r = k.polar().radial(&u).unwrap();
        prop_assert!((h * r - 1.0).abs() < 1e-8, "h·ρ* = {}", h * r);
    }

    #[test]
    fn bipolar_is_identity(idx in 0usize..8, theta in 0.0..6.283f64, phi in 0.1..3.04f64) {
        let k = &bodies()[idx];
        let u = unit(theta, phi, k.dim());
        let a = k.support(&u).unwrap();
        let b = k.polar().polar().support(&u).unwrap();
        prop_assert!((a - b).abs() < 1e-8 * a);
    }

    #[test]
    fn euler_relation(idx in 0usize..5, theta in 0.0..6.283f64, phi in 0.1..3.04f64) {
        let k = &bodies()[idx];
        let u = unit(theta, phi, k.dim());
        let x = gradient_map(k, &u).unwrap();
        prop_assert!((x.dot(&u) - k.support(&u).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn identity_map_changes_nothing(idx in 0usize..8, theta in 0.0..6.283f64, phi in 0.1..3.04f64) {
        let k = &bodies()[idx];
        let n = k.dim();
        let u = unit(theta, phi, n);
        let m = k.apply_linear(&Matrix::identity(n, n)).unwrap();
        prop_assert!((m.support(&u).unwrap() - k.support(&u).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn linear_map_transforms_support(theta in 0.0..6.283f64, a in 0.5..2.0f64, b in -0.5..0.5f64) {
        let k = ConvexBody::perturbed_ball(2, 0.1, "u1^2*u2").unwrap();
        let m = Matrix::from_row_slice(2, 2, &[a, b, 0.0, 1.0 / a]);
        let u = unit(theta, 0.0, 2);
        let mu = m.transpose() * &u;
        let expected = k.support_ext(&mu).unwrap();
        prop_assert!((k.apply_linear(&m).unwrap().support(&u).unwrap() - expected).abs() < 1e-9);
    }
}

#[test]
fn polar_volumes_of_dual_polytopes() {
    let sq = ConvexBody::square(1.0).unwrap();
    assert_relative_eq!(sq.volume().unwrap(), 4.0, max_relative = 1e-12);
    assert_relative_eq!(sq.polar().volume().unwrap(), 2.0, max_relative = 1e-12);
    let oct = ConvexBody::cross_polytope(3).unwrap();
    assert_relative_eq!(oct.volume().unwrap(), 4.0 / 3.0, max_relative = 1e-12);
    assert_relative_eq!(oct.polar().volume().unwrap(), 8.0, max_relative = 1e-12);
}

#[test]
fn translation_moves_centroid() {
    let k = ConvexBody::ellipsoid_diag(&[2.0, 1.0]).unwrap();
    let t = Vector::from_row_slice(&[0.3, -0.2]);
    let (_, c) = k.translated(&t).unwrap().volume_and_centroid().unwrap();
    assert!((c - t).norm() < 1e-6);
}
