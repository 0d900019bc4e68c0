//! Optimization routines on the sphere shared by body representations.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{tangent_basis, Matrix, Vector};

/// Newton step budget for radial evaluation.
pub const REFINEMENT_BUDGET: usize = 100;

/// Coarse direction grid used to seed the local refinement.
pub(crate) fn coarse_directions(n: usize) -> Vec<Vector> {
    match n {
        2 => (0..32)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 32.0;
                Vector::from_row_slice(&[t.cos(), t.sin()])
            })
            .collect(),
        3 => {
            let mut out = Vec::with_capacity(6 * 12 + 2);
            out.push(Vector::from_row_slice(&[0.0, 0.0, 1.0]));
            out.push(Vector::from_row_slice(&[0.0, 0.0, -1.0]));
            for i in 0..6 {
                let polar = PI * (i as f64 + 0.5) / 6.0;
                for j in 0..12 {
                    let az = 2.0 * PI * j as f64 / 12.0;
                    out.push(Vector::from_row_slice(&[
                        polar.sin() * az.cos(),
                        polar.sin() * az.sin(),
                        polar.cos(),
                    ]));
                }
            }
            out
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
            (0..128)
                .map(|_| {
                    let v = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
                    let norm = v.norm();
                    v / norm
                })
                .collect()
        }
    }
}

pub struct RadialSolution {
    /// `ρ(K, u)`.
    pub value: f64,
    /// Exterior unit normal of `K` at the boundary point `ρ(K,u)·u`.
    pub normal: Vector,
}

/// Minimizes `H(v)/(u·v)` over `v` with `u·v > 0`, where `H` is a positive
/// 1-homogeneous convex function (a support function). The minimum is the
/// radial function of the body in direction `u`.
///
/// Parametrizing `v = u + E s` with `E` a tangent basis of `u^⊥` turns the
/// problem into the unconstrained convex minimization of `s ↦ H(u + E s)`,
/// solved by a damped Newton iteration from the best coarse-grid start.
pub fn radial_from_support<V, D>(u: &Vector, value: V, derivatives: D) -> Result<RadialSolution>
where
    V: Fn(&Vector) -> f64,
    D: Fn(&Vector) -> (f64, Vector, Matrix),
{
    let n = u.len();
    let e = tangent_basis(u);
    let objective = |s: &Vector| value(&(u + &e * s));

    let mut s = Vector::zeros(n - 1);
    let mut best = objective(&s);
    for v in coarse_directions(n) {
        let d = u.dot(&v);
        if d <= 0.1 {
            continue;
        }
        let cand = e.transpose() * &v / d;
        let val = objective(&cand);
        if val < best {
            best = val;
            s = cand;
        }
    }

    for _ in 0..REFINEMENT_BUDGET {
        let z = u + &e * &s;
        let (val, g, h) = derivatives(&z);
        let grad = e.transpose() * g;
        let mut hess = e.transpose() * h * &e;
        let scale = val.abs().max(1e-300);
        if grad.norm() <= 1e-15 * scale {
            return Ok(RadialSolution { value: val, normal: z.normalize() });
        }
        let ridge = 1e-13 * hess.trace().abs().max(scale);
        for i in 0..n - 1 {
            hess[(i, i)] += ridge;
        }
        let step = match hess.clone().cholesky() {
            Some(ch) => -ch.solve(&grad),
            None => -&grad / hess.diagonal().amax().max(scale),
        };
        let slope = grad.dot(&step);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = &s + &step * t;
            let tv = objective(&trial);
            if tv <= val + 1e-4 * t * slope {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        let moved = step.norm() * t;
        if !accepted || moved <= 1e-14 * (1.0 + s.norm()) {
            // no further decrease is representable; the value is converged
            let z = u + &e * &s;
            return Ok(RadialSolution { value: value(&z), normal: z.normalize() });
        }
        s += step * t;
    }
    Err(Error::RadialNonConvergence { steps: REFINEMENT_BUDGET })
}

/// Maximizes `ρ(w)·(w·u)` over unit `w`, which is the support function of a
/// star body with radial function `ρ` that is convex. Used for bodies whose
/// support function has no closed form.
pub fn support_from_radial<R>(u: &Vector, radial: R) -> Result<f64>
where
    R: Fn(&Vector) -> Result<f64>,
{
    let n = u.len();
    let objective = |w: &Vector| -> Result<f64> { Ok(radial(w)? * w.dot(u)) };
    if n == 2 {
        let m = 720;
        let mut best_t = 0.0;
        let mut best = f64::NEG_INFINITY;
        for k in 0..m {
            let t = 2.0 * PI * k as f64 / m as f64;
            let val = objective(&Vector::from_row_slice(&[t.cos(), t.sin()]))?;
            if val > best {
                best = val;
                best_t = t;
            }
        }
        let at = |t: f64| objective(&Vector::from_row_slice(&[t.cos(), t.sin()]));
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (best_t - 2.0 * PI / m as f64, best_t + 2.0 * PI / m as f64);
        let mut c = b - golden * (b - a);
        let mut d = a + golden * (b - a);
        let (mut fc, mut fd) = (at(c)?, at(d)?);
        for _ in 0..80 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - golden * (b - a);
                fc = at(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + golden * (b - a);
                fd = at(d)?;
            }
        }
        return Ok(best.max(fc).max(fd));
    }

    // n >= 3: best node of a grid, then compass search in tangent coordinates
    let grid = fine_directions(n);
    let mut w = u.clone();
    let mut best = objective(&w)?;
    for g in &grid {
        let val = objective(g)?;
        if val > best {
            best = val;
            w = g.clone();
        }
    }
    let mut step = 0.1;
    while step > 1e-12 {
        let e = tangent_basis(&w);
        let mut improved = false;
        for k in 0..n - 1 {
            for sign in [1.0, -1.0] {
                let cand = (&w + e.column(k) * (sign * step)).normalize();
                let val = objective(&cand)?;
                if val > best {
                    best = val;
                    w = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(best)
}

fn fine_directions(n: usize) -> Vec<Vector> {
    if n == 3 {
        let mut out = Vec::with_capacity(24 * 48);
        for i in 0..24 {
            let polar = PI * (i as f64 + 0.5) / 24.0;
            for j in 0..48 {
                let az = 2.0 * PI * j as f64 / 48.0;
                out.push(Vector::from_row_slice(&[polar.sin() * az.cos(), polar.sin() * az.sin(), polar.cos()]));
            }
        }
        out
    } else {
        coarse_directions(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::support_expr::SupportExpr;

    #[test]
    fn ellipse_radial_via_minimization() {
        let q = Matrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0]);
        let expr = SupportExpr::QForm { matrix: q };
        for k in 0..16 {
            let t = 0.37 + k as f64 * 0.4;
            let u = Vector::from_row_slice(&[t.cos(), t.sin()]);
            let sol = radial_from_support(&u, |z| expr.value(z), |z| expr.derivatives(z)).unwrap();
            // boundary oracle: (ρu)ᵀ A⁻² (ρu) = 1 with A = diag(2, 1)
            let exact = 1.0 / ((u[0] / 2.0).powi(2) + u[1].powi(2)).sqrt();
            assert!((sol.value - exact).abs() < 1e-13, "{} vs {}", sol.value, exact);
            // the normal at ρu is ∝ A⁻² (ρu)
            let n = Vector::from_row_slice(&[u[0] / 4.0, u[1]]).normalize();
            assert!((sol.normal - n).amax() < 1e-7);
        }
    }

    #[test]
    fn support_from_radial_recovers_ellipse_support() {
        let radial = |w: &Vector| Ok(1.0 / ((w[0] / 2.0).powi(2) + w[1].powi(2)).sqrt());
        for t in [0.0, 0.3, 1.2, 2.9, 4.4] {
            let u = Vector::from_row_slice(&[f64::cos(t), f64::sin(t)]);
            let h = support_from_radial(&u, radial).unwrap();
            let exact = (4.0 * u[0] * u[0] + u[1] * u[1]).sqrt();
            assert!((h - exact).abs() < 1e-12, "{h} vs {exact}");
        }
        let radial3 = |w: &Vector| Ok(1.0 / ((w[0] / 2.0).powi(2) + w[1].powi(2) + (w[2] / 1.5).powi(2)).sqrt());
        let u = Vector::from_row_slice(&[0.48, 0.6, 0.64]);
        let h = support_from_radial(&u, radial3).unwrap();
        let exact = (4.0 * u[0] * u[0] + u[1] * u[1] + 2.25 * u[2] * u[2]).sqrt();
        assert!((h - exact).abs() < 1e-10, "{h} vs {exact}");
    }
}
