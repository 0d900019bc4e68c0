//! Quadrature rules on the unit sphere.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linalg::{unit_sphere_area, Matrix, Vector};

pub const DEFAULT_SEED: u64 = 0x5EED;
const MAX_POW2_LEVEL: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    /// Uniform angles on the circle.
    Trapezoid,
    /// Composite Gauss–Legendre in the angle (circle) or Gauss in `cos θ`
    /// times uniform azimuth (2-sphere).
    Gauss,
    /// Shifted Halton points pushed to the sphere, equal weights.
    Lds,
}

impl RuleKind {
    pub fn default_for(n: usize) -> Self {
        match n {
            2 => Self::Trapezoid,
            3 => Self::Gauss,
            _ => Self::Lds,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereRule {
    pub dim: usize,
    pub level: u32,
    pub kind: RuleKind,
    pub nodes: Vec<Vector>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; m];
    let mut ws = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[m - 1 - i] = x;
        ws[i] = w;
        ws[m - 1 - i] = w;
    }
    (xs, ws)
}

/// Composite `m`-point Gauss–Legendre nodes on `[a, b]` with `panels` equal panels.
pub fn composite_gauss(a: f64, b: f64, panels: usize, m: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(m);
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * m);
    for k in 0..panels {
        let lo = a + k as f64 * width;
        for (x, w) in xs.iter().zip(&ws) {
            out.push((lo + 0.5 * width * (x + 1.0), 0.5 * width * w));
        }
    }
    out
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

impl SphereRule {
    /// Rule of the default kind for the dimension.
    pub fn build(n: usize, level: u32) -> Result<Self> {
        Self::build_with(n, level, RuleKind::default_for(n), DEFAULT_SEED)
    }

    /// Default rule used by volume and centroid computations.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            2 => Self::build(2, 12),
            3 => Self::build(3, 64),
            _ => Self::build(n, 16),
        }
    }

    /// `level` encodes the node count: `2^level` on the circle and for
    /// low-discrepancy rules, `level × 2·level` for the product rule on S².
    pub fn build_with(n: usize, level: u32, kind: RuleKind, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: n });
        }
        let too_small = || Error::QuadratureLevel { dim: n, level };
        let (nodes, weights) = match (n, kind) {
            (2, RuleKind::Trapezoid) => {
                if !(3..=MAX_POW2_LEVEL).contains(&level) {
                    return Err(too_small());
                }
                let m = 1usize << level;
                let w = 2.0 * PI / m as f64;
                let nodes = (0..m)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / m as f64;
                        Vector::from_row_slice(&[t.cos(), t.sin()])
                    })
                    .collect();
                (nodes, vec![w; m])
            }
            (2, RuleKind::Gauss) => {
                if !(4..=MAX_POW2_LEVEL).contains(&level) {
                    return Err(too_small());
                }
                let panels = (1usize << level) / 16;
                composite_gauss(0.0, 2.0 * PI, panels, 16)
                    .into_iter()
                    .map(|(t, w)| (Vector::from_row_slice(&[t.cos(), t.sin()]), w))
                    .unzip()
            }
            (3, RuleKind::Gauss) => {
                let m = level as usize;
                if m < 2 || m > 4096 {
                    return Err(too_small());
                }
                let (xs, ws) = gauss_legendre(m);
                let az = 2 * m;
                let dphi = 2.0 * PI / az as f64;
                let mut nodes = Vec::with_capacity(m * az);
                let mut weights = Vec::with_capacity(m * az);
                for (z, wz) in xs.iter().zip(&ws) {
                    let s = (1.0 - z * z).sqrt();
                    for j in 0..az {
                        let phi = (j as f64 + 0.5) * dphi;
                        nodes.push(Vector::from_row_slice(&[s * phi.cos(), s * phi.sin(), *z]));
                        weights.push(wz * dphi);
                    }
                }
                (nodes, weights)
            }
            (_, RuleKind::Lds) => {
                if !(3..=MAX_POW2_LEVEL).contains(&level) {
                    return Err(too_small());
                }
                let m = 1usize << level;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let shift: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                let primes = first_primes(n);
                let normal = Normal::standard();
                let nodes = (0..m)
                    .map(|k| {
                        let z = Vector::from_fn(n, |i, _| {
                            let mut x = (radical_inverse(k as u64 + 1, primes[i]) + shift[i]).fract();
                            x = x.clamp(1e-12, 1.0 - 1e-12);
                            normal.inverse_cdf(x)
                        });
                        let r = z.norm();
                        z / r
                    })
                    .collect();
                (nodes, vec![unit_sphere_area(n) / m as f64; m])
            }
            (_, kind) => {
                return Err(Error::Unsupported { op: "sphere rule", kind: format!("{kind:?} in dimension {n}") });
            }
        };
        Ok(Self { dim: n, level, kind, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The rule with every node mapped by the orthogonal matrix `r`.
    pub fn rotated(&self, r: &Matrix) -> Self {
        let mut out = self.clone();
        for u in &mut out.nodes {
            *u = r * &*u;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_moments() {
        for m in [1, 2, 5, 16, 64] {
            let (xs, ws) = gauss_legendre(m);
            let total: f64 = ws.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "m={m}");
            // exact for degree 2m-1
            let d = 2 * m - 2;
            let s: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(d as i32)).sum();
            assert!((s - 2.0 / (d as f64 + 1.0)).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn circle_rule_sizes() {
        let r = SphereRule::build(2, 10).unwrap();
        assert_eq!(r.len(), 1024);
        assert_eq!(r.weights[0], 2.0 * PI / 1024.0);
        assert!(SphereRule::build(2, 2).is_err());
        let g = SphereRule::build_with(2, 8, RuleKind::Gauss, DEFAULT_SEED).unwrap();
        assert_eq!(g.len(), 256);
    }

    #[test]
    fn sphere_rule_weights() {
        let r = SphereRule::build(3, 64).unwrap();
        assert_eq!(r.len(), 8192);
        let total: f64 = r.weights.iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
        let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(u, w)| w * u[0] * u[0]).sum();
        assert!((m2 - 4.0 * PI / 3.0).abs() < 1e-10);
        assert!(SphereRule::build(3, 1).is_err());
    }

    #[test]
    fn lds_rule_in_four_dims() {
        let r = SphereRule::build(4, 14).unwrap();
        let total: f64 = r.weights.iter().sum();
        assert!((total - 2.0 * PI * PI).abs() < 1e-3 * total);
        let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(u, w)| w * u[1] * u[1]).sum();
        assert!((m2 - total / 4.0).abs() < 1e-2 * total / 4.0);
        assert_eq!(r, SphereRule::build(4, 14).unwrap());
    }
}
