//! Convex polytopes in dimension 2 or 3 holding both a vertex and a
//! halfspace representation.

use std::f64::consts::PI;

use super::Halfspace;
use crate::error::{Error, Result};
use crate::linalg::{check_dim, inverse, tangent_basis, Matrix, Vector};

/// Tolerance for vertex/halfspace incidence.
pub const INCIDENCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    halfspaces: Vec<Halfspace>,
}

fn check_polytope_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::Unsupported { op: "polytope", kind: format!("dimension {dim}") })
    }
}

fn dedup_points(points: Vec<Vector>) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for p in points {
        if !out.iter().any(|q| (q - &p).amax() <= INCIDENCE_TOL) {
            out.push(p);
        }
    }
    out
}

fn dedup_halfspaces(hs: Vec<Halfspace>) -> Vec<Halfspace> {
    let mut out: Vec<Halfspace> = Vec::new();
    for h in hs {
        if !out
            .iter()
            .any(|g| (&g.normal - &h.normal).amax() <= INCIDENCE_TOL && (g.offset - h.offset).abs() <= INCIDENCE_TOL)
        {
            out.push(h);
        }
    }
    out
}

/// Normal of the hyperplane through `dim` points (2 or 3), unnormalized.
fn hyperplane_normal(points: &[&Vector]) -> Vector {
    if points.len() == 2 {
        let d = points[1] - points[0];
        Vector::from_row_slice(&[d[1], -d[0]])
    } else {
        let a = points[1] - points[0];
        let b = points[2] - points[0];
        let a3 = nalgebra::Vector3::new(a[0], a[1], a[2]);
        let b3 = nalgebra::Vector3::new(b[0], b[1], b[2]);
        let c = a3.cross(&b3);
        Vector::from_row_slice(c.as_slice())
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

impl Polytope {
    /// Convex hull of `points` (which must contain the origin in the
    /// interior of their hull).
    pub fn from_vertices(points: Vec<Vector>) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).ok_or_else(|| Error::InvalidBody("no vertices".into()))?;
        check_polytope_dim(dim)?;
        for p in &points {
            check_dim(p, dim)?;
        }
        let points = dedup_points(points);
        if points.len() <= dim {
            return Err(Error::InvalidBody("too few vertices for a full-dimensional polytope".into()));
        }
        let mut facets = Vec::new();
        for combo in combinations(points.len(), dim) {
            let sel: Vec<&Vector> = combo.iter().map(|&i| &points[i]).collect();
            let normal = hyperplane_normal(&sel);
            let norm = normal.norm();
            if norm < 1e-12 {
                continue;
            }
            let mut v = normal / norm;
            let mut c = v.dot(sel[0]);
            let above = points.iter().filter(|p| v.dot(p) > c + INCIDENCE_TOL).count();
            let below = points.iter().filter(|p| v.dot(p) < c - INCIDENCE_TOL).count();
            if above > 0 && below > 0 {
                continue;
            }
            if above > 0 {
                v = -v;
                c = -c;
            }
            if c <= INCIDENCE_TOL {
                return Err(Error::InvalidBody("origin is not interior to the polytope".into()));
            }
            facets.push(Halfspace { normal: v, offset: c });
        }
        let halfspaces = dedup_halfspaces(facets);
        let vertices: Vec<Vector> = points
            .into_iter()
            .filter(|p| halfspaces.iter().filter(|h| h.slack(p).abs() <= INCIDENCE_TOL).count() >= dim)
            .collect();
        Self::from_both(vertices, halfspaces)
    }

    /// Intersection of halfspaces `{x : v·x <= c}`; must be bounded.
    pub fn from_halfspaces(hs: Vec<Halfspace>) -> Result<Self> {
        let dim = hs.first().map(|h| h.normal.len()).ok_or_else(|| Error::InvalidBody("no halfspaces".into()))?;
        check_polytope_dim(dim)?;
        for h in &hs {
            check_dim(&h.normal, dim)?;
        }
        let hs = dedup_halfspaces(hs);
        let mut candidates = Vec::new();
        for combo in combinations(hs.len(), dim) {
            let a = Matrix::from_fn(dim, dim, |r, c| hs[combo[r]].normal[c]);
            if a.determinant().abs() < 1e-12 {
                continue;
            }
            let b = Vector::from_fn(dim, |r, _| hs[combo[r]].offset);
            let Some(x) = a.lu().solve(&b) else { continue };
            if hs.iter().all(|h| h.slack(&x) >= -INCIDENCE_TOL) {
                candidates.push(x);
            }
        }
        let vertices = dedup_points(candidates);
        if vertices.len() <= dim {
            return Err(Error::InvalidBody("halfspaces do not bound a full-dimensional polytope".into()));
        }
        // The hull of the vertices reproduces the input iff the halfspaces are bounded.
        let hull = Self::from_vertices(vertices)?;
        for f in &hull.halfspaces {
            if !hs.iter().any(|h| (&h.normal - &f.normal).amax() <= 1e-7 && (h.offset - f.offset).abs() <= 1e-7) {
                return Err(Error::InvalidBody("halfspace system is unbounded".into()));
            }
        }
        Ok(hull)
    }

    /// Both representations; validated for mutual consistency.
    pub fn from_both(vertices: Vec<Vector>, halfspaces: Vec<Halfspace>) -> Result<Self> {
        let dim = vertices.first().map(|p| p.len()).ok_or_else(|| Error::InvalidBody("no vertices".into()))?;
        check_polytope_dim(dim)?;
        for h in &halfspaces {
            check_dim(&h.normal, dim)?;
            h.validate()?;
        }
        for p in &vertices {
            check_dim(p, dim)?;
            if let Some(h) = halfspaces.iter().find(|h| h.slack(p) < -INCIDENCE_TOL) {
                return Err(Error::InvalidBody(format!(
                    "vertex {:?} violates halfspace {:?}·x <= {}",
                    p.as_slice(),
                    h.normal.as_slice(),
                    h.offset
                )));
            }
        }
        for h in &halfspaces {
            let tight = vertices.iter().filter(|p| h.slack(p).abs() <= INCIDENCE_TOL).count();
            if tight < dim {
                return Err(Error::InvalidBody(format!(
                    "halfspace {:?}·x <= {} is tight at only {tight} vertices",
                    h.normal.as_slice(),
                    h.offset
                )));
            }
        }
        let mut out = Self { dim, vertices, halfspaces };
        out.sort_canonical();
        Ok(out)
    }

    fn sort_canonical(&mut self) {
        if self.dim == 2 {
            let key = |p: &Vector| p[1].atan2(p[0]).rem_euclid(2.0 * PI);
            self.vertices.sort_by(|a, b| key(a).total_cmp(&key(b)));
            let hkey = |h: &Halfspace| h.normal[1].atan2(h.normal[0]).rem_euclid(2.0 * PI);
            self.halfspaces.sort_by(|a, b| hkey(a).total_cmp(&hkey(b)));
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn support_ext(&self, z: &Vector) -> f64 {
        self.vertices.iter().map(|p| p.dot(z)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn radial_ext(&self, z: &Vector) -> f64 {
        self.halfspaces
            .iter()
            .filter_map(|h| {
                let d = h.normal.dot(z);
                (d > 0.0).then(|| h.offset / d)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn polar(&self) -> Self {
        let vertices = self.halfspaces.iter().map(|h| &h.normal / h.offset).collect();
        let halfspaces = self
            .vertices
            .iter()
            .map(|p| {
                let r = p.norm();
                Halfspace { normal: p / r, offset: 1.0 / r }
            })
            .collect();
        let mut out = Self { dim: self.dim, vertices, halfspaces };
        out.sort_canonical();
        out
    }

    pub fn apply_linear(&self, a: &Matrix) -> Result<Self> {
        let a_inv_t = inverse(a)?.transpose();
        let vertices = self.vertices.iter().map(|p| a * p).collect();
        let halfspaces = self.halfspaces.iter().map(|h| h.mapped(&a_inv_t)).collect();
        let mut out = Self { dim: self.dim, vertices, halfspaces };
        out.sort_canonical();
        Ok(out)
    }

    pub fn translated(&self, t: &Vector) -> Result<Self> {
        let vertices: Vec<Vector> = self.vertices.iter().map(|p| p + t).collect();
        let halfspaces: Vec<Halfspace> = self
            .halfspaces
            .iter()
            .map(|h| Halfspace { normal: h.normal.clone(), offset: h.offset + h.normal.dot(t) })
            .collect();
        if halfspaces.iter().any(|h| h.offset <= 0.0) {
            return Err(Error::InvalidBody("translation moves the origin out of the interior".into()));
        }
        let mut out = Self { dim: self.dim, vertices, halfspaces };
        out.sort_canonical();
        Ok(out)
    }

    /// Vertices incident to each facet, ordered cyclically (counter-clockwise
    /// seen from outside).
    pub fn facet_cycles(&self) -> Vec<(Halfspace, Vec<Vector>)> {
        self.halfspaces
            .iter()
            .map(|h| {
                let mut pts: Vec<Vector> =
                    self.vertices.iter().filter(|p| h.slack(p).abs() <= INCIDENCE_TOL).cloned().collect();
                if self.dim == 3 {
                    let center = pts.iter().fold(Vector::zeros(3), |acc, p| acc + p) / pts.len() as f64;
                    let basis = tangent_basis(&h.normal);
                    let e1 = basis.column(0).into_owned();
                    let e2 = basis.column(1).into_owned();
                    // orient (e1, e2, normal) positively
                    let e3 = hyperplane_normal(&[&Vector::zeros(3), &e1, &e2]);
                    let flip = if e3.dot(&h.normal) < 0.0 { -1.0 } else { 1.0 };
                    let key = |p: &Vector| {
                        let d = p - &center;
                        (flip * d.dot(&e2)).atan2(d.dot(&e1))
                    };
                    pts.sort_by(|a, b| key(a).total_cmp(&key(b)));
                }
                (h.clone(), pts)
            })
            .collect()
    }

    /// Exact volume and centroid by decomposition into simplices with apex
    /// at the origin.
    pub fn volume_and_centroid(&self) -> (f64, Vector) {
        let mut volume = 0.0;
        let mut moment = Vector::zeros(self.dim);
        if self.dim == 2 {
            let m = self.vertices.len();
            for i in 0..m {
                let a = &self.vertices[i];
                let b = &self.vertices[(i + 1) % m];
                let area = 0.5 * (a[0] * b[1] - a[1] * b[0]);
                volume += area;
                moment += (a + b) * (area / 3.0);
            }
        } else {
            for (_, cycle) in self.facet_cycles() {
                for k in 1..cycle.len() - 1 {
                    let (a, b, c) = (&cycle[0], &cycle[k], &cycle[k + 1]);
                    let m = Matrix::from_columns(&[a.clone(), b.clone(), c.clone()]);
                    let vol = m.determinant().abs() / 6.0;
                    volume += vol;
                    moment += (a + b + c) * (vol / 4.0);
                }
            }
        }
        (volume, moment / volume)
    }

    /// For `n = 2`: each vertex with the arc `[θ0, θ1]` of its normal cone
    /// (angles increasing, `θ1 - θ0 ∈ (0, π)`).
    pub fn vertex_normal_arcs(&self) -> Vec<(Vector, f64, f64)> {
        debug_assert_eq!(self.dim, 2);
        let m = self.halfspaces.len();
        let angle = |h: &Halfspace| h.normal[1].atan2(h.normal[0]);
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let h0 = &self.halfspaces[i];
            let h1 = &self.halfspaces[(i + 1) % m];
            let t0 = angle(h0);
            let mut t1 = angle(h1);
            while t1 <= t0 {
                t1 += 2.0 * PI;
            }
            let vertex = self
                .vertices
                .iter()
                .find(|p| h0.slack(p).abs() <= INCIDENCE_TOL && h1.slack(p).abs() <= INCIDENCE_TOL)
                .cloned()
                .expect("adjacent facets share a vertex");
            out.push((vertex, t0, t1));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    fn square() -> Polytope {
        Polytope::from_vertices(vec![v(&[1., 1.]), v(&[-1., 1.]), v(&[-1., -1.]), v(&[1., -1.])]).unwrap()
    }

    fn cube() -> Polytope {
        let mut pts = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    pts.push(v(&[x, y, z]));
                }
            }
        }
        Polytope::from_vertices(pts).unwrap()
    }

    #[test]
    fn combinations_enumerate_all() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(8, 3).len(), 56);
        assert_eq!(combinations(3, 3).len(), 1);
    }

    #[test]
    fn square_hull_and_volume() {
        let sq = square();
        assert_eq!(sq.halfspaces().len(), 4);
        let (vol, c) = sq.volume_and_centroid();
        assert!((vol - 4.0).abs() < 1e-14);
        assert!(c.amax() < 1e-14);
        assert!((sq.support_ext(&v(&[1.0, 0.0])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interior_points_are_dropped() {
        let p = Polytope::from_vertices(vec![
            v(&[1., 1.]),
            v(&[-1., 1.]),
            v(&[-1., -1.]),
            v(&[1., -1.]),
            v(&[0.2, 0.1]),
            v(&[1., 0.]),
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn cube_volume_and_facets() {
        let c = cube();
        assert_eq!(c.halfspaces().len(), 6);
        assert_eq!(c.vertices().len(), 8);
        let (vol, ctr) = c.volume_and_centroid();
        assert!((vol - 8.0).abs() < 1e-13);
        assert!(ctr.amax() < 1e-14);
    }

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let cross = square().polar();
        let mut verts: Vec<Vec<f64>> = cross.vertices().iter().map(|p| p.iter().copied().collect()).collect();
        verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        for (a, b) in verts.iter().zip(&expected) {
            assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
        }
        assert!((cross.volume_and_centroid().0 - 2.0).abs() < 1e-14);
        assert_eq!(cross.polar(), square());
    }

    #[test]
    fn from_halfspaces_matches_hull() {
        let hs = square().halfspaces().to_vec();
        let p = Polytope::from_halfspaces(hs).unwrap();
        assert_eq!(p.vertices().len(), 4);
        // an unbounded system is rejected
        let open = vec![
            Halfspace::new(v(&[1.0, 0.0]), 1.0).unwrap(),
            Halfspace::new(v(&[0.0, 1.0]), 1.0).unwrap(),
            Halfspace::new(v(&[-1.0, 0.0]), 1.0).unwrap(),
        ];
        assert!(Polytope::from_halfspaces(open).is_err());
    }

    #[test]
    fn origin_must_be_interior() {
        let r = Polytope::from_vertices(vec![v(&[0., 0.]), v(&[1., 0.]), v(&[0., 1.])]);
        assert!(r.is_err());
    }

    #[test]
    fn inconsistent_reps_rejected() {
        let sq = square();
        let mut hs = sq.halfspaces().to_vec();
        hs[0].offset = 0.5;
        assert!(Polytope::from_both(sq.vertices().to_vec(), hs).is_err());
    }

    #[test]
    fn shifted_square_centroid() {
        let sq = square().translated(&v(&[0.3, 0.0])).unwrap();
        let (vol, c) = sq.volume_and_centroid();
        assert!((vol - 4.0).abs() < 1e-14);
        assert!((c[0] - 0.3).abs() < 1e-14 && c[1].abs() < 1e-14);
    }

    #[test]
    fn normal_arcs_cover_circle() {
        let arcs = square().vertex_normal_arcs();
        let total: f64 = arcs.iter().map(|(_, a, b)| b - a).sum();
        assert!((total - 2.0 * PI).abs() < 1e-14);
    }
}
