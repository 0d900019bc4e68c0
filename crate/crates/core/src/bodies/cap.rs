//! Smooth bodies cut by finitely many halfspaces.
//!
//! The boundary splits into the part of the base that survives every cap and
//! flat facets lying in the cap planes. In the plane both are resolved
//! exactly: cut normal arcs are located by scan and bisection and the
//! polygonal part is described by its vertices. In space the facets are
//! integrated in polar coordinates within their planes and the smooth part is
//! classified node by node.

use std::f64::consts::PI;

use super::{ConvexBody, Halfspace};
use crate::error::{Error, Result};
use crate::geometry::gradient_map;
use crate::linalg::{inverse, tangent_basis, unit_from_angle, Matrix, Vector};
use crate::quadrature::gauss_legendre;

/// Relative margin separating surviving from cut base points.
pub const CAP_MARGIN: f64 = 1e-9;
const SCAN: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub cap: usize,
    pub normal: Vector,
    pub offset: f64,
    /// (n-1)-dimensional area.
    pub area: f64,
    pub centroid: Vector,
}

impl Facet {
    /// Cone-measure mass `offset · area`.
    pub fn mu_mass(&self) -> f64 {
        self.offset * self.area
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Layout {
    Planar {
        /// Cut normal arcs `[a, b]` with `0 <= a < 2π` and `a < b <= a + 2π`.
        cut: Vec<(f64, f64)>,
        vertices: Vec<Vector>,
        facets: Vec<Facet>,
    },
    Spatial {
        facets: Vec<Facet>,
    },
    Unsupported,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapBody {
    base: Box<ConvexBody>,
    caps: Vec<Halfspace>,
    layout: Layout,
}

impl CapBody {
    pub fn new(base: ConvexBody, caps: Vec<Halfspace>) -> Result<Self> {
        if !matches!(base, ConvexBody::Ball(_) | ConvexBody::Ellipsoid(_) | ConvexBody::Support(_)) {
            return Err(Error::InvalidBody(format!("cap base must be smooth, got {}", base.kind_name())));
        }
        if caps.is_empty() {
            return Err(Error::InvalidBody("capped body needs at least one cap".into()));
        }
        let n = base.dim();
        for c in &caps {
            c.validate()?;
            if c.normal.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.normal.len() });
            }
        }
        let mut body = Self { base: Box::new(base), caps, layout: Layout::Unsupported };
        body.layout = match n {
            2 => body.planar_layout()?,
            3 => Layout::Spatial { facets: body.spatial_facets()? },
            _ => Layout::Unsupported,
        };
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &ConvexBody {
        &self.base
    }

    pub fn caps(&self) -> &[Halfspace] {
        &self.caps
    }

    pub fn facets(&self) -> Result<&[Facet]> {
        match &self.layout {
            Layout::Planar { facets, .. } | Layout::Spatial { facets } => Ok(facets),
            Layout::Unsupported => Err(self.unsupported()),
        }
    }

    fn unsupported(&self) -> Error {
        Error::Unsupported { op: "capped body geometry", kind: format!("capped body in dimension {}", self.dim()) }
    }

    pub fn has_active_cap(&self) -> bool {
        match &self.layout {
            Layout::Planar { cut, facets, .. } => !cut.is_empty() || !facets.is_empty(),
            Layout::Spatial { facets } => !facets.is_empty(),
            Layout::Unsupported => self.caps.iter().any(|c| c.offset < self.base.support_ext(&c.normal).unwrap_or(0.0)),
        }
    }

    /// Smallest cap slack of the base boundary point with normal `u`.
    fn base_slack(&self, x: &Vector) -> f64 {
        self.caps.iter().map(|c| c.slack(x)).fold(f64::INFINITY, f64::min)
    }

    /// Whether the base boundary point with normal `u` survives all caps with
    /// margin; at such normals `K` and its base share support and curvature.
    pub fn is_smooth_normal(&self, u: &Vector) -> Result<bool> {
        let x = gradient_map(&self.base, u)?;
        let scale = x.norm();
        Ok(self.base_slack(&x) > CAP_MARGIN * scale)
    }

    /// Normal arcs `[a, b]` where the planar boundary follows the base.
    pub fn smooth_arcs(&self) -> Result<Vec<(f64, f64)>> {
        match &self.layout {
            Layout::Planar { cut, .. } => Ok(complement(cut)),
            _ => Err(Error::Unsupported { op: "smooth arcs", kind: format!("capped body in dimension {}", self.dim()) }),
        }
    }

    /// Cut normal arcs of a planar capped body.
    pub fn cut_arcs(&self) -> Result<&[(f64, f64)]> {
        match &self.layout {
            Layout::Planar { cut, .. } => Ok(cut),
            _ => Err(Error::Unsupported { op: "cut arcs", kind: format!("capped body in dimension {}", self.dim()) }),
        }
    }

    /// Vertices of the polygonal part of a planar capped body.
    pub fn planar_vertices(&self) -> Result<&[Vector]> {
        match &self.layout {
            Layout::Planar { vertices, .. } => Ok(vertices),
            _ => Err(Error::Unsupported { op: "vertices", kind: format!("capped body in dimension {}", self.dim()) }),
        }
    }

    pub fn support_ext(&self, z: &Vector) -> Result<f64> {
        let r = z.norm();
        if r == 0.0 {
            return Ok(0.0);
        }
        let u = z / r;
        let h = match &self.layout {
            Layout::Planar { cut, vertices, .. } => {
                let theta = angle_of(&u);
                if cut.iter().any(|&(a, b)| in_arc(theta, a, b)) {
                    vertices.iter().map(|p| p.dot(&u)).fold(f64::NEG_INFINITY, f64::max)
                } else {
                    self.base.support_ext(&u)?
                }
            }
            _ => {
                let x = gradient_map(&self.base, &u)?;
                if self.base_slack(&x) >= 0.0 {
                    self.base.support_ext(&u)?
                } else {
                    super::search::support_from_radial(&u, |w| Ok(1.0 / self.gauge(w)?))?
                }
            }
        };
        Ok(r * h)
    }

    pub fn gauge(&self, z: &Vector) -> Result<f64> {
        let g = self.caps.iter().map(|c| c.normal.dot(z) / c.offset).fold(self.base.gauge(z)?, f64::max);
        Ok(g)
    }

    pub fn apply_linear(&self, a: &Matrix) -> Result<Self> {
        let a_inv_t = inverse(a)?.transpose();
        Self::new(self.base.apply_linear(a)?, self.caps.iter().map(|c| c.mapped(&a_inv_t)).collect())
    }

    pub fn translated(&self, t: &Vector) -> Result<Self> {
        let caps = self
            .caps
            .iter()
            .map(|c| Halfspace::new(c.normal.clone(), c.offset + c.normal.dot(t)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.base.translated(t)?, caps)
    }

    fn planar_layout(&self) -> Result<Layout> {
        let slack_at = |theta: f64| -> Result<f64> {
            let x = gradient_map(&self.base, &unit_from_angle(theta))?;
            Ok(self.base_slack(&x))
        };
        let step = 2.0 * PI / SCAN as f64;
        let samples: Vec<f64> = (0..SCAN).map(|k| slack_at(k as f64 * step)).collect::<Result<_>>()?;
        let cut_flags: Vec<bool> = samples.iter().map(|&s| s <= 0.0).collect();

        let mut cut = Vec::new();
        if cut_flags.iter().all(|&c| c) {
            cut.push((0.0, 2.0 * PI));
        } else if cut_flags.iter().any(|&c| c) {
            // locate each transition between the sample k and k+1
            let refine = |k: usize| -> Result<f64> {
                let (mut lo, mut hi) = (k as f64 * step, (k + 1) as f64 * step);
                let lo_cut = cut_flags[k];
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if (slack_at(mid)? <= 0.0) == lo_cut {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            };
            let start = cut_flags.iter().position(|&c| !c).expect("some sample survives");
            let mut open: Option<f64> = None;
            for i in 0..SCAN {
                let k = (start + i) % SCAN;
                let next = (k + 1) % SCAN;
                if cut_flags[k] == cut_flags[next] {
                    continue;
                }
                let mut t = refine(k)?;
                if next == 0 {
                    t = t.rem_euclid(2.0 * PI);
                }
                if cut_flags[next] {
                    open = Some(t);
                } else if let Some(a) = open.take() {
                    let b = if t < a { t + 2.0 * PI } else { t };
                    cut.push((a, b));
                }
            }
        }

        let mut vertices = Vec::new();
        for &(a, b) in &cut {
            if b - a < 2.0 * PI {
                vertices.push(gradient_map(&self.base, &unit_from_angle(a))?);
                vertices.push(gradient_map(&self.base, &unit_from_angle(b))?);
            }
        }
        let scale = self.base.support_ext(&unit_from_angle(0.0))?.max(self.base.support_ext(&unit_from_angle(PI / 2.0))?);
        for i in 0..self.caps.len() {
            for j in 0..i {
                let (ci, cj) = (&self.caps[i], &self.caps[j]);
                let m = Matrix::from_row_slice(2, 2, &[ci.normal[0], ci.normal[1], cj.normal[0], cj.normal[1]]);
                if m.determinant().abs() < 1e-12 {
                    continue;
                }
                let p = m.lu().solve(&Vector::from_row_slice(&[ci.offset, cj.offset])).expect("nonsingular");
                let inside_caps = self.caps.iter().all(|c| c.slack(&p) >= -CAP_MARGIN * scale);
                if inside_caps && self.base.gauge(&p)? <= 1.0 + CAP_MARGIN {
                    vertices.push(p);
                }
            }
        }

        let mut facets = Vec::new();
        for (i, c) in self.caps.iter().enumerate() {
            let tangent = Vector::from_row_slice(&[-c.normal[1], c.normal[0]]);
            let tight: Vec<&Vector> =
                vertices.iter().filter(|p| c.slack(p).abs() <= 1e-7 * scale).collect();
            if tight.len() < 2 {
                continue;
            }
            let key = |p: &&Vector| tangent.dot(p);
            let lo = tight.iter().min_by(|a, b| key(a).total_cmp(&key(b))).expect("nonempty");
            let hi = tight.iter().max_by(|a, b| key(a).total_cmp(&key(b))).expect("nonempty");
            let area = key(hi) - key(lo);
            if area <= 1e-14 * scale {
                continue;
            }
            facets.push(Facet {
                cap: i,
                normal: c.normal.clone(),
                offset: c.offset,
                area,
                centroid: (*lo + *hi) * 0.5,
            });
        }
        Ok(Layout::Planar { cut, vertices, facets })
    }

    fn spatial_facets(&self) -> Result<Vec<Facet>> {
        let mut facets = Vec::new();
        for (i, c) in self.caps.iter().enumerate() {
            let h_base = self.base.support_ext(&c.normal)?;
            if c.offset >= h_base {
                continue;
            }
            let scale = h_base;
            let x = gradient_map(&self.base, &c.normal)?;
            let p = x * (c.offset / h_base);
            let others_ok = self
                .caps
                .iter()
                .enumerate()
                .all(|(j, o)| j == i || o.slack(&p) > 1e-6 * scale);
            if !others_ok {
                // center is cut away by another cap: not handled
                return Err(Error::InvalidBody(format!(
                    "cap {i}: the foot of the cap plane is cut by another cap; overlapping caps in 3D are not supported"
                )));
            }
            let (area, centroid) = self.plane_section(i, &p)?;
            if area > 0.0 {
                facets.push(Facet { cap: i, normal: c.normal.clone(), offset: c.offset, area, centroid });
            }
        }
        Ok(facets)
    }

    /// Area and centroid of the section of `K` by the plane of cap `i`,
    /// star-shaped about the interior point `p`.
    fn plane_section(&self, i: usize, p: &Vector) -> Result<(f64, Vector)> {
        let e = tangent_basis(&self.caps[i].normal);
        let dir = |phi: f64| -> Vector { e.column(0) * phi.cos() + e.column(1) * phi.sin() };
        // returns (distance, active constraint); usize::MAX stands for the base
        let extent = |phi: f64| -> Result<(f64, usize)> {
            let d = dir(phi);
            let mut best = (self.base_exit(p, &d)?, usize::MAX);
            for (j, c) in self.caps.iter().enumerate() {
                if j == i {
                    continue;
                }
                let rate = c.normal.dot(&d);
                if rate > 0.0 {
                    let t = c.slack(p) / rate;
                    if t < best.0 {
                        best = (t, j);
                    }
                }
            }
            Ok(best)
        };
        let scan = 512;
        let step = 2.0 * PI / scan as f64;
        let active: Vec<usize> = (0..scan).map(|k| Ok(extent(k as f64 * step)?.1)).collect::<Result<_>>()?;
        let mut breaks = vec![0.0];
        for k in 0..scan {
            let next = (k + 1) % scan;
            if active[k] == active[next] {
                continue;
            }
            let (mut lo, mut hi) = (k as f64 * step, (k + 1) as f64 * step);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if extent(mid)?.1 == active[k] {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            breaks.push(0.5 * (lo + hi));
        }
        breaks.push(2.0 * PI);
        breaks.sort_by(f64::total_cmp);
        let (xs, ws) = gauss_legendre(16);
        let mut area = 0.0;
        let mut moment = Vector::zeros(3);
        for w in breaks.windows(2) {
            let panels = 4;
            let width = (w[1] - w[0]) / panels as f64;
            for k in 0..panels {
                let a = w[0] + k as f64 * width;
                for (x, wt) in xs.iter().zip(&ws) {
                    let phi = a + 0.5 * width * (x + 1.0);
                    let r = extent(phi)?.0;
                    let weight = 0.5 * width * wt;
                    area += weight * r * r / 2.0;
                    moment += (p * (r * r / 2.0) + dir(phi) * (r * r * r / 3.0)) * weight;
                }
            }
        }
        Ok((area, moment / area))
    }

    /// Distance from the interior point `p` to the base boundary along `d`.
    fn base_exit(&self, p: &Vector, d: &Vector) -> Result<f64> {
        let g = |t: f64| -> Result<f64> { Ok(self.base.gauge(&(p + d * t))? - 1.0) };
        let mut lo = 0.0;
        let mut hi = self.base.support_ext(d)? + self.base.support_ext(&-d)?;
        let (mut glo, mut ghi) = (g(lo)?, g(hi)?);
        while ghi <= 0.0 {
            lo = hi;
            glo = ghi;
            hi *= 2.0;
            ghi = g(hi)?;
        }
        // Illinois regula falsi
        let mut side = 0;
        for _ in 0..200 {
            let t = (lo * ghi - hi * glo) / (ghi - glo);
            let gt = g(t)?;
            if gt.abs() <= 1e-15 || hi - lo <= 1e-15 * hi {
                return Ok(t);
            }
            if gt > 0.0 {
                hi = t;
                ghi = gt;
                if side == -1 {
                    glo *= 0.5;
                }
                side = -1;
            } else {
                lo = t;
                glo = gt;
                if side == 1 {
                    ghi *= 0.5;
                }
                side = 1;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Polar angle of a planar unit vector in `[0, 2π)`.
pub(crate) fn angle_of(u: &Vector) -> f64 {
    u[1].atan2(u[0]).rem_euclid(2.0 * PI)
}

pub(crate) fn in_arc(theta: f64, a: f64, b: f64) -> bool {
    let t = if theta < a { theta + 2.0 * PI } else { theta };
    t >= a && t <= b
}

/// Complement of disjoint arcs on the circle.
fn complement(cut: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if cut.is_empty() {
        return vec![(0.0, 2.0 * PI)];
    }
    let mut sorted = cut.to_vec();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    if sorted.len() == 1 && sorted[0].1 - sorted[0].0 >= 2.0 * PI {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(sorted.len());
    for k in 0..sorted.len() {
        let end = sorted[k].1;
        let next = if k + 1 < sorted.len() { sorted[k + 1].0 } else { sorted[0].0 + 2.0 * PI };
        if next > end {
            out.push((end, next));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(v: &[f64], c: f64) -> Halfspace {
        Halfspace::new(Vector::from_row_slice(v), c).unwrap()
    }

    #[test]
    fn disc_cut_by_one_line() {
        let k = CapBody::new(ConvexBody::ball(1.0, 2).unwrap(), vec![hs(&[1.0, 0.0], 0.5)]).unwrap();
        let cut = k.cut_arcs().unwrap();
        assert_eq!(cut.len(), 1);
        let (a, b) = cut[0];
        let third = PI / 3.0;
        assert!((a - (2.0 * PI - third)).abs() < 1e-12, "{a}");
        assert!((b - (2.0 * PI + third)).abs() < 1e-12, "{b}");
        let f = &k.facets().unwrap()[0];
        assert!((f.area - 3f64.sqrt()).abs() < 1e-12);
        assert!((k.support_ext(&Vector::from_row_slice(&[1.0, 0.0])).unwrap() - 0.5).abs() < 1e-12);
        let arcs = k.smooth_arcs().unwrap();
        let len: f64 = arcs.iter().map(|(a, b)| b - a).sum();
        assert!((len - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn inactive_cap_leaves_base() {
        let k = CapBody::new(ConvexBody::ball(1.0, 2).unwrap(), vec![hs(&[0.0, 1.0], 2.0)]).unwrap();
        assert!(!k.has_active_cap());
        assert!(k.cut_arcs().unwrap().is_empty());
    }

    #[test]
    fn slab_of_disc() {
        let k = CapBody::new(
            ConvexBody::ball(1.0, 2).unwrap(),
            vec![hs(&[1.0, 0.0], 0.5), hs(&[-1.0, 0.0], 0.5)],
        )
        .unwrap();
        assert_eq!(k.facets().unwrap().len(), 2);
        let u = Vector::from_row_slice(&[0.6, 0.8]);
        assert!((k.support_ext(&u).unwrap() - (0.3 + 0.8 * 0.75f64.sqrt())).abs() < 1e-12);
        let top = Vector::from_row_slice(&[0.0, 1.0]);
        assert!((k.support_ext(&top).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ball_cap_in_space() {
        let k = CapBody::new(ConvexBody::ball(1.0, 3).unwrap(), vec![hs(&[0.0, 0.0, 1.0], 0.5)]).unwrap();
        let f = &k.facets().unwrap()[0];
        // disc of radius √3/2
        assert!((f.area - PI * 0.75).abs() < 1e-10, "{}", f.area);
        assert!((&f.centroid - Vector::from_row_slice(&[0.0, 0.0, 0.5])).norm() < 1e-10);
    }

    #[test]
    fn complement_wraps() {
        let c = complement(&[(5.0, 7.0)]);
        assert_eq!(c.len(), 1);
        assert!((c[0].0 - 7.0).abs() < 1e-15 && (c[0].1 - (5.0 + 2.0 * PI)).abs() < 1e-15);
    }
}
