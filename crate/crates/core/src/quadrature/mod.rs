//! Integration on the sphere and pushforward integration over `∂K`.
//!
//! Node evaluations may run in parallel; the reduction is always a
//! compensated sum over node order, so results do not depend on the thread
//! count.

mod ext;
mod rules;

use std::f64::consts::PI;

use rayon::prelude::*;

pub use ext::{ExtReal, NeumaierSum};
pub use rules::{composite_gauss, gauss_legendre, RuleKind, SphereRule, DEFAULT_SEED};

use crate::bodies::{CapBody, ConvexBody};
use crate::error::{Error, Result};
use crate::geometry::{boundary_point_data, BoundaryPointData};
use crate::linalg::{unit_from_angle, Vector};

const GL_ORDER: usize = 16;

/// Weighted terms summed with infinity saturation: a term with positive
/// weight and infinite value makes the sum infinite; zero weight contributes
/// nothing regardless of the value.
fn reduce(terms: impl IntoIterator<Item = (f64, ExtReal)>) -> ExtReal {
    let mut acc = NeumaierSum::default();
    let mut infinite = false;
    for (w, g) in terms {
        match g {
            ExtReal::PlusInfinity if w > 0.0 => infinite = true,
            ExtReal::PlusInfinity => {}
            ExtReal::Finite(v) => {
                if w != 0.0 {
                    acc.add(w * v);
                }
            }
        }
    }
    if infinite {
        ExtReal::PlusInfinity
    } else {
        ExtReal::finite(acc.total())
    }
}

fn par_terms<T, F>(items: &[T], f: F) -> Result<Vec<(f64, ExtReal)>>
where
    T: Sync,
    F: Fn(&T) -> Result<(f64, ExtReal)> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// `Σ w·g(u)` over the rule.
pub fn integrate_sphere<G>(rule: &SphereRule, g: G) -> Result<ExtReal>
where
    G: Fn(&Vector) -> Result<ExtReal> + Sync,
{
    let idx: Vec<usize> = (0..rule.len()).collect();
    let terms = par_terms(&idx, |&i| Ok((rule.weights[i], g(&rule.nodes[i])?)))?;
    Ok(reduce(terms))
}

/// Nodes `(u, weight)` of composite Gauss–Legendre rules on planar normal
/// arcs, with about `budget` nodes per full turn.
fn arc_nodes(arcs: &[(f64, f64)], budget: usize) -> Vec<(Vector, f64)> {
    let mut out = Vec::new();
    for &(a, b) in arcs {
        let panels = (((b - a) / (2.0 * PI)) * budget as f64 / GL_ORDER as f64).ceil().max(2.0) as usize;
        for (t, w) in composite_gauss(a, b, panels, GL_ORDER) {
            out.push((unit_from_angle(t), w));
        }
    }
    out
}

fn unsupported(k: &ConvexBody, op: &'static str) -> Error {
    Error::Unsupported { op, kind: k.kind_name() }
}

/// Smooth-part nodes of a capped body: `(u, weight)` pairs at which the
/// boundary follows the base.
fn cap_smooth_nodes(c: &CapBody, rule: &SphereRule) -> Result<Vec<(Vector, f64)>> {
    match c.dim() {
        2 => Ok(arc_nodes(&c.smooth_arcs()?, rule.len())),
        3 => {
            let flags: Vec<bool> =
                rule.nodes.par_iter().map(|u| c.is_smooth_normal(u)).collect::<Result<_>>()?;
            Ok(rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .zip(flags)
                .filter(|(_, s)| *s)
                .map(|((u, w), _)| (u.clone(), *w))
                .collect())
        }
        _ => Err(Error::Unsupported { op: "capped body integration", kind: format!("dimension {}", c.dim()) }),
    }
}

/// `∫_{∂K} g dμ_K` with `dμ_K = h·f dH(u)` pushed to the sphere. Flat parts
/// of positive cone measure (polytope and cap facets) carry `flat`.
pub fn integrate_mu<G>(k: &ConvexBody, rule: &SphereRule, g: G, flat: ExtReal) -> Result<ExtReal>
where
    G: Fn(&BoundaryPointData) -> Result<ExtReal> + Sync,
{
    check_rule(k, rule)?;
    let mu_term = |k: &ConvexBody, u: &Vector, w: f64| -> Result<(f64, ExtReal)> {
        let d = boundary_point_data(k, u)?;
        Ok((w * d.h * d.f, g(&d)?))
    };
    match k {
        ConvexBody::Polytope(p) => {
            let n = p.dim() as f64;
            Ok(flat.scale(n * p.volume_and_centroid().0))
        }
        ConvexBody::Cap(c) => {
            let nodes = cap_smooth_nodes(c, rule)?;
            let mut terms = par_terms(&nodes, |(u, w)| mu_term(c.base(), u, *w))?;
            for f in c.facets()? {
                terms.push((f.mu_mass(), flat));
            }
            Ok(reduce(terms))
        }
        _ if k.is_smooth() => {
            let idx: Vec<usize> = (0..rule.len()).collect();
            let terms = par_terms(&idx, |&i| mu_term(k, &rule.nodes[i], rule.weights[i]))?;
            Ok(reduce(terms))
        }
        _ => Err(unsupported(k, "cone-measure integration")),
    }
}

/// `(μ_K(∂K), ∫ x dμ_K)`; the first equals `n|K|` and the second
/// `(n+1)|K|` times the centroid.
pub fn cone_moments(k: &ConvexBody, rule: &SphereRule) -> Result<(f64, Vector)> {
    check_rule(k, rule)?;
    let n = k.dim();
    let point = |k: &ConvexBody, u: &Vector, w: f64| -> Result<(f64, Vector)> {
        let d = boundary_point_data(k, u)?;
        let m = w * d.h * d.f;
        Ok((m, d.x * m))
    };
    let collect = |pieces: Vec<(f64, Vector)>| -> (f64, Vector) {
        let mut mass = NeumaierSum::default();
        let mut moment = vec![NeumaierSum::default(); n];
        for (m, x) in pieces {
            mass.add(m);
            for i in 0..n {
                moment[i].add(x[i]);
            }
        }
        (mass.total(), Vector::from_iterator(n, moment.iter().map(|s| s.total())))
    };
    match k {
        ConvexBody::Polytope(p) => {
            let (vol, c) = p.volume_and_centroid();
            Ok((n as f64 * vol, c * ((n as f64 + 1.0) * vol)))
        }
        ConvexBody::Cap(c) => {
            let nodes = cap_smooth_nodes(c, rule)?;
            let mut pieces: Vec<(f64, Vector)> =
                nodes.par_iter().map(|(u, w)| point(c.base(), u, *w)).collect::<Result<_>>()?;
            for f in c.facets()? {
                pieces.push((f.mu_mass(), &f.centroid * f.mu_mass()));
            }
            Ok(collect(pieces))
        }
        _ if k.is_smooth() => {
            let idx: Vec<usize> = (0..rule.len()).collect();
            let pieces: Vec<(f64, Vector)> =
                idx.par_iter().map(|&i| point(k, &rule.nodes[i], rule.weights[i])).collect::<Result<_>>()?;
            Ok(collect(pieces))
        }
        _ => Err(unsupported(k, "cone-measure integration")),
    }
}

fn check_rule(k: &ConvexBody, rule: &SphereRule) -> Result<()> {
    if rule.dim != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: rule.dim });
    }
    Ok(())
}

/// Planar normal-angle nodes carrying `dν = dθ / h^2` on the non-smooth part
/// of a planar polytope or capped body, split where the support point changes.
fn planar_vertex_nodes(k: &ConvexBody, budget: usize) -> Result<Vec<(Vector, f64)>> {
    let pieces: Vec<(f64, f64)> = match k {
        ConvexBody::Polytope(p) => p.vertex_normal_arcs().into_iter().map(|(_, a, b)| (a, b)).collect(),
        ConvexBody::Cap(c) => {
            let breaks: Vec<f64> = c.facets()?.iter().map(|f| f.normal[1].atan2(f.normal[0])).collect();
            let mut out = Vec::new();
            for &(a, b) in c.cut_arcs()? {
                let mut cuts = vec![a, b];
                for &t in &breaks {
                    for shift in [-2.0, 0.0, 2.0, 4.0] {
                        let s = t + shift * PI;
                        if s > a && s < b {
                            cuts.push(s);
                        }
                    }
                }
                cuts.sort_by(f64::total_cmp);
                out.extend(cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])));
            }
            out
        }
        _ => return Err(unsupported(k, "planar vertex arcs")),
    };
    Ok(arc_nodes(&pieces, budget.max(64 * GL_ORDER)))
}

/// `∫ g(u) dν_K(u)` with `dν_K = dH(u) / h(K,u)^n`.
pub fn integrate_nu<G>(k: &ConvexBody, rule: &SphereRule, g: G) -> Result<ExtReal>
where
    G: Fn(&Vector) -> Result<ExtReal> + Sync,
{
    check_rule(k, rule)?;
    let n = k.dim() as i32;
    let term = |u: &Vector, w: f64| -> Result<(f64, ExtReal)> {
        let h = k.support_ext(u)?;
        Ok((w / h.powi(n), g(u)?))
    };
    let nodes: Vec<(Vector, f64)> = match k {
        ConvexBody::Polytope(p) if p.dim() == 2 => planar_vertex_nodes(k, rule.len())?,
        ConvexBody::Cap(c) if c.dim() == 2 => {
            let mut nodes = arc_nodes(&c.smooth_arcs()?, rule.len());
            nodes.extend(planar_vertex_nodes(k, rule.len())?);
            nodes
        }
        _ => rule.nodes.iter().cloned().zip(rule.weights.iter().copied()).collect(),
    };
    let terms = par_terms(&nodes, |(u, w)| term(u, *w))?;
    Ok(reduce(terms))
}

/// `∫ g(α(K,u)) dν_K(u)`, where `α = 0` on the normals of the non-smooth part.
pub fn integrate_nu_alpha<G>(k: &ConvexBody, rule: &SphereRule, g: G) -> Result<ExtReal>
where
    G: Fn(f64) -> Result<ExtReal> + Sync,
{
    check_rule(k, rule)?;
    let n = k.dim() as i32;
    let smooth_term = |body: &ConvexBody, u: &Vector, w: f64| -> Result<(f64, ExtReal)> {
        let d = boundary_point_data(body, u)?;
        Ok((w / d.h.powi(n), g(d.alpha)?))
    };
    let at_zero = g(0.0)?;
    match k {
        ConvexBody::Polytope(p) => {
            let nu_total = n as f64 * p.polar().volume_and_centroid().0;
            Ok(at_zero.scale(nu_total))
        }
        ConvexBody::Cap(c) if c.dim() == 2 => {
            let nodes = arc_nodes(&c.smooth_arcs()?, rule.len());
            let mut terms = par_terms(&nodes, |(u, w)| smooth_term(c.base(), u, *w))?;
            if !at_zero.is_zero() {
                let cut = integrate_cut_nu(k, rule.len())?;
                terms.push((cut, at_zero));
            }
            Ok(reduce(terms))
        }
        ConvexBody::Cap(c) => {
            let idx: Vec<usize> = (0..rule.len()).collect();
            let terms = par_terms(&idx, |&i| {
                let (u, w) = (&rule.nodes[i], rule.weights[i]);
                if c.is_smooth_normal(u)? {
                    smooth_term(c.base(), u, w)
                } else if at_zero.is_zero() {
                    Ok((0.0, at_zero))
                } else if at_zero.is_infinite() {
                    Ok((w, at_zero))
                } else {
                    Ok((w / k.support_ext(u)?.powi(n), at_zero))
                }
            })?;
            Ok(reduce(terms))
        }
        _ if k.is_smooth() => {
            let idx: Vec<usize> = (0..rule.len()).collect();
            let terms = par_terms(&idx, |&i| smooth_term(k, &rule.nodes[i], rule.weights[i]))?;
            Ok(reduce(terms))
        }
        _ => Err(unsupported(k, "sphere-measure integration")),
    }
}

/// `ν_K` of the cut normal arcs of a planar capped body.
fn integrate_cut_nu(k: &ConvexBody, budget: usize) -> Result<f64> {
    let nodes = planar_vertex_nodes(k, budget)?;
    let mut acc = NeumaierSum::default();
    for (u, w) in &nodes {
        acc.add(w / k.support_ext(u)?.powi(2));
    }
    Ok(acc.total())
}
