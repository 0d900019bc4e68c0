//! JSON body specifications.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConvexBody, DerivativeMode, Halfspace, Polynomial, Polytope, SupportBody, SupportExpr};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        r: f64,
        n: usize,
    },
    Ellipsoid {
        matrix: Vec<Vec<f64>>,
    },
    Support {
        n: usize,
        expr: ExprSpec,
        #[serde(default)]
        derivatives: DerivativeMode,
    },
    Polytope {
        #[serde(default)]
        vertices: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        halfspaces: Option<Vec<CapSpec>>,
    },
    Cap {
        base: Box<BodySpec>,
        caps: Vec<CapSpec>,
    },
    Polar {
        base: Box<BodySpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExprSpec {
    Lnorm { s: u32 },
    PerturbedBall { eps: f64, poly: String },
    Qform { matrix: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapSpec {
    pub v: Vec<f64>,
    pub c: f64,
}

fn matrix(rows: &[Vec<f64>]) -> Result<Matrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("matrix must be square and nonempty".into()));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn halfspace(c: &CapSpec) -> Result<Halfspace> {
    Halfspace::from_raw(&Vector::from_row_slice(&c.v), c.c)
}

impl BodySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn build(&self) -> Result<ConvexBody> {
        let body = match self {
            Self::Ball { r, n } => ConvexBody::ball(*r, *n)?,
            Self::Ellipsoid { matrix: m } => ConvexBody::ellipsoid(matrix(m)?)?,
            Self::Support { n, expr, derivatives } => {
                let expr = match expr {
                    ExprSpec::Lnorm { s } => SupportExpr::LNorm { s: *s },
                    ExprSpec::PerturbedBall { eps, poly } => {
                        SupportExpr::PerturbedBall { eps: *eps, poly: Polynomial::parse(poly, *n)? }
                    }
                    ExprSpec::Qform { matrix: m } => SupportExpr::QForm { matrix: matrix(m)? },
                };
                ConvexBody::from_support(SupportBody::new(*n, expr)?.with_mode(*derivatives))?
            }
            Self::Polytope { vertices, halfspaces } => {
                let vs = vertices
                    .as_ref()
                    .map(|v| v.iter().map(|p| Vector::from_row_slice(p)).collect::<Vec<_>>());
                let hs = halfspaces.as_ref().map(|h| h.iter().map(halfspace).collect::<Result<Vec<_>>>()).transpose()?;
                ConvexBody::Polytope(match (vs, hs) {
                    (Some(v), Some(h)) => Polytope::from_both(v, h)?,
                    (Some(v), None) => Polytope::from_vertices(v)?,
                    (None, Some(h)) => Polytope::from_halfspaces(h)?,
                    (None, None) => return Err(Error::Parse("polytope needs vertices or halfspaces".into())),
                })
            }
            Self::Cap { base, caps } => {
                ConvexBody::capped(base.build()?, caps.iter().map(halfspace).collect::<Result<Vec<_>>>()?)?
            }
            Self::Polar { base } => base.build()?.polar(),
        };
        body.check_origin_interior()?;
        Ok(body)
    }
}
