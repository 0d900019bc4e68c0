use std::str::FromStr;

use super::checks::*;
use super::report::VerificationReport;
use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::functionals::Functional;
use crate::linalg::{plane_rotation, Matrix};
use crate::quadrature::{ExtReal, RuleKind, SphereRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Isoperimetric,
    Duality,
    Valuation,
    Invariance,
    Representation,
    Santalo,
    Semicontinuity,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "isoperimetric" => Self::Isoperimetric,
            "duality" => Self::Duality,
            "valuation" => Self::Valuation,
            "invariance" => Self::Invariance,
            "representation" => Self::Representation,
            "santalo" => Self::Santalo,
            "semicontinuity" => Self::Semicontinuity,
            "all" => Self::All,
            other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
        })
    }
}

impl Suite {
    const EACH: [Suite; 7] = [
        Self::Isoperimetric,
        Self::Duality,
        Self::Valuation,
        Self::Invariance,
        Self::Representation,
        Self::Santalo,
        Self::Semicontinuity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Isoperimetric => "isoperimetric",
            Self::Duality => "duality",
            Self::Valuation => "valuation",
            Self::Invariance => "invariance",
            Self::Representation => "representation",
            Self::Santalo => "santalo",
            Self::Semicontinuity => "semicontinuity",
            Self::All => "all",
        }
    }

    fn default_tol(self) -> f64 {
        match self {
            Self::Isoperimetric | Self::Santalo => 1e-6,
            Self::Invariance | Self::Representation => 1e-5,
            _ => 1e-4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub functional: Functional,
    pub level: u32,
    pub kind: Option<RuleKind>,
    pub seed: u64,
    pub tol: Option<f64>,
}

/// A second rule from a different node family and a finer level, used to
/// make engine comparisons non-vacuous.
pub fn alternate_rule(rule: &SphereRule, seed: u64) -> Result<SphereRule> {
    match (rule.dim, rule.kind) {
        (2, RuleKind::Trapezoid) => SphereRule::build_with(2, rule.level + 1, RuleKind::Gauss, seed),
        (2, _) => SphereRule::build_with(2, rule.level + 1, RuleKind::Trapezoid, seed),
        (3, RuleKind::Gauss) => {
            let r = plane_rotation(3, 0, 2, 0.3) * plane_rotation(3, 0, 1, 0.7);
            Ok(SphereRule::build_with(3, rule.level + (rule.level / 4).max(1), RuleKind::Gauss, seed)?.rotated(&r))
        }
        (n, _) => SphereRule::build_with(n, rule.level + 1, RuleKind::Lds, seed.wrapping_add(1)),
    }
}

fn applicable(suite: Suite, k: &ConvexBody, f: &Functional) -> bool {
    let psi_star = matches!(f.resolve(k.dim()), Ok(Functional::PsiStar(_)));
    let has_polar_wrapper = matches!(k, ConvexBody::Polar(_));
    match suite {
        Suite::Isoperimetric => !psi_star && !has_polar_wrapper,
        Suite::Duality => !matches!(k, ConvexBody::Cap(_)) && !(has_polar_wrapper && !k.is_smooth()),
        Suite::Valuation => {
            matches!(k, ConvexBody::Ball(_) | ConvexBody::Ellipsoid(_) | ConvexBody::Support(_)) && k.dim() <= 3
        }
        Suite::Invariance => true,
        Suite::Representation => k.is_smooth(),
        Suite::Santalo => !has_polar_wrapper,
        Suite::Semicontinuity => !psi_star,
        Suite::All => true,
    }
}

fn failed(name: &str, e: Error) -> VerificationReport {
    let mut r = VerificationReport::new(name, ExtReal::ZERO, ExtReal::ZERO, 0.0);
    r.set(false);
    r.note(format!("error: {e}"));
    r
}

fn run_one(suite: Suite, k: &ConvexBody, cfg: &SuiteConfig, rule: &SphereRule) -> Vec<Result<VerificationReport>> {
    let tol = cfg.tol.unwrap_or(suite.default_tol());
    let f = &cfg.functional;
    let n = k.dim();
    match suite {
        Suite::Isoperimetric => vec![check_isoperimetric(k, f, rule, tol)],
        Suite::Duality => vec![check_duality(k, f, rule, tol)],
        Suite::Valuation => vec![symmetric_caps(k).and_then(|(h1, h2)| check_valuation(k, &h1, &h2, f, rule, tol))],
        Suite::Invariance => {
            let mut d = Matrix::identity(n, n);
            d[(0, 0)] = 2.0;
            d[(1, 1)] = 0.5;
            let mut out = vec![check_invariance(k, f, &d, rule, tol)];
            if f.scaling_degree(n).is_some() {
                out.push(check_invariance(k, f, &(Matrix::identity(n, n) * 2.0), rule, tol));
            }
            out
        }
        Suite::Representation => {
            vec![alternate_rule(rule, cfg.seed).and_then(|hi| check_representation(k, f, rule, &hi, tol))]
        }
        Suite::Santalo => vec![k.center_at_centroid().and_then(|c| check_santalo(&c, rule, tol))],
        Suite::Semicontinuity => vec![SphereRule::build_with(2, cfg.level.max(16), RuleKind::Trapezoid, cfg.seed)
            .and_then(|r| semicontinuity_experiment(f, &r, &SEMICONT_EXPONENTS))],
        Suite::All => unreachable!(),
    }
}

/// Runs the selected checks on `k`. Errors become failing reports. With
/// [`Suite::All`], checks that do not apply to the body kind or functional
/// are skipped.
pub fn run_suite(k: &ConvexBody, suite: Suite, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let n = k.dim();
    let kind = cfg.kind.unwrap_or(RuleKind::default_for(n));
    let rule = SphereRule::build_with(n, cfg.level, kind, cfg.seed)?;
    let selected: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.into_iter().filter(|s| applicable(*s, k, &cfg.functional)).collect(),
        one => vec![one],
    };
    let mut out = Vec::new();
    for s in selected {
        for r in run_one(s, k, cfg, &rule) {
            out.push(r.unwrap_or_else(|e| failed(s.name(), e)));
        }
    }
    Ok(out)
}
