use serde::{Deserialize, Serialize};

use super::{FnClass, ScalarFunction};
use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::geometry::BoundaryPointData;
use crate::linalg::unit_ball_volume;
use crate::quadrature::{integrate_mu, integrate_nu_alpha, ExtReal, SphereRule};

/// Where the integral is evaluated: over `∂K` against the cone measure, or
/// over the sphere against `dν_K = dH/h^n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Boundary,
    Sphere,
}

fn require(f: &ScalarFunction, class: FnClass) -> Result<()> {
    if f.class == class {
        Ok(())
    } else {
        Err(Error::ClassMismatch(format!("{f} is declared {:?}, expected {class:?}", f.class)))
    }
}

/// Finite value of an integrand at a non-flat point.
fn checked(v: f64, what: &str, at: f64) -> Result<ExtReal> {
    if v.is_finite() && v >= 0.0 {
        Ok(ExtReal::Finite(v))
    } else {
        Err(Error::Overflow(format!("{what} evaluates to {v} at {at}")))
    }
}

/// `Ω_φ(K) = ∫_{∂K} φ(κ₀) dμ_K`, or `∫ φ_*(α) dν_K` with the sphere engine.
pub fn omega_phi(k: &ConvexBody, phi: &ScalarFunction, rule: &SphereRule, engine: Engine) -> Result<f64> {
    require(phi, FnClass::Conc)?;
    if matches!(k, ConvexBody::Polytope(_)) {
        return Ok(0.0);
    }
    let value = match engine {
        Engine::Boundary => integrate_mu(
            k,
            rule,
            |d: &BoundaryPointData| if d.flat { Ok(ExtReal::ZERO) } else { checked(phi.eval(d.kappa0), "φ(κ₀)", d.kappa0) },
            ExtReal::ZERO,
        )?,
        Engine::Sphere => integrate_nu_alpha(k, rule, |a| checked(phi.star_eval(a), "φ_*(α)", a))?,
    };
    Ok(value.value())
}

/// `Ω_ψ(K) = ∫_{∂K} ψ(κ₀) dμ_K`, or `∫ ψ_*(α) dν_K` plus the flat part with
/// the sphere engine.
pub fn omega_psi(k: &ConvexBody, psi: &ScalarFunction, rule: &SphereRule, engine: Engine) -> Result<ExtReal> {
    require(psi, FnClass::Conv)?;
    if k.has_facets() {
        // ψ(0) = ∞ on flat pieces of positive cone measure
        return Ok(ExtReal::PlusInfinity);
    }
    match engine {
        Engine::Boundary => integrate_mu(
            k,
            rule,
            |d: &BoundaryPointData| {
                if d.flat {
                    Ok(ExtReal::PlusInfinity)
                } else {
                    checked(psi.eval(d.kappa0), "ψ(κ₀)", d.kappa0)
                }
            },
            ExtReal::PlusInfinity,
        ),
        Engine::Sphere => integrate_nu_alpha(k, rule, |a| checked(psi.star_eval(a), "ψ_*(α)", a)),
    }
}

/// `Ω*_ψ(K) = Ω_ψ(K*) = ∫ ψ(α(K,u)) dν_K(u)`.
pub fn omega_psi_star(k: &ConvexBody, psi: &ScalarFunction, rule: &SphereRule) -> Result<ExtReal> {
    require(psi, FnClass::Conv)?;
    if matches!(k, ConvexBody::Polytope(_)) {
        return Ok(ExtReal::PlusInfinity);
    }
    integrate_nu_alpha(k, rule, |a| {
        if a == 0.0 {
            Ok(ExtReal::PlusInfinity)
        } else {
            checked(psi.eval(a), "ψ(α)", a)
        }
    })
}

fn check_p(p: f64, n: usize) -> Result<()> {
    if !p.is_finite() || p == 0.0 || p == -(n as f64) {
        return Err(Error::UndefinedP(p));
    }
    Ok(())
}

/// The functional computing `Ω_p` for the dimension.
fn lp_functional(p: f64, n: usize) -> Result<Functional> {
    check_p(p, n)?;
    let nf = n as f64;
    Ok(if p > 0.0 {
        Functional::Phi(ScalarFunction::power_conc(p / (nf + p))?)
    } else if p > -nf {
        Functional::Psi(ScalarFunction::power_conv(p / (nf + p))?)
    } else {
        Functional::PsiStar(ScalarFunction::power_conv(nf / (nf + p))?)
    })
}

/// `L_p` affine surface area for `p ∉ {0, -n}`.
pub fn omega_p(k: &ConvexBody, p: f64, rule: &SphereRule, engine: Engine) -> Result<ExtReal> {
    lp_functional(p, k.dim())?.evaluate(k, rule, engine)
}

/// `n|Bⁿ| rⁿ f(r^{-2n})`: the value of `Ω_f` on the ball of radius `r`.
pub fn ball_closed_form(r: f64, n: usize, f: &ScalarFunction) -> ExtReal {
    let v = n as f64 * unit_ball_volume(n) * r.powi(n as i32) * f.eval(r.powi(-2 * n as i32));
    ExtReal::finite(v)
}

/// One of the affine surface areas.
#[derive(Clone, Debug)]
pub enum Functional {
    Phi(ScalarFunction),
    Psi(ScalarFunction),
    PsiStar(ScalarFunction),
    Lp(f64),
}

impl std::fmt::Display for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Phi(g) => write!(f, "Ω_φ[{g}]"),
            Self::Psi(g) => write!(f, "Ω_ψ[{g}]"),
            Self::PsiStar(g) => write!(f, "Ω*_ψ[{g}]"),
            Self::Lp(p) => write!(f, "Ω_p[p={p}]"),
        }
    }
}

impl Functional {
    pub fn evaluate(&self, k: &ConvexBody, rule: &SphereRule, engine: Engine) -> Result<ExtReal> {
        match self {
            Self::Phi(f) => Ok(ExtReal::finite(omega_phi(k, f, rule, engine)?)),
            Self::Psi(f) => omega_psi(k, f, rule, engine),
            Self::PsiStar(f) => omega_psi_star(k, f, rule),
            Self::Lp(p) => omega_p(k, *p, rule, engine),
        }
    }

    /// Resolves `Lp` to the functional that computes it in dimension `n`.
    pub fn resolve(&self, n: usize) -> Result<Functional> {
        match self {
            Self::Lp(p) => lp_functional(*p, n),
            other => Ok(other.clone()),
        }
    }

    /// The underlying scalar function after resolution.
    pub fn function(&self, n: usize) -> Result<ScalarFunction> {
        match self.resolve(n)? {
            Self::Phi(f) | Self::Psi(f) | Self::PsiStar(f) => Ok(f),
            Self::Lp(_) => unreachable!("resolved"),
        }
    }

    /// `Ω(tK) = t^d Ω(K)` for power forms.
    pub fn scaling_degree(&self, n: usize) -> Option<f64> {
        let nf = n as f64;
        match self {
            Self::Lp(p) => Some(nf * (nf - p) / (nf + p)),
            Self::Phi(f) | Self::Psi(f) => f.power_exponent().map(|a| nf * (1.0 - 2.0 * a)),
            Self::PsiStar(f) => f.power_exponent().map(|a| -nf * (1.0 - 2.0 * a)),
        }
    }

    /// The closed-form value on the ball `rBⁿ`.
    pub fn ball_value(&self, r: f64, n: usize) -> Result<ExtReal> {
        Ok(match self.resolve(n)? {
            Self::Phi(f) | Self::Psi(f) => ball_closed_form(r, n, &f),
            Self::PsiStar(f) => {
                let v = n as f64 * unit_ball_volume(n) * r.powi(-(n as i32)) * f.eval(r.powi(2 * n as i32));
                ExtReal::finite(v)
            }
            Self::Lp(_) => unreachable!("resolved"),
        })
    }

    /// The functional `G` with `Ω(K*) = G(K)`.
    pub fn polar_dual(&self, n: usize) -> Result<Functional> {
        Ok(match self {
            Self::Phi(f) => Self::Phi(f.phi_star()?),
            Self::Psi(f) => Self::PsiStar(f.clone()),
            Self::PsiStar(f) => Self::Psi(f.clone()),
            Self::Lp(p) => {
                check_p(*p, n)?;
                Self::Lp((n * n) as f64 / p)
            }
        })
    }

    pub fn class(&self, n: usize) -> Result<FnClass> {
        Ok(self.function(n)?.class)
    }

    /// Whether the functional is bounded above by its ball value (concave
    /// class) rather than below.
    pub fn is_upper_bounded_by_ball(&self, n: usize) -> Result<bool> {
        Ok(matches!(self.resolve(n)?, Self::Phi(_)))
    }
}
