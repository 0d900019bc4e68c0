//! Concave and convex function classes and the affine surface areas built
//! from them.

mod omega;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use omega::{
    ball_closed_form, omega_p, omega_phi, omega_psi, omega_psi_star, Engine, Functional,
};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FnClass {
    /// Concave, vanishing at 0, sublinear at ∞.
    Conc,
    /// Convex, infinite at 0, vanishing at ∞.
    Conv,
}

#[derive(Clone)]
pub enum Form {
    PowerConc { a: f64 },
    Log1p,
    MinCap,
    /// `s ↦ s·base(1/s)`.
    StarOf(Box<Form>),
    PowerConv { c: f64 },
    ExpInv,
    Custom { name: String, f: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerConc { a } => write!(f, "t^{a}"),
            Self::Log1p => write!(f, "ln(1+t)"),
            Self::MinCap => write!(f, "min(t,1)"),
            Self::StarOf(b) => write!(f, "star({b})"),
            Self::PowerConv { c } => write!(f, "t^{c}"),
            Self::ExpInv => write!(f, "exp(1/t)-1"),
            Self::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

impl Form {
    fn eval_positive(&self, t: f64) -> f64 {
        match self {
            Self::PowerConc { a } => t.powf(*a),
            Self::Log1p => t.ln_1p(),
            Self::MinCap => t.min(1.0),
            Self::StarOf(b) => {
                if t.is_infinite() {
                    f64::INFINITY
                } else {
                    t * b.eval_positive(1.0 / t)
                }
            }
            Self::PowerConv { c } => t.powf(*c),
            Self::ExpInv => (1.0 / t).exp_m1(),
            Self::Custom { f, .. } => f(t),
        }
    }
}

/// A member of `Conc` or `Conv`.
#[derive(Clone, Debug)]
pub struct ScalarFunction {
    pub class: FnClass,
    pub form: Form,
    pub strictly_monotone: bool,
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.form)
    }
}

impl ScalarFunction {
    pub fn power_conc(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::ClassMismatch(format!("t^a is concave with the required limits only for 0 < a < 1, got a = {a}")));
        }
        Ok(Self { class: FnClass::Conc, form: Form::PowerConc { a }, strictly_monotone: true })
    }

    pub fn log1p() -> Self {
        Self { class: FnClass::Conc, form: Form::Log1p, strictly_monotone: true }
    }

    pub fn min_cap() -> Self {
        Self { class: FnClass::Conc, form: Form::MinCap, strictly_monotone: false }
    }

    pub fn power_conv(c: f64) -> Result<Self> {
        if !(c < 0.0 && c.is_finite()) {
            return Err(Error::ClassMismatch(format!("t^c is in the convex class only for c < 0, got c = {c}")));
        }
        Ok(Self { class: FnClass::Conv, form: Form::PowerConv { c }, strictly_monotone: true })
    }

    pub fn exp_inv() -> Self {
        Self { class: FnClass::Conv, form: Form::ExpInv, strictly_monotone: true }
    }

    /// An arbitrary function declared to be in `class`; use
    /// [`validate_class`] to test the claim.
    pub fn custom<F>(name: &str, class: FnClass, strictly_monotone: bool, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { class, form: Form::Custom { name: name.into(), f: Arc::new(f) }, strictly_monotone }
    }

    /// Value at `t >= 0`, with `φ(0) = 0` and `ψ(0) = +∞`.
    pub fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            return match self.class {
                FnClass::Conc => 0.0,
                FnClass::Conv => f64::INFINITY,
            };
        }
        self.form.eval_positive(t)
    }

    /// `s·f(1/s)`, extended by its limit 0 at `s = 0`.
    pub fn star_eval(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        s * self.eval(1.0 / s)
    }

    /// The transform `φ_*(s) = s·φ(1/s)`.
    pub fn phi_star(&self) -> Result<Self> {
        if self.class != FnClass::Conc {
            return Err(Error::ClassMismatch(format!("φ_* is defined on the concave class; {self} is convex")));
        }
        let form = match &self.form {
            Form::PowerConc { a } => Form::PowerConc { a: 1.0 - a },
            Form::StarOf(b) => (**b).clone(),
            other => Form::StarOf(Box::new(other.clone())),
        };
        Ok(Self { class: FnClass::Conc, form, strictly_monotone: self.strictly_monotone })
    }

    /// True when the form comes from the built-in catalog, whose class
    /// membership is known analytically.
    pub fn is_catalog(&self) -> bool {
        fn catalog(f: &Form) -> bool {
            match f {
                Form::Custom { .. } => false,
                Form::StarOf(b) => catalog(b),
                _ => true,
            }
        }
        catalog(&self.form)
    }

    /// Exponent of a power form.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.form {
            Form::PowerConc { a } => Some(a),
            Form::PowerConv { c } => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub t1: f64,
    pub t2: f64,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub function: String,
    pub class: FnClass,
    pub pass: bool,
    pub witness: Option<Witness>,
    pub failures: Vec<String>,
}

/// The validation grid `10^k`, `k = -6..6`, 25 points per decade.
pub fn validation_grid() -> Vec<f64> {
    (0..=300).map(|k| 10f64.powf(-6.0 + k as f64 / 25.0)).collect()
}

/// Midpoint concavity/convexity on the validation grid. Limit surrogates
/// apply to custom functions; catalog forms carry analytic guarantees.
pub fn validate_class(f: &ScalarFunction) -> ClassReport {
    let grid = validation_grid();
    let vals: Vec<f64> = grid.iter().map(|&t| f.eval(t)).collect();
    let mut failures = Vec::new();
    let mut witness: Option<Witness> = None;
    for i in 0..grid.len() {
        for step in [1, 5, 25] {
            let j = i + step;
            if j >= grid.len() {
                continue;
            }
            let (t1, t2) = (grid[i], grid[j]);
            let avg = 0.5 * (vals[i] + vals[j]);
            let mid = f.eval(0.5 * (t1 + t2));
            if !avg.is_finite() && f.class == FnClass::Conv {
                continue;
            }
            let violation = match f.class {
                FnClass::Conc => avg - mid,
                FnClass::Conv => mid - avg,
            };
            let tol = 1e-12 * vals[i].abs().max(vals[j].abs()).max(mid.abs());
            if violation.is_nan() || violation > tol {
                if witness.as_ref().is_none_or(|w| violation > w.violation) {
                    witness = Some(Witness { t1, t2, violation });
                }
            }
        }
    }
    if let Some(w) = &witness {
        let shape = match f.class {
            FnClass::Conc => "concavity",
            FnClass::Conv => "convexity",
        };
        failures.push(format!("midpoint {shape} fails between t = {} and t = {} by {}", w.t1, w.t2, w.violation));
    }
    if f.is_catalog() {
        // catalog parameters are range-checked at construction, which
        // guarantees the limits analytically
        return ClassReport { function: f.to_string(), class: f.class, pass: failures.is_empty(), witness, failures };
    }
    match f.class {
        FnClass::Conc => {
            let at0 = f.eval(1e-8);
            if !(at0 < 1e-3) {
                failures.push(format!("f(1e-8) = {at0} is not below 1e-3"));
            }
            let slope = f.eval(1e8) / 1e8;
            if !(slope < 1e-3) {
                failures.push(format!("f(1e8)/1e8 = {slope} is not below 1e-3"));
            }
            if vals.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                failures.push("values must be finite and nonnegative".into());
            }
        }
        FnClass::Conv => {
            let at0 = f.eval(1e-8);
            if !(at0 > 1e3) {
                failures.push(format!("f(1e-8) = {at0} is not above 1e3"));
            }
            let tail = f.eval(1e8);
            if !(tail < 1e-3) {
                failures.push(format!("f(1e8) = {tail} is not below 1e-3"));
            }
            if vals.iter().any(|v| !(*v >= 0.0)) {
                failures.push("values must be nonnegative".into());
            }
        }
    }
    ClassReport { function: f.to_string(), class: f.class, pass: failures.is_empty(), witness, failures }
}
