use std::fmt;

use serde::Serialize;

use crate::quadrature::ExtReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub input: String,
    pub values: Vec<ExtReal>,
}

/// Outcome of one check. `lhs`/`rhs` are the two sides of the asserted
/// relation; `saturated` marks infinite-versus-infinite comparisons.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub status: CheckStatus,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub tolerance: f64,
    pub saturated: bool,
    pub witnesses: Vec<Witness>,
    pub quad_levels: Vec<u32>,
    pub notes: Vec<String>,
    /// Wall time; left out of JSON so that reports are reproducible.
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl VerificationReport {
    pub fn new(check: &str, lhs: ExtReal, rhs: ExtReal, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            status: CheckStatus::Inconclusive,
            lhs,
            rhs,
            tolerance,
            saturated: false,
            witnesses: Vec::new(),
            quad_levels: Vec::new(),
            notes: Vec::new(),
            runtime_ms: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub(crate) fn witness(&mut self, input: impl Into<String>, values: Vec<ExtReal>) {
        self.witnesses.push(Witness { input: input.into(), values });
    }

    pub(crate) fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub(crate) fn set(&mut self, ok: bool) {
        self.status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
    }

    /// Fails the report if `ok` is false, keeping an earlier failure.
    pub(crate) fn require(&mut self, ok: bool, why: impl Into<String>) {
        if !ok {
            self.status = CheckStatus::Fail;
            self.notes.push(why.into());
        }
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`; 0 when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Equality of extended reals within relative `tol`; returns
/// `(holds, saturated)`.
pub fn ext_equal(a: ExtReal, b: ExtReal, tol: f64) -> (bool, bool) {
    match (a, b) {
        (ExtReal::PlusInfinity, ExtReal::PlusInfinity) => (true, true),
        (ExtReal::Finite(x), ExtReal::Finite(y)) => (rel_diff(x, y) <= tol, false),
        _ => (false, false),
    }
}
