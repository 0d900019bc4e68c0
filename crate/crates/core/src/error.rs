use thiserror::Error;

/// Errors raised anywhere in the core crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("direction is not unit length (|u| = {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("matrix is singular or not invertible (|det| = {det})")]
    SingularMatrix { det: f64 },

    #[error("radial minimization did not converge after {steps} steps")]
    RadialNonConvergence { steps: usize },

    #[error("non-convexity detected: curvature function {value} at node")]
    NonConvex { value: f64 },

    #[error("operation `{op}` is not supported for {kind}")]
    Unsupported { op: &'static str, kind: String },

    #[error("quadrature level {level} out of range for n = {dim} (a rule needs at least 8 nodes)")]
    QuadratureLevel { dim: usize, level: u32 },

    #[error("function class mismatch: {0}")]
    ClassMismatch(String),

    #[error("p={0} undefined: the L_p affine surface area needs p not in {{0, -n}}")]
    UndefinedP(f64),

    #[error("numeric overflow evaluating {0}")]
    Overflow(String),

    #[error("caps do not cover the base boundary: point {0:?} violates both halfspaces")]
    CapCover(Vec<f64>),

    #[error("map is not volume preserving (det = {det})")]
    NotUnimodular { det: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
