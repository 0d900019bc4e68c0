//! Numerical affine surface areas of convex bodies that contain the origin.
//!
//! The crate is organised bottom-up:
//!
//! - [`bodies`]: convex body representations (balls, ellipsoids, smooth
//!   support-function bodies, polytopes, capped bodies and lazy polars) with
//!   support/radial evaluation, polarity, volumes and linear images.
//! - [`geometry`]: curvature calculus on the sphere (gradient map, curvature
//!   function, `alpha`, `kappa0`, radial Jacobian).
//! - [`quadrature`]: rules on the unit sphere, extended reals and integration
//!   against the cone measure and the sphere measure of a body.
//! - [`functionals`]: the concave/convex function classes and the affine
//!   surface areas built from them.
//! - [`verify`]: executable checks producing [`VerificationReport`]s.

pub mod bodies;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod verify;

pub use bodies::{ConvexBody, Halfspace};
pub use error::{Error, Result};
pub use functionals::{Engine, FnClass, Functional, ScalarFunction};
pub use geometry::BoundaryPointData;
pub use linalg::{Matrix, Vector};
pub use quadrature::{ExtReal, RuleKind, SphereRule};
pub use verify::{CheckStatus, VerificationReport};
