//! Numerical engine for the level-set nonlocal functional
//!
//! ```text
//! I_{delta,p}(u, O) = iint_{|u(x)-u(y)| > delta} delta^p / |x-y|^{d+p} dx dy
//! ```
//!
//! together with verification suites for the quantitative statements it
//! drives: the BBM limit, doubling of the raw level integral, set-geometry
//! and Poincare-type inequalities, superlevel cascades with exponential
//! integrability, and the two sharpness constructions.
//!
//! Core math is generic over the scalar type via [`real::Real`]
//! (`f32`/`f64`); the verification layer and the concrete aliases below are
//! pinned to `f64`.

pub mod error;
pub mod estimate;
pub mod fields;
pub mod functional;
pub mod geometry;
pub mod levelset;
pub mod mc;
pub mod quad;
pub mod real;
pub mod report;
pub mod special;
pub mod verifiers;

pub use error::{Error, Result};
pub use estimate::{Estimate, Method};
pub use geometry::{Domain, Point, SamplerConfig};
pub use real::Real;

/// Concrete `f64` aliases for the common types.
pub type DomainF = Domain<f64>;
pub type PointF = Point<f64>;
pub type FieldF = fields::ScalarField<f64>;
pub type ProfileF = levelset::Profile<f64>;
pub type EstimateF = Estimate<f64>;
pub type ParamsF = functional::NonlocalParams<f64>;
pub type MollifierF = functional::MollifierSpec<f64>;
