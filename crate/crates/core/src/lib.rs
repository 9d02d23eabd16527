//! Numeric verification engine for three-dimensional paracontact metric
//! geometry.

pub mod chart;
pub mod darboux;
pub mod error;
pub mod expr;
pub mod frame;
pub mod invariants;
pub mod jet;
pub mod normal;
pub mod report;
pub mod sampling;
pub mod specfile;
pub mod tolerances;

pub use error::GeometryError;
