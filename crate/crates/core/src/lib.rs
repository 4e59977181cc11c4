//! Bieberbach polynomials for numerical conformal mapping.
//!
//! Pipeline: [`geometry`] describes a domain, [`quadrature`] integrates over
//! its boundary, [`gram`] assembles area moments, [`orthopoly`] orthonormalizes
//! them, and [`bieberbach`] builds the polynomial approximants of the
//! normalized conformal map. [`refmaps`] supplies exact maps for validation and
//! [`experiments`] runs the convergence and divergence studies.

pub mod bieberbach;
pub mod digest;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod gram;
pub mod linalg;
pub mod orthopoly;
pub mod poly;
pub mod precision;
pub mod quadrature;
pub mod refmaps;

pub use error::{Error, Result};
pub use precision::{Dd, Precision, Qd, Real};
