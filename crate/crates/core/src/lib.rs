//! Double K-contact structures on round odd-dimensional spheres and
//! numerical verification of their transnormal, isoparametric and
//! harmonic-unit-vector-field identities.
//!
//! Everything is computed in ambient coordinates of S^{2n+1} ⊂ R^{2n+2}.
//! Fields are ambient formulas differentiated with nested dual numbers, so
//! first, second and third covariant derivatives are exact to round-off.

pub mod calculus;
pub mod connection;
pub mod contact;
pub mod double;
pub mod dual;
pub mod error;
pub mod field;
pub mod harmonic;
pub mod par;
pub mod report;
pub mod sphere;
pub mod suite;
pub mod tolerances;

pub use error::{GeometryError, Result};
pub use report::ResidualReport;
pub use sphere::{Frame, OrthoComplexStructure, SpherePoint, TangentVector};
