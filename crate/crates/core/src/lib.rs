//! Harmonic shears on the unit disk and numerical convexity checks for them.

pub mod analytic;
pub mod boundary_rotation;
pub mod error;
pub mod geometry;
pub mod probe;
pub mod quadrature;
pub mod schwarz;
pub mod shear;
pub mod text;

pub use analytic::{catalog, rotate_analytic, AnalyticFunction, CatalogId, Jet, C64};
pub use error::{Error, Result};
pub use quadrature::{antiderivative, integrate_segment, QuadratureConfig};
pub use schwarz::{make_schwarz, SchwarzFunction, SchwarzSpec};
pub use shear::{analytic_combination, normalize, rotate_harmonic, shear_construct, HarmonicMap, ShearSystem};
