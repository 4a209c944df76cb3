//! Numerical differential geometry in model Cartan-Hadamard spaces: geodesics,
//! parallel transport, total curvature of curves and surfaces, planar
//! majorization of curves, hyperbolic convex hulls and developing maps.

pub mod config;
pub mod curves;
pub mod develop;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod majorize;
pub mod fixtures;
pub mod hull;
pub mod io;
pub mod ode;
pub mod spaces;
pub mod surfaces;
pub mod transport;

pub use curves::SampledCurve;
pub use error::{Error, Result};
pub use spaces::{Matrix, Model, ModelSpace, Vector};
pub use transport::FrameField;
