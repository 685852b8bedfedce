//! Numerical Riemannian geometry on coordinate charts: curvature tensors,
//! the V-static equation and its divergence identities, checked as
//! pointwise and integrated residuals.

pub mod bochner;
pub mod catalog;
pub mod checks;
pub mod chart;
pub mod conformal;
pub mod covariant;
pub mod curvature;
pub mod diff;
pub mod error;
pub mod grid;
pub mod quadrature;
pub mod spectral;
pub mod tensor;
pub mod vstatic;

pub use chart::{Backend, Chart, Interval, MetricJet, MetricModel};
pub use diff::{DiffConfig, ScalarField};
pub use error::{GeometryError, Result};
pub use tensor::{Symmetry, TensorValue, Variance};
