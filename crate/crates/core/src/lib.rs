//! Numerical toolkit for error–disturbance and joint-measurement
//! uncertainty relations on finite-dimensional quantum systems.
//!
//! The core types are generic over the real scalar ([`scalar::Real`], `f32`
//! or `f64`); the aliases below fix `f64`. Random sampling, θ-sweeps and the
//! acceptance suite are `f64` only.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod qmodel;
pub mod relations;
pub mod sampling;
pub mod scalar;
pub mod spinlab;
pub mod suite;

pub use error::{Error, Result};
pub use qmodel::{Channel, MomentSet};
pub use relations::{Evaluation, RelationId};
pub use scalar::Real;

pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Observable = qmodel::Observable<f64>;
pub type DensityOperator = qmodel::DensityOperator<f64>;
pub type MeasuringProcess = qmodel::MeasuringProcess<f64>;
pub type JointModel = qmodel::JointModel<f64>;
pub type BoundPair = bounds::BoundPair<f64>;
pub type RelationReport = relations::RelationReport<f64>;
pub type RelationInputs = relations::RelationInputs<f64>;
pub type ProofVectors = geometry::ProofVectors<f64>;
