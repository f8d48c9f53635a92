//! Core library for metric contact pair geometry: a symbolic expression
//! layer with second-order jets, a per-chart curvature engine, structure
//! validators, curvature-tensor specializations, a manifold zoo, and the
//! plain-text manifold file format.

pub mod contact;
pub mod expr;
pub mod geometry;
pub mod report;
pub mod sample;
pub mod tensors;
pub mod zoo;

pub use expr::{Expr, Jet2};
pub use geometry::{ChartedManifold, CurvatureBundle};
pub use report::{AuditEntry, AuditReport, Provenance};
pub use tensors::{QuasiConformalParams, Subject, TensorKind, TensorValue};
