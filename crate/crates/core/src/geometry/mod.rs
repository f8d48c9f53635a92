//! Pointwise Riemannian machinery over a single chart: metric and inverse,
//! Levi-Civita connection, Riemann/Ricci/scalar/sectional curvature,
//! covariant derivatives, exterior calculus on low-degree forms, Lie
//! brackets, and the Nijenhuis tensor.

mod fields;
mod forms;
mod manifold;

pub use fields::{lie_bracket_values, nijenhuis, EndoJet, FieldJet, FormJet};
pub use forms::{
    d_of_exterior_derivative, interior_product, two_form_apply, wedge_power_nonzero, FormValue,
};
pub use manifold::{orthonormal_frame, sectional, ChartedManifold, CurvatureBundle};
pub(crate) use manifold::{covariant_derivative_endo_from_jet, covariant_derivative_from_jet};

use crate::expr::EvalError;
use thiserror::Error;

/// Errors raised by chart-level geometry. Evaluation problems from the
/// expression layer are wrapped, everything else is structural.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("expression evaluation failed: {0}")]
    Eval(#[from] EvalError),

    #[error(
        "metric is not positive definite at {point:?}: leading principal minor #{minor_index} = {minor_value:e}"
    )]
    NotSpd {
        point: Vec<f64>,
        minor_index: usize,
        minor_value: f64,
    },

    #[error("vectors do not span a 2-plane (Gram determinant {gram:e})")]
    DegeneratePlane { gram: f64 },

    #[error("unknown {kind} `{name}` on manifold `{manifold}`")]
    UnknownField {
        kind: &'static str,
        name: String,
        manifold: String,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("total form degree {got} does not match chart dimension {expected}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error(
        "structure is not decomposable at {point:?}: projector/endomorphism commutator residual {residual:e}"
    )]
    NotDecomposable { point: Vec<f64>, residual: f64 },

    #[error("quasi-conformal tensor requires parameters a and b")]
    MissingParams,

    #[error("unknown zoo entry `{0}`")]
    UnknownZooEntry(String),

    #[error("{0}")]
    Invalid(String),
}
