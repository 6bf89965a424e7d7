//! Charts, metrics and tensor fields with exact curvature computations.
//!
//! Conventions used throughout:
//!
//! * `Γ^a_{bc} = ½ g^{ad}(∂_b g_{dc} + ∂_c g_{bd} − ∂_d g_{bc})`
//! * `R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce}Γ^e_{db} − Γ^a_{de}Γ^e_{cb}`
//! * `R_{bd} = R^a_{bad}`, scalar `g^{bd} R_{bd}`
//! * a covariant derivative inserts its index as the first covariant slot,
//!   so `∇∇R` has component order `(a; ρ, σ, b, c, d)`.

mod chart;
mod curvature;
mod field;
mod metric;

use thiserror::Error;

use crate::expr::ExprError;

pub use chart::Chart;
pub use curvature::{christoffel, covariant_derivative, ricci, riemann, riemann_lowered, scalar_curvature};
pub use field::{Index, TensorField, ZeroTest};
pub use metric::{MetricField, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("degenerate metric")]
    Degenerate,
    #[error("metric is degenerate or singular at the base point")]
    DegenerateAtBase,
    #[error("signature mismatch: expected {expected} negative eigenvalue(s), found {found}")]
    Signature { expected: usize, found: usize },
    #[error("metric is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("tensors live on different charts")]
    ChartMismatch,
    #[error("invalid slot: {0}")]
    InvalidSlot(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("duplicate name '{0}' in chart")]
    DuplicateName(String),
    #[error("expression mentions '{0}', which is not a chart coordinate or parameter")]
    UnknownVariable(String),
}
