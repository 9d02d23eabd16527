use thiserror::Error;

use crate::expr::ExprError;
use crate::jet::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("{0} is not applicable in this evaluation mode")]
    NotApplicable(&'static str),
    #[error("structure function `{0}` depends on the chart coordinates in lie_group mode")]
    NotConstant(String),
    #[error("realized frame is not invertible (|det| = {0:e})")]
    FrameNotInvertible(f64),
    #[error("metric is singular (|det| = {0:e})")]
    SingularMetric(f64),
    #[error("precondition violated: {what} (residual {residual:e})")]
    PreconditionViolated { what: String, residual: f64 },
    #[error("constraint ac - b^2 - c y^2 = -1 violated at {point:?} (residual {residual:e})")]
    ConstraintViolated { point: [f64; 3], residual: f64 },
    #[error("parameter `{0}` must be nonzero")]
    ZeroParameter(&'static str),
    #[error("`{name}` must not depend on {coord}")]
    UnexpectedDependence { name: String, coord: &'static str },
    #[error("epsilon is not constant over the sample set")]
    EpsilonNotConstant,
    #[error("{0} is not finite")]
    NonFinite(&'static str),
}

impl GeometryError {
    /// Errors caused by evaluating at a singular point rather than by a
    /// malformed input.
    pub fn is_singular(&self) -> bool {
        matches!(
            self,
            GeometryError::Expr(ExprError::Jet(_))
                | GeometryError::FrameNotInvertible(_)
                | GeometryError::SingularMetric(_)
                | GeometryError::NonFinite(_)
        )
    }
}

impl From<JetError> for GeometryError {
    fn from(e: JetError) -> Self {
        GeometryError::Expr(ExprError::Jet(e))
    }
}
