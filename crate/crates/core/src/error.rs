use crate::matroid::MatroidError;
use crate::model::ValidationReport;
use crate::value::ParseValueError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid instance:\n{0}")]
    Invalid(ValidationReport),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("engine `{engine}` requires unit capacities; vertex {vertex} has a different constraint")]
    EngineMismatch { engine: &'static str, vertex: String },
    #[error("enumeration cap exceeded: {edges} edges, cap is {cap}")]
    CapExceeded { edges: usize, cap: usize },
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Value(#[from] ParseValueError),
    #[error("malformed instance file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
