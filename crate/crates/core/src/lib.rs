//! Approximately maximum cγ-stable matchings.
//!
//! The solver duplicates every edge into typed copies with strict rankings,
//! computes a stable solution on the copies (deferred acceptance for
//! one-to-one instances, a matroid-kernel fixed point otherwise), and projects
//! back. The result is critical, cγ-stable and at least two thirds the size of
//! any cγ-stable matching. [`verify`] checks all of this by brute force on
//! small instances.

pub mod error;
pub mod extension;
pub mod format;
pub mod generate;
pub mod gs;
pub mod kernel;
pub mod matroid;
pub mod model;
pub mod reduce;
pub mod solver;
pub mod value;
pub mod verify;

pub use error::{Error, Result};
pub use extension::{Construction, ExtendedInstance};
pub use matroid::MatroidSpec;
pub use model::{Edge, Instance, Matching, Side, VertexRef};
pub use solver::{solve, ConstructionChoice, Engine, SolveOptions, SolveReport};
pub use value::Value;
pub use verify::{Certificate, Oracle, RatioReport};
