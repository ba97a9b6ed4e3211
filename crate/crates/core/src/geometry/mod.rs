//! Exact polyhedral machinery: rational linear algebra, strict-feasibility
//! LP, central arrangement faces and the iterated maximal-subset primitives.

pub mod arrangement;
pub mod chain;
pub mod linalg;
pub mod lp;

pub use arrangement::{enumerate_faces, Arrangement, ArrangementFace, SignVector, DEFAULT_MAX_HYPERPLANES};
pub use chain::{max_indices, max_subset, realize_iterated_max, super_chain};
pub use linalg::Q;
pub use lp::{feasible_point, lp_strict_feasible, LinearConstraint, LinearProgram, LpOutcome, Relation, StrictFeasibility};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("empty point set")]
    EmptySet,
    #[error("empty frame")]
    EmptyFrame,
    #[error("zero direction vector")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("arrangement has {hyperplanes} distinct hyperplanes, limit is {limit}; use sampling mode or raise the limit")]
    ArrangementTooLarge { hyperplanes: usize, limit: usize },
}
