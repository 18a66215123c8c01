//! Exact linear programming, local-polytope membership and the best CHSH
//! value reachable by mixing a behavior with local ones.

pub mod frontier;
pub mod local;
pub mod lp;

use thiserror::Error;

use crate::behavior::BehaviorError;

pub use frontier::{
    max_mixture_conditional_chsh, mixture_program, AgreementConstraint, ConditioningEvent, MixtureOptimum, MixtureProgram,
};
pub use local::{
    check_locality_certificate, enumerate_vertices, is_local, vertex_count, DeterministicVertex, LocalityCertificate,
    LocalityVerdict, VertexWeight,
};
pub use lp::{solve_lp, verify_certificate, Constraint, ExactField, LinearProgram, LpError, LpOutcome, Relation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimError {
    #[error("exact backend required")]
    FloatInput,
    #[error("scenario has {0} deterministic strategies, limit is 10^6")]
    TooManyVertices(u128),
    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),
    #[error("constraint set is infeasible")]
    Infeasible,
    #[error("unexpected LP outcome: {0}")]
    Unexpected(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, OptimError>;
