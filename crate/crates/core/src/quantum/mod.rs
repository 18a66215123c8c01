//! Density-matrix simulation of strategies on bipartite sources.

pub mod constructions;
pub mod layout;
pub mod matrix;
pub mod probe;
pub mod schmidt;
pub mod separable;
pub mod strategy;

pub use constructions::{build_ghz_strategy, build_rabello_quantum_strategy, build_theorem1_strategy};
pub use layout::{Register, RegisterLayout};
pub use matrix::{tensor, CScalar, Matrix, MatrixError, MATRIX_EPS};
pub use probe::{qb2_tradeoff_probe, tradeoff_family, ProbeCase, ProbeReport, ProbeRow};
pub use schmidt::{schmidt_decompose, Schmidt};
pub use separable::{cascade_to_separable, is_ppt, partial_transpose, ppt_min_eigenvalue, SepTerm, SeparableMeasurement};
pub use strategy::{behavior_from_strategy, post_measurement_state, regroup_registers, Povm, QuantumStrategy, Source};

use crate::behavior::BehaviorError;
use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("invalid strategy: {0}")]
    Invalid(String),
    #[error("POVM elements do not sum to the identity (deviation {0:e})")]
    Incomplete(f64),
    #[error("measurement outcome has zero probability")]
    ZeroProbability,
    #[error("input is not a unit vector (norm {0})")]
    NotUnit(f64),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
