//! Tripartite nonlocal behaviors built from bipartite resources.
//!
//! The crate covers exact behavior tables and their games, a small
//! density-matrix simulator, POVM dilation, PR-box wiring networks and an
//! exact simplex solver for locality certificates.

pub mod behavior;
pub mod dilation;
pub mod linalg;
pub mod nsbox;
pub mod optim;
pub mod quantum;
pub mod scalar;
pub mod targets;

pub use behavior::{Behavior, Scenario};
pub use scalar::{Backend, QSqrt2, Scalar};
