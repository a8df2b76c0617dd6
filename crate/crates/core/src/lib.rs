//! Incomplete multi-view clustering by recovery-regularized matrix
//! factorization with a reverse projection term, graph regularization
//! and adaptive view weights.
//!
//! The main entry point is [`solver::fit`], which takes an
//! [`data::IncompleteDataset`] and [`solver::HyperParams`] and returns the
//! learned [`solver::ModelState`]. [`solver::cluster_state`] turns a state
//! into labels, and [`eval`] scores them.

pub mod baseline;
pub mod data;
pub mod error;
pub mod eval;
pub mod graphs;
pub mod linalg;
pub mod rng;
pub mod solver;

pub use data::{IncompleteDataset, Mask, MissingIndex};
pub use error::{DataError, EvalError, GraphError, SolverError};
pub use solver::{fit, HyperParams, ModelState};
