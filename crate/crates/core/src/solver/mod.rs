//! The alternating optimizer.
//!
//! One sweep updates, in order: the consensus representation `P`, the
//! similarity graph `S`, the spectral embedding `F`, then for every view its
//! basis `U^v` and recovery matrix `B^v`, and finally the view weights `α`.
//! The loop stops when the relative objective change drops below `tol`.

mod objective;
mod params;
mod state;
mod steps;

use nalgebra::DMatrix;

use crate::data::IncompleteDataset;
use crate::error::SolverError;
use crate::eval::{kmeans, KMeans};
use crate::graphs::symmetrize;
use crate::linalg::largest_eigenvectors;

pub use objective::{
    objective, objective_terms, rank_term, similarity_fit, view_terms, ObjectiveTerms, ViewTerms,
};
pub use params::{BStep, HyperParams};
pub use state::{init_state, recovered_data, view_graph, ConstraintDiagnostics, ModelState};
pub use steps::{
    alpha_from_losses, embedding_distances, recovery_rhs, recovery_system, similarity_targets,
    update_alpha, update_b, update_f, update_p, update_s, update_u, view_losses,
};

/// What one sweep produced.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    pub terms: ObjectiveTerms,
    pub alpha: Vec<f64>,
    pub diagnostics: ConstraintDiagnostics,
    /// `|f_t − f_{t−1}| / |f_{t−1}|`.
    pub relative_change: f64,
}

/// Summary of a [`fit`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub initial: ObjectiveTerms,
    pub records: Vec<IterationRecord>,
    pub converged: bool,
}

impl FitReport {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_objective(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial.total(), |r| r.objective)
    }
}

/// One full sweep of block updates, in place.
pub fn sweep(
    state: &mut ModelState,
    dataset: &IncompleteDataset,
    params: &HyperParams,
) -> Result<(), SolverError> {
    state.p = update_p(state, dataset, params);
    state.s = update_s(state, params)?;
    state.f = update_f(state);
    for v in 0..state.n_views() {
        state.u[v] = update_u(state, dataset, v);
        state.b[v] = update_b(state, dataset, v, params)?;
    }
    state.alpha = update_alpha(state, dataset, params);
    state.iter += 1;
    Ok(())
}

fn relative_change(current: f64, previous: f64) -> f64 {
    (current - previous).abs() / previous.abs().max(f64::MIN_POSITIVE)
}

/// Runs the optimizer to convergence or `max_iter` sweeps.
pub fn fit(
    dataset: &IncompleteDataset,
    params: &HyperParams,
) -> Result<(ModelState, FitReport), SolverError> {
    fit_with(dataset, params, |_, _| {})
}

/// [`fit`] with a callback invoked after every sweep.
pub fn fit_with<F>(
    dataset: &IncompleteDataset,
    params: &HyperParams,
    mut observer: F,
) -> Result<(ModelState, FitReport), SolverError>
where
    F: FnMut(&ModelState, &IterationRecord),
{
    let mut state = init_state(dataset, params)?;
    let initial = objective_terms(&state, dataset, params);
    let mut records = Vec::new();
    let mut converged = false;
    while state.iter < params.max_iter {
        sweep(&mut state, dataset, params)?;
        let terms = objective_terms(&state, dataset, params);
        let value = terms.total();
        if !value.is_finite() {
            return Err(SolverError::NonFinite {
                iter: state.iter,
                state: Box::new(state),
            });
        }
        let previous = *state.objective_trace.last().expect("initial objective");
        state.objective_trace.push(value);
        let record = IterationRecord {
            iter: state.iter,
            objective: value,
            terms,
            alpha: state.alpha.clone(),
            diagnostics: state.diagnostics(),
            relative_change: relative_change(value, previous),
        };
        log::debug!(
            "iter {}: objective {:.6e} (rel change {:.3e})",
            record.iter,
            record.objective,
            record.relative_change
        );
        observer(&state, &record);
        let done = record.relative_change < params.tol;
        records.push(record);
        if done {
            converged = true;
            break;
        }
    }
    Ok((
        state,
        FitReport {
            initial,
            records,
            converged,
        },
    ))
}

/// Representation handed to k-means for the final partition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ClusterTarget {
    /// Columns of the consensus representation, scaled to unit length.
    #[default]
    P,
    /// Rows of the spectral embedding.
    F,
    /// Normalized spectral clustering of the symmetrized similarity.
    SSpectral,
}

/// Points (one per row) that [`cluster_state`] feeds to k-means.
pub fn cluster_points(state: &ModelState, target: ClusterTarget) -> DMatrix<f64> {
    match target {
        ClusterTarget::P => normalize_rows(state.p.transpose()),
        ClusterTarget::F => state.f.clone(),
        ClusterTarget::SSpectral => {
            let w = symmetrize(&state.s);
            let inv_sqrt: Vec<f64> = w
                .row_iter()
                .map(|r| {
                    let d = r.sum();
                    if d > 0.0 {
                        1.0 / d.sqrt()
                    } else {
                        0.0
                    }
                })
                .collect();
            let normalized = DMatrix::from_fn(w.nrows(), w.ncols(), |i, j| {
                inv_sqrt[i] * w[(i, j)] * inv_sqrt[j]
            });
            normalize_rows(largest_eigenvectors(&normalized, state.n_clusters()).1)
        }
    }
}

fn normalize_rows(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for mut row in m.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    m
}

/// Final partition of the samples into `c` clusters.
pub fn cluster_state(
    state: &ModelState,
    target: ClusterTarget,
    restarts: usize,
    seed: u64,
) -> Result<KMeans, crate::error::EvalError> {
    kmeans(
        &cluster_points(state, target),
        state.n_clusters(),
        restarts,
        seed,
    )
}
