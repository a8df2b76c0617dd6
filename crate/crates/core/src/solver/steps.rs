//! The six block updates of one optimizer sweep. Each returns the new value
//! of its block and leaves the state untouched.

use nalgebra::{DMatrix, RowDVector};

use crate::data::IncompleteDataset;
use crate::error::SolverError;
use crate::graphs::{laplacian_of_similarity, simplex_project};
use crate::linalg::{procrustes, smallest_eigenvectors};

use super::objective::view_terms;
use super::params::{BStep, HyperParams};
use super::state::{recovered_data, ModelState};

fn weight_powers(alpha: &[f64], r: f64) -> Vec<f64> {
    alpha.iter().map(|a| a.powf(r)).collect()
}

/// Multiplicative consensus update
/// `P ⊙ [Σ α^r UᵀY + λ2 P S]₊ ⊘ (λ2 P PᵀP + Σ α^r P + eps)`.
///
/// Positive entries are kept at or above `eps`: a multiplicative update can
/// never revive an exact zero, so a clamped numerator would otherwise lock
/// the entry at zero for the rest of the run. Entries that are already zero
/// stay zero.
pub fn update_p(
    state: &ModelState,
    dataset: &IncompleteDataset,
    params: &HyperParams,
) -> DMatrix<f64> {
    let p = &state.p;
    let powers = weight_powers(&state.alpha, params.r);
    let mut numerator = params.lambda2 * (p * &state.s);
    for (v, &w) in powers.iter().enumerate() {
        numerator += w * (state.u[v].transpose() * recovered_data(state, dataset, v));
    }
    let gram = p * p.transpose();
    let weight_total: f64 = powers.iter().sum();
    let denominator = params.lambda2 * (gram * p) + weight_total * p;
    DMatrix::from_fn(p.nrows(), p.ncols(), |i, j| {
        let current = p[(i, j)];
        if current == 0.0 {
            return 0.0;
        }
        (current * numerator[(i, j)].max(0.0) / (denominator[(i, j)] + params.eps)).max(params.eps)
    })
}

/// Pairwise squared distances between the rows of `f`.
pub fn embedding_distances(f: &DMatrix<f64>) -> DMatrix<f64> {
    let n = f.nrows();
    let norms: Vec<f64> = f.row_iter().map(|r| r.norm_squared()).collect();
    let gram = f * f.transpose();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (norms[i] + norms[j] - 2.0 * gram[(i, j)]).max(0.0)
        }
    })
}

/// Unprojected row targets `a_ij − λ3/(8 λ2) · ‖F_i − F_j‖²` with
/// `A = PᵀP`; the diagonal is left as is and ignored by the projection.
pub fn similarity_targets(
    state: &ModelState,
    params: &HyperParams,
) -> Result<DMatrix<f64>, SolverError> {
    if params.lambda2 == 0.0 {
        return Err(SolverError::ZeroLambda2);
    }
    let a = state.p.transpose() * &state.p;
    let h = embedding_distances(&state.f);
    Ok(a - (params.lambda3 / (8.0 * params.lambda2)) * h)
}

/// Row-wise projection of the similarity targets onto the zero-diagonal simplex.
pub fn update_s(state: &ModelState, params: &HyperParams) -> Result<DMatrix<f64>, SolverError> {
    let targets = similarity_targets(state, params)?;
    let n = targets.nrows();
    let mut s = DMatrix::zeros(n, n);
    let mut row = vec![0.0; n];
    for i in 0..n {
        row.iter_mut()
            .zip(targets.row(i).iter())
            .for_each(|(r, &t)| *r = t);
        let projected = simplex_project(&row, i)?;
        s.set_row(i, &RowDVector::from_vec(projected));
    }
    Ok(s)
}

/// Eigenvectors of the `c` smallest eigenvalues of `L_S`.
pub fn update_f(state: &ModelState) -> DMatrix<f64> {
    let l_s = laplacian_of_similarity(&state.s);
    smallest_eigenvectors(&l_s, state.n_clusters()).1
}

/// Orthogonal Procrustes basis `U = T Rᵀ` from the SVD of `Y Pᵀ`.
pub fn update_u(state: &ModelState, dataset: &IncompleteDataset, v: usize) -> DMatrix<f64> {
    let m = recovered_data(state, dataset, v) * state.p.transpose();
    let seed = ((state.iter as u64) << 16) ^ v as u64;
    let result = procrustes(&m, seed);
    if result.rank < state.n_clusters() {
        log::warn!(
            "view {v}: Y Pᵀ has rank {} < {}; completed the basis with random orthonormal directions",
            result.rank,
            state.n_clusters()
        );
    }
    result.rotation
}

/// `U P Hᵀ`: the columns of `U P` at the missing samples of view `v`.
pub fn recovery_rhs(state: &ModelState, dataset: &IncompleteDataset, v: usize) -> DMatrix<f64> {
    let index = dataset.missing_index(v);
    &state.u[v] * index.gather(&state.p)
}

/// The recovery system `(matrix, rhs)` whose solution is the new `B^v`.
pub fn recovery_system(
    state: &ModelState,
    dataset: &IncompleteDataset,
    v: usize,
    params: &HyperParams,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = dataset.view(v).nrows();
    let lap = state.graphs[v].laplacian();
    let rhs = recovery_rhs(state, dataset, v);
    match params.b_step {
        BStep::Published => (DMatrix::identity(m, m) * 2.0 + params.lambda1 * lap, rhs),
        BStep::Exact => (
            DMatrix::identity(m, m) + params.lambda1 * lap + &state.u[v] * state.u[v].transpose(),
            rhs * 2.0,
        ),
    }
}

/// Solves the recovery system by Cholesky factorization.
pub fn update_b(
    state: &ModelState,
    dataset: &IncompleteDataset,
    v: usize,
    params: &HyperParams,
) -> Result<DMatrix<f64>, SolverError> {
    if dataset.missing_index(v).is_empty() {
        return Ok(state.b[v].clone());
    }
    let (matrix, rhs) = recovery_system(state, dataset, v, params);
    let chol = matrix
        .cholesky()
        .ok_or(SolverError::NotPositiveDefinite { view: v })?;
    Ok(chol.solve(&rhs))
}

/// Per-view losses `Λ^v` entering the weight update.
pub fn view_losses(
    state: &ModelState,
    dataset: &IncompleteDataset,
    params: &HyperParams,
) -> Vec<f64> {
    (0..state.n_views())
        .map(|v| view_terms(state, dataset, v, params).total())
        .collect()
}

/// Minimizer of `Σ α_v^r Λ_v` over the simplex:
/// `α_v ∝ Λ_v^{1/(1−r)}`. Views with zero loss share all the weight.
pub fn alpha_from_losses(losses: &[f64], r: f64) -> Vec<f64> {
    let l = losses.len();
    let zeros = losses.iter().filter(|&&x| x <= 0.0).count();
    if zeros > 0 {
        return losses
            .iter()
            .map(|&x| if x <= 0.0 { 1.0 / zeros as f64 } else { 0.0 })
            .collect();
    }
    let logs: Vec<f64> = losses.iter().map(|x| x.ln() / (1.0 - r)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|x| (x - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    debug_assert!(l > 0);
    weights.iter().map(|w| w / total).collect()
}

pub fn update_alpha(
    state: &ModelState,
    dataset: &IncompleteDataset,
    params: &HyperParams,
) -> Vec<f64> {
    alpha_from_losses(&view_losses(state, dataset, params), params.r)
}
