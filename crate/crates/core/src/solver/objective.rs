use nalgebra::DMatrix;

use crate::data::IncompleteDataset;
use crate::graphs::laplacian_of_similarity;

use super::params::HyperParams;
use super::state::{recovered_data, ModelState};

/// Unweighted loss components of one view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewTerms {
    /// `‖Y − U P‖²`
    pub fit: f64,
    /// `λ1 Tr(Bᵀ L B)`
    pub smoothness: f64,
    /// `‖Uᵀ Y − P‖²`
    pub inverse: f64,
    /// `β ‖U‖²`
    pub basis_penalty: f64,
}

impl ViewTerms {
    pub fn total(&self) -> f64 {
        self.fit + self.smoothness + self.inverse + self.basis_penalty
    }
}

pub fn view_terms(
    state: &ModelState,
    dataset: &IncompleteDataset,
    v: usize,
    params: &HyperParams,
) -> ViewTerms {
    let y = recovered_data(state, dataset, v);
    let u = &state.u[v];
    let b = &state.b[v];
    let smoothness = if b.ncols() == 0 {
        0.0
    } else {
        params.lambda1 * (b.transpose() * state.graphs[v].laplacian() * b).trace()
    };
    ViewTerms {
        fit: (&y - u * &state.p).norm_squared(),
        smoothness,
        inverse: (u.transpose() * &y - &state.p).norm_squared(),
        basis_penalty: params.beta * u.norm_squared(),
    }
}

/// The objective split into its four groups.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ObjectiveTerms {
    /// `Σ α^r (‖Y − UP‖² + λ1 Tr(BᵀLB))`
    pub recovery: f64,
    /// `Σ α^r (‖UᵀY − P‖² + β‖U‖²)`
    pub inverse: f64,
    /// `λ2 ‖S − PᵀP‖²`
    pub manifold_fit: f64,
    /// `λ3 Tr(Fᵀ L_S F)`
    pub rank: f64,
}

impl ObjectiveTerms {
    pub fn total(&self) -> f64 {
        self.recovery + self.inverse + self.manifold_fit + self.rank
    }
}

pub fn similarity_fit(s: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    (s - p.transpose() * p).norm_squared()
}

pub fn rank_term(s: &DMatrix<f64>, f: &DMatrix<f64>) -> f64 {
    (f.transpose() * laplacian_of_similarity(s) * f).trace()
}

pub fn objective_terms(
    state: &ModelState,
    dataset: &IncompleteDataset,
    params: &HyperParams,
) -> ObjectiveTerms {
    let mut terms = ObjectiveTerms::default();
    for v in 0..state.n_views() {
        let w = state.alpha[v].powf(params.r);
        let t = view_terms(state, dataset, v, params);
        terms.recovery += w * (t.fit + t.smoothness);
        terms.inverse += w * (t.inverse + t.basis_penalty);
    }
    terms.manifold_fit = params.lambda2 * similarity_fit(&state.s, &state.p);
    terms.rank = params.lambda3 * rank_term(&state.s, &state.f);
    terms
}

/// Total objective value.
pub fn objective(state: &ModelState, dataset: &IncompleteDataset, params: &HyperParams) -> f64 {
    objective_terms(state, dataset, params).total()
}
