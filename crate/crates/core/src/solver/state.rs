use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::IncompleteDataset;
use crate::error::SolverError;
use crate::graphs::{feature_knn_graph, simplex_project, FeatureGraph};
use crate::linalg::{orthonormal_columns, orthonormality_error};
use crate::rng::seeded;

use super::params::HyperParams;
use super::steps;

/// All optimizer variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    /// Consensus representation, `c × n`, nonnegative.
    pub p: DMatrix<f64>,
    /// Sample similarity, `n × n`; rows on the simplex, zero diagonal.
    pub s: DMatrix<f64>,
    /// Spectral embedding, `n × c`, orthonormal columns.
    pub f: DMatrix<f64>,
    /// Per-view bases, `m_v × c`, orthonormal columns.
    pub u: Vec<DMatrix<f64>>,
    /// Per-view recovery matrices, `m_v × n_missing_v`.
    pub b: Vec<DMatrix<f64>>,
    /// View weights on the simplex.
    pub alpha: Vec<f64>,
    /// Feature graphs, fixed after initialization.
    pub graphs: Vec<FeatureGraph>,
    pub iter: usize,
    /// Objective after initialization and after every iteration.
    pub objective_trace: Vec<f64>,
}

impl ModelState {
    pub fn n_views(&self) -> usize {
        self.u.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.p.nrows()
    }

    pub fn diagnostics(&self) -> ConstraintDiagnostics {
        let n = self.s.nrows();
        let mut s_row_sum_error: f64 = 0.0;
        let mut s_diag_max: f64 = 0.0;
        for i in 0..n {
            s_row_sum_error = s_row_sum_error.max((self.s.row(i).sum() - 1.0).abs());
            s_diag_max = s_diag_max.max(self.s[(i, i)].abs());
        }
        ConstraintDiagnostics {
            p_min: self.p.min(),
            s_min: self.s.min(),
            s_max: self.s.max(),
            s_row_sum_error,
            s_diag_max,
            f_orthonormality_error: orthonormality_error(&self.f),
            u_orthonormality_error: self.u.iter().map(orthonormality_error).fold(0.0, f64::max),
            alpha_sum_error: (self.alpha.iter().sum::<f64>() - 1.0).abs(),
            alpha_min: self.alpha.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

/// Constraint residuals of a [`ModelState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintDiagnostics {
    pub p_min: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub s_row_sum_error: f64,
    pub s_diag_max: f64,
    pub f_orthonormality_error: f64,
    pub u_orthonormality_error: f64,
    pub alpha_sum_error: f64,
    pub alpha_min: f64,
}

impl ConstraintDiagnostics {
    /// Feasibility at the stated tolerances (`alpha_tol` is applied to the
    /// weight sum, `tol` to everything else).
    pub fn is_feasible(&self, tol: f64, alpha_tol: f64) -> bool {
        self.p_min >= 0.0
            && self.s_min >= 0.0
            && self.s_max <= 1.0
            && self.s_row_sum_error <= tol
            && self.s_diag_max == 0.0
            && self.f_orthonormality_error <= tol
            && self.u_orthonormality_error <= tol
            && self.alpha_sum_error <= alpha_tol
            && self.alpha_min >= 0.0
    }
}

/// `X^v` with its missing columns filled from `B^v`.
pub fn recovered_data(state: &ModelState, dataset: &IncompleteDataset, v: usize) -> DMatrix<f64> {
    let index = dataset.missing_index(v);
    let mut y = dataset.view(v).clone();
    for (i, &j) in index.indices().iter().enumerate() {
        y.set_column(j, &state.b[v].column(i));
    }
    y
}

/// Builds the feature graph of one view from its observed columns. The
/// neighbor count is capped at `m_v − 1`; single-feature views and views with
/// no observed sample get an edgeless graph.
pub fn view_graph(
    dataset: &IncompleteDataset,
    v: usize,
    params: &HyperParams,
) -> Result<FeatureGraph, SolverError> {
    let m = dataset.view(v).nrows();
    let observed = dataset.observed_columns(v);
    let k = params.k_graph.min(m.saturating_sub(1));
    if k == 0 || observed.ncols() == 0 {
        return Ok(FeatureGraph::empty(m));
    }
    Ok(feature_knn_graph(&observed, k, params.kernel)?)
}

/// Seeded initial state: uniform view weights, random orthonormal bases,
/// small Gaussian recovery matrices, a random row-stochastic similarity,
/// its spectral embedding, and `P = max(mean_v UᵀX, eps)`.
pub fn init_state(
    dataset: &IncompleteDataset,
    params: &HyperParams,
) -> Result<ModelState, SolverError> {
    params.validate()?;
    let n = dataset.n_samples();
    let l = dataset.n_views();
    let c = params.c;
    if c > n {
        return Err(SolverError::TooManyClusters {
            c,
            what: "the sample count".into(),
            limit: n,
        });
    }
    for (v, &m) in dataset.dims().iter().enumerate() {
        if c > m {
            return Err(SolverError::TooManyClusters {
                c,
                what: format!("the feature count of view {v}"),
                limit: m,
            });
        }
    }

    let mut rng = seeded(params.seed);
    let mut gaussian = |rows: usize, cols: usize, scale: f64| {
        DMatrix::from_fn(rows, cols, |_, _| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        })
    };
    let u: Vec<DMatrix<f64>> = dataset
        .dims()
        .iter()
        .map(|&m| orthonormal_columns(gaussian(m, c, 1.0)))
        .collect();
    let b: Vec<DMatrix<f64>> = (0..l)
        .map(|v| {
            gaussian(
                dataset.view(v).nrows(),
                dataset.missing_index(v).len(),
                0.01,
            )
        })
        .collect();

    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let projected = simplex_project(&row, i)?;
        s.set_row(i, &nalgebra::RowDVector::from_vec(projected));
    }

    let mut p = DMatrix::zeros(c, n);
    for (v, basis) in u.iter().enumerate() {
        p += basis.transpose() * dataset.view(v);
    }
    p /= l as f64;
    p.apply(|x| *x = x.max(params.eps));

    let graphs = (0..l)
        .map(|v| view_graph(dataset, v, params))
        .collect::<Result<Vec<_>, _>>()?;

    let mut state = ModelState {
        p,
        s,
        f: DMatrix::zeros(n, c),
        u,
        b,
        alpha: vec![1.0 / l as f64; l],
        graphs,
        iter: 0,
        objective_trace: Vec::new(),
    };
    state.f = steps::update_f(&state);
    let objective = super::objective::objective(&state, dataset, params);
    state.objective_trace.push(objective);
    Ok(state)
}
