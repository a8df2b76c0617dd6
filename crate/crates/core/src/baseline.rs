//! Single-view and concatenation baselines built on k-means.

use nalgebra::DMatrix;

use crate::data::IncompleteDataset;
use crate::error::EvalError;
use crate::eval::{kmeans, ClusteringResult, KMeans, NmiNorm};

/// View `v` with every missing column replaced by the per-feature mean of the
/// observed columns.
pub fn mean_filled_view(dataset: &IncompleteDataset, v: usize) -> DMatrix<f64> {
    let observed = dataset.mask().observed_samples(v);
    let x = dataset.view(v);
    let mut filled = x.clone();
    if observed.is_empty() {
        return filled;
    }
    let means: Vec<f64> = x
        .row_iter()
        .map(|row| observed.iter().map(|&j| row[j]).sum::<f64>() / observed.len() as f64)
        .collect();
    for j in 0..dataset.n_samples() {
        if !dataset.mask().is_observed(j, v) {
            for (i, &m) in means.iter().enumerate() {
                filled[(i, j)] = m;
            }
        }
    }
    filled
}

/// Zero-filled views stacked feature-wise; one sample per row.
pub fn stacked_zero_filled(dataset: &IncompleteDataset) -> DMatrix<f64> {
    let total: usize = dataset.dims().iter().sum();
    let mut out = DMatrix::zeros(dataset.n_samples(), total);
    let mut offset = 0;
    for x in dataset.views() {
        out.view_mut((0, offset), (x.ncols(), x.nrows()))
            .copy_from(&x.transpose());
        offset += x.nrows();
    }
    out
}

/// k-means on the concatenation of all zero-filled views.
pub fn concat_zerofill(
    dataset: &IncompleteDataset,
    c: usize,
    restarts: usize,
    seed: u64,
) -> Result<KMeans, EvalError> {
    kmeans(&stacked_zero_filled(dataset), c, restarts, seed)
}

/// Outcome of the best-single-view baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct BestSingleView {
    pub per_view: Vec<ClusteringResult>,
    /// Index of the view with the highest accuracy (lowest index on ties).
    pub best_view: usize,
}

impl BestSingleView {
    pub fn best(&self) -> &ClusteringResult {
        &self.per_view[self.best_view]
    }
}

/// Mean-imputes each view, clusters it with k-means, and keeps the view that
/// scores best against `truth`.
pub fn bsv_meanfill(
    dataset: &IncompleteDataset,
    truth: &[usize],
    c: usize,
    restarts: usize,
    seed: u64,
    norm: NmiNorm,
) -> Result<BestSingleView, EvalError> {
    let mut per_view = Vec::with_capacity(dataset.n_views());
    for v in 0..dataset.n_views() {
        let km = kmeans(&mean_filled_view(dataset, v).transpose(), c, restarts, seed)?;
        per_view.push(ClusteringResult::score(
            km.labels,
            truth,
            km.objective,
            norm,
        )?);
    }
    let best_view =
        per_view.iter().enumerate().fold(
            0,
            |best, (v, r)| if r.acc > per_view[best].acc { v } else { best },
        );
    Ok(BestSingleView {
        per_view,
        best_view,
    })
}
