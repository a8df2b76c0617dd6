//! Feature graphs, graph Laplacians and the zero-diagonal simplex projection.

use std::cmp::Ordering;

use nalgebra::DMatrix;

use crate::error::GraphError;

/// Edge weighting for [`feature_knn_graph`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Kernel {
    /// `exp(-d² / σ²)` with σ the median included edge length.
    #[default]
    Heat,
    /// Weight 1 on every included edge.
    Binary,
}

/// A symmetric nonnegative graph over the feature rows of one view, together
/// with its combinatorial Laplacian `L = D − G`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGraph {
    weights: DMatrix<f64>,
    laplacian: DMatrix<f64>,
}

impl FeatureGraph {
    pub fn from_weights(weights: DMatrix<f64>) -> Self {
        let laplacian = laplacian(&weights);
        Self { weights, laplacian }
    }

    /// The edgeless graph on `nodes` nodes.
    pub fn empty(nodes: usize) -> Self {
        Self::from_weights(DMatrix::zeros(nodes, nodes))
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    pub fn n_nodes(&self) -> usize {
        self.weights.nrows()
    }
}

/// `D − G` with `D` the diagonal of row sums of `g`.
pub fn laplacian(g: &DMatrix<f64>) -> DMatrix<f64> {
    let mut l = -g.clone();
    for (i, s) in g.row_iter().map(|r| r.sum()).enumerate() {
        l[(i, i)] += s;
    }
    l
}

/// k-nearest-neighbor graph whose nodes are the feature rows of `x_observed`
/// (`m_v × n_observed`), using Euclidean distance between rows.
///
/// An edge `(i, j)` exists when either endpoint is among the other's `k`
/// nearest rows (distance ties go to the lower index).
pub fn feature_knn_graph(
    x_observed: &DMatrix<f64>,
    k: usize,
    kernel: Kernel,
) -> Result<FeatureGraph, GraphError> {
    let m = x_observed.nrows();
    if k == 0 {
        return Err(GraphError::ZeroNeighbors);
    }
    if k >= m {
        return Err(GraphError::TooManyNeighbors { k, nodes: m });
    }
    if x_observed.ncols() == 0 {
        return Err(GraphError::NoColumns);
    }

    let mut dist = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let d = x_observed
                .row(i)
                .iter()
                .zip(x_observed.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }

    let mut adjacent = vec![false; m * m];
    let mut order: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        order.clear();
        order.extend((0..m).filter(|&j| j != i));
        order.sort_by(|&a, &b| {
            dist[(i, a)]
                .partial_cmp(&dist[(i, b)])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        for &j in &order[..k] {
            adjacent[i * m + j] = true;
            adjacent[j * m + i] = true;
        }
    }

    let edges: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .filter(|&(i, j)| adjacent[i * m + j])
        .collect();
    let sigma = median(edges.iter().map(|&(i, j)| dist[(i, j)]).collect());
    let heat = kernel == Kernel::Heat && sigma > 0.0;

    let mut g = DMatrix::zeros(m, m);
    for (i, j) in edges {
        let w = if heat {
            let d = dist[(i, j)];
            (-(d * d) / (sigma * sigma)).exp()
        } else {
            1.0
        };
        g[(i, j)] = w;
        g[(j, i)] = w;
    }
    Ok(FeatureGraph::from_weights(g))
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// `(S + Sᵀ)/2`.
pub fn symmetrize(s: &DMatrix<f64>) -> DMatrix<f64> {
    (s + s.transpose()) * 0.5
}

/// Laplacian of a possibly asymmetric similarity: `D − (S + Sᵀ)/2`.
pub fn laplacian_of_similarity(s: &DMatrix<f64>) -> DMatrix<f64> {
    laplacian(&symmetrize(s))
}

/// Euclidean projection of `v` onto `{s ≥ 0, Σ s = 1, s[forbidden] = 0}`.
pub fn simplex_project(v: &[f64], forbidden: usize) -> Result<Vec<f64>, GraphError> {
    let n = v.len();
    if forbidden >= n {
        return Err(GraphError::ForbiddenOutOfRange {
            index: forbidden,
            len: n,
        });
    }
    if n < 2 {
        return Err(GraphError::DegenerateSimplex);
    }
    let free: Vec<f64> = v
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != forbidden)
        .map(|(_, &x)| x)
        .collect();
    let projected = project_onto_simplex(&free);
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&projected[..forbidden]);
    out.push(0.0);
    out.extend_from_slice(&projected[forbidden..]);
    Ok(out)
}

/// Sort-and-threshold projection onto the probability simplex.
fn project_onto_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}
