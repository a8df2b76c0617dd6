//! Dense eigen/SVD helpers shared by the solver and the clustering code.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};

use crate::rng::seeded;

/// Eigenpairs of a symmetric matrix in ascending eigenvalue order. Ties keep
/// the eigensolver's order. Each eigenvector is signed so that its
/// largest-magnitude entry is positive.
pub fn sorted_eigen(sym: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(sym.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(Ordering::Equal)
    });
    let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = eig.eigenvectors.select_columns(order.iter());
    for mut col in vectors.column_iter_mut() {
        fix_sign(col.as_mut_slice());
    }
    (values, vectors)
}

fn fix_sign(col: &mut [f64]) {
    let lead = col.iter().copied().fold(
        0.0f64,
        |best, x| if x.abs() > best.abs() { x } else { best },
    );
    if lead < 0.0 {
        col.iter_mut().for_each(|x| *x = -*x);
    }
}

/// The `k` algebraically smallest eigenpairs.
pub fn smallest_eigenvectors(sym: &DMatrix<f64>, k: usize) -> (DVector<f64>, DMatrix<f64>) {
    let (values, vectors) = sorted_eigen(sym);
    (
        values.rows(0, k).into_owned(),
        vectors.columns(0, k).into_owned(),
    )
}

/// The `k` algebraically largest eigenpairs, largest first.
pub fn largest_eigenvectors(sym: &DMatrix<f64>, k: usize) -> (DVector<f64>, DMatrix<f64>) {
    let (values, vectors) = sorted_eigen(sym);
    let n = values.len();
    let idx: Vec<usize> = (n - k..n).rev().collect();
    (
        DVector::from_iterator(k, idx.iter().map(|&i| values[i])),
        vectors.select_columns(idx.iter()),
    )
}

/// Orthonormal factor `Q` of the thin QR decomposition of `a` (rows ≥ cols).
pub fn orthonormal_columns(a: DMatrix<f64>) -> DMatrix<f64> {
    a.qr().q()
}

/// Result of [`procrustes`].
#[derive(Debug, Clone)]
pub struct Procrustes {
    pub rotation: DMatrix<f64>,
    /// Numerical rank of the input; below the column count the left singular
    /// basis was completed.
    pub rank: usize,
}

/// Maximizer of `Tr(Uᵀ M)` over matrices with orthonormal columns:
/// `U = T Rᵀ` from the thin SVD `M = T Σ Rᵀ`.
///
/// When `M` is rank deficient the left singular vectors belonging to zero
/// singular values are replaced by an orthonormal completion built from
/// Gaussian vectors drawn from `seed`.
pub fn procrustes(m: &DMatrix<f64>, seed: u64) -> Procrustes {
    let (rows, cols) = m.shape();
    assert!(rows >= cols, "procrustes needs a tall matrix");
    let svd = m.clone().svd(true, true);
    let mut t = svd.u.expect("left singular vectors");
    let r_t = svd.v_t.expect("right singular vectors");
    let sigma = &svd.singular_values;
    let scale = sigma.max().max(f64::MIN_POSITIVE);
    let tol = scale * (rows.max(cols) as f64) * f64::EPSILON * 16.0;
    let deficient: Vec<usize> = (0..cols)
        .filter(|&k| sigma[k].is_nan() || sigma[k] <= tol)
        .collect();
    let rank = cols - deficient.len();
    if !deficient.is_empty() {
        let keep: Vec<usize> = (0..cols).filter(|k| !deficient.contains(k)).collect();
        let mut basis: Vec<DVector<f64>> = keep.iter().map(|&k| t.column(k).into_owned()).collect();
        let mut rng = seeded(seed);
        let mut fills = Vec::with_capacity(deficient.len());
        while fills.len() < deficient.len() {
            let mut cand = DVector::from_fn(rows, |_, _| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z
            });
            // Two Gram-Schmidt passes for numerical orthogonality.
            for _ in 0..2 {
                for b in &basis {
                    let proj = b.dot(&cand);
                    cand -= b * proj;
                }
            }
            let norm = cand.norm();
            if norm > 1e-8 {
                cand /= norm;
                basis.push(cand.clone());
                fills.push(cand);
            }
        }
        for (&k, fill) in deficient.iter().zip(fills) {
            t.set_column(k, &fill);
        }
    }
    Procrustes {
        rotation: t * r_t,
        rank,
    }
}

/// `max |AᵀA − I|` entrywise.
pub fn orthonormality_error(a: &DMatrix<f64>) -> f64 {
    let gram = a.transpose() * a;
    (gram - DMatrix::identity(a.ncols(), a.ncols())).amax()
}
