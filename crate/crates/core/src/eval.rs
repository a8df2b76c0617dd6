//! k-means and the clustering scores: accuracy under optimal matching,
//! normalized mutual information and purity.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::EvalError;
use crate::rng::substream;

const LLOYD_MAX_ITER: usize = 300;

/// One k-means run.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub labels: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub objective: f64,
}

/// Best of `restarts` k-means++ / Lloyd runs on the rows of `points`.
pub fn kmeans(
    points: &DMatrix<f64>,
    c: usize,
    restarts: usize,
    seed: u64,
) -> Result<KMeans, EvalError> {
    let runs = kmeans_restarts(points, c, restarts, seed)?;
    Ok(runs
        .into_iter()
        .reduce(|best, run| {
            if run.objective < best.objective {
                run
            } else {
                best
            }
        })
        .expect("at least one restart"))
}

/// Every restart, in restart order. Restart `r` uses its own random stream.
pub fn kmeans_restarts(
    points: &DMatrix<f64>,
    c: usize,
    restarts: usize,
    seed: u64,
) -> Result<Vec<KMeans>, EvalError> {
    let n = points.nrows();
    if c == 0 {
        return Err(EvalError::InvalidArgument(
            "cluster count must be positive".into(),
        ));
    }
    if n < c {
        return Err(EvalError::TooFewPoints { n, c });
    }
    if restarts == 0 {
        return Err(EvalError::InvalidArgument(
            "restarts must be at least 1".into(),
        ));
    }
    Ok((0..restarts)
        .map(|r| lloyd(points, c, &mut substream(seed, r as u64)))
        .collect())
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centers: &DMatrix<f64>, k: usize) -> f64 {
    points
        .row(i)
        .iter()
        .zip(centers.row(k).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn plus_plus_seeds<R: Rng>(points: &DMatrix<f64>, c: usize, rng: &mut R) -> DMatrix<f64> {
    let n = points.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| sq_dist(points, i, &points.rows(chosen[0], 1).into_owned(), 0))
        .collect();
    while chosen.len() < c {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        let center = points.rows(next, 1).into_owned();
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &center, 0));
        }
    }
    points.select_rows(chosen.iter())
}

fn lloyd<R: Rng>(points: &DMatrix<f64>, c: usize, rng: &mut R) -> KMeans {
    let (n, d) = points.shape();
    let mut centers = plus_plus_seeds(points, c, rng);
    let mut labels = vec![usize::MAX; n];
    for _ in 0..LLOYD_MAX_ITER {
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let mut best = (f64::INFINITY, 0);
            for k in 0..c {
                let dist = sq_dist(points, i, &centers, k);
                if dist < best.0 {
                    best = (dist, k);
                }
            }
            if *label != best.1 {
                *label = best.1;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        let mut sums = DMatrix::zeros(c, d);
        let mut counts = vec![0usize; c];
        for (i, &k) in labels.iter().enumerate() {
            counts[k] += 1;
            let mut row = sums.row_mut(k);
            row += points.row(i);
        }
        for (k, &count) in counts.iter().enumerate() {
            if count > 0 {
                let mean = sums.row(k) / count as f64;
                centers.set_row(k, &mean);
            }
        }
        // Empty clusters take the point farthest from its own center.
        for k in 0..c {
            if counts[k] > 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| counts[labels[i]] > 1)
                .map(|i| (sq_dist(points, i, &centers, labels[i]), i))
                .fold((-1.0, usize::MAX), |a, b| if b.0 > a.0 { b } else { a })
                .1;
            if far == usize::MAX {
                continue;
            }
            counts[labels[far]] -= 1;
            counts[k] = 1;
            labels[far] = k;
            centers.set_row(k, &points.row(far));
        }
    }
    let objective = (0..n)
        .map(|i| sq_dist(points, i, &centers, labels[i]))
        .sum();
    KMeans { labels, objective }
}

fn check_pair(pred: &[usize], truth: &[usize]) -> Result<(), EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(EvalError::EmptyLabels);
    }
    Ok(())
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mapped = labels
        .iter()
        .map(|l| distinct.binary_search(l).unwrap())
        .collect();
    (mapped, distinct.len())
}

/// Contingency table with predicted clusters as rows, true classes as columns.
fn contingency(pred: &[usize], truth: &[usize]) -> Vec<Vec<usize>> {
    let (p, kp) = compact(pred);
    let (t, kt) = compact(truth);
    let mut table = vec![vec![0usize; kt]; kp];
    for (a, b) in p.into_iter().zip(t) {
        table[a][b] += 1;
    }
    table
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials). Returns `assignment[row] = column`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // 1-based arrays with a virtual column 0.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            assignment[matched_row[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Fraction of samples correctly labeled under the best one-to-one mapping
/// from predicted clusters to classes.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64, EvalError> {
    check_pair(pred, truth)?;
    let table = contingency(pred, truth);
    let size = table.len().max(table[0].len());
    let cost: Vec<Vec<f64>> = (0..size)
        .map(|a| {
            (0..size)
                .map(|b| -(table.get(a).and_then(|r| r.get(b)).copied().unwrap_or(0) as f64))
                .collect()
        })
        .collect();
    let assignment = hungarian(&cost);
    let correct: f64 = assignment
        .iter()
        .enumerate()
        .map(|(a, &b)| -cost[a][b])
        .sum();
    Ok(correct / pred.len() as f64)
}

/// Normalization of mutual information.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NmiNorm {
    /// `I / sqrt(H_p · H_t)`.
    #[default]
    Sqrt,
    /// `2I / (H_p + H_t)`.
    Mean,
    /// `I / max(H_p, H_t)`.
    Max,
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information with natural-log entropies.
pub fn nmi(pred: &[usize], truth: &[usize], norm: NmiNorm) -> Result<f64, EvalError> {
    check_pair(pred, truth)?;
    let n = pred.len() as f64;
    let table = contingency(pred, truth);
    let rows: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<usize> = (0..table[0].len())
        .map(|b| table.iter().map(|r| r[b]).sum())
        .collect();
    let h_pred = entropy(rows.iter().copied(), n);
    let h_truth = entropy(cols.iter().copied(), n);
    if h_pred == 0.0 || h_truth == 0.0 {
        // Single-cluster labelings: identical only if both are single-cluster.
        return Ok(if h_pred == h_truth { 1.0 } else { 0.0 });
    }
    let mut mi = 0.0;
    for (a, row) in table.iter().enumerate() {
        for (b, &count) in row.iter().enumerate() {
            if count > 0 {
                let joint = count as f64 / n;
                mi += joint * (count as f64 * n / (rows[a] as f64 * cols[b] as f64)).ln();
            }
        }
    }
    let denom = match norm {
        NmiNorm::Sqrt => (h_pred * h_truth).sqrt(),
        NmiNorm::Mean => 0.5 * (h_pred + h_truth),
        NmiNorm::Max => h_pred.max(h_truth),
    };
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Average over predicted clusters of the majority class size.
pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64, EvalError> {
    check_pair(pred, truth)?;
    let majority: usize = contingency(pred, truth)
        .iter()
        .map(|row| *row.iter().max().unwrap())
        .sum();
    Ok(majority as f64 / pred.len() as f64)
}

/// Predicted labels with their scores against ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    pub acc: f64,
    pub nmi: f64,
    pub purity: f64,
    pub kmeans_objective: f64,
}

impl ClusteringResult {
    pub fn score(
        labels: Vec<usize>,
        truth: &[usize],
        kmeans_objective: f64,
        norm: NmiNorm,
    ) -> Result<Self, EvalError> {
        Ok(Self {
            acc: accuracy(&labels, truth)?,
            nmi: nmi(&labels, truth, norm)?,
            purity: purity(&labels, truth)?,
            labels,
            kmeans_objective,
        })
    }
}
