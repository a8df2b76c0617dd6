//! Incomplete multi-view datasets, observation masks and missing-sample indices.
//!
//! Views are held in features × samples orientation (`m_v × n`). Columns of
//! samples that are not observed in a view are always zero.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::DataError;
use crate::rng::seeded;

/// Binary observation matrix of shape `n × l`; entry `(j, v)` is true iff
/// sample `j` is present in view `v`. Every sample is observed somewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    n: usize,
    l: usize,
    observed: Vec<bool>,
}

impl Mask {
    /// All samples observed in all views.
    pub fn full(n: usize, l: usize) -> Self {
        Self {
            n,
            l,
            observed: vec![true; n * l],
        }
    }

    /// Builds a mask from per-sample rows, rejecting rows with no observed view.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self, DataError> {
        let n = rows.len();
        if n == 0 {
            return Err(DataError::Empty { what: "mask" });
        }
        let l = rows[0].len();
        let mut observed = Vec::with_capacity(n * l);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != l {
                return Err(DataError::Ragged {
                    line: j + 1,
                    expected: l,
                    found: row.len(),
                });
            }
            observed.extend_from_slice(row);
        }
        let mask = Self { n, l, observed };
        mask.check_rows()?;
        Ok(mask)
    }

    fn check_rows(&self) -> Result<(), DataError> {
        match (0..self.n).find(|&j| self.row_sum(j) == 0) {
            Some(sample) => Err(DataError::UnobservedSample { sample }),
            None => Ok(()),
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn n_views(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn is_observed(&self, sample: usize, view: usize) -> bool {
        self.observed[sample * self.l + view]
    }

    fn set(&mut self, sample: usize, view: usize, value: bool) {
        self.observed[sample * self.l + view] = value;
    }

    /// Number of views in which `sample` is observed.
    pub fn row_sum(&self, sample: usize) -> usize {
        self.observed[sample * self.l..(sample + 1) * self.l]
            .iter()
            .filter(|&&b| b)
            .count()
    }

    pub fn missing_count(&self, view: usize) -> usize {
        (0..self.n).filter(|&j| !self.is_observed(j, view)).count()
    }

    pub fn observed_samples(&self, view: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.is_observed(j, view)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.observed.iter().all(|&b| b)
    }

    pub fn row(&self, sample: usize) -> &[bool] {
        &self.observed[sample * self.l..(sample + 1) * self.l]
    }

    /// Renders the mask as CSV: `n` lines of `l` comma-separated 0/1 values.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.n * (2 * self.l));
        for j in 0..self.n {
            for (v, &b) in self.row(j).iter().enumerate() {
                if v > 0 {
                    out.push(',');
                }
                out.push(if b { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// Ordered indices of the samples missing from one view.
///
/// Stands in for the binary index matrix `H` of shape `n_missing × n`, where
/// `H[i, j] = 1` iff `j` is the `i`-th missing sample. Products with `H` are
/// computed as column scatters and gathers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingIndex {
    indices: Vec<usize>,
    n: usize,
}

impl MissingIndex {
    pub fn new(indices: Vec<usize>, n: usize) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.iter().all(|&j| j < n));
        Self { indices, n }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    /// `B · H`: places column `i` of `b` at sample position `indices[i]`.
    pub fn scatter(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(b.ncols(), self.len(), "recovery matrix width mismatch");
        let mut out = DMatrix::zeros(b.nrows(), self.n);
        for (i, &j) in self.indices.iter().enumerate() {
            out.set_column(j, &b.column(i));
        }
        out
    }

    /// `M · Hᵀ`: selects the missing-sample columns of `m`.
    pub fn gather(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(m.ncols(), self.n, "matrix width mismatch");
        let mut out = DMatrix::zeros(m.nrows(), self.len());
        for (i, &j) in self.indices.iter().enumerate() {
            out.set_column(i, &m.column(j));
        }
        out
    }

    /// The dense index matrix `H`.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.len(), self.n);
        for (i, &j) in self.indices.iter().enumerate() {
            h[(i, j)] = 1.0;
        }
        h
    }
}

/// Indices of samples missing from view `v`.
pub fn missing_index(mask: &Mask, v: usize) -> MissingIndex {
    assert!(v < mask.n_views(), "view {v} out of range");
    let indices = (0..mask.n_samples())
        .filter(|&j| !mask.is_observed(j, v))
        .collect();
    MissingIndex::new(indices, mask.n_samples())
}

/// A multi-view dataset with zero-filled missing columns.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompleteDataset {
    views: Vec<DMatrix<f64>>,
    mask: Mask,
    labels: Option<Vec<usize>>,
}

impl IncompleteDataset {
    /// Validates shapes, zero-fills unobserved columns and checks that every
    /// observed value is finite. Labels must already be 0-based; see
    /// [`reindex_labels`] for arbitrary integer labels.
    pub fn new(
        mut views: Vec<DMatrix<f64>>,
        mask: Mask,
        labels: Option<Vec<usize>>,
    ) -> Result<Self, DataError> {
        if views.is_empty() {
            return Err(DataError::Empty { what: "view list" });
        }
        let n = views[0].ncols();
        if n == 0 {
            return Err(DataError::Empty { what: "view" });
        }
        for (v, x) in views.iter().enumerate() {
            if x.ncols() != n {
                return Err(DataError::SampleCountMismatch {
                    view: v,
                    expected: n,
                    found: x.ncols(),
                });
            }
            if x.nrows() == 0 {
                return Err(DataError::Empty {
                    what: "feature set",
                });
            }
        }
        if mask.n_samples() != n || mask.n_views() != views.len() {
            return Err(DataError::MaskShape {
                rows: mask.n_samples(),
                cols: mask.n_views(),
                n,
                l: views.len(),
            });
        }
        mask.check_rows()?;
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(DataError::LabelCount {
                    expected: n,
                    found: labels.len(),
                });
            }
        }
        for (v, x) in views.iter_mut().enumerate() {
            for j in 0..n {
                if mask.is_observed(j, v) {
                    if let Some(feature) = x.column(j).iter().position(|a| !a.is_finite()) {
                        return Err(DataError::NonFinite {
                            view: v,
                            feature,
                            sample: j,
                        });
                    }
                } else {
                    x.column_mut(j).fill(0.0);
                }
            }
        }
        Ok(Self {
            views,
            mask,
            labels,
        })
    }

    /// Replaces the observation mask, zero-filling newly missing columns.
    ///
    /// Columns that were already zero-filled stay zero, so this only makes
    /// sense on a dataset whose current mask is a superset of `mask`.
    pub fn with_mask(&self, mask: Mask) -> Result<Self, DataError> {
        for v in 0..self.n_views() {
            for j in 0..self.n_samples() {
                if mask.is_observed(j, v) && !self.mask.is_observed(j, v) {
                    return Err(DataError::InvalidArgument(format!(
                        "sample {j} is missing from view {v} and cannot be re-observed"
                    )));
                }
            }
        }
        Self::new(self.views.clone(), mask, self.labels.clone())
    }

    pub fn views(&self) -> &[DMatrix<f64>] {
        &self.views
    }

    pub fn view(&self, v: usize) -> &DMatrix<f64> {
        &self.views[v]
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn n_samples(&self) -> usize {
        self.mask.n_samples()
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    /// Per-view feature dimensionalities `m_v`.
    pub fn dims(&self) -> Vec<usize> {
        self.views.iter().map(|x| x.nrows()).collect()
    }

    pub fn missing_index(&self, v: usize) -> MissingIndex {
        missing_index(&self.mask, v)
    }

    /// Observed columns of view `v`, in sample order.
    pub fn observed_columns(&self, v: usize) -> DMatrix<f64> {
        let cols = self.mask.observed_samples(v);
        self.views[v].select_columns(cols.iter())
    }

    /// Number of distinct ground-truth classes, if labels are present.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().max().map_or(0, |&m| m + 1))
    }

    /// Rescales every feature to `[0, 1]` using its observed values only.
    /// Constant features map to zero.
    pub fn minmax_rescaled(&self) -> Self {
        let mut views = self.views.clone();
        for (v, x) in views.iter_mut().enumerate() {
            let observed = self.mask.observed_samples(v);
            for i in 0..x.nrows() {
                let (lo, hi) = observed
                    .iter()
                    .map(|&j| x[(i, j)])
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                        (lo.min(a), hi.max(a))
                    });
                let span = hi - lo;
                for &j in &observed {
                    x[(i, j)] = if span > 0.0 {
                        (x[(i, j)] - lo) / span
                    } else {
                        0.0
                    };
                }
            }
        }
        Self {
            views,
            mask: self.mask.clone(),
            labels: self.labels.clone(),
        }
    }
}

/// Maps arbitrary integer labels onto `0..k` in ascending order of value.
pub fn reindex_labels(raw: &[i64]) -> Vec<usize> {
    let mut distinct: Vec<i64> = raw.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    raw.iter()
        .map(|x| distinct.binary_search(x).expect("value present"))
        .collect()
}

fn split_fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(',').map(str::trim)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Parses a numeric CSV table with one sample per row. Returns a matrix in
/// on-disk orientation (rows = samples). Blank lines are ignored.
pub fn parse_matrix_csv(text: &str, header: bool) -> Result<DMatrix<f64>, DataError> {
    let mut lines = content_lines(text);
    if header {
        lines.next();
    }
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (line, content) in lines {
        let before = values.len();
        for (col, cell) in split_fields(content).enumerate() {
            let value: f64 = cell.parse().map_err(|_| DataError::NonNumeric {
                line,
                column: col + 1,
                cell: cell.to_string(),
            })?;
            values.push(value);
        }
        let found = values.len() - before;
        match width {
            None => width = Some(found),
            Some(expected) if expected != found => {
                return Err(DataError::Ragged {
                    line,
                    expected,
                    found,
                })
            }
            _ => {}
        }
        rows += 1;
    }
    match width {
        Some(w) => Ok(DMatrix::from_row_slice(rows, w, &values)),
        None => Err(DataError::Empty {
            what: "matrix file",
        }),
    }
}

/// Parses a mask CSV of 0/1 entries, one sample per row.
pub fn parse_mask_csv(text: &str) -> Result<Mask, DataError> {
    let mut rows = Vec::new();
    for (line, content) in content_lines(text) {
        let row = split_fields(content)
            .enumerate()
            .map(|(col, cell)| match cell {
                "1" => Ok(true),
                "0" => Ok(false),
                _ => Err(DataError::BadMaskEntry {
                    line,
                    column: col + 1,
                    cell: cell.to_string(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if first != row.len() {
                return Err(DataError::Ragged {
                    line,
                    expected: first,
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    Mask::from_rows(&rows)
}

/// Parses a labels file: one integer per line.
pub fn parse_labels(text: &str) -> Result<Vec<i64>, DataError> {
    content_lines(text)
        .map(|(line, content)| {
            let cell = content.trim();
            cell.parse().map_err(|_| DataError::NonNumeric {
                line,
                column: 1,
                cell: cell.to_string(),
            })
        })
        .collect()
}

/// Renders a matrix as CSV, one matrix row per line. Values use the
/// shortest representation that parses back to the identical `f64`.
pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{}", m[(i, j)]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn labels_to_string(labels: &[usize]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        writeln!(out, "{l}").unwrap();
    }
    out
}

fn read_file(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Skip the first non-blank line of every view file.
    pub header: bool,
    /// Apply [`IncompleteDataset::minmax_rescaled`] after loading.
    pub minmax: bool,
}

/// Reads view files (samples as rows), an optional mask and optional labels.
pub fn load_dataset<P: AsRef<Path>>(
    view_paths: &[P],
    mask_path: Option<&Path>,
    labels_path: Option<&Path>,
    options: LoadOptions,
) -> Result<IncompleteDataset, DataError> {
    if view_paths.is_empty() {
        return Err(DataError::Empty { what: "view list" });
    }
    let mut views = Vec::with_capacity(view_paths.len());
    for path in view_paths {
        let on_disk = parse_matrix_csv(&read_file(path.as_ref())?, options.header)?;
        views.push(on_disk.transpose());
    }
    let n = views[0].ncols();
    for (v, x) in views.iter().enumerate() {
        if x.ncols() != n {
            return Err(DataError::SampleCountMismatch {
                view: v,
                expected: n,
                found: x.ncols(),
            });
        }
    }
    let mask = match mask_path {
        Some(p) => parse_mask_csv(&read_file(p)?)?,
        None => Mask::full(n, views.len()),
    };
    let labels = match labels_path {
        Some(p) => Some(reindex_labels(&parse_labels(&read_file(p)?)?)),
        None => None,
    };
    let dataset = IncompleteDataset::new(views, mask, labels)?;
    Ok(if options.minmax {
        dataset.minmax_rescaled()
    } else {
        dataset
    })
}

fn round_count(ratio: f64, n: usize) -> usize {
    (ratio * n as f64).round() as usize
}

/// Per-view random removal that keeps every sample in at least one view.
///
/// Each view independently loses exactly `round(ratio · n)` samples. A sample
/// left with no view then gets one view restored, and that view drops a
/// different sample that is still present elsewhere (fully observed samples
/// preferred), so per-view counts stay exact.
pub fn random_missing_masks(n: usize, l: usize, ratio: f64, seed: u64) -> Result<Mask, DataError> {
    if l < 2 {
        return Err(DataError::InvalidArgument(format!(
            "random missing masks need at least two views, got {l}"
        )));
    }
    if !(0.0..1.0).contains(&ratio) {
        return Err(DataError::InvalidArgument(format!(
            "missing ratio must lie in [0, 1), got {ratio}"
        )));
    }
    if n == 0 {
        return Err(DataError::Empty { what: "sample set" });
    }
    let per_view = round_count(ratio, n);
    // Feasible iff the remaining observations can cover every sample.
    if per_view * l > (l - 1) * n {
        return Err(DataError::InfeasibleRatio {
            ratio,
            per_view,
            n,
            l,
        });
    }
    let mut rng = seeded(seed);
    let mut mask = Mask::full(n, l);
    let samples: Vec<usize> = (0..n).collect();
    for v in 0..l {
        for &j in samples.choose_multiple(&mut rng, per_view) {
            mask.set(j, v, false);
        }
    }

    let orphans: Vec<usize> = (0..n).filter(|&j| mask.row_sum(j) == 0).collect();
    for j in orphans {
        let mut options: Vec<(usize, Vec<usize>)> = Vec::with_capacity(l);
        for v in 0..l {
            let donors: Vec<usize> = (0..n)
                .filter(|&k| k != j && mask.is_observed(k, v) && mask.row_sum(k) >= 2)
                .collect();
            if donors.is_empty() {
                continue;
            }
            let full: Vec<usize> = donors
                .iter()
                .copied()
                .filter(|&k| mask.row_sum(k) == l)
                .collect();
            options.push((v, if full.is_empty() { donors } else { full }));
        }
        // Non-empty by counting: the other n-1 samples hold at least n observations.
        let (v, donors) = &options[rng.random_range(0..options.len())];
        let donor = donors[rng.random_range(0..donors.len())];
        mask.set(j, *v, true);
        mask.set(donor, *v, false);
    }
    debug_assert!(mask.check_rows().is_ok());
    Ok(mask)
}

/// `round(paired_ratio · n)` samples observed in every view; each remaining
/// sample observed in exactly one uniformly chosen view.
pub fn paired_preserved_masks(
    n: usize,
    l: usize,
    paired_ratio: f64,
    seed: u64,
) -> Result<Mask, DataError> {
    if !(paired_ratio > 0.0 && paired_ratio <= 1.0) {
        return Err(DataError::InvalidArgument(format!(
            "paired ratio must lie in (0, 1], got {paired_ratio}"
        )));
    }
    if l == 0 || n == 0 {
        return Err(DataError::Empty { what: "mask" });
    }
    let paired = round_count(paired_ratio, n).min(n);
    let mut rng = seeded(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut mask = Mask::full(n, l);
    for &j in &order[paired..] {
        let keep = rng.random_range(0..l);
        for v in 0..l {
            mask.set(j, v, v == keep);
        }
    }
    Ok(mask)
}

/// Parameters for [`synth_multiview`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub c: usize,
    pub dims: Vec<usize>,
    pub separation: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n: 300,
            c: 3,
            dims: vec![20, 30],
            separation: 6.0,
            noise: 1.0,
            seed: 0,
        }
    }
}

/// Gaussian blobs shared across views: sample `j` belongs to cluster
/// `j * c / n` in every view, so cluster sizes differ by at most one.
///
/// When `c ≤ m_v` the view's centroids sit on scaled coordinate axes (chosen
/// by a per-view random permutation) so that every pair is exactly
/// `separation` apart. Otherwise centroids are Gaussian with per-coordinate
/// standard deviation `separation / √2`, which gives the same expected
/// squared spacing per dimension pair.
pub fn synth_multiview(spec: &SynthSpec) -> Result<IncompleteDataset, DataError> {
    let SynthSpec {
        n,
        c,
        ref dims,
        separation,
        noise,
        seed,
    } = *spec;
    if c < 2 || n < c {
        return Err(DataError::InvalidArgument(format!(
            "need n >= c >= 2, got n = {n}, c = {c}"
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(DataError::InvalidArgument(
            "dims must be a nonempty list of positive sizes".into(),
        ));
    }
    if !(separation > 0.0 && noise > 0.0) {
        return Err(DataError::InvalidArgument(
            "separation and noise must be positive".into(),
        ));
    }
    let mut rng = seeded(seed);
    let labels: Vec<usize> = (0..n).map(|j| j * c / n).collect();
    let scale = separation / std::f64::consts::SQRT_2;
    let mut views = Vec::with_capacity(dims.len());
    for &m in dims {
        let mut centroids = DMatrix::zeros(m, c);
        if c <= m {
            let mut axes: Vec<usize> = (0..m).collect();
            axes.shuffle(&mut rng);
            for k in 0..c {
                centroids[(axes[k], k)] = scale;
            }
        } else {
            for a in centroids.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *a = scale * z;
            }
        }
        let x = DMatrix::from_fn(m, n, |i, j| {
            let z: f64 = StandardNormal.sample(&mut rng);
            centroids[(i, labels[j])] + noise * z
        });
        views.push(x);
    }
    IncompleteDataset::new(views, Mask::full(n, dims.len()), Some(labels))
}
