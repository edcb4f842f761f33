//! Pearson correlation, bootstrap replicates and their average.

use nalgebra::DMatrix;
use rand::{Rng, RngExt};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;

/// Tolerance for the symmetry and unit-diagonal checks on imported matrices.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Replicates evaluated together before being folded into the running sum.
const BATCH: usize = 32;

/// `n x t` data: one row per object, one column per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
    labels: Option<Vec<String>>,
}

impl DataMatrix {
    /// Validates shape (`n, t >= 2`), finiteness, and that no row is constant.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        let (n, t) = values.shape();
        if n < 2 || t < 2 {
            return Err(Error::Shape {
                rows: n,
                cols: t,
                expected: "at least 2 objects and 2 features".into(),
            });
        }
        for j in 0..t {
            for i in 0..n {
                if !values[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        for i in 0..n {
            let first = values[(i, 0)];
            if values.row(i).iter().all(|&v| v == first) {
                return Err(Error::ZeroVarianceRow(i));
            }
        }
        Ok(DataMatrix {
            values,
            labels: None,
        })
    }

    /// Builds from row vectors; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let t = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != t) {
            return Err(Error::Shape {
                rows: n,
                cols: bad.len(),
                expected: format!("every row with {t} columns"),
            });
        }
        Self::new(DMatrix::from_fn(n, t, |i, j| rows[i][j]))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Shape {
                rows: labels.len(),
                cols: 1,
                expected: format!("{} row labels", self.n()),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn t(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// Where a correlation matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationSource {
    Plain,
    BootstrapReplicate,
    BootstrapAverage,
    /// Supplied from outside the crate.
    External,
}

/// Symmetric, unit-diagonal correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    values: DMatrix<f64>,
    source: CorrelationSource,
    k: usize,
}

impl CorrelationMatrix {
    /// Wraps an externally supplied matrix after checking squareness,
    /// symmetry, unit diagonal and entry range.
    pub fn from_values(values: DMatrix<f64>) -> Result<Self> {
        check_structure(&values)?;
        Ok(CorrelationMatrix {
            values,
            source: CorrelationSource::External,
            k: 1,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn source(&self) -> CorrelationSource {
        self.source
    }

    /// Number of replicates averaged (1 unless this is a bootstrap average).
    pub fn k(&self) -> usize {
        self.k
    }
}

pub(crate) fn check_square(values: &DMatrix<f64>) -> Result<()> {
    let (r, c) = values.shape();
    if r != c || r == 0 {
        return Err(Error::Shape {
            rows: r,
            cols: c,
            expected: "a non-empty square matrix".into(),
        });
    }
    Ok(())
}

pub(crate) fn check_symmetric(values: &DMatrix<f64>, tol: f64) -> Result<()> {
    check_square(values)?;
    let n = values.nrows();
    for j in 0..n {
        for i in 0..n {
            let (a, b) = (values[(i, j)], values[(j, i)]);
            if !a.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            let gap = (a - b).abs();
            if gap > tol {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    gap,
                });
            }
        }
    }
    Ok(())
}

fn check_structure(values: &DMatrix<f64>) -> Result<()> {
    check_symmetric(values, STRUCTURE_TOL)?;
    let n = values.nrows();
    for i in 0..n {
        if (values[(i, i)] - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::domain(format!(
                "diagonal entry {i} is {}, expected 1",
                values[(i, i)]
            )));
        }
    }
    if let Some(v) = values.iter().find(|v| v.abs() > 1.0 + STRUCTURE_TOL) {
        return Err(Error::domain(format!("entry {v} outside [-1, 1]")));
    }
    Ok(())
}

/// Pearson correlation between the rows of `values`, reading the columns
/// listed in `columns` (all columns when `None`).
///
/// Rows are mean-centered and scaled to unit norm; the population `1/t`
/// factor cancels. Only the upper triangle is computed and mirrored, the
/// diagonal is set to exactly 1 and entries are clamped to [-1, 1].
fn correlation_of(values: &DMatrix<f64>, columns: Option<&[usize]>) -> Result<DMatrix<f64>> {
    let n = values.nrows();
    let t = columns.map_or(values.ncols(), <[usize]>::len);
    let col = |j: usize| columns.map_or(j, |c| c[j]);

    let mut z = DMatrix::<f64>::zeros(t, n);
    for i in 0..n {
        let first = values[(i, col(0))];
        if (1..t).all(|j| values[(i, col(j))] == first) {
            return Err(Error::ZeroVarianceRow(i));
        }
        let mean = (0..t).map(|j| values[(i, col(j))]).sum::<f64>() / t as f64;
        let mut ss = 0.0;
        for j in 0..t {
            let c = values[(i, col(j))] - mean;
            z[(j, i)] = c;
            ss += c * c;
        }
        if ss <= 0.0 || !ss.is_finite() {
            return Err(Error::ZeroVarianceRow(i));
        }
        let scale = ss.sqrt().recip();
        z.column_mut(i).iter_mut().for_each(|v| *v *= scale);
    }

    let mut c = DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        let zj = z.column(j);
        for i in 0..j {
            let r = z.column(i).dot(&zj).clamp(-1.0, 1.0);
            c[(i, j)] = r;
            c[(j, i)] = r;
        }
    }
    Ok(c)
}

/// Pearson correlation matrix between the rows of `data`.
pub fn pearson(data: &DataMatrix) -> Result<CorrelationMatrix> {
    Ok(CorrelationMatrix {
        values: correlation_of(&data.values, None)?,
        source: CorrelationSource::Plain,
        k: 1,
    })
}

/// Column indices drawn with replacement, plus their distinct count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BootstrapIndex {
    indices: Vec<usize>,
    unique_count: usize,
}

impl BootstrapIndex {
    /// Validates that every index is below `t = indices.len()`.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let t = indices.len();
        if t == 0 {
            return Err(Error::domain("bootstrap index must be non-empty"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= t) {
            return Err(Error::domain(format!("index {bad} is outside [0, {t})")));
        }
        let mut seen = vec![false; t];
        let mut unique_count = 0;
        for &i in &indices {
            if !seen[i] {
                seen[i] = true;
                unique_count += 1;
            }
        }
        Ok(BootstrapIndex {
            indices,
            unique_count,
        })
    }

    pub fn identity(t: usize) -> Result<Self> {
        Self::new((0..t).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn unique_count(&self) -> usize {
        self.unique_count
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `t` i.i.d. uniform draws from `[0, t)`.
pub fn draw_bootstrap_index<R: Rng + ?Sized>(t: usize, stream: &mut R) -> Result<BootstrapIndex> {
    if t == 0 {
        return Err(Error::domain("draw_bootstrap_index needs t >= 1"));
    }
    BootstrapIndex::new((0..t).map(|_| stream.random_range(0..t)).collect())
}

/// Correlation of the column-resampled data `x[i][index[j]]`.
///
/// Fails with [`Error::ZeroVarianceRow`] when resampling leaves a row
/// constant.
pub fn bootstrap_replicate(data: &DataMatrix, index: &BootstrapIndex) -> Result<CorrelationMatrix> {
    if index.len() != data.t() {
        return Err(Error::Shape {
            rows: 1,
            cols: index.len(),
            expected: format!("a bootstrap index of length {}", data.t()),
        });
    }
    Ok(CorrelationMatrix {
        values: correlation_of(&data.values, Some(&index.indices))?,
        source: CorrelationSource::BootstrapReplicate,
        k: 1,
    })
}

/// One successful bootstrap replicate.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub matrix: CorrelationMatrix,
    pub index: BootstrapIndex,
    /// Degenerate draws discarded before this one succeeded.
    pub redraws: usize,
}

/// Replicate number `ordinal` for master seed `seed`.
///
/// The replicate reads its own stream, so it does not depend on which other
/// replicates were computed. Degenerate draws are retried from the same
/// stream; more than `max_redraws` of them is an error.
pub fn replicate(
    data: &DataMatrix,
    seed: u64,
    ordinal: u64,
    max_redraws: usize,
) -> Result<Replicate> {
    let mut stream = rng::stream(seed, ordinal);
    let mut redraws = 0;
    loop {
        let index = draw_bootstrap_index(data.t(), &mut stream)?;
        match bootstrap_replicate(data, &index) {
            Ok(matrix) => {
                return Ok(Replicate {
                    matrix,
                    index,
                    redraws,
                })
            }
            Err(Error::ZeroVarianceRow(_)) => {
                redraws += 1;
                if redraws > max_redraws {
                    return Err(Error::TooManyDegenerateRedraws {
                        k: ordinal as usize + 1,
                        redraws,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Running sum with a fixed pairwise combination tree.
///
/// Leaves are merged like a binary counter, so the sum of the first `k`
/// pushed matrices has `O(log k)` rounding depth and does not depend on when
/// it is queried.
#[derive(Debug, Clone, Default)]
struct PairwiseSum {
    stack: Vec<(u32, DMatrix<f64>)>,
}

impl PairwiseSum {
    fn push(&mut self, m: DMatrix<f64>) {
        let mut level = 0;
        let mut acc = m;
        while let Some((top, _)) = self.stack.last() {
            if *top != level {
                break;
            }
            let (_, prev) = self.stack.pop().unwrap();
            acc = prev + acc;
            level += 1;
        }
        self.stack.push((level, acc));
    }

    fn total(&self) -> Option<DMatrix<f64>> {
        let mut iter = self.stack.iter().rev();
        let (_, last) = iter.next()?;
        let mut acc = last.clone();
        for (_, m) in iter {
            acc = m + acc;
        }
        Some(acc)
    }
}

/// Incremental mean of bootstrap replicate correlation matrices.
#[derive(Debug, Clone)]
pub struct BootstrapAverager {
    sum: PairwiseSum,
    n: usize,
    unique_counts: Vec<usize>,
    redraws: usize,
}

impl BootstrapAverager {
    pub fn new(n: usize) -> Self {
        BootstrapAverager {
            sum: PairwiseSum::default(),
            n,
            unique_counts: Vec::new(),
            redraws: 0,
        }
    }

    pub fn push(&mut self, rep: Replicate) {
        debug_assert_eq!(rep.matrix.n(), self.n);
        self.unique_counts.push(rep.index.unique_count());
        self.redraws += rep.redraws;
        self.sum.push(rep.matrix.values);
    }

    /// Replicates folded in so far.
    pub fn k(&self) -> usize {
        self.unique_counts.len()
    }

    pub fn unique_counts(&self) -> &[usize] {
        &self.unique_counts
    }

    pub fn redraws(&self) -> usize {
        self.redraws
    }

    /// Entrywise mean of the replicates pushed so far.
    pub fn mean(&self) -> Option<CorrelationMatrix> {
        let k = self.k();
        let mut values = self.sum.total()?;
        values /= k as f64;
        Some(CorrelationMatrix {
            values,
            source: CorrelationSource::BootstrapAverage,
            k,
        })
    }
}

/// Result of [`average_correlation`].
#[derive(Debug, Clone)]
pub struct AverageCorrelation {
    pub matrix: CorrelationMatrix,
    /// Distinct-column count of each averaged replicate, in replicate order.
    pub unique_counts: Vec<usize>,
    /// Degenerate draws discarded across all replicates.
    pub redraws: usize,
}

/// Redraw budget for averaging `k` replicates.
pub fn redraw_limit(k: usize) -> usize {
    100 * k
}

/// Mean of `k` bootstrap replicate correlation matrices.
///
/// Replicate `i` (0-based) uses stream `i` of `seed`; replicates are computed
/// in parallel batches and folded in ordinal order, so the result depends only
/// on `(data, k, seed)`.
pub fn average_correlation(data: &DataMatrix, k: usize, seed: u64) -> Result<AverageCorrelation> {
    if k == 0 {
        return Err(Error::domain("average_correlation needs k >= 1"));
    }
    let limit = redraw_limit(k);
    let mut avg = BootstrapAverager::new(data.n());
    let mut start = 0;
    while start < k {
        let end = (start + BATCH).min(k);
        let batch: Vec<Replicate> = (start..end)
            .into_par_iter()
            .map(|i| replicate(data, seed, i as u64, limit))
            .collect::<Result<_>>()
            .map_err(|e| match e {
                Error::TooManyDegenerateRedraws { redraws, .. } => {
                    Error::TooManyDegenerateRedraws { k, redraws }
                }
                other => other,
            })?;
        for rep in batch {
            avg.push(rep);
        }
        if avg.redraws() > limit {
            return Err(Error::TooManyDegenerateRedraws {
                k,
                redraws: avg.redraws(),
            });
        }
        start = end;
    }
    Ok(AverageCorrelation {
        matrix: avg.mean().expect("k >= 1"),
        unique_counts: avg.unique_counts.clone(),
        redraws: avg.redraws,
    })
}
