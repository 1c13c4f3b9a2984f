//! Dense linear-algebra primitives shared by every solver.
//!
//! Column indices are zero-based throughout the library. The sensing matrix
//! is stored column-major so a column is one contiguous slice.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{MmpError, Result};

/// Relative singular-value threshold below which a column subset is
/// treated as rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Relative tolerance of the residual orthogonality check `‖Φ'_S r‖∞ ≤ tol·‖y‖₂`.
pub const ORTHO_TOL: f64 = 1e-10;

/// Dense `m × n` real sensing matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    entries: DMatrix<f64>,
    col_norms: Vec<f64>,
}

impl SensingMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(MmpError::InvalidInput(format!(
                "sensing matrix must be at least 1x1, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(MmpError::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                pos % entries.nrows(),
                pos / entries.nrows()
            )));
        }
        let col_norms = entries.column_iter().map(|c| c.norm()).collect();
        Ok(Self { entries, col_norms })
    }

    pub fn from_row_major(m: usize, n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != m * n {
            return Err(MmpError::DimensionMismatch {
                expected: m * n,
                actual: data.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(m, n, data))
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        let m = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != m) {
            return Err(MmpError::InvalidInput("columns have unequal length".into()));
        }
        let data: Vec<f64> = columns.iter().flatten().copied().collect();
        Self::new(DMatrix::from_vec(m, n, data))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is valid")
    }

    /// Number of measurements `m`.
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    /// Ambient dimension `n`.
    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let m = self.rows();
        &self.entries.as_slice()[j * m..(j + 1) * m]
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        self.col_norms[j]
    }

    /// Columns indexed by `support`, in the given order.
    pub fn submatrix(&self, support: &[usize]) -> DMatrix<f64> {
        let m = self.rows();
        let mut data = Vec::with_capacity(m * support.len());
        for &j in support {
            data.extend_from_slice(self.column(j));
        }
        DMatrix::from_vec(m, support.len(), data)
    }

    /// `Φ x` for a length-`n` vector.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(x, self.cols())?;
        let mut out = vec![0.0; self.rows()];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                axpy(xj, self.column(j), &mut out);
            }
        }
        Ok(out)
    }

    /// Spectral norm `‖Φ‖₂`.
    pub fn spectral_norm(&self) -> f64 {
        self.entries
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Parses the whitespace text format: an `m n` header line followed by
    /// `m` rows of `n` decimal values.
    pub fn from_text(text: &str) -> Result<Self> {
        let (m, n, data) = parse_matrix_text(text)?;
        Self::from_row_major(m, n, &data)
    }

    pub fn to_text(&self) -> String {
        format_matrix_text(self.rows(), self.cols(), |i, j| self.entries[(i, j)])
    }
}

/// Support set and values of a (usually sparse) signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    pub values: Vec<f64>,
    pub support: Vec<usize>,
}

impl SparseSignal {
    pub fn from_values(values: Vec<f64>) -> Self {
        let support = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        Self { values, support }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    /// Nonzero values in support order.
    pub fn restricted(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.values[i]).collect()
    }

    pub fn min_abs_nonzero(&self) -> f64 {
        self.support
            .iter()
            .map(|&i| self.values[i].abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Measurement vector, with the exact noise realisation when synthetic.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub y: Vec<f64>,
    pub noise: Option<Vec<f64>>,
}

impl Measurement {
    pub fn noiseless(y: Vec<f64>) -> Self {
        Self { y, noise: None }
    }

    pub fn noise_norm(&self) -> f64 {
        self.noise.as_deref().map_or(0.0, norm)
    }
}

/// Least-squares fit of `y` on a column subset.
#[derive(Debug, Clone, PartialEq)]
pub struct LsFit {
    /// Sorted column indices.
    pub support: Vec<usize>,
    /// Coefficients aligned with `support`.
    pub coefficients: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_norm_sq: f64,
}

impl LsFit {
    /// Coefficients scattered into a length-`n` vector, zero off-support.
    pub fn dense(&self, n: usize) -> Vec<f64> {
        scatter(&self.support, &self.coefficients, n)
    }
}

/// `|⟨φ_i, r⟩|` for every column.
pub fn correlate(matrix: &SensingMatrix, residual: &[f64]) -> Result<Vec<f64>> {
    check_len(residual, matrix.rows())?;
    Ok((0..matrix.cols())
        .map(|j| dot(matrix.column(j), residual).abs())
        .collect())
}

/// The `l` indices of largest magnitude outside `exclude`, in descending
/// order. Equal magnitudes are ranked by ascending index.
pub fn top_l_indices(correlations: &[f64], l: usize, exclude: &[usize]) -> Result<Vec<usize>> {
    let n = correlations.len();
    let mut excluded = vec![false; n];
    for &i in exclude {
        if i >= n {
            return Err(MmpError::IndexOutOfRange { index: i, len: n });
        }
        excluded[i] = true;
    }
    let mut pool: Vec<usize> = (0..n).filter(|&i| !excluded[i]).collect();
    if l > pool.len() {
        return Err(MmpError::NotEnoughIndices {
            requested: l,
            available: pool.len(),
        });
    }
    if l == 0 {
        return Ok(Vec::new());
    }
    let rank = |a: &usize, b: &usize| {
        correlations[*b]
            .abs()
            .total_cmp(&correlations[*a].abs())
            .then(a.cmp(b))
    };
    if l < pool.len() {
        pool.select_nth_unstable_by(l - 1, rank);
        pool.truncate(l);
    }
    pool.sort_unstable_by(rank);
    Ok(pool)
}

/// Orthogonal-projection fit of `y` onto the columns in `support`.
///
/// The support is canonicalised (sorted). Fails with `RankDeficient` when the
/// smallest singular value of `Φ_S` falls below `RANK_TOL` times the largest.
pub fn least_squares_project(matrix: &SensingMatrix, support: &[usize], y: &[f64]) -> Result<LsFit> {
    check_len(y, matrix.rows())?;
    let support = canonical_support(support, matrix.cols())?;
    let k = support.len();
    if k == 0 {
        return Ok(LsFit {
            support,
            coefficients: Vec::new(),
            residual: y.to_vec(),
            residual_norm_sq: norm_sq(y),
        });
    }
    if k > matrix.rows() {
        return Err(MmpError::RankDeficient { support });
    }

    let sub = matrix.submatrix(&support);
    let qr = sub.clone().qr();
    let r = qr.r();
    let sv = r.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if !(smax > 0.0) || smin < RANK_TOL * smax {
        return Err(MmpError::RankDeficient { support });
    }

    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, k).into_owned();
    let coef = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| MmpError::RankDeficient {
            support: support.clone(),
        })?;

    let mut residual = y.to_vec();
    for (idx, &j) in support.iter().enumerate() {
        axpy(-coef[idx], matrix.column(j), &mut residual);
    }
    let residual_norm_sq = norm_sq(&residual);
    Ok(LsFit {
        support,
        coefficients: coef.iter().copied().collect(),
        residual,
        residual_norm_sq,
    })
}

/// Sorted copy of `support`, rejecting out-of-range or repeated indices.
pub fn canonical_support(support: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(MmpError::DuplicateIndex(w[0]));
        }
    }
    if let Some(&last) = sorted.last() {
        if last >= n {
            return Err(MmpError::IndexOutOfRange { index: last, len: n });
        }
    }
    Ok(sorted)
}

pub(crate) fn check_len(v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(MmpError::DimensionMismatch {
            expected,
            actual: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(MmpError::InvalidInput("vector has non-finite entries".into()));
    }
    Ok(())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha · x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm_sq(v: &[f64]) -> f64 {
    dot(v, v)
}

pub fn norm(v: &[f64]) -> f64 {
    norm_sq(v).sqrt()
}

pub fn scatter(support: &[usize], values: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (&i, &v) in support.iter().zip(values) {
        out[i] = v;
    }
    out
}

pub(crate) fn parse_matrix_text(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| MmpError::Parse("empty matrix file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| MmpError::Parse(format!("bad header token {t:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    let [m, n] = dims[..] else {
        return Err(MmpError::Parse(format!(
            "header must be \"m n\", got {header:?}"
        )));
    };
    let mut data = Vec::with_capacity(m * n);
    for (row, line) in lines.enumerate() {
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| MmpError::Parse(format!("row {}: bad value {t:?}: {e}", row + 1)))
            })
            .collect::<Result<_>>()?;
        if values.len() != n {
            return Err(MmpError::Parse(format!(
                "row {} has {} values, expected {n}",
                row + 1,
                values.len()
            )));
        }
        data.extend(values);
    }
    if data.len() != m * n {
        return Err(MmpError::Parse(format!(
            "expected {m} rows, found {}",
            data.len() / n.max(1)
        )));
    }
    Ok((m, n, data))
}

/// Parses a vector stored in the matrix text format as `m 1` or `1 m`.
pub fn parse_vector_text(text: &str) -> Result<Vec<f64>> {
    let (m, n, data) = parse_matrix_text(text)?;
    if m != 1 && n != 1 {
        return Err(MmpError::Parse(format!(
            "expected a column or row vector, got {m}x{n}"
        )));
    }
    Ok(data)
}

pub fn format_vector_text(v: &[f64]) -> String {
    format_matrix_text(v.len(), 1, |i, _| v[i])
}

fn format_matrix_text(m: usize, n: usize, at: impl Fn(usize, usize) -> f64) -> String {
    let mut out = format!("{m} {n}\n");
    for i in 0..m {
        for j in 0..n {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:e}", at(i, j));
        }
        out.push('\n');
    }
    out
}
