//! Search-tree nodes: a path is an ordered set of selected columns together
//! with its least-squares fit. Identity is the sorted support, so paths that
//! reach the same set through different selection orders merge.

use std::collections::HashSet;

use crate::error::{MmpError, Result};
use crate::linalg::{least_squares_project, LsFit, SensingMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    indices: Vec<usize>,
    fit: LsFit,
}

impl Path {
    /// The empty path: no columns, residual equal to `y`.
    pub fn root(matrix: &SensingMatrix, y: &[f64]) -> Result<Self> {
        Self::from_indices(matrix, &[], y)
    }

    /// Fits `y` on `indices` (kept in the given selection order).
    pub fn from_indices(matrix: &SensingMatrix, indices: &[usize], y: &[f64]) -> Result<Self> {
        let fit = least_squares_project(matrix, indices, y)?;
        Ok(Self {
            indices: indices.to_vec(),
            fit,
        })
    }

    /// Column indices in selection order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Sorted column indices.
    pub fn canonical(&self) -> &[usize] {
        &self.fit.support
    }

    /// Least-squares coefficients aligned with [`Path::canonical`].
    pub fn coefficients(&self) -> &[f64] {
        &self.fit.coefficients
    }

    pub fn residual(&self) -> &[f64] {
        &self.fit.residual
    }

    pub fn residual_norm_sq(&self) -> f64 {
        self.fit.residual_norm_sq
    }

    pub fn depth(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    /// True when both paths select the same column set.
    pub fn same_support(&self, other: &Path) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn fit(&self) -> &LsFit {
        &self.fit
    }
}

/// Child of `parent` with `new_index` appended, refit on the child's support.
pub fn extend_path(parent: &Path, new_index: usize, matrix: &SensingMatrix, y: &[f64]) -> Result<Path> {
    if parent.contains(new_index) {
        return Err(MmpError::DuplicateIndex(new_index));
    }
    let mut indices = parent.indices.clone();
    indices.push(new_index);
    Path::from_indices(matrix, &indices, y)
}

/// The candidates alive at one iteration, pairwise distinct by support.
#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    pub iteration: usize,
    paths: Vec<Path>,
    seen: HashSet<Vec<usize>>,
}

impl CandidateSet {
    pub fn new(iteration: usize) -> Self {
        Self {
            iteration,
            ..Default::default()
        }
    }

    /// Adds `path` unless a path with the same support is already present.
    /// Returns whether it was inserted.
    pub fn insert(&mut self, path: Path) -> bool {
        if self.seen.insert(path.canonical().to_vec()) {
            self.paths.push(path);
            true
        } else {
            false
        }
    }

    pub fn contains_support(&self, canonical: &[usize]) -> bool {
        self.seen.contains(canonical)
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}
