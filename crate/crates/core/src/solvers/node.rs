use std::sync::Arc;

use crate::linalg::{axpy, dot, norm, norm_sq, SensingMatrix, RANK_TOL};

/// One orthonormal direction of a path's column span, linked to the
/// directions of its ancestors.
#[derive(Debug)]
struct BasisLink {
    q: Vec<f64>,
    parent: Option<Arc<BasisLink>>,
}

/// Search node used inside the solvers.
///
/// Keeps an orthonormal basis of the selected columns so a child costs one
/// re-orthogonalised Gram-Schmidt step instead of a fresh factorisation.
/// Final outputs are always refit with `least_squares_project` on the
/// canonical support.
#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub indices: Vec<usize>,
    pub canonical: Vec<usize>,
    pub residual: Vec<f64>,
    pub residual_norm_sq: f64,
    basis: Option<Arc<BasisLink>>,
    scale: f64,
}

impl Node {
    pub fn root(y: &[f64]) -> Self {
        Self {
            indices: Vec::new(),
            canonical: Vec::new(),
            residual: y.to_vec(),
            residual_norm_sq: norm_sq(y),
            basis: None,
            scale: 0.0,
        }
    }

    pub fn depth(&self) -> usize {
        self.indices.len()
    }

    /// Sorted support of the child that adds `j`.
    pub fn child_support(&self, j: usize) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.canonical.len() + 1);
        let pos = self.canonical.partition_point(|&c| c < j);
        s.extend_from_slice(&self.canonical[..pos]);
        s.push(j);
        s.extend_from_slice(&self.canonical[pos..]);
        s
    }

    /// Extends the path by column `j`. Returns `None` when the column lies in
    /// the span of the path (numerically rank deficient).
    pub fn child(&self, matrix: &SensingMatrix, j: usize) -> Option<Node> {
        debug_assert!(!self.indices.contains(&j));
        let a = matrix.column(j);
        let scale = self.scale.max(matrix.column_norm(j));
        if !(scale > 0.0) {
            return None;
        }

        let mut w = a.to_vec();
        for _ in 0..2 {
            let mut link = self.basis.as_deref();
            while let Some(l) = link {
                let h = dot(&l.q, &w);
                axpy(-h, &l.q, &mut w);
                link = l.parent.as_deref();
            }
        }
        let rho = norm(&w);
        if rho <= RANK_TOL * scale {
            return None;
        }
        w.iter_mut().for_each(|v| *v /= rho);

        let mut residual = self.residual.clone();
        let h = dot(&w, &residual);
        axpy(-h, &w, &mut residual);
        let residual_norm_sq = norm_sq(&residual);

        let mut indices = self.indices.clone();
        indices.push(j);
        Some(Node {
            indices,
            canonical: self.child_support(j),
            residual,
            residual_norm_sq,
            basis: Some(Arc::new(BasisLink {
                q: w,
                parent: self.basis.clone(),
            })),
            scale,
        })
    }
}

/// Ranking used for pruning and for the final choice: smaller residual
/// first, ties by lexicographic support.
pub(crate) fn node_order(a: &Node, b: &Node) -> std::cmp::Ordering {
    a.residual_norm_sq
        .total_cmp(&b.residual_norm_sq)
        .then_with(|| a.canonical.cmp(&b.canonical))
}
