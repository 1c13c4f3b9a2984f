use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MmpError, Result};
use crate::linalg::SensingMatrix;

/// Largest number of column subsets [`rip_constant`] will enumerate.
pub const SUBSET_GUARD: u128 = 1_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Exact restricted isometry constant of the given order: the largest
/// deviation of an eigenvalue of `Φ_S'Φ_S` from 1 over every column subset
/// `S` with `|S| = order`. Order 0 gives 0.
pub fn rip_constant(matrix: &SensingMatrix, order: usize) -> Result<f64> {
    let n = matrix.cols();
    if order > n {
        return Err(MmpError::OutOfRange(format!(
            "order {order} exceeds the {n} available columns"
        )));
    }
    if order == 0 {
        return Ok(0.0);
    }
    let subsets = binomial(n, order);
    if subsets > SUBSET_GUARD {
        return Err(MmpError::GuardExceeded {
            subsets,
            limit: SUBSET_GUARD,
        });
    }
    let a = matrix.entries();
    let gram = a.transpose() * a;
    let delta = (0..=n - order)
        .into_par_iter()
        .map(|first| {
            let mut worst = 0.0f64;
            let mut subset = Vec::with_capacity(order);
            subset.push(first);
            visit(&mut subset, first + 1, n, order, &mut |s| {
                worst = worst.max(deviation(&gram, s));
            });
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(delta)
}

fn visit(subset: &mut Vec<usize>, from: usize, n: usize, order: usize, f: &mut impl FnMut(&[usize])) {
    if subset.len() == order {
        f(subset);
        return;
    }
    let need = order - subset.len();
    for j in from..=n - need {
        subset.push(j);
        visit(subset, j + 1, n, order, f);
        subset.pop();
    }
}

fn deviation(gram: &DMatrix<f64>, subset: &[usize]) -> f64 {
    let k = subset.len();
    let g = DMatrix::from_fn(k, k, |r, c| gram[(subset[r], subset[c])]);
    let eig = g.symmetric_eigenvalues();
    (eig.max() - 1.0).max(1.0 - eig.min())
}

/// Exact `δ_1, …, δ_max_order` of one matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipReport {
    pub m: usize,
    pub n: usize,
    pub max_order: usize,
    pub deltas: BTreeMap<usize, f64>,
}

impl RipReport {
    pub fn compute(matrix: &SensingMatrix, max_order: usize) -> Result<Self> {
        let mut deltas = BTreeMap::new();
        for order in 1..=max_order {
            deltas.insert(order, rip_constant(matrix, order)?);
        }
        Ok(Self {
            m: matrix.rows(),
            n: matrix.cols(),
            max_order,
            deltas,
        })
    }

    /// Builds a report from known constants, e.g. for evaluating bounds on
    /// hypothetical values.
    pub fn from_deltas(m: usize, n: usize, deltas: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let deltas: BTreeMap<usize, f64> = deltas.into_iter().filter(|&(k, _)| k > 0).collect();
        let max_order = deltas.keys().next_back().copied().unwrap_or(0);
        Self {
            m,
            n,
            max_order,
            deltas,
        }
    }

    /// `δ_order`, with `δ_0 = 0`.
    pub fn get(&self, order: usize) -> Result<f64> {
        if order == 0 {
            return Ok(0.0);
        }
        self.deltas
            .get(&order)
            .copied()
            .ok_or(MmpError::MissingOrder(order))
    }
}
