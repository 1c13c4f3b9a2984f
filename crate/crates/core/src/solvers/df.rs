use std::collections::HashSet;

use super::modulo::{compute_ck, order_count};
use super::node::{node_order, Node};
use super::{RecoveryOutput, SearchStats, SolverConfig, Termination};
use crate::error::{MmpError, Result};
use crate::linalg::{check_len, correlate, top_l_indices, SensingMatrix};

/// Depth-first multipath matching pursuit.
///
/// For `ℓ = 1, 2, …` the layer ranks `(c_1, …, c_K)` of order `ℓ` are
/// decoded and a single depth-`K` path is traced, taking at layer `k` the
/// `c_k`-th best column (by `|Φ'r|`, among columns not yet on the path).
/// The search stops once a path's residual norm² is at most `epsilon`, or
/// after `N_max` paths, or after all `L^K` orders. The path with the
/// smallest residual is returned.
pub fn mmp_df(matrix: &SensingMatrix, y: &[f64], config: &SolverConfig) -> Result<RecoveryOutput> {
    config.validate(matrix)?;
    check_len(y, matrix.rows())?;
    let n = matrix.cols();
    let k_target = config.k;
    let epsilon = config.resolved_epsilon(y);
    let budget = match order_count(config.l, k_target) {
        Some(total) if total < config.n_max as u128 => total as usize,
        _ => config.n_max,
    };

    let mut visited: Vec<HashSet<Vec<usize>>> = vec![HashSet::new(); k_target];
    let mut best: Option<Node> = None;
    let mut rho = f64::INFINITY;
    let mut ell = 0usize;
    let mut explored = 0usize;

    while ell < budget && epsilon < rho {
        ell += 1;
        let layers = compute_ck(ell, config.l, k_target)?;
        let Some(node) = trace_path(matrix, y, &layers, n, &mut visited)? else {
            continue;
        };
        explored += 1;
        let better = match &best {
            None => true,
            Some(b) => node_order(&node, b).is_lt(),
        };
        if better {
            rho = node.residual_norm_sq;
            best = Some(node);
        }
    }

    let terminated_by = if rho <= epsilon {
        Termination::Epsilon
    } else if ell == config.n_max {
        Termination::Budget
    } else {
        Termination::Complete
    };
    let stats = SearchStats {
        candidates_per_iteration: visited.iter().map(HashSet::len).collect(),
        paths_explored: explored,
        terminated_by,
    };

    match best {
        Some(node) => RecoveryOutput::refit(matrix, y, &node.canonical, stats),
        None => {
            // Every traced path hit a rank-deficient subset; fall back to the
            // deepest first-order prefix.
            let prefix = greedy_prefix(matrix, y, k_target)?;
            let partial = RecoveryOutput::refit(matrix, y, &prefix.canonical, stats)?;
            Err(MmpError::PartialRecovery {
                best: Box::new(partial),
                target: k_target,
            })
        }
    }
}

/// Traces one full path. `None` if a layer rank cannot be honoured or the
/// path becomes rank deficient.
fn trace_path(
    matrix: &SensingMatrix,
    y: &[f64],
    layers: &[usize],
    n: usize,
    visited: &mut [HashSet<Vec<usize>>],
) -> Result<Option<Node>> {
    let mut node = Node::root(y);
    for (depth, &rank) in layers.iter().enumerate() {
        if rank > n - node.depth() {
            return Ok(None);
        }
        let corr = correlate(matrix, &node.residual)?;
        let pick = *top_l_indices(&corr, rank, &node.indices)?
            .last()
            .expect("rank is at least 1");
        match node.child(matrix, pick) {
            Some(child) => node = child,
            None => return Ok(None),
        }
        visited[depth].insert(node.canonical.clone());
    }
    Ok(Some(node))
}

fn greedy_prefix(matrix: &SensingMatrix, y: &[f64], k: usize) -> Result<Node> {
    let mut node = Node::root(y);
    for _ in 0..k {
        let corr = correlate(matrix, &node.residual)?;
        let pick = top_l_indices(&corr, 1, &node.indices)?[0];
        match node.child(matrix, pick) {
            Some(child) => node = child,
            None => break,
        }
    }
    Ok(node)
}
