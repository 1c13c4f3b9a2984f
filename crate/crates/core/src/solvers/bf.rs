use std::collections::HashSet;

use super::node::{node_order, Node};
use super::{RecoveryOutput, SearchStats, SolverConfig, Termination};
use crate::error::{MmpError, Result};
use crate::linalg::{check_len, correlate, top_l_indices, SensingMatrix};
use crate::path::{CandidateSet, Path};

/// Breadth-first multipath matching pursuit.
///
/// At iteration `k` each surviving path ranks the columns outside its own
/// support by `|Φ'r|` and spawns one child per top-`L` index. Children whose
/// support already exists in the new generation are merged. With a finite
/// `max_candidates` only that many children survive, smallest residual
/// first (ties by lexicographic support). The depth-`K` path with the
/// smallest residual is returned, refit on its support.
pub fn mmp_bf(matrix: &SensingMatrix, y: &[f64], config: &SolverConfig) -> Result<RecoveryOutput> {
    search(matrix, y, config, None)
}

/// [`mmp_bf`] that also returns the candidate set of every iteration,
/// starting with the root set `{∅}` at iteration 0.
pub fn mmp_bf_traced(
    matrix: &SensingMatrix,
    y: &[f64],
    config: &SolverConfig,
) -> Result<(RecoveryOutput, Vec<CandidateSet>)> {
    let mut trace = Vec::with_capacity(config.k + 1);
    let out = search(matrix, y, config, Some(&mut trace))?;
    Ok((out, trace))
}

fn search(
    matrix: &SensingMatrix,
    y: &[f64],
    config: &SolverConfig,
    mut trace: Option<&mut Vec<CandidateSet>>,
) -> Result<RecoveryOutput> {
    config.validate(matrix)?;
    check_len(y, matrix.rows())?;
    let n = matrix.cols();

    let mut current = vec![Node::root(y)];
    if let Some(t) = trace.as_deref_mut() {
        record(t, 0, &current, matrix, y)?;
    }
    let mut counts = Vec::with_capacity(config.k);

    for k in 1..=config.k {
        let mut next: Vec<Node> = Vec::new();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for parent in &current {
            let corr = correlate(matrix, &parent.residual)?;
            let l = config.l.min(n - parent.depth());
            for j in top_l_indices(&corr, l, &parent.indices)? {
                let support = parent.child_support(j);
                if !seen.insert(support) {
                    continue;
                }
                if let Some(child) = parent.child(matrix, j) {
                    next.push(child);
                }
            }
        }

        if next.is_empty() {
            let best = current
                .iter()
                .min_by(|a, b| node_order(a, b))
                .expect("current generation is never empty");
            let stats = SearchStats {
                candidates_per_iteration: counts,
                paths_explored: current.len(),
                terminated_by: Termination::Complete,
            };
            let partial = RecoveryOutput::refit(matrix, y, &best.canonical, stats)?;
            return Err(MmpError::PartialRecovery {
                best: Box::new(partial),
                target: config.k,
            });
        }

        if let Some(cap) = config.max_candidates {
            if next.len() > cap {
                next.sort_by(node_order);
                next.truncate(cap);
            }
        }
        counts.push(next.len());
        if let Some(t) = trace.as_deref_mut() {
            record(t, k, &next, matrix, y)?;
        }
        current = next;
    }

    let best = current
        .iter()
        .min_by(|a, b| node_order(a, b))
        .expect("final generation is never empty");
    let stats = SearchStats {
        candidates_per_iteration: counts,
        paths_explored: current.len(),
        terminated_by: Termination::Complete,
    };
    RecoveryOutput::refit(matrix, y, &best.canonical, stats)
}

fn record(
    trace: &mut Vec<CandidateSet>,
    iteration: usize,
    nodes: &[Node],
    matrix: &SensingMatrix,
    y: &[f64],
) -> Result<()> {
    let mut set = CandidateSet::new(iteration);
    for node in nodes {
        set.insert(Path::from_indices(matrix, &node.indices, y)?);
    }
    trace.push(set);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::least_squares_project;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal, StandardNormal};

    fn gaussian(m: usize, n: usize, rng: &mut ChaCha8Rng) -> SensingMatrix {
        let d = Normal::new(0.0, (1.0 / m as f64).sqrt()).unwrap();
        let data: Vec<f64> = (0..m * n).map(|_| d.sample(rng)).collect();
        SensingMatrix::from_row_major(m, n, &data).unwrap()
    }

    #[test]
    fn candidate_growth_respects_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let phi = gaussian(20, 40, &mut rng);
            let y: Vec<f64> = (0..20).map(|_| StandardNormal.sample(&mut rng)).collect();
            let cfg = SolverConfig::new(4, 3);
            let out = mmp_bf(&phi, &y, &cfg).unwrap();
            let capped = mmp_bf(&phi, &y, &cfg.clone().with_cap(5)).unwrap();
            assert_eq!(out.stats.candidates_per_iteration.len(), 4);
            for (k, (&c, &cc)) in out
                .stats
                .candidates_per_iteration
                .iter()
                .zip(&capped.stats.candidates_per_iteration)
                .enumerate()
            {
                assert!(c >= 1 && c <= 3usize.pow(k as u32 + 1));
                assert!(cc <= 5 && cc <= c);
            }
            assert!(capped.residual_norm_sq >= out.residual_norm_sq - 1e-12);
        }
    }

    #[test]
    fn returns_minimum_over_final_generation() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let phi = gaussian(15, 30, &mut rng);
        let y: Vec<f64> = (0..15).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (out, trace) = mmp_bf_traced(&phi, &y, &SolverConfig::new(3, 3)).unwrap();
        assert_eq!(trace.len(), 4);
        assert_eq!(trace[0].len(), 1);
        let min = trace[3]
            .paths()
            .iter()
            .map(|p| p.residual_norm_sq())
            .fold(f64::INFINITY, f64::min);
        assert!((out.residual_norm_sq - min).abs() <= 1e-12 * min.max(1.0));
        let refit = least_squares_project(&phi, &out.support, &y).unwrap();
        assert_eq!(refit.coefficients, out.coefficients);
    }

    #[test]
    fn rejects_sparsity_above_rows() {
        let phi = SensingMatrix::identity(3);
        let err = mmp_bf(&phi, &[1.0, 0.0, 0.0], &SolverConfig::new(4, 1)).unwrap_err();
        assert!(matches!(err, MmpError::InvalidInput(_)));
    }

    #[test]
    fn exhausted_search_reports_partial_path() {
        // Rank-2 matrix: no 3-column subset is full rank.
        let phi = SensingMatrix::from_columns(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![1.0, -1.0, 0.0],
        ])
        .unwrap();
        let y = [1.0, 2.0, 0.5];
        match mmp_bf(&phi, &y, &SolverConfig::new(3, 2)) {
            Err(MmpError::PartialRecovery { best, target }) => {
                assert_eq!(target, 3);
                assert_eq!(best.support.len(), 2);
            }
            other => panic!("expected partial recovery, got {other:?}"),
        }
    }
}
