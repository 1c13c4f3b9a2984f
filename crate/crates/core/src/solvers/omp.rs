use super::node::Node;
use super::{RecoveryOutput, SearchStats, SolverConfig, Termination};
use crate::error::{MmpError, Result};
use crate::linalg::{check_len, correlate, top_l_indices, SensingMatrix};

/// Orthogonal matching pursuit: `K` rounds of picking the column most
/// correlated with the residual, then refitting.
pub fn omp(matrix: &SensingMatrix, y: &[f64], k: usize) -> Result<RecoveryOutput> {
    SolverConfig::new(k, 1).validate(matrix)?;
    check_len(y, matrix.rows())?;

    let mut node = Node::root(y);
    for depth in 0..k {
        let corr = correlate(matrix, &node.residual)?;
        let pick = top_l_indices(&corr, 1, &node.indices)?[0];
        match node.child(matrix, pick) {
            Some(child) => node = child,
            None => {
                let stats = SearchStats {
                    candidates_per_iteration: vec![1; depth],
                    paths_explored: 1,
                    terminated_by: Termination::Complete,
                };
                let partial = RecoveryOutput::refit(matrix, y, &node.canonical, stats)?;
                return Err(MmpError::PartialRecovery {
                    best: Box::new(partial),
                    target: k,
                });
            }
        }
    }
    let stats = SearchStats {
        candidates_per_iteration: vec![1; k],
        paths_explored: 1,
        terminated_by: Termination::Complete,
    };
    RecoveryOutput::refit(matrix, y, &node.canonical, stats)
}

/// Least squares on the known support: `x̂ = Φ_T† y`.
pub fn oracle_ls(matrix: &SensingMatrix, y: &[f64], true_support: &[usize]) -> Result<RecoveryOutput> {
    if true_support.len() > matrix.rows() {
        return Err(MmpError::InvalidInput(format!(
            "support of size {} exceeds {} measurements",
            true_support.len(),
            matrix.rows()
        )));
    }
    let stats = SearchStats {
        candidates_per_iteration: vec![1],
        paths_explored: 1,
        terminated_by: Termination::Complete,
    };
    RecoveryOutput::refit(matrix, y, true_support, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_sq;
    use nalgebra::{DMatrix, DVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal, StandardNormal};

    #[test]
    fn identity_example() {
        let phi = SensingMatrix::identity(3);
        let out = omp(&phi, &[0.0, 5.0, 0.0], 1).unwrap();
        assert_eq!(out.support, vec![1]);
        assert!((out.coefficients[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_columns_recover_any_support() {
        // Columns of a random orthogonal matrix.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let g = DMatrix::from_fn(8, 8, |_, _| StandardNormal.sample(&mut rng));
        let q = g.qr().q();
        let phi = SensingMatrix::new(q).unwrap();
        for k in 1..=8 {
            let support: Vec<usize> = (0..8).filter(|i| (i * 5 + k) % 8 < k).collect();
            let mut x = vec![0.0; 8];
            for &i in &support {
                x[i] = 0.5 + i as f64;
            }
            let y = phi.apply(&x).unwrap();
            let out = omp(&phi, &y, support.len()).unwrap();
            assert_eq!(out.support, support);
        }
    }

    #[test]
    fn oracle_noiseless_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let d = Normal::new(0.0, 0.2).unwrap();
        let data: Vec<f64> = (0..25 * 50).map(|_| d.sample(&mut rng)).collect();
        let phi = SensingMatrix::from_row_major(25, 50, &data).unwrap();
        let support = vec![2, 9, 33, 47];
        let mut x = vec![0.0; 50];
        for &i in &support {
            x[i] = StandardNormal.sample(&mut rng);
        }
        let y = phi.apply(&x).unwrap();
        let out = oracle_ls(&phi, &y, &support).unwrap();
        for (c, &i) in out.coefficients.iter().zip(&support) {
            assert!((c - x[i]).abs() < 1e-10);
        }
        assert!(out.residual_norm_sq <= 1e-20 * norm_sq(&y));
    }

    #[test]
    fn oracle_noisy_matches_pseudoinverse_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let d = Normal::new(0.0, 0.2).unwrap();
        let data: Vec<f64> = (0..25 * 50).map(|_| d.sample(&mut rng)).collect();
        let phi = SensingMatrix::from_row_major(25, 50, &data).unwrap();
        let support = vec![1, 20, 21];
        let mut x = vec![0.0; 50];
        for &i in &support {
            x[i] = StandardNormal.sample(&mut rng);
        }
        let v: Vec<f64> = (0..25).map(|_| 0.01 * d.sample(&mut rng)).collect();
        let clean = phi.apply(&x).unwrap();
        let y: Vec<f64> = clean.iter().zip(&v).map(|(a, b)| a + b).collect();
        let out = oracle_ls(&phi, &y, &support).unwrap();

        // x_T + (Φ_T'Φ_T)^{-1} Φ_T' v via an explicit inverse.
        let a = phi.submatrix(&support);
        let gram_inv = (a.transpose() * &a).try_inverse().unwrap();
        let shift = gram_inv * a.transpose() * DVector::from_vec(v);
        for (idx, &i) in support.iter().enumerate() {
            assert!((out.coefficients[idx] - (x[i] + shift[idx])).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_empty_support_returns_y() {
        let phi = SensingMatrix::identity(3);
        let out = oracle_ls(&phi, &[1.0, -2.0, 3.0], &[]).unwrap();
        assert!(out.support.is_empty());
        assert_eq!(out.residual_norm_sq, 14.0);
    }
}
