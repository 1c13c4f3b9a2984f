use serde::{Deserialize, Serialize};

use super::bounds::{bf_recovery_bound, GuaranteeConstants};
use super::rip::RipReport;
use crate::error::{MmpError, Result};
use crate::linalg::{check_len, norm, SensingMatrix};
use crate::solvers::{mmp_bf, SolverConfig};

/// Outcome of checking the support-recovery guarantee on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    pub condition_holds: bool,
    pub recovery_exact: bool,
    /// False only when the condition holds and recovery still failed.
    pub consistent: bool,
    /// `None` when some needed constant is at least 1.
    pub constants: Option<GuaranteeConstants>,
    pub delta_kl: f64,
    pub min_abs_x: f64,
    pub noise_norm: f64,
}

/// Orders needed by [`verify_guarantee`]: `δ_K`, `δ_2K`, `δ_{K+L}`.
pub fn required_order(k: usize, l: usize) -> usize {
    (2 * k).max(k + l)
}

/// Checks the recovery guarantee on `y = Φx + v` with exact constants.
///
/// With `v = 0` the condition is `δ_{K+L} < √L/(√K+2√L)`; otherwise it is
/// `min_{i∈T} |x_i| ≥ ζ‖v‖₂`. Both also require `L ≤ K`, under which the
/// first-iteration argument is stated. The signal must have exactly `K`
/// nonzeros.
pub fn verify_guarantee(matrix: &SensingMatrix, x: &[f64], v: &[f64], config: &SolverConfig) -> Result<GuaranteeReport> {
    let report = RipReport::compute(matrix, required_order(config.k, config.l).min(matrix.cols()))?;
    verify_guarantee_with(&report, matrix, x, v, config)
}

/// [`verify_guarantee`] with precomputed constants.
pub fn verify_guarantee_with(
    report: &RipReport,
    matrix: &SensingMatrix,
    x: &[f64],
    v: &[f64],
    config: &SolverConfig,
) -> Result<GuaranteeReport> {
    config.validate(matrix)?;
    check_len(x, matrix.cols())?;
    check_len(v, matrix.rows())?;
    let (k, l) = (config.k, config.l);
    let truth: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0.0).collect();
    if truth.len() != k {
        return Err(MmpError::InvalidInput(format!(
            "signal has {} nonzeros but K = {k}",
            truth.len()
        )));
    }
    let min_abs_x = truth.iter().map(|&i| x[i].abs()).fold(f64::INFINITY, f64::min);
    let noise_norm = norm(v);

    let delta_kl = report.get(k + l)?;
    let constants = match (report.get(k), report.get(2 * k)) {
        (Ok(dk), Ok(d2k)) if dk < 1.0 && d2k < 1.0 && delta_kl < 1.0 => {
            Some(super::bounds::noisy_constants(dk, d2k, delta_kl, k, l)?)
        }
        _ => None,
    };
    let condition_holds = l <= k
        && if noise_norm == 0.0 {
            delta_kl < bf_recovery_bound(k, l)
        } else {
            constants.is_some_and(|c| min_abs_x >= c.zeta * noise_norm)
        };

    let clean = matrix.apply(x)?;
    let y: Vec<f64> = clean.iter().zip(v).map(|(a, b)| a + b).collect();
    let recovery_exact = match mmp_bf(matrix, &y, config) {
        Ok(out) => out.support == truth,
        Err(MmpError::PartialRecovery { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok(GuaranteeReport {
        condition_holds,
        recovery_exact,
        consistent: !(condition_holds && !recovery_exact),
        constants,
        delta_kl,
        min_abs_x,
        noise_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_noiseless_instance_is_certified_and_recovered() {
        let phi = SensingMatrix::identity(6);
        let x = [0.0, 1.0, 0.0, -2.0, 0.0, 0.0];
        let r = verify_guarantee(&phi, &x, &[0.0; 6], &SolverConfig::new(2, 2)).unwrap();
        assert!(r.condition_holds && r.recovery_exact && r.consistent);
        assert_eq!(r.delta_kl, 0.0);
    }

    #[test]
    fn failed_condition_is_still_consistent() {
        // Nearly parallel columns: the condition fails, yet the sparse
        // signal on the first column is found.
        let phi = SensingMatrix::from_columns(&[vec![1.0, 0.0], vec![0.8, 0.6], vec![0.6, 0.8]]).unwrap();
        let x = [1.0, 0.0, 0.0];
        let r = verify_guarantee(&phi, &x, &[0.0, 0.0], &SolverConfig::new(1, 1)).unwrap();
        assert!(!r.condition_holds);
        assert!(r.recovery_exact);
        assert!(r.consistent);
    }

    #[test]
    fn sparsity_must_match() {
        let phi = SensingMatrix::identity(4);
        assert!(verify_guarantee(&phi, &[1.0, 1.0, 0.0, 0.0], &[0.0; 4], &SolverConfig::new(1, 1)).is_err());
    }
}
