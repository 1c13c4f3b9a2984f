use crate::linalg::{norm_sq, SparseSignal};
use crate::solvers::RecoveryOutput;

/// Per-trial recovery quality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub exact: bool,
    /// `‖x − x̂‖₂²`.
    pub squared_error: f64,
    /// `|T ∖ Ŝ|`.
    pub missed: usize,
    /// `|Ŝ ∖ T|`.
    pub false_alarms: usize,
}

impl TrialMetrics {
    /// Missed-detection ratio `missed / K`.
    pub fn p_md(&self, k: usize) -> f64 {
        self.missed as f64 / k as f64
    }

    /// False-alarm ratio `false_alarms / K`.
    pub fn p_f(&self, k: usize) -> f64 {
        self.false_alarms as f64 / k as f64
    }
}

pub fn metrics(x_true: &SparseSignal, output: &RecoveryOutput) -> TrialMetrics {
    let xhat = output.dense(x_true.len());
    let diff: Vec<f64> = x_true.values.iter().zip(&xhat).map(|(a, b)| a - b).collect();
    let missed = x_true.support.iter().filter(|i| !output.support.contains(i)).count();
    let false_alarms = output.support.iter().filter(|i| !x_true.support.contains(i)).count();
    TrialMetrics {
        exact: missed == 0 && false_alarms == 0,
        squared_error: norm_sq(&diff),
        missed,
        false_alarms,
    }
}
