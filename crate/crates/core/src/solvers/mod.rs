//! Sparse recovery algorithms.
//!
//! * [`mmp_bf`]: breadth-first multipath search; every surviving path spawns
//!   `L` children per iteration and children with equal supports merge.
//! * [`mmp_df`]: depth-first search that traces one full path per search
//!   order, choosing layer ranks by the modulo strategy ([`compute_ck`]).
//! * [`omp`]: orthogonal matching pursuit.
//! * [`oracle_ls`]: least squares on a known support.

mod bf;
mod df;
mod modulo;
pub(crate) mod node;
mod omp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MmpError, Result};
use crate::linalg::{least_squares_project, norm_sq, scatter, SensingMatrix};

pub use bf::{mmp_bf, mmp_bf_traced};
pub use df::mmp_df;
pub use modulo::{candidate_order, compute_ck};
pub use omp::{omp, oracle_ls};

/// Default depth-first stop threshold, relative to `‖y‖₂²`.
pub const DEFAULT_RELATIVE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Target sparsity.
    pub k: usize,
    /// Expansion factor: children per path (breadth-first) or ranks per
    /// layer (depth-first).
    pub l: usize,
    /// Breadth-first pruning cap per iteration; `None` keeps every path.
    #[serde(default)]
    pub max_candidates: Option<usize>,
    /// Depth-first budget of full-depth paths.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Depth-first stop threshold on the residual norm². `None` uses
    /// `DEFAULT_RELATIVE_EPSILON · ‖y‖²`.
    #[serde(default)]
    pub epsilon: Option<f64>,
}

fn default_n_max() -> usize {
    50
}

impl SolverConfig {
    pub fn new(k: usize, l: usize) -> Self {
        Self {
            k,
            l,
            max_candidates: None,
            n_max: default_n_max(),
            epsilon: None,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.max_candidates = Some(cap);
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn validate(&self, matrix: &SensingMatrix) -> Result<()> {
        let (m, n) = (matrix.rows(), matrix.cols());
        if self.k == 0 {
            return Err(MmpError::InvalidInput("sparsity K must be at least 1".into()));
        }
        if self.k > m || self.k > n {
            return Err(MmpError::InvalidInput(format!(
                "sparsity K={} exceeds matrix dimensions {m}x{n}",
                self.k
            )));
        }
        if self.l == 0 || self.l > n {
            return Err(MmpError::InvalidInput(format!(
                "expansion factor L={} must lie in 1..={n}",
                self.l
            )));
        }
        if self.max_candidates == Some(0) {
            return Err(MmpError::InvalidInput("candidate cap must be at least 1".into()));
        }
        if self.n_max == 0 {
            return Err(MmpError::InvalidInput("N_max must be at least 1".into()));
        }
        if let Some(eps) = self.epsilon {
            if !(eps >= 0.0) || !eps.is_finite() {
                return Err(MmpError::InvalidInput(format!(
                    "epsilon must be a finite nonnegative number, got {eps}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn resolved_epsilon(&self, y: &[f64]) -> f64 {
        self.epsilon
            .unwrap_or_else(|| DEFAULT_RELATIVE_EPSILON * norm_sq(y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    /// The depth-first budget `N_max` was used up.
    Budget,
    /// A path reached the residual threshold.
    Epsilon,
    /// The search ran to completion.
    Complete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Distinct supports alive (breadth-first) or visited (depth-first) at
    /// each depth.
    pub candidates_per_iteration: Vec<usize>,
    /// Full-depth candidates compared for the final choice.
    pub paths_explored: usize,
    pub terminated_by: Termination,
}

impl SearchStats {
    pub fn total_candidates(&self) -> usize {
        self.candidates_per_iteration.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryOutput {
    /// Estimated support, ascending.
    pub support: Vec<usize>,
    /// Least-squares coefficients aligned with `support`.
    pub coefficients: Vec<f64>,
    pub residual_norm_sq: f64,
    pub stats: SearchStats,
}

impl RecoveryOutput {
    /// The estimate as a length-`n` vector, zero off-support.
    pub fn dense(&self, n: usize) -> Vec<f64> {
        scatter(&self.support, &self.coefficients, n)
    }

    pub(crate) fn refit(
        matrix: &SensingMatrix,
        y: &[f64],
        support: &[usize],
        stats: SearchStats,
    ) -> Result<Self> {
        let fit = least_squares_project(matrix, support, y)?;
        Ok(Self {
            support: fit.support,
            coefficients: fit.coefficients,
            residual_norm_sq: fit.residual_norm_sq,
            stats,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "omp")]
    Omp,
    #[serde(rename = "mmp-bf")]
    MmpBf,
    #[serde(rename = "mmp-df")]
    MmpDf,
    #[serde(rename = "oracle")]
    Oracle,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Omp => "omp",
            Algorithm::MmpBf => "mmp-bf",
            Algorithm::MmpDf => "mmp-df",
            Algorithm::Oracle => "oracle",
        }
    }

    /// Runs the algorithm. `true_support` is required by the oracle and
    /// ignored otherwise.
    pub fn run(
        self,
        matrix: &SensingMatrix,
        y: &[f64],
        config: &SolverConfig,
        true_support: Option<&[usize]>,
    ) -> Result<RecoveryOutput> {
        match self {
            Algorithm::Omp => omp(matrix, y, config.k),
            Algorithm::MmpBf => mmp_bf(matrix, y, config),
            Algorithm::MmpDf => mmp_df(matrix, y, config),
            Algorithm::Oracle => {
                let support = true_support.ok_or_else(|| {
                    MmpError::InvalidInput("the oracle estimator needs the true support".into())
                })?;
                oracle_ls(matrix, y, support)
            }
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = MmpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omp" => Ok(Algorithm::Omp),
            "mmp-bf" => Ok(Algorithm::MmpBf),
            "mmp-df" => Ok(Algorithm::MmpDf),
            "oracle" => Ok(Algorithm::Oracle),
            other => Err(MmpError::InvalidInput(format!("unknown algorithm {other:?}"))),
        }
    }
}
