use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gen::{add_noise, gen_sensing_matrix, gen_sparse_signal, Snr};
use super::metrics::{metrics, TrialMetrics};
use crate::error::{MmpError, Result};
use crate::linalg::{norm_sq, Measurement, SensingMatrix, SparseSignal};
use crate::solvers::{Algorithm, RecoveryOutput, SolverConfig};

/// Environment variable overriding the number of worker threads.
pub const THREADS_ENV: &str = "MMP_THREADS";

/// One algorithm of a sweep, with every setting except the sparsity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub algorithm: Algorithm,
    /// Name used in the output; defaults to the algorithm name.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "one")]
    pub l: usize,
    #[serde(default)]
    pub max_candidates: Option<usize>,
    #[serde(default = "fifty")]
    pub n_max: usize,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

fn one() -> usize {
    1
}

fn fifty() -> usize {
    50
}

impl SolverSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            label: None,
            l: 1,
            max_candidates: None,
            n_max: 50,
            epsilon: None,
        }
    }

    pub fn with_l(mut self, l: usize) -> Self {
        self.l = l;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.max_candidates = Some(cap);
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn name(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.algorithm.name().to_string())
    }

    pub fn config(&self, k: usize) -> SolverConfig {
        SolverConfig {
            k,
            l: self.l,
            max_candidates: self.max_candidates,
            n_max: self.n_max,
            epsilon: self.epsilon,
        }
    }
}

/// A Monte Carlo sweep over sparsities and SNRs.
///
/// JSON form:
/// ```json
/// {"m": 100, "n": 256, "k_values": [10, 20], "snr_db_values": ["inf", 30],
///  "trials": 500, "seed": 1, "fix_matrix": false,
///  "solvers": [{"algorithm": "omp"},
///              {"algorithm": "mmp-bf", "l": 6, "max_candidates": 50},
///              {"algorithm": "mmp-df", "l": 6, "n_max": 50}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub k_values: Vec<usize>,
    #[serde(default = "noiseless_only")]
    pub snr_db_values: Vec<Snr>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub solvers: Vec<SolverSpec>,
    /// Draw one matrix for the whole sweep instead of one per trial.
    #[serde(default)]
    pub fix_matrix: bool,
}

fn noiseless_only() -> Vec<Snr> {
    vec![Snr::Noiseless]
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(MmpError::InvalidInput("trials must be at least 1".into()));
        }
        if self.m == 0 || self.n == 0 {
            return Err(MmpError::InvalidInput("m and n must be positive".into()));
        }
        if self.k_values.is_empty() || self.snr_db_values.is_empty() || self.solvers.is_empty() {
            return Err(MmpError::InvalidInput(
                "k_values, snr_db_values and solvers must be nonempty".into(),
            ));
        }
        for &k in &self.k_values {
            if k == 0 || k > self.m || k > self.n {
                return Err(MmpError::InvalidInput(format!(
                    "K={k} must lie in 1..={}",
                    self.m.min(self.n)
                )));
            }
        }
        for s in &self.solvers {
            if s.l == 0 || s.l > self.n {
                return Err(MmpError::InvalidInput(format!("L={} must lie in 1..={}", s.l, self.n)));
            }
        }
        Ok(())
    }
}

/// Everything drawn for one trial.
#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub matrix: SensingMatrix,
    pub signal: SparseSignal,
    pub measurement: Measurement,
}

/// Stream of trial `trial` in cell `(k_index, snr_index)`. Each trial owns
/// a ChaCha stream of the sweep seed, so results do not depend on thread
/// count or scheduling.
pub fn trial_stream(k_index: usize, snr_index: usize, trial: usize) -> u64 {
    ((k_index as u64) << 48) | ((snr_index as u64) << 32) | trial as u64
}

const FIXED_MATRIX_STREAM: u64 = u64::MAX;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The fixed sweep matrix when `fix_matrix` is set.
fn fixed_matrix(config: &ExperimentConfig) -> Result<Option<SensingMatrix>> {
    if !config.fix_matrix {
        return Ok(None);
    }
    let mut rng = rng_for(config.seed, FIXED_MATRIX_STREAM);
    gen_sensing_matrix(config.m, config.n, &mut rng).map(Some)
}

/// Regenerates the instance of one trial. The matrix (unless fixed), the
/// signal and the noise are drawn in that order from the trial's stream,
/// and every algorithm sees the same instance.
pub fn trial_instance(config: &ExperimentConfig, k_index: usize, snr_index: usize, trial: usize) -> Result<TrialInstance> {
    let fixed = fixed_matrix(config)?;
    build_instance(config, fixed.as_ref(), k_index, snr_index, trial)
}

fn build_instance(
    config: &ExperimentConfig,
    fixed: Option<&SensingMatrix>,
    k_index: usize,
    snr_index: usize,
    trial: usize,
) -> Result<TrialInstance> {
    let mut rng = rng_for(config.seed, trial_stream(k_index, snr_index, trial));
    let matrix = match fixed {
        Some(m) => m.clone(),
        None => gen_sensing_matrix(config.m, config.n, &mut rng)?,
    };
    let signal = gen_sparse_signal(config.n, config.k_values[k_index], &mut rng)?;
    let clean = matrix.apply(&signal.values)?;
    let measurement = add_noise(&clean, config.snr_db_values[snr_index], &mut rng);
    Ok(TrialInstance {
        matrix,
        signal,
        measurement,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub algorithm: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub snr_db: Snr,
    pub exact: bool,
    pub squared_error: f64,
    pub missed: usize,
    pub false_alarms: usize,
    pub candidates_total: usize,
    /// The solver returned an error; metrics then describe its partial
    /// estimate, or the zero vector if there was none.
    pub failed: bool,
    #[serde(with = "millis")]
    pub wall_time: Duration,
}

impl TrialRecord {
    /// Equality ignoring `wall_time`.
    pub fn same_outcome(&self, other: &TrialRecord) -> bool {
        let mut a = self.clone();
        a.wall_time = other.wall_time;
        a == *other
    }
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1e3)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        Duration::try_from_secs_f64(ms / 1e3).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub algorithm: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub snr_db: Snr,
    /// Fraction of trials with exactly recovered support.
    pub err: f64,
    pub mse: f64,
    pub p_md: f64,
    pub p_f: f64,
    pub mean_candidates: f64,
    pub mean_time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub rows: Vec<AggregateRow>,
    /// Ordered by solver, then sparsity, then SNR, then trial.
    pub trials: Vec<TrialRecord>,
}

/// Runs one algorithm on one instance.
pub fn run_trial(spec: &SolverSpec, instance: &TrialInstance, trial: usize, snr: Snr) -> TrialRecord {
    let k = instance.signal.sparsity();
    let config = spec.config(k);
    let started = Instant::now();
    let result = spec.algorithm.run(
        &instance.matrix,
        &instance.measurement.y,
        &config,
        Some(&instance.signal.support),
    );
    let wall_time = started.elapsed();
    let (output, failed): (Option<RecoveryOutput>, bool) = match result {
        Ok(out) => (Some(out), false),
        Err(MmpError::PartialRecovery { best, .. }) => (Some(*best), true),
        Err(e) => {
            log::warn!("{} failed on trial {trial}: {e}", spec.name());
            (None, true)
        }
    };
    let (m, candidates_total) = match &output {
        Some(out) => (metrics(&instance.signal, out), out.stats.total_candidates()),
        None => (
            TrialMetrics {
                exact: false,
                squared_error: norm_sq(&instance.signal.values),
                missed: k,
                false_alarms: 0,
            },
            0,
        ),
    };
    TrialRecord {
        trial,
        algorithm: spec.name(),
        k,
        snr_db: snr,
        exact: m.exact && !failed,
        squared_error: m.squared_error,
        missed: m.missed,
        false_alarms: m.false_alarms,
        candidates_total,
        failed,
        wall_time,
    }
}

/// Worker count from `MMP_THREADS`, if set to a positive integer.
pub fn configured_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

/// Runs every (solver, K, SNR) cell for `trials` independent instances.
/// Solver errors are recorded as failed trials.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let fixed = fixed_matrix(config)?;
    let jobs: Vec<(usize, usize, usize)> = (0..config.k_values.len())
        .flat_map(|ki| (0..config.snr_db_values.len()).flat_map(move |si| (0..config.trials).map(move |t| (ki, si, t))))
        .collect();

    let work = || -> Result<Vec<Vec<TrialRecord>>> {
        jobs.par_iter()
            .map(|&(ki, si, t)| {
                let inst = build_instance(config, fixed.as_ref(), ki, si, t)?;
                let snr = config.snr_db_values[si];
                Ok(config.solvers.iter().map(|s| run_trial(s, &inst, t, snr)).collect())
            })
            .collect()
    };
    let per_job = match configured_threads() {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| MmpError::InvalidInput(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut trials = Vec::with_capacity(per_job.len() * config.solvers.len());
    let mut rows = Vec::new();
    let cell = config.trials;
    for (si, _) in config.solvers.iter().enumerate() {
        for chunk in per_job.chunks(cell) {
            let records: Vec<TrialRecord> = chunk.iter().map(|r| r[si].clone()).collect();
            rows.push(aggregate(&records));
            trials.extend(records);
        }
    }
    Ok(ExperimentResult { rows, trials })
}

/// Summarizes the trials of one cell.
pub fn aggregate(records: &[TrialRecord]) -> AggregateRow {
    let first = &records[0];
    let count = records.len() as f64;
    let kf = first.k as f64;
    let mean = |f: &dyn Fn(&TrialRecord) -> f64| records.iter().map(f).sum::<f64>() / count;
    AggregateRow {
        algorithm: first.algorithm.clone(),
        k: first.k,
        snr_db: first.snr_db,
        err: records.iter().filter(|r| r.exact).count() as f64 / count,
        mse: mean(&|r| r.squared_error),
        p_md: mean(&|r| r.missed as f64 / kf),
        p_f: mean(&|r| r.false_alarms as f64 / kf),
        mean_candidates: mean(&|r| r.candidates_total as f64),
        mean_time_ms: mean(&|r| r.wall_time.as_secs_f64() * 1e3),
    }
}
