//! Small matrices whose exact isometry constants are cheap to enumerate,
//! and a suite that checks every bound and guarantee on them.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::bounds::{
    bf_recovery_bound, bound_traces, cross_gram_check, first_iter_bound, gram_action_check, residual_bounds_with,
    spectral_norm_check, GuaranteeConstants,
};
use super::rip::{rip_constant, RipReport};
use super::verify::{required_order, verify_guarantee_with};
use crate::error::{MmpError, Result};
use crate::linalg::{least_squares_project, norm, SensingMatrix};
use crate::solvers::{mmp_bf_traced, SolverConfig};

/// Relative slack allowed on every inequality for rounding.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `m+1` unit vectors with pairwise inner products `±1/m`.
    Simplex,
    /// Identity plus up to four columns of a normalized 12×12 Paley
    /// Hadamard matrix.
    Paley,
    /// Orthonormal columns plus a small Gaussian perturbation, `n ≤ m`.
    NearOrthonormal,
    /// i.i.d. `N(0, 1/m)` entries.
    Gaussian,
}

fn gaussian_matrix(m: usize, n: usize, scale: f64, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        scale * z
    })
}

fn random_orthogonal(m: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    gaussian_matrix(m, m, 1.0, rng).qr().q()
}

/// Rotates, flips signs and permutes columns; none of these change the
/// isometry constants.
fn scramble(a: DMatrix<f64>, rng: &mut impl Rng) -> Result<SensingMatrix> {
    let q = random_orthogonal(a.nrows(), rng);
    let mut b = q * a;
    let mut order: Vec<usize> = (0..b.ncols()).collect();
    order.shuffle(rng);
    b = b.select_columns(&order);
    for mut col in b.column_iter_mut() {
        if rng.random_bool(0.5) {
            col.neg_mut();
        }
    }
    SensingMatrix::new(b)
}

fn normalize_columns(mut a: DMatrix<f64>) -> DMatrix<f64> {
    for mut col in a.column_iter_mut() {
        let n = col.norm();
        col /= n;
    }
    a
}

/// `m × (m+1)` regular simplex frame.
pub fn simplex_frame(m: usize, rng: &mut impl Rng) -> Result<SensingMatrix> {
    if m < 2 {
        return Err(MmpError::InvalidInput("simplex frame needs m ≥ 2".into()));
    }
    let n = m + 1;
    let mf = m as f64;
    let gram = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { -1.0 / mf });
    let eig = gram.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let a = DMatrix::from_fn(m, n, |r, c| eig.eigenvalues[idx[r]].sqrt() * eig.eigenvectors[(c, idx[r])]);
    scramble(a, rng)
}

/// 12×12 Paley type I Hadamard matrix.
pub fn paley_hadamard_12() -> DMatrix<f64> {
    let q = 11usize;
    let residues: Vec<usize> = (1..q).map(|i| i * i % q).collect();
    let chi = |d: usize| -> f64 {
        if d == 0 {
            0.0
        } else if residues.contains(&d) {
            1.0
        } else {
            -1.0
        }
    };
    DMatrix::from_fn(12, 12, |i, j| {
        let s = match (i, j) {
            (0, 0) => 0.0,
            (0, _) => 1.0,
            (_, 0) => -1.0,
            _ => chi((j + q - i) % q),
        };
        if i == j {
            1.0 + s
        } else {
            s
        }
    })
}

/// `[I_12 | h_1 … h_extra] / ‖·‖` with `h_j` columns of the normalized Paley
/// matrix; coherence `1/√12`.
pub fn paley_frame(extra: usize, rng: &mut impl Rng) -> Result<SensingMatrix> {
    if !(1..=12).contains(&extra) {
        return Err(MmpError::InvalidInput("between 1 and 12 Hadamard columns".into()));
    }
    let h = paley_hadamard_12() / 12f64.sqrt();
    let mut a = DMatrix::zeros(12, 12 + extra);
    a.view_mut((0, 0), (12, 12)).fill_with_identity();
    let mut cols: Vec<usize> = (0..12).collect();
    cols.shuffle(rng);
    for (slot, &c) in cols.iter().take(extra).enumerate() {
        a.set_column(12 + slot, &h.column(c));
    }
    scramble(a, rng)
}

/// Orthonormal columns plus `eps`-scaled Gaussian noise, renormalized.
pub fn near_orthonormal(m: usize, n: usize, eps: f64, rng: &mut impl Rng) -> Result<SensingMatrix> {
    if n > m {
        return Err(MmpError::InvalidInput(format!("need n ≤ m, got {m}x{n}")));
    }
    let q = random_orthogonal(m, rng).columns(0, n).into_owned();
    let noise = gaussian_matrix(m, n, eps / (m as f64).sqrt(), rng);
    SensingMatrix::new(normalize_columns(q + noise))
}

pub fn gaussian_frame(m: usize, n: usize, rng: &mut impl Rng) -> Result<SensingMatrix> {
    SensingMatrix::new(gaussian_matrix(m, n, 1.0 / (m as f64).sqrt(), rng))
}

/// A small instance whose `δ_{K+L}` satisfies the noiseless recovery
/// condition, with a random `K`-sparse signal.
#[derive(Debug, Clone)]
pub struct CertifiedInstance {
    pub family: Family,
    pub matrix: SensingMatrix,
    pub report: RipReport,
    pub k: usize,
    pub l: usize,
    /// Dense signal; nonzero exactly on `support`.
    pub x: Vec<f64>,
    pub support: Vec<usize>,
}

fn draw_signal(n: usize, k: usize, rng: &mut impl Rng) -> (Vec<f64>, Vec<usize>) {
    let mut support = rand::seq::index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    let mut x = vec![0.0; n];
    for &i in &support {
        // Bounded away from zero so the signal really has K nonzeros.
        let z: f64 = StandardNormal.sample(rng);
        x[i] = z + 0.1 * z.signum();
    }
    (x, support)
}

/// `(K, L)` pairs with `L ≤ K ≤ 3`.
const PAIRS: [(usize, usize); 6] = [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)];

/// Draws `count` certified instances, cycling through the structured
/// families with `m ∈ 8..=12` and `n ≤ 16`. Candidates failing the
/// condition are discarded. Deterministic per seed.
pub fn certified_instances(count: usize, seed: u64) -> Result<Vec<CertifiedInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let families = [Family::Simplex, Family::NearOrthonormal, Family::Paley];
    let mut out = Vec::with_capacity(count);
    let mut attempt = 0usize;
    while out.len() < count {
        if attempt > 100 * count + 1000 {
            return Err(MmpError::InvalidInput("could not certify enough instances".into()));
        }
        let family = families[attempt % families.len()];
        attempt += 1;
        let m = rng.random_range(8..=12);
        let matrix = match family {
            Family::Simplex => simplex_frame(m, &mut rng)?,
            Family::Paley => paley_frame(rng.random_range(1..=4), &mut rng)?,
            Family::NearOrthonormal => {
                let n = m - rng.random_range(0..=2);
                near_orthonormal(m, n, 0.1, &mut rng)?
            }
            Family::Gaussian => unreachable!(),
        };
        let n = matrix.cols();
        let (k, l) = PAIRS[rng.random_range(0..PAIRS.len())];
        let order = required_order(k, l);
        if order > n || k > matrix.rows() {
            continue;
        }
        let delta = rip_constant(&matrix, k + l)?;
        if delta >= bf_recovery_bound(k, l) {
            continue;
        }
        let report = RipReport::compute(&matrix, order)?;
        let (x, support) = draw_signal(n, k, &mut rng);
        out.push(CertifiedInstance {
            family,
            matrix,
            report,
            k,
            l,
            x,
            support,
        });
    }
    Ok(out)
}

/// Counts for one inequality or implication.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub checked: usize,
    pub violations: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> usize {
        self.checked - self.violations
    }
}

/// Results of [`implication_suite`]. Every field except
/// `residual_gamma_noisy` and `spectral_norm_wide` is a hard check.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub instances: usize,
    /// Noiseless recovery under the certified condition.
    pub noiseless_recovery: Tally,
    /// Noisy recovery under `min|x_i| ≥ ζ‖v‖`.
    pub noisy_recovery: Tally,
    /// `‖x − x̂‖ ≤ ‖v‖/√(1−δ_K)` under the same condition.
    pub stability: Tally,
    pub alpha_bound: Tally,
    pub beta_bound: Tally,
    /// Some true index is among the `L` children of a path inside `T`.
    pub selection: Tally,
    /// `‖r_T‖² ≤ ‖v‖²`.
    pub residual_true: Tally,
    /// Lower bound on `‖r_Γ‖²` over all `Γ`, noiseless.
    pub residual_gamma: Tally,
    /// `‖r_T‖ ≤ min_Γ ‖r_Γ‖` under `min|x_i| ≥ λ‖v‖`.
    pub residual_minimal: Tally,
    pub gram_action: Tally,
    pub cross_gram: Tally,
    /// `‖Φ‖₂ ≤ √(1+δ_min(m,n))` for `n ≤ m`, where it is exact.
    pub spectral_norm: Tally,
    /// The same bound for `n > m`; reported only, since `λ_max(Φ'Φ)` can
    /// exceed every `m`-column restriction when `n > m`.
    pub spectral_norm_wide: Tally,
    /// The same lower bound with noise; reported, not enforced, since it
    /// can fail when the noise cancels part of the signal.
    pub residual_gamma_noisy: Tally,
}

impl SuiteSummary {
    pub fn hard_checks(&self) -> [(&'static str, Tally); 12] {
        [
            ("noiseless_recovery", self.noiseless_recovery),
            ("noisy_recovery", self.noisy_recovery),
            ("stability", self.stability),
            ("alpha_bound", self.alpha_bound),
            ("beta_bound", self.beta_bound),
            ("selection", self.selection),
            ("residual_true", self.residual_true),
            ("residual_gamma", self.residual_gamma),
            ("residual_minimal", self.residual_minimal),
            ("gram_action", self.gram_action),
            ("cross_gram", self.cross_gram),
            ("spectral_norm", self.spectral_norm),
        ]
    }

    pub fn violations(&self) -> usize {
        self.hard_checks().iter().map(|(_, t)| t.violations).sum()
    }
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    fn go(cur: &mut Vec<usize>, from: usize, n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
        if cur.len() == k {
            return f(cur);
        }
        for j in from..=n - (k - cur.len()) {
            cur.push(j);
            go(cur, j + 1, n, k, f)?;
            cur.pop();
        }
        Ok(())
    }
    go(&mut Vec::with_capacity(k), 0, n, k, f)
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

/// Noise of norm `u · min|x_i| / ζ` in a random direction, so that the
/// noisy recovery condition holds with margin `1/u`.
pub fn noise_within_condition(m: usize, min_abs_x: f64, zeta: f64, u: f64, rng: &mut impl Rng) -> Vec<f64> {
    let dir: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
    let scale = u * min_abs_x / zeta / norm(&dir);
    dir.iter().map(|d| d * scale).collect()
}

/// Runs every check on `trials` certified instances.
pub fn implication_suite(seed: u64, trials: usize) -> Result<SuiteSummary> {
    let instances = certified_instances(trials, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0fb0);
    let mut s = SuiteSummary {
        instances: instances.len(),
        ..Default::default()
    };
    for inst in &instances {
        check_instance(inst, &mut rng, &mut s)?;
    }
    Ok(s)
}

fn check_instance(inst: &CertifiedInstance, rng: &mut ChaCha8Rng, s: &mut SuiteSummary) -> Result<()> {
    let (phi, report, k, l) = (&inst.matrix, &inst.report, inst.k, inst.l);
    let (m, n) = (phi.rows(), phi.cols());
    let config = SolverConfig::new(k, l);
    let zero = vec![0.0; m];

    // Noiseless guarantee.
    let g = verify_guarantee_with(report, phi, &inst.x, &zero, &config)?;
    if g.condition_holds {
        s.noiseless_recovery.record(g.recovery_exact);
    }

    // Noisy guarantee with noise inside the ζ condition.
    let constants = GuaranteeConstants::from_report(report, k, l)?;
    let u = rng.random_range(0.5..1.0);
    let min_abs = inst.support.iter().map(|&i| inst.x[i].abs()).fold(f64::INFINITY, f64::min);
    let v = noise_within_condition(m, min_abs, constants.zeta, u, rng);
    let gn = verify_guarantee_with(report, phi, &inst.x, &v, &config)?;
    let y_noisy = add(&phi.apply(&inst.x)?, &v);
    if gn.condition_holds {
        s.noisy_recovery.record(gn.recovery_exact);
        let (out, _) = mmp_bf_traced(phi, &y_noisy, &config)?;
        let xhat = out.dense(n);
        let err = norm(&add(&inst.x, &xhat.iter().map(|t| -t).collect::<Vec<_>>()));
        let bound = constants.tau * norm(&v);
        s.stability.record(err <= bound * (1.0 + BOUND_SLACK));
    }

    // Correlation lemmas and the selection events they imply.
    let noisy_selection = min_abs > constants.gamma.max(constants.mu) * norm(&v);
    let noiseless_selection = report.get(k + l)? < bf_recovery_bound(k, l).min(first_iter_bound(k, l));
    for (y, noise, selection_expected) in [
        (phi.apply(&inst.x)?, zero.clone(), noiseless_selection),
        (y_noisy.clone(), v.clone(), noisy_selection),
    ] {
        let (_, trace) = mmp_bf_traced(phi, &y, &config)?;
        for t in bound_traces(phi, report, &trace, &inst.x, &noise, k, l)? {
            if !t.preconditions_hold || t.path.len() == k {
                continue;
            }
            s.alpha_bound.record(t.alpha_ok(BOUND_SLACK));
            s.beta_bound.record(t.beta_ok(BOUND_SLACK));
            if selection_expected {
                s.selection.record(t.beta_1 > t.alpha_l);
            }
        }
    }

    // Residual bounds over every Γ of size K.
    let y_clean = phi.apply(&inst.x)?;
    let r_t_noisy = least_squares_project(phi, &inst.support, &y_noisy)?.residual_norm_sq;
    let mut min_other = f64::INFINITY;
    for_each_subset(n, k, &mut |gamma| {
        if least_squares_project(phi, gamma, &y_clean).is_err() {
            return Ok(());
        }
        let b = residual_bounds_with(report, phi, &y_clean, &inst.support, gamma, &inst.x, &zero)?;
        s.residual_gamma.record(b.lower_holds(BOUND_SLACK));
        let bn = residual_bounds_with(report, phi, &y_noisy, &inst.support, gamma, &inst.x, &v)?;
        s.residual_true.record(bn.upper_holds(BOUND_SLACK));
        s.residual_gamma_noisy.record(bn.lower_holds(BOUND_SLACK));
        if gamma != inst.support.as_slice() {
            min_other = min_other.min(bn.r_gamma_norm_sq);
        }
        Ok(())
    })?;
    if min_abs >= constants.lambda * norm(&v) {
        s.residual_minimal.record(r_t_noisy <= min_other * (1.0 + BOUND_SLACK));
    }

    // Consequences of the isometry property.
    for size in 1..=report.max_order.min(m) {
        let mut support = rand::seq::index::sample(rng, n, size).into_vec();
        support.sort_unstable();
        let z: Vec<f64> = (0..size).map(|_| StandardNormal.sample(rng)).collect();
        s.gram_action.record(gram_action_check(phi, report, &support, &z)?.holds(BOUND_SLACK));
        if size >= 2 {
            let split = rng.random_range(1..size);
            let (first, second) = support.split_at(split);
            let w: Vec<f64> = (0..second.len()).map(|_| StandardNormal.sample(rng)).collect();
            s.cross_gram.record(cross_gram_check(phi, report, first, second, &w)?.holds(BOUND_SLACK));
        }
    }
    let full = m.min(n);
    let mut spectral = report.clone();
    spectral.deltas.insert(full, rip_constant(phi, full)?);
    let holds = spectral_norm_check(phi, &spectral)?.holds(BOUND_SLACK);
    if n <= m {
        s.spectral_norm.record(holds);
    } else {
        s.spectral_norm_wide.record(holds);
    }
    Ok(())
}

/// Monte Carlo check of the guarantee on plain Gaussian matrices: counts
/// instances where the condition held and where recovery contradicted it.
pub fn gaussian_implication_check(m: usize, n: usize, k: usize, l: usize, trials: usize, seed: u64) -> Result<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = SolverConfig::new(k, l);
    let (mut held, mut counterexamples) = (0, 0);
    for _ in 0..trials {
        let phi = gaussian_frame(m, n, &mut rng)?;
        let report = RipReport::compute(&phi, required_order(k, l))?;
        let (x, _) = draw_signal(n, k, &mut rng);
        let g = verify_guarantee_with(&report, &phi, &x, &vec![0.0; m], &config)?;
        held += usize::from(g.condition_holds);
        counterexamples += usize::from(!g.consistent);
    }
    Ok((held, counterexamples))
}

/// Dense noise-free measurement helper for tests and the CLI.
pub fn measure(matrix: &SensingMatrix, x: &[f64]) -> Result<DVector<f64>> {
    Ok(DVector::from_vec(matrix.apply(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paley_matrix_is_hadamard() {
        let h = paley_hadamard_12();
        let hh = &h * h.transpose();
        assert!((hh - DMatrix::identity(12, 12) * 12.0).norm() < 1e-12);
        assert!(h.iter().all(|&v| v == 1.0 || v == -1.0));
    }

    #[test]
    fn simplex_frame_has_known_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = simplex_frame(10, &mut rng).unwrap();
        assert_eq!(phi.cols(), 11);
        for s in 2..=5 {
            let d = rip_constant(&phi, s).unwrap();
            assert!((d - (s as f64 - 1.0) / 10.0).abs() < 1e-12, "order {s}: {d}");
        }
    }

    #[test]
    fn paley_frame_coherence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = paley_frame(4, &mut rng).unwrap();
        assert_eq!((phi.rows(), phi.cols()), (12, 16));
        assert!((rip_constant(&phi, 2).unwrap() - 1.0 / 12f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn certified_instances_satisfy_condition() {
        let insts = certified_instances(30, 7).unwrap();
        assert_eq!(insts.len(), 30);
        for inst in &insts {
            let d = inst.report.get(inst.k + inst.l).unwrap();
            assert!(d < bf_recovery_bound(inst.k, inst.l));
            assert!(inst.l <= inst.k && inst.k <= 3);
            assert!((8..=12).contains(&inst.matrix.rows()) && inst.matrix.cols() <= 16);
            assert_eq!(inst.support.len(), inst.k);
        }
    }

    #[test]
    fn suite_runs_clean_on_a_few_instances() {
        let s = implication_suite(11, 12).unwrap();
        assert_eq!(s.instances, 12);
        assert_eq!(s.violations(), 0, "{s:?}");
        assert!(s.noiseless_recovery.checked == 12);
    }
}
