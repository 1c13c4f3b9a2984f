use serde::{Deserialize, Serialize};

use super::rip::{rip_constant, RipReport};
use crate::error::{MmpError, Result};
use crate::linalg::{correlate, least_squares_project, norm, norm_sq, SensingMatrix};
use crate::path::CandidateSet;

/// Noiseless recovery condition on `δ_{K+L}`: `√L / (√K + 2√L)`.
pub fn bf_recovery_bound(k: usize, l: usize) -> f64 {
    let (sk, sl) = ((k as f64).sqrt(), (l as f64).sqrt());
    sl / (sk + 2.0 * sl)
}

/// First-iteration condition on `δ_{K+L}`: `√L / (√K + √L)`.
pub fn first_iter_bound(k: usize, l: usize) -> f64 {
    let (sk, sl) = ((k as f64).sqrt(), (l as f64).sqrt());
    sl / (sk + sl)
}

/// Constants of the noisy support-recovery condition
/// `min_i |x_i| ≥ ζ‖v‖₂`. A constant whose denominator or radicand is not
/// positive is `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeConstants {
    pub bf_bound: f64,
    #[serde(with = "crate::real")]
    pub gamma: f64,
    #[serde(with = "crate::real")]
    pub mu: f64,
    #[serde(with = "crate::real")]
    pub lambda: f64,
    #[serde(with = "crate::real")]
    pub zeta: f64,
    pub tau: f64,
}

fn ratio_or_inf(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

pub fn noisy_constants(
    delta_k: f64,
    delta_2k: f64,
    delta_kl: f64,
    k: usize,
    l: usize,
) -> Result<GuaranteeConstants> {
    for (name, d) in [("δ_K", delta_k), ("δ_2K", delta_2k), ("δ_K+L", delta_kl)] {
        if !(0.0..1.0).contains(&d) {
            return Err(MmpError::OutOfRange(format!("{name} = {d} is outside [0, 1)")));
        }
    }
    if k == 0 || l == 0 {
        return Err(MmpError::OutOfRange("K and L must be positive".into()));
    }
    let (kf, lf) = (k as f64, l as f64);
    let (sk, sl, slk) = (kf.sqrt(), lf.sqrt(), (lf * kf).sqrt());
    let root = (1.0 + delta_kl).sqrt();

    let gamma = ratio_or_inf(root * (sl + sk), slk - (slk + kf) * delta_kl);
    let mu = ratio_or_inf(root * (1.0 - delta_kl) * (sl + sk), sl - (2.0 * sl + sk) * delta_kl);
    let radicand = ratio_or_inf(
        2.0 * (1.0 - delta_k).powi(2),
        (1.0 - delta_k).powi(3) - (1.0 + delta_k) * delta_2k * delta_2k,
    );
    let lambda = radicand.sqrt();
    Ok(GuaranteeConstants {
        bf_bound: bf_recovery_bound(k, l),
        gamma,
        mu,
        lambda,
        zeta: gamma.max(mu).max(lambda),
        tau: 1.0 / (1.0 - delta_k).sqrt(),
    })
}

impl GuaranteeConstants {
    /// Reads `δ_K`, `δ_2K` and `δ_{K+L}` from a report.
    pub fn from_report(report: &RipReport, k: usize, l: usize) -> Result<Self> {
        noisy_constants(report.get(k)?, report.get(2 * k)?, report.get(k + l)?, k, l)
    }
}

/// Upper bound on `α_L^k`, the `L`-th largest correlation of the residual
/// with a column outside `T`, for a depth-`k−1` path inside `T`.
/// `x_rem_norm` is `‖x_{T∖s}‖₂`. With `v_norm = 0` this is the noiseless
/// bound. At `k = 1` the path is empty and nothing is projected out, so the
/// cross term vanishes.
pub fn lemma_alpha_bound(
    deltas: &RipReport,
    k: usize,
    big_k: usize,
    l: usize,
    x_rem_norm: f64,
    v_norm: f64,
) -> Result<f64> {
    check_layer(k, big_k)?;
    let d_lk = deltas.get(l + big_k - k + 1)?;
    let d_lk1 = deltas.get(l + k - 1)?;
    let d_k = deltas.get(big_k)?;
    let d_prev = deltas.get(k - 1)?;
    let d_l = deltas.get(l)?;
    let den = 1.0 - d_prev;
    if den <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let cross = if k == 1 { 0.0 } else { d_lk1 * d_k / den };
    let sl = (l as f64).sqrt();
    Ok((d_lk + cross) * x_rem_norm / sl + (1.0 + d_l).sqrt() * v_norm / sl)
}

/// Lower bound on `β_1^k`, the largest correlation of the residual with a
/// not yet chosen column of `T`, for a depth-`k−1` path inside `T`. As for
/// [`lemma_alpha_bound`], the projection term is absent at `k = 1`.
pub fn lemma_beta_bound(deltas: &RipReport, k: usize, big_k: usize, x_rem_norm: f64, v_norm: f64) -> Result<f64> {
    check_layer(k, big_k)?;
    let rest = big_k - k + 1;
    let d_rest = deltas.get(rest)?;
    let d_k = deltas.get(big_k)?;
    let d_prev = deltas.get(k - 1)?;
    let den = 1.0 - d_prev;
    if den <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let cross = if k == 1 { 0.0 } else { d_k * d_k / den };
    let sr = (rest as f64).sqrt();
    Ok((1.0 - d_rest - cross) * x_rem_norm / sr - (1.0 + d_rest).sqrt() * v_norm / sr)
}

fn check_layer(k: usize, big_k: usize) -> Result<()> {
    if k == 0 || k > big_k {
        return Err(MmpError::OutOfRange(format!("iteration {k} outside 1..={big_k}")));
    }
    Ok(())
}

/// Residual energies on the true support `T` and on a size-`K` set `Γ`,
/// with the bounds `‖r_T‖² ≤ ‖v‖²` and the lower bound on `‖r_Γ‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualBounds {
    pub upper_r_t: f64,
    #[serde(with = "crate::real")]
    pub lower_r_gamma: f64,
    pub r_t_norm_sq: f64,
    pub r_gamma_norm_sq: f64,
    /// `‖y‖²`, the scale of the rounding slack.
    pub scale: f64,
}

impl ResidualBounds {
    /// Both inequalities, each with `rel_tol · ‖y‖²` slack.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.upper_holds(rel_tol) && self.lower_holds(rel_tol)
    }

    pub fn upper_holds(&self, rel_tol: f64) -> bool {
        self.r_t_norm_sq <= self.upper_r_t + rel_tol * self.scale
    }

    pub fn lower_holds(&self, rel_tol: f64) -> bool {
        self.r_gamma_norm_sq >= self.lower_r_gamma - rel_tol * self.scale
    }
}

/// [`residual_bounds_with`] computing the needed constants exactly.
pub fn residual_bounds(
    matrix: &SensingMatrix,
    y: &[f64],
    true_support: &[usize],
    gamma_set: &[usize],
    x: &[f64],
    v: &[f64],
) -> Result<ResidualBounds> {
    let (a, g) = set_sizes(true_support, gamma_set);
    let orders = [a, g, a + g];
    let max_order = orders.iter().copied().max().unwrap_or(0);
    let report = RipReport::from_deltas(
        matrix.rows(),
        matrix.cols(),
        (1..=max_order)
            .filter(|o| orders.contains(o))
            .map(|o| rip_constant(matrix, o).map(|d| (o, d)))
            .collect::<Result<Vec<_>>>()?,
    );
    residual_bounds_with(&report, matrix, y, true_support, gamma_set, x, v)
}

fn set_sizes(true_support: &[usize], gamma_set: &[usize]) -> (usize, usize) {
    let missing = true_support.iter().filter(|i| !gamma_set.contains(i)).count();
    (missing, gamma_set.len())
}

pub fn residual_bounds_with(
    report: &RipReport,
    matrix: &SensingMatrix,
    y: &[f64],
    true_support: &[usize],
    gamma_set: &[usize],
    x: &[f64],
    v: &[f64],
) -> Result<ResidualBounds> {
    let v_sq = norm_sq(v);
    let x_rem_sq: f64 = true_support
        .iter()
        .filter(|i| !gamma_set.contains(i))
        .map(|&i| x[i] * x[i])
        .sum();
    let (a, g) = set_sizes(true_support, gamma_set);
    let lower = if x_rem_sq == 0.0 {
        -v_sq
    } else {
        let (d_a, d_g, d_ag) = (report.get(a)?, report.get(g)?, report.get(a + g)?);
        let den = (1.0 - d_g).powi(2);
        if d_g >= 1.0 {
            f64::NEG_INFINITY
        } else {
            ((1.0 - d_a) - (1.0 + d_g) * d_ag * d_ag / den) * x_rem_sq - v_sq
        }
    };
    Ok(ResidualBounds {
        upper_r_t: v_sq,
        lower_r_gamma: lower,
        r_t_norm_sq: least_squares_project(matrix, true_support, y)?.residual_norm_sq,
        r_gamma_norm_sq: least_squares_project(matrix, gamma_set, y)?.residual_norm_sq,
        scale: norm_sq(y),
    })
}

/// Correlation statistics at one path of an instrumented breadth-first run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTrace {
    /// Iteration `k` that extends the depth-`k−1` path.
    pub iteration: usize,
    pub path: Vec<usize>,
    /// `L`-th largest `|⟨φ_j, r⟩|` over `j ∉ T`.
    pub alpha_l: f64,
    /// Largest `|⟨φ_j, r⟩|` over `j ∈ T` not on the path.
    pub beta_1: f64,
    #[serde(with = "crate::real")]
    pub bound_alpha: f64,
    #[serde(with = "crate::real")]
    pub bound_beta: f64,
    /// The path lies inside `T` and there are at least `L` columns outside
    /// `T`.
    pub preconditions_hold: bool,
}

impl BoundTrace {
    pub fn alpha_ok(&self, rel_tol: f64) -> bool {
        !self.preconditions_hold || self.alpha_l <= self.bound_alpha + rel_tol * self.bound_alpha.abs().max(self.alpha_l)
    }

    pub fn beta_ok(&self, rel_tol: f64) -> bool {
        !self.preconditions_hold || self.beta_1 >= self.bound_beta - rel_tol * self.bound_beta.abs().max(self.beta_1)
    }
}

/// Evaluates both lemmas at every path of a traced run. `trace[k−1]` holds
/// the paths extended at iteration `k`; `x` is the dense signal and `v` the
/// noise.
pub fn bound_traces(
    matrix: &SensingMatrix,
    report: &RipReport,
    trace: &[CandidateSet],
    x: &[f64],
    v: &[f64],
    big_k: usize,
    l: usize,
) -> Result<Vec<BoundTrace>> {
    let n = matrix.cols();
    let truth: Vec<usize> = (0..n).filter(|&i| x[i] != 0.0).collect();
    let v_norm = norm(v);
    let mut out = Vec::new();
    for (depth, set) in trace.iter().enumerate().take(big_k) {
        let k = depth + 1;
        for path in set.paths() {
            let corr = correlate(matrix, path.residual())?;
            let mut wrong: Vec<f64> = (0..n).filter(|i| !truth.contains(i)).map(|i| corr[i].abs()).collect();
            wrong.sort_by(|a, b| b.total_cmp(a));
            let remaining: Vec<usize> = truth.iter().copied().filter(|&i| !path.contains(i)).collect();
            let beta_1 = remaining.iter().map(|&i| corr[i].abs()).fold(0.0, f64::max);
            let inside = path.indices().iter().all(|i| truth.contains(i));
            let preconditions_hold = inside && wrong.len() >= l && truth.len() == big_k;
            let x_rem = norm(&remaining.iter().map(|&i| x[i]).collect::<Vec<_>>());
            out.push(BoundTrace {
                iteration: k,
                path: path.canonical().to_vec(),
                alpha_l: wrong.get(l - 1).copied().unwrap_or(0.0),
                beta_1,
                bound_alpha: lemma_alpha_bound(report, k, big_k, l, x_rem, v_norm)?,
                bound_beta: lemma_beta_bound(report, k, big_k, x_rem, v_norm)?,
                preconditions_hold,
            });
        }
    }
    Ok(out)
}

/// A two-sided inequality `lower ≤ value ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    #[serde(with = "crate::real")]
    pub lower: f64,
    pub value: f64,
    #[serde(with = "crate::real")]
    pub upper: f64,
}

impl Inequality {
    pub fn holds(&self, rel_tol: f64) -> bool {
        let scale = self.value.abs().max(self.upper.abs()).max(self.lower.abs());
        self.value >= self.lower - rel_tol * scale && self.value <= self.upper + rel_tol * scale
    }
}

/// `(1−δ_|I|)‖x‖ ≤ ‖Φ_I'Φ_I x‖ ≤ (1+δ_|I|)‖x‖`.
pub fn gram_action_check(matrix: &SensingMatrix, report: &RipReport, support: &[usize], x: &[f64]) -> Result<Inequality> {
    if x.len() != support.len() {
        return Err(MmpError::DimensionMismatch {
            expected: support.len(),
            actual: x.len(),
        });
    }
    let a = matrix.submatrix(support);
    let xv = nalgebra::DVector::from_column_slice(x);
    let value = (a.transpose() * (&a * xv)).norm();
    let d = report.get(support.len())?;
    let xn = norm(x);
    Ok(Inequality {
        lower: (1.0 - d) * xn,
        value,
        upper: (1.0 + d) * xn,
    })
}

/// `‖Φ_I1'Φ_I2 x‖ ≤ δ_{|I1|+|I2|}‖x‖` for disjoint `I1`, `I2`.
pub fn cross_gram_check(
    matrix: &SensingMatrix,
    report: &RipReport,
    first: &[usize],
    second: &[usize],
    x: &[f64],
) -> Result<Inequality> {
    if let Some(&i) = first.iter().find(|i| second.contains(i)) {
        return Err(MmpError::DuplicateIndex(i));
    }
    if x.len() != second.len() {
        return Err(MmpError::DimensionMismatch {
            expected: second.len(),
            actual: x.len(),
        });
    }
    let a = matrix.submatrix(first);
    let b = matrix.submatrix(second);
    let value = (a.transpose() * (b * nalgebra::DVector::from_column_slice(x))).norm();
    Ok(Inequality {
        lower: 0.0,
        value,
        upper: report.get(first.len() + second.len())? * norm(x),
    })
}

/// `‖Φ‖₂ ≤ √(1+δ_min(m,n))`. Exact when `n ≤ m`; for wider matrices it can
/// fail, e.g. `Φ = [1 1]` has `‖Φ‖₂² = 2` while `δ_1 = 0`.
pub fn spectral_norm_check(matrix: &SensingMatrix, report: &RipReport) -> Result<Inequality> {
    let order = matrix.rows().min(matrix.cols());
    Ok(Inequality {
        lower: 0.0,
        value: matrix.spectral_norm(),
        upper: (1.0 + report.get(order)?).sqrt(),
    })
}

/// A published sufficient condition of another recovery algorithm, quoted
/// for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCondition {
    pub algorithm: String,
    /// Order of the constrained isometry constant.
    pub order: usize,
    /// The condition reads `δ_order < threshold`.
    pub threshold: f64,
}

/// Conditions of CoSaMP, SP, ROMP, gOMP (with `N = K`) and BP, plus the
/// multipath condition for `L`, at sparsity `K`.
pub fn reference_conditions(k: usize, l: usize) -> Vec<ReferenceCondition> {
    let cond = |name: &str, order: usize, threshold: f64| ReferenceCondition {
        algorithm: name.to_string(),
        order,
        threshold,
    };
    vec![
        cond("mmp", k + l, bf_recovery_bound(k, l)),
        cond("cosamp", 4 * k, 0.1),
        cond("sp", 3 * k, 0.165),
        cond("romp", 2 * k, 0.03 / ((2 * k) as f64).ln().sqrt()),
        cond("gomp", k * k, 0.25),
        cond("bp", 2 * k, std::f64::consts::SQRT_2 - 1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::least_squares_project;

    fn zero_report(max_order: usize) -> RipReport {
        RipReport::from_deltas(1, 1, (1..=max_order).map(|o| (o, 0.0)))
    }

    #[test]
    fn recovery_bound_values() {
        assert!((bf_recovery_bound(3, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert!((bf_recovery_bound(4, 1) - 0.25).abs() < 1e-15);
        assert!((bf_recovery_bound(1, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((first_iter_bound(5, 5) - 0.5).abs() < 1e-15);
        assert!((first_iter_bound(4, 1) - 1.0 / 3.0).abs() < 1e-15);
        for k in 1..=10 {
            for l in 1..=10 {
                assert!(first_iter_bound(k, l) > bf_recovery_bound(k, l));
            }
        }
    }

    #[test]
    fn constants_at_zero_delta() {
        let c = noisy_constants(0.0, 0.0, 0.0, 4, 4).unwrap();
        assert!((c.gamma - 1.0).abs() < 1e-15);
        assert!((c.mu - 2.0).abs() < 1e-15);
        assert!((c.lambda - 2f64.sqrt()).abs() < 1e-15);
        assert!((c.zeta - 2.0).abs() < 1e-15);
        assert_eq!(c.tau, 1.0);
    }

    #[test]
    fn constants_become_infinite_past_boundary() {
        let (k, l) = (4, 1);
        let edge = first_iter_bound(k, l);
        let c = noisy_constants(0.1, 0.2, edge, k, l).unwrap();
        assert_eq!(c.gamma, f64::INFINITY);
        assert_eq!(c.mu, f64::INFINITY);
        assert_eq!(c.zeta, f64::INFINITY);
        let inside = noisy_constants(0.1, 0.2, edge - 1e-3, k, l).unwrap();
        assert!(inside.gamma.is_finite());
        // λ's radicand turns negative once δ_2K is large.
        let c = noisy_constants(0.5, 0.9, 0.0, k, l).unwrap();
        assert_eq!(c.lambda, f64::INFINITY);
        assert!(noisy_constants(1.0, 0.0, 0.0, k, l).is_err());
    }

    #[test]
    fn zeta_is_max_of_recomputed_constants() {
        let (dk, d2k, dkl, k, l) = (0.05, 0.11, 0.09, 3, 2);
        let c = noisy_constants(dk, d2k, dkl, k, l).unwrap();
        let (kf, lf) = (3.0f64, 2.0f64);
        let gamma = (1.0 + dkl).sqrt() * (lf.sqrt() + kf.sqrt()) / ((lf * kf).sqrt() - ((lf * kf).sqrt() + kf) * dkl);
        let mu = (1.0 + dkl).sqrt() * (1.0 - dkl) * (lf.sqrt() + kf.sqrt()) / (lf.sqrt() - (2.0 * lf.sqrt() + kf.sqrt()) * dkl);
        let lambda = (2.0 * (1.0 - dk) * (1.0 - dk) / ((1.0 - dk).powi(3) - (1.0 + dk) * d2k * d2k)).sqrt();
        assert!((c.zeta - gamma.max(mu).max(lambda)).abs() < 1e-12);
    }

    #[test]
    fn lemma_bounds_at_zero_delta() {
        let r = zero_report(8);
        assert_eq!(lemma_alpha_bound(&r, 2, 4, 2, 3.0, 0.0).unwrap(), 0.0);
        assert!((lemma_alpha_bound(&r, 2, 4, 4, 3.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((lemma_beta_bound(&r, 1, 4, 3.0, 0.0).unwrap() - 1.5).abs() < 1e-15);
        assert!(lemma_beta_bound(&r, 1, 4, 1.0, 10.0).unwrap() < 0.0);
        assert!(lemma_alpha_bound(&r, 5, 4, 1, 1.0, 0.0).is_err());
    }

    #[test]
    fn first_layer_uses_zero_order() {
        let r = RipReport::from_deltas(1, 1, [(1, 0.1), (2, 0.2), (3, 0.3), (4, 0.35), (5, 0.4)]);
        let got = lemma_alpha_bound(&r, 1, 3, 2, 2.0, 0.0).unwrap();
        assert!((got - 0.4 * 2.0 / 2f64.sqrt()).abs() < 1e-15);
        let got = lemma_alpha_bound(&r, 2, 3, 2, 2.0, 0.0).unwrap();
        assert!((got - (0.35 + 0.3 * 0.3 / 0.9) * 2.0 / 2f64.sqrt()).abs() < 1e-15);
        let got = lemma_beta_bound(&r, 1, 3, 3f64.sqrt(), 0.0).unwrap();
        assert!((got - 0.7).abs() < 1e-15);
        let missing = RipReport::from_deltas(1, 1, [(1, 0.1)]);
        assert!(matches!(lemma_beta_bound(&missing, 1, 3, 1.0, 0.0), Err(MmpError::MissingOrder(3))));
    }

    #[test]
    fn noiseless_residual_bound_is_valid_but_noisy_version_is_not() {
        // Orthonormal Φ, so every δ is 0 and the lower bound on ‖r_Γ‖² reads
        // ‖x_{T∖Γ}‖² − ‖v‖². Noise aligned against Φ_T x drives ‖r_Γ‖² below
        // it, so the bound is only asserted for v = 0.
        let phi = SensingMatrix::identity(4);
        let x = [1.0, 0.0, 0.0, 0.0];
        let truth = [0];
        let gamma = [1];
        let clean = [1.0, 0.0, 0.0, 0.0];
        let none = [0.0; 4];
        let b = residual_bounds(&phi, &clean, &truth, &gamma, &x, &none).unwrap();
        assert!(b.holds(1e-12));
        assert_eq!(b.lower_r_gamma, 1.0);

        let v = [-0.75, 0.0, 0.0, 0.0];
        let y = [0.25, 0.0, 0.0, 0.0];
        let b = residual_bounds(&phi, &y, &truth, &gamma, &x, &v).unwrap();
        assert!((b.r_gamma_norm_sq - 0.0625).abs() < 1e-15);
        assert!((b.lower_r_gamma - 0.4375).abs() < 1e-15);
        assert!(!b.holds(1e-12));
    }

    #[test]
    fn true_support_residual_is_noise_projection() {
        let phi = SensingMatrix::from_columns(&[vec![1.0, 0.0, 0.0], vec![0.6, 0.8, 0.0], vec![0.0, 0.6, 0.8]]).unwrap();
        let x = [2.0, -1.0, 0.0];
        let v = [0.1, -0.2, 0.3];
        let clean = phi.apply(&x).unwrap();
        let y: Vec<f64> = clean.iter().zip(&v).map(|(a, b)| a + b).collect();
        let b = residual_bounds(&phi, &y, &[0, 1], &[0, 1], &x, &v).unwrap();
        assert_eq!(b.lower_r_gamma, -norm_sq(&v));
        // Only the third coordinate of v survives the projection.
        assert!((b.r_t_norm_sq - 0.09).abs() < 1e-15);
        let direct = least_squares_project(&phi, &[0, 1], &v).unwrap();
        assert!((direct.residual_norm_sq - b.r_t_norm_sq).abs() < 1e-15);
    }

    #[test]
    fn reference_conditions_echo_published_constants() {
        let refs = reference_conditions(2, 2);
        let get = |name: &str| refs.iter().find(|r| r.algorithm == name).unwrap().clone();
        assert_eq!(get("cosamp").order, 8);
        assert_eq!(get("cosamp").threshold, 0.1);
        assert_eq!(get("sp").threshold, 0.165);
        assert_eq!(get("gomp").order, 4);
        assert!((get("romp").threshold - 0.03 / 4f64.ln().sqrt()).abs() < 1e-15);
        assert!((get("mmp").threshold - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_bound_tight_for_tall_fails_for_wide() {
        let tall = SensingMatrix::from_columns(&[vec![1.0, 0.0, 0.0], vec![0.6, 0.8, 0.0]]).unwrap();
        let report = RipReport::compute(&tall, 2).unwrap();
        let check = spectral_norm_check(&tall, &report).unwrap();
        assert!(check.holds(1e-12));
        assert!((check.value - check.upper).abs() < 1e-12);

        let wide = SensingMatrix::from_columns(&[vec![1.0], vec![1.0]]).unwrap();
        let report = RipReport::compute(&wide, 1).unwrap();
        let check = spectral_norm_check(&wide, &report).unwrap();
        assert!((check.value - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(check.upper, 1.0);
        assert!(!check.holds(1e-12));
    }
}
