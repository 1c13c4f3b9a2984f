use mmp::analysis::{rip_constant, RipReport};
use mmp::bench::{gen_sensing_matrix, trial_instance, ExperimentConfig, SolverSpec, Snr};
use mmp::linalg::norm_sq;
use mmp::solvers::{candidate_order, compute_ck, mmp_bf, mmp_bf_traced, mmp_df, omp};
use mmp::{least_squares_project, Algorithm, SensingMatrix, SolverConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn instance(seed: u64, m: usize, n: usize) -> (SensingMatrix, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = gen_sensing_matrix(m, n, &mut rng).unwrap();
    let y = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
    (phi, y)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn modulo_round_trip(l in 1usize..7, k in 1usize..6, pick in 0.0f64..1.0) {
        let total = l.pow(k as u32);
        let ell = 1 + ((total as f64 * pick) as usize).min(total - 1);
        let c = compute_ck(ell, l, k).unwrap();
        prop_assert_eq!(c.len(), k);
        prop_assert!(c.iter().all(|&ck| (1..=l).contains(&ck)));
        prop_assert_eq!(candidate_order(&c, l).unwrap(), ell);
        prop_assert!(compute_ck(total + 1, l, k).is_err());
    }

    #[test]
    fn single_path_variants_equal_omp(seed in any::<u64>(), k in 1usize..6) {
        let (phi, y) = instance(seed, 20, 40);
        let o = omp(&phi, &y, k).unwrap();
        let bf = mmp_bf(&phi, &y, &SolverConfig::new(k, 1)).unwrap();
        let df = mmp_df(&phi, &y, &SolverConfig::new(k, 4).with_n_max(1)).unwrap();
        prop_assert_eq!(&bf.support, &o.support);
        prop_assert_eq!(&df.support, &o.support);
        for (a, b) in o.coefficients.iter().zip(&bf.coefficients) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn bf_candidate_counts_bounded(seed in any::<u64>(), k in 1usize..5, l in 1usize..4) {
        let (phi, y) = instance(seed, 16, 24);
        let out = mmp_bf(&phi, &y, &SolverConfig::new(k, l)).unwrap();
        let counts = &out.stats.candidates_per_iteration;
        prop_assert_eq!(counts.len(), k);
        for (i, &c) in counts.iter().enumerate() {
            let depth = i + 1;
            prop_assert!(c >= 1);
            prop_assert!(c <= l.pow(depth as u32));
            prop_assert!(c <= binomial(24, depth));
            if i > 0 {
                prop_assert!(c <= counts[i - 1] * l);
            }
        }
    }

    #[test]
    fn bf_output_is_best_final_candidate(seed in any::<u64>(), k in 1usize..4, l in 1usize..4) {
        let (phi, y) = instance(seed, 14, 22);
        let (out, trace) = mmp_bf_traced(&phi, &y, &SolverConfig::new(k, l)).unwrap();
        prop_assert_eq!(trace.len(), k + 1);
        for path in trace[k].paths() {
            prop_assert!(out.residual_norm_sq <= path.residual_norm_sq() * (1.0 + 1e-10) + 1e-14);
        }
        let refit = least_squares_project(&phi, &out.support, &y).unwrap();
        prop_assert!((refit.residual_norm_sq - out.residual_norm_sq).abs() < 1e-10 * norm_sq(&y));
    }

    #[test]
    fn df_residual_never_beats_uncapped_bf_and_never_loses_to_omp(seed in any::<u64>(), k in 1usize..4) {
        let (phi, y) = instance(seed, 14, 22);
        let cfg = SolverConfig::new(k, 2).with_n_max(4).with_epsilon(0.0);
        let df = mmp_df(&phi, &y, &cfg).unwrap();
        let bf = mmp_bf(&phi, &y, &SolverConfig::new(k, 2)).unwrap();
        let o = omp(&phi, &y, k).unwrap();
        let slack = 1e-10 * norm_sq(&y);
        prop_assert!(df.residual_norm_sq <= o.residual_norm_sq + slack);
        prop_assert!(bf.residual_norm_sq <= df.residual_norm_sq + slack);
        prop_assert!(df.stats.paths_explored <= 4);
    }

    #[test]
    fn rip_constant_monotone_in_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = gen_sensing_matrix(6, 9, &mut rng).unwrap();
        let report = RipReport::compute(&phi, 5).unwrap();
        let mut prev = 0.0;
        for order in 1..=5 {
            let d = report.get(order).unwrap();
            prop_assert!(d >= prev - 1e-12);
            prop_assert!((d - rip_constant(&phi, order).unwrap()).abs() < 1e-14);
            prev = d;
        }
    }

    #[test]
    fn trial_instances_depend_only_on_seed_and_index(seed in any::<u64>(), trial in 0usize..1000) {
        let config = ExperimentConfig {
            m: 12,
            n: 30,
            k_values: vec![2, 3],
            snr_db_values: vec![Snr::Noiseless, Snr::Db(10.0)],
            trials: 1000,
            seed,
            solvers: vec![SolverSpec::new(Algorithm::Omp)],
            fix_matrix: false,
        };
        let a = trial_instance(&config, 1, 1, trial).unwrap();
        let b = trial_instance(&config, 1, 1, trial).unwrap();
        prop_assert_eq!(a.matrix.entries(), b.matrix.entries());
        prop_assert_eq!(&a.measurement.y, &b.measurement.y);
        prop_assert_eq!(&a.signal.support, &b.signal.support);
        prop_assert_eq!(a.signal.support.len(), 3);
        let other = trial_instance(&config, 1, 1, trial + 1).unwrap();
        prop_assert_ne!(a.matrix.entries(), other.matrix.entries());
    }
}
