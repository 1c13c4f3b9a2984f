use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{MmpError, Result};
use crate::linalg::{SensingMatrix, SparseSignal, Measurement};

/// Signal-to-noise ratio of a sweep cell. Serialized as a number of dB or
/// as the string `"inf"` for noiseless runs; `"noiseless"` is accepted on
/// input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    Noiseless,
    Db(f64),
}

impl Snr {
    /// Per-entry noise variance `10^(−snr/10)`, zero when noiseless.
    pub fn noise_variance(self) -> f64 {
        match self {
            Snr::Noiseless => 0.0,
            Snr::Db(db) => 10f64.powf(-db / 10.0),
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if db == f64::INFINITY {
            Ok(Snr::Noiseless)
        } else if db.is_finite() {
            Ok(Snr::Db(db))
        } else {
            Err(MmpError::InvalidInput(format!("SNR must be finite or +inf, got {db}")))
        }
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Snr::Noiseless => f.write_str("inf"),
            Snr::Db(db) => write!(f, "{db}"),
        }
    }
}

impl FromStr for Snr {
    type Err = MmpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "noiseless" => Ok(Snr::Noiseless),
            t => t
                .parse::<f64>()
                .map_err(|_| MmpError::Parse(format!("bad SNR {t:?}")))
                .and_then(Snr::from_db),
        }
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Snr::Noiseless => s.serialize_str("inf"),
            Snr::Db(db) => s.serialize_f64(*db),
        }
    }
}

impl<'de> Deserialize<'de> for Snr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct SnrVisitor;

        impl Visitor<'_> for SnrVisitor {
            type Value = Snr;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an SNR in dB, \"inf\" or \"noiseless\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Snr, E> {
                Snr::from_db(v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Snr, E> {
                Ok(Snr::Db(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Snr, E> {
                Ok(Snr::Db(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Snr, E> {
                v.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(SnrVisitor)
    }
}

/// `m × n` matrix with i.i.d. `N(0, 1/m)` entries.
pub fn gen_sensing_matrix(m: usize, n: usize, rng: &mut impl Rng) -> Result<SensingMatrix> {
    if m == 0 || n == 0 {
        return Err(MmpError::InvalidInput(format!("empty {m}x{n} matrix")));
    }
    let d = Normal::new(0.0, (1.0 / m as f64).sqrt()).expect("positive deviation");
    let data: Vec<f64> = (0..m * n).map(|_| d.sample(rng)).collect();
    SensingMatrix::from_row_major(m, n, &data)
}

/// Uniformly random size-`k` support with i.i.d. `N(0, 1)` values.
pub fn gen_sparse_signal(n: usize, k: usize, rng: &mut impl Rng) -> Result<SparseSignal> {
    if k > n {
        return Err(MmpError::InvalidInput(format!("sparsity {k} exceeds length {n}")));
    }
    let mut support = rand::seq::index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    let mut values = vec![0.0; n];
    for &i in &support {
        values[i] = StandardNormal.sample(rng);
    }
    Ok(SparseSignal { values, support })
}

/// `y = y_clean + v` with `v_i ~ N(0, 10^(−snr/10))`. Noiseless returns
/// `y_clean` untouched and no noise vector.
pub fn add_noise(y_clean: &[f64], snr: Snr, rng: &mut impl Rng) -> Measurement {
    match snr {
        Snr::Noiseless => Measurement::noiseless(y_clean.to_vec()),
        Snr::Db(_) => {
            let sd = snr.noise_variance().sqrt();
            let noise: Vec<f64> = y_clean
                .iter()
                .map(|_| sd * Distribution::<f64>::sample(&StandardNormal, rng))
                .collect();
            let y = y_clean.iter().zip(&noise).map(|(a, b)| a + b).collect();
            Measurement { y, noise: Some(noise) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matrix_is_deterministic_per_seed() {
        let a = gen_sensing_matrix(5, 7, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = gen_sensing_matrix(5, 7, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn matrix_entry_statistics() {
        let phi = gen_sensing_matrix(100, 256, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
        let entries = phi.entries();
        let var = entries.iter().map(|v| v * v).sum::<f64>() / entries.len() as f64;
        // Standard deviation of the estimate is √2/100/√25600 ≈ 8.8e-5.
        assert!((var - 0.01).abs() < 1.5e-3);
        let mean_col = (0..256).map(|j| phi.column_norm(j).powi(2)).sum::<f64>() / 256.0;
        assert!((mean_col - 1.0).abs() < 0.05);
    }

    #[test]
    fn signal_support_size_and_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let zero = gen_sparse_signal(10, 0, &mut rng).unwrap();
        assert!(zero.support.is_empty() && zero.values.iter().all(|&v| v == 0.0));
        let mut hits = [0usize; 10];
        for _ in 0..10_000 {
            let s = gen_sparse_signal(10, 2, &mut rng).unwrap();
            assert_eq!(s.support.len(), 2);
            for &i in &s.support {
                hits[i] += 1;
            }
        }
        for h in hits {
            let freq = h as f64 / 10_000.0;
            assert!((freq - 0.2).abs() < 0.02, "{freq}");
        }
        assert!(gen_sparse_signal(3, 4, &mut rng).is_err());
    }

    #[test]
    fn noise_variance_matches_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        assert_eq!(Snr::Db(0.0).noise_variance(), 1.0);
        let clean = vec![0.0; 100];
        let meas = add_noise(&clean, Snr::Noiseless, &mut rng);
        assert!(meas.noise.is_none() && meas.y == clean);
        let mut total = 0.0;
        for _ in 0..100 {
            let meas = add_noise(&clean, Snr::Db(20.0), &mut rng);
            total += meas.noise_norm().powi(2) / 100.0;
        }
        assert!((total / 100.0 / 0.01 - 1.0).abs() < 0.1);
    }

    #[test]
    fn snr_text_forms() {
        assert_eq!("inf".parse::<Snr>().unwrap(), Snr::Noiseless);
        assert_eq!("noiseless".parse::<Snr>().unwrap(), Snr::Noiseless);
        assert_eq!("12.5".parse::<Snr>().unwrap(), Snr::Db(12.5));
        assert!("nan".parse::<Snr>().is_err());
        let json = serde_json::to_string(&[Snr::Noiseless, Snr::Db(30.0)]).unwrap();
        assert_eq!(json, r#"["inf",30.0]"#);
        let back: Vec<Snr> = serde_json::from_str(r#"["noiseless", 10, 2.5]"#).unwrap();
        assert_eq!(back, vec![Snr::Noiseless, Snr::Db(10.0), Snr::Db(2.5)]);
    }
}
