//! Bijection between a depth-first search order `ℓ` and the per-layer ranks
//! `(c_1, …, c_K)`: `ℓ = 1 + Σ_k (c_k − 1)·L^(k−1)`, i.e. the base-`L`
//! digits of `ℓ − 1` with the first layer as the least significant digit.

use crate::error::{MmpError, Result};

/// `L^K`, or `None` when it does not fit in a `u128`.
pub(crate) fn order_count(l: usize, k: usize) -> Option<u128> {
    (l as u128).checked_pow(u32::try_from(k).ok()?)
}

/// Layer ranks for search order `ell` (1-based), each in `1..=l`.
pub fn compute_ck(ell: usize, l: usize, k: usize) -> Result<Vec<usize>> {
    if l == 0 {
        return Err(MmpError::OutOfRange("expansion factor L must be positive".into()));
    }
    let valid = ell >= 1 && order_count(l, k).is_none_or(|total| ell as u128 <= total);
    if !valid {
        return Err(MmpError::OutOfRange(format!(
            "search order {ell} outside 1..=L^K for L={l}, K={k}"
        )));
    }
    let mut rest = ell - 1;
    Ok((0..k)
        .map(|_| {
            let c = rest % l + 1;
            rest /= l;
            c
        })
        .collect())
}

/// Inverse of [`compute_ck`].
pub fn candidate_order(layers: &[usize], l: usize) -> Result<usize> {
    let mut ell: u128 = 0;
    let mut weight: u128 = 1;
    for (k, &c) in layers.iter().enumerate() {
        if c == 0 || c > l {
            return Err(MmpError::OutOfRange(format!(
                "layer {} rank {c} outside 1..={l}",
                k + 1
            )));
        }
        ell = (c as u128 - 1)
            .checked_mul(weight)
            .and_then(|t| ell.checked_add(t))
            .ok_or_else(|| MmpError::OutOfRange("search order overflows".into()))?;
        if k + 1 < layers.len() {
            weight = weight
                .checked_mul(l as u128)
                .ok_or_else(|| MmpError::OutOfRange("search order overflows".into()))?;
        }
    }
    usize::try_from(ell + 1).map_err(|_| MmpError::OutOfRange("search order overflows usize".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_order_table_l2_k4() {
        let rows: [(usize, [usize; 4]); 8] = [
            (1, [1, 1, 1, 1]),
            (2, [2, 1, 1, 1]),
            (3, [1, 2, 1, 1]),
            (4, [2, 2, 1, 1]),
            (5, [1, 1, 2, 1]),
            (6, [2, 1, 2, 1]),
            (16, [2, 2, 2, 2]),
            (9, [1, 1, 1, 2]),
        ];
        for (ell, layers) in rows {
            assert_eq!(compute_ck(ell, 2, 4).unwrap(), layers.to_vec());
            assert_eq!(candidate_order(&layers, 2).unwrap(), ell);
        }
    }

    #[test]
    fn all_ones_is_first() {
        for l in 1..5 {
            for k in 1..5 {
                assert_eq!(candidate_order(&vec![1; k], l).unwrap(), 1);
            }
        }
    }

    #[test]
    fn exhaustive_round_trip_l3_k4() {
        for ell in 1..=81 {
            let c = compute_ck(ell, 3, 4).unwrap();
            assert!(c.iter().all(|&ck| (1..=3).contains(&ck)));
            assert_eq!(candidate_order(&c, 3).unwrap(), ell);
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(compute_ck(0, 2, 4).is_err());
        assert!(compute_ck(17, 2, 4).is_err());
        assert!(candidate_order(&[1, 3], 2).is_err());
        assert!(candidate_order(&[0, 1], 2).is_err());
    }
}
