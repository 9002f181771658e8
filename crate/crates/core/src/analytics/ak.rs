//! Per-pass slack between the arithmetic and geometric mean of the move
//! counts.
//!
//! For pass `k`, `a_k = log2(h_{k-1} / h_k) - (1/n) sum_i log2 max(m_{i,k}, 1)`.
//! Zero counts are clamped to one so the geometric mean stays defined; the
//! number of clamped entries is reported.

use serde::{Deserialize, Serialize};

use crate::increments::IncrementSequence;
use crate::sorter::MoveMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassDiagnostics {
    pub pass: usize,
    pub a_k: f64,
    pub arithmetic_mean: f64,
    /// Geometric mean of `max(m_{i,k}, 1)`.
    pub geometric_mean: f64,
    pub zero_counts: usize,
}

/// # Panics
/// If the matrix shape does not match `seq`.
pub fn ak_stats(moves: &MoveMatrix, seq: &IncrementSequence) -> Vec<PassDiagnostics> {
    assert_eq!(
        (moves.n(), moves.passes()),
        (seq.n(), seq.passes()),
        "shape mismatch"
    );
    let n = moves.n() as f64;
    (1..=seq.passes())
        .map(|k| {
            let column: Vec<u32> = moves.column(k).collect();
            let log_sum: f64 = column.iter().map(|&c| f64::from(c.max(1)).log2()).sum();
            let mean_log = log_sum / n;
            let ratio = seq.increment(k - 1) as f64 / seq.increment(k) as f64;
            PassDiagnostics {
                pass: k,
                a_k: ratio.log2() - mean_log,
                arithmetic_mean: column.iter().map(|&c| f64::from(c)).sum::<f64>() / n,
                geometric_mean: mean_log.exp2(),
                zero_counts: column.iter().filter(|&&c| c == 0).count(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::{generate, validate, Family};
    use crate::perm::{random_permutation, Permutation, Seed};
    use crate::sorter::shellsort;

    #[test]
    fn reversed_four_under_two_one() {
        // pass 1 moves keys 2 and 1 one slot each, pass 2 moves keys 1 and 3
        let seq = validate(&[2, 1], 4).unwrap();
        let trace = shellsort(&Permutation::new(vec![4, 3, 2, 1]).unwrap(), &seq);
        let stats = ak_stats(&trace.moves, &seq);
        assert_eq!(stats.len(), 2);
        assert_eq!(stats[0].pass, 1);
        assert_eq!(stats[0].a_k, 1.0);
        assert_eq!(stats[0].arithmetic_mean, 0.5);
        assert_eq!(stats[0].zero_counts, 2);
        assert_eq!(stats[1].geometric_mean, 1.0);
    }

    #[test]
    fn clamped_means_respect_am_gm() {
        for seed in 0..20 {
            let seq = generate(Family::Hibbard, 500).unwrap();
            let trace = shellsort(&random_permutation(500, Seed(seed)).unwrap(), &seq);
            for d in ak_stats(&trace.moves, &seq) {
                // AM of the clamped values is at least the GM; clamping adds zero_counts / n
                let clamped_am = d.arithmetic_mean + d.zero_counts as f64 / 500.0;
                assert!(clamped_am + 1e-9 >= d.geometric_mean, "{d:?}");
                assert!(d.geometric_mean >= 1.0);
            }
        }
    }
}
