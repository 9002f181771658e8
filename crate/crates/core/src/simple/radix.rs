//! Mixed-radix digits over an increment sequence.
//!
//! A displacement `d < n` is written as `sum_k d_k * h_k` with the digit
//! bounds `d_k < h_{k-1} / h_k` (exact rationals, `h_0 = n`). Digits are
//! extracted greedily, most significant radix first.

use num::rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::increments::IncrementSequence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadixError {
    #[error("displacement {value} is outside 0..{n}")]
    OutOfRange { value: u64, n: usize },
    #[error("digit {digit} at pass {pass} violates bound {bound}")]
    DigitBound {
        pass: usize,
        digit: u64,
        bound: Ratio<u64>,
    },
    #[error("{digits} digits given for {radices} radices")]
    Length { digits: usize, radices: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RadixDigits {
    pub digits: Vec<u64>,
    /// `h_0 = n` followed by `h_1 .. h_p`.
    pub radices: Vec<u64>,
}

/// `(h_0/h_1, h_1/h_2, ..., h_{p-1}/h_p)` with `h_0 = n`.
pub fn digit_bounds(seq: &IncrementSequence) -> Vec<Ratio<u64>> {
    (1..=seq.passes())
        .map(|k| Ratio::new(seq.increment(k - 1) as u64, seq.increment(k) as u64))
        .collect()
}

/// Whether `digit < upper / lower` as exact rationals.
pub(crate) fn below_bound(digit: u64, upper: u64, lower: u64) -> bool {
    u128::from(digit) * u128::from(lower) < u128::from(upper)
}

pub fn mixed_radix_encode(d: u64, seq: &IncrementSequence) -> Result<RadixDigits, RadixError> {
    if d >= seq.n() as u64 {
        return Err(RadixError::OutOfRange {
            value: d,
            n: seq.n(),
        });
    }
    let mut rest = d;
    let digits = seq
        .increments()
        .iter()
        .map(|&h| {
            let digit = rest / h as u64;
            rest -= digit * h as u64;
            digit
        })
        .collect();
    debug_assert_eq!(rest, 0);
    Ok(RadixDigits {
        digits,
        radices: radices(seq),
    })
}

pub fn mixed_radix_decode(r: &RadixDigits) -> Result<u64, RadixError> {
    let p = r.radices.len().saturating_sub(1);
    if r.digits.len() != p {
        return Err(RadixError::Length {
            digits: r.digits.len(),
            radices: p,
        });
    }
    let mut value = 0u64;
    for (k, &digit) in r.digits.iter().enumerate() {
        let (upper, lower) = (r.radices[k], r.radices[k + 1]);
        if !below_bound(digit, upper, lower) {
            return Err(RadixError::DigitBound {
                pass: k + 1,
                digit,
                bound: Ratio::new(upper, lower),
            });
        }
        value += digit * lower;
    }
    Ok(value)
}

fn radices(seq: &IncrementSequence) -> Vec<u64> {
    (0..=seq.passes())
        .map(|k| seq.increment(k) as u64)
        .collect()
}

/// Number of digit vectors within the bounds that sum to `d`. Greedy
/// extraction always yields one of them; when the radices do not divide each
/// other there can be more.
pub fn representation_count(d: u64, seq: &IncrementSequence) -> u64 {
    representation_table(seq, d as usize)[d as usize]
}

/// [`representation_count`] for every `d` in `0..n`.
pub fn representation_counts(seq: &IncrementSequence) -> Vec<u64> {
    representation_table(seq, seq.n() - 1)
}

fn representation_table(seq: &IncrementSequence, limit: usize) -> Vec<u64> {
    let radices = radices(seq);
    // ways[r]: vectors over the radices after the current one that sum to r
    let mut ways = vec![0u64; limit + 1];
    ways[0] = 1;
    for k in (1..radices.len()).rev() {
        let (upper, lower) = (radices[k - 1], radices[k] as usize);
        let mut next = vec![0u64; limit + 1];
        for (r, slot) in next.iter_mut().enumerate() {
            *slot = (0..=r / lower)
                .take_while(|&digit| below_bound(digit as u64, upper, lower as u64))
                .fold(0u64, |acc, digit| {
                    acc.saturating_add(ways[r - digit * lower])
                });
        }
        ways = next;
    }
    ways
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::validate;

    fn seq(h: &[usize], n: usize) -> IncrementSequence {
        validate(h, n).unwrap()
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(
            digit_bounds(&seq(&[4, 2, 1], 8)),
            vec![Ratio::from_integer(2); 3]
        );
        assert_eq!(
            digit_bounds(&seq(&[5, 2, 1], 10)),
            vec![
                Ratio::from_integer(2),
                Ratio::new(5, 2),
                Ratio::from_integer(2)
            ]
        );
        assert_eq!(digit_bounds(&seq(&[1], 8)), vec![Ratio::from_integer(8)]);
    }

    #[test]
    fn encode_decode_examples() {
        let s = seq(&[4, 2, 1], 8);
        assert_eq!(mixed_radix_encode(5, &s).unwrap().digits, [1, 0, 1]);
        assert_eq!(mixed_radix_encode(0, &s).unwrap().digits, [0, 0, 0]);
        assert_eq!(mixed_radix_encode(7, &s).unwrap().digits, [1, 1, 1]);
        assert_eq!(
            mixed_radix_encode(8, &s),
            Err(RadixError::OutOfRange { value: 8, n: 8 })
        );

        let digits = |d: &[u64]| RadixDigits {
            digits: d.to_vec(),
            radices: vec![8, 4, 2, 1],
        };
        assert_eq!(mixed_radix_decode(&digits(&[1, 0, 1])), Ok(5));
        assert_eq!(mixed_radix_decode(&digits(&[0, 0, 0])), Ok(0));
        assert_eq!(mixed_radix_decode(&digits(&[1, 1, 1])), Ok(7));
        assert!(matches!(
            mixed_radix_decode(&digits(&[0, 2, 0])),
            Err(RadixError::DigitBound {
                pass: 2,
                digit: 2,
                ..
            })
        ));
        assert!(matches!(
            mixed_radix_decode(&digits(&[1])),
            Err(RadixError::Length { .. })
        ));
    }

    #[test]
    fn bound_is_strict_and_rational() {
        // 5/2: digit 2 is allowed, 3 is not.
        assert!(below_bound(2, 5, 2));
        assert!(!below_bound(3, 5, 2));
        assert!(!below_bound(2, 4, 2));
    }

    #[test]
    fn telescoping_with_exact_divisibility() {
        for (h, n) in [
            (vec![4, 2, 1], 8),
            (vec![9, 3, 1], 27),
            (vec![16, 4, 1], 64),
            (vec![1], 5),
        ] {
            let s = seq(&h, n);
            let sum: u64 = digit_bounds(&s)
                .iter()
                .zip(s.increments())
                .map(|(b, &hk)| (b.to_integer() - 1) * hk as u64)
                .sum();
            assert_eq!(sum, n as u64 - 1);
        }
    }

    #[test]
    fn representation_is_unique_for_divisible_radices_only() {
        let s = seq(&[4, 2, 1], 8);
        assert!((0..8).all(|d| representation_count(d, &s) == 1));
        let s = seq(&[3, 1], 5);
        assert_eq!(representation_count(4, &s), 1);
        // n = 7, H = (5,3,1): both (1,0,0) and (0,1,2) are within bounds and sum to 5.
        let s = seq(&[5, 3, 1], 7);
        assert_eq!(representation_count(5, &s), 2);
    }

    #[test]
    fn counts_match_explicit_enumeration() {
        fn enumerate(rest: u64, k: usize, radices: &[u64]) -> u64 {
            if k == radices.len() {
                return u64::from(rest == 0);
            }
            let mut total = 0;
            let mut digit = 0;
            while digit * radices[k] <= rest && digit * radices[k] < radices[k - 1] {
                total += enumerate(rest - digit * radices[k], k + 1, radices);
                digit += 1;
            }
            total
        }
        for (h, n) in [
            (vec![5, 3, 1], 7),
            (vec![7, 3, 2, 1], 20),
            (vec![6, 4, 1], 9),
            (vec![1], 4),
        ] {
            let s = seq(&h, n);
            let table = representation_counts(&s);
            for d in 0..n as u64 {
                assert_eq!(
                    table[d as usize],
                    enumerate(d, 1, &radices(&s)),
                    "{h:?} d={d}"
                );
            }
        }
    }
}
