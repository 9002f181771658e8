//! The simple Shellsort process: every key, on its turn in a pass, moves a
//! freely chosen number of chain positions to the left by successive
//! inversions. The minor sequence is the cheapest such schedule that still
//! ends sorted.
//!
//! Turns follow the sorter's processing order: chains in index order, each
//! chain left to right. A key at chain slot `j` (1-indexed) may move at most
//! `j - 1` places; the keys it passes shift right by one.

mod oracle;
mod radix;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::oracle::{minor_oracle, MAX_ORACLE_N, MAX_ORACLE_PASSES};
pub(crate) use self::radix::below_bound;
pub use self::radix::{
    digit_bounds, mixed_radix_decode, mixed_radix_encode, representation_count,
    representation_counts, RadixDigits, RadixError,
};

use crate::increments::IncrementSequence;
use crate::perm::Permutation;
use crate::sorter::{MoveMatrix, SortTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("schedule is {got_n}x{got_p}, expected {n}x{p}")]
    Shape {
        n: usize,
        p: usize,
        got_n: usize,
        got_p: usize,
    },
    #[error("key {key} in pass {pass} asked to move {moves} from chain slot {slot}")]
    ChainOverflow {
        key: u32,
        pass: usize,
        moves: u32,
        slot: usize,
    },
    #[error("exhaustive search refused for n = {n}, p = {p} (limits n <= {max_n}, p <= {max_p})")]
    TooLarge {
        n: usize,
        p: usize,
        max_n: usize,
        max_p: usize,
    },
}

/// Move counts of a simple-process schedule. When `minimal` is set these are
/// the minor sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorSchedule {
    pub n: usize,
    pub increments: IncrementSequence,
    pub digits: MoveMatrix,
    pub minimal: bool,
}

impl MinorSchedule {
    pub fn zeros(seq: &IncrementSequence) -> Self {
        MinorSchedule {
            n: seq.n(),
            increments: seq.clone(),
            digits: MoveMatrix::zeros(seq.n(), seq.passes()),
            minimal: false,
        }
    }

    /// The real Shellsort's move counts read as a simple-process schedule.
    pub fn from_trace(t: &SortTrace) -> Self {
        MinorSchedule {
            n: t.n,
            increments: t.increments.clone(),
            digits: t.moves.clone(),
            minimal: false,
        }
    }

    pub fn total(&self) -> u64 {
        self.digits.total()
    }

    /// `T_i` for every key, ordered by key.
    pub fn per_key(&self) -> Vec<u64> {
        (1..=self.n as u32)
            .map(|key| self.digits.key_sum(key))
            .collect()
    }

    /// First `(key, pass, digit)` whose digit is not below its bound.
    pub fn first_bound_violation(&self) -> Option<(u32, usize, u32)> {
        let seq = &self.increments;
        (1..=self.n as u32).find_map(|key| {
            (1..=seq.passes()).find_map(|k| {
                let digit = self.digits.get(key, k);
                let fits = below_bound(
                    u64::from(digit),
                    seq.increment(k - 1) as u64,
                    seq.increment(k) as u64,
                );
                (!fits).then_some((key, k, digit))
            })
        })
    }

    /// Largest `digit / bound` over all entries.
    pub fn max_bound_ratio(&self) -> f64 {
        let seq = &self.increments;
        let mut max = 0.0f64;
        for key in 1..=self.n as u32 {
            for k in 1..=seq.passes() {
                let bound = seq.increment(k - 1) as f64 / seq.increment(k) as f64;
                max = max.max(f64::from(self.digits.get(key, k)) / bound);
            }
        }
        max
    }
}

/// Moves the key at chain slot `slot` (0-based, positions `start + i*h`)
/// `moves` slots to the left, shifting the passed keys right.
pub(crate) fn shift_left(keys: &mut [u32], start: usize, h: usize, slot: usize, moves: usize) {
    let mut j = start + slot * h;
    let key = keys[j];
    for _ in 0..moves {
        keys[j] = keys[j - h];
        j -= h;
    }
    keys[j] = key;
}

pub fn simple_apply(
    p: &Permutation,
    seq: &IncrementSequence,
    schedule: &MinorSchedule,
) -> Result<Permutation, ScheduleError> {
    let (n, passes) = (p.len(), seq.passes());
    if schedule.digits.n() != n || schedule.digits.passes() != passes || seq.n() != n {
        return Err(ScheduleError::Shape {
            n,
            p: passes,
            got_n: schedule.digits.n(),
            got_p: schedule.digits.passes(),
        });
    }
    let mut keys = p.keys().to_vec();
    for (k, &h) in seq.increments().iter().enumerate() {
        for start in 0..h.min(n) {
            let len = (n - start).div_ceil(h);
            for slot in 0..len {
                let key = keys[start + slot * h];
                let moves = schedule.digits.get(key, k + 1);
                if moves as usize > slot {
                    return Err(ScheduleError::ChainOverflow {
                        key,
                        pass: k + 1,
                        moves,
                        slot: slot + 1,
                    });
                }
                shift_left(&mut keys, start, h, slot, moves as usize);
            }
        }
    }
    Ok(Permutation::from_keys_unchecked(keys))
}

/// Digits of each key's leftward displacement `max(j - i, 0)`, where `j` is
/// its position in `p`.
pub fn minor_candidate(p: &Permutation, seq: &IncrementSequence) -> MinorSchedule {
    let mut schedule = MinorSchedule::zeros(seq);
    for (slot, &key) in p.keys().iter().enumerate() {
        let displacement = (slot + 1).saturating_sub(key as usize) as u64;
        let radix = mixed_radix_encode(displacement, seq).expect("displacement below n");
        for (k, &digit) in radix.digits.iter().enumerate() {
            schedule.digits.set(key, k + 1, digit as u32);
        }
    }
    schedule
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::{generate, validate, Family};
    use crate::perm::{enumerate_permutations, trial_permutation, Seed};
    use crate::sorter::shellsort;

    fn perm(keys: &[u32]) -> Permutation {
        Permutation::new(keys.to_vec()).unwrap()
    }

    #[test]
    fn zero_schedule_is_a_no_op() {
        let seq = validate(&[2, 1], 5).unwrap();
        let p = perm(&[5, 3, 1, 4, 2]);
        assert_eq!(
            simple_apply(&p, &seq, &MinorSchedule::zeros(&seq)).unwrap(),
            p
        );
    }

    #[test]
    fn single_move_sorts_reversal_of_three() {
        let seq = validate(&[2, 1], 3).unwrap();
        let mut s = MinorSchedule::zeros(&seq);
        s.digits.set(1, 1, 1);
        assert_eq!(
            simple_apply(&perm(&[3, 2, 1]), &seq, &s).unwrap(),
            Permutation::identity(3)
        );
    }

    #[test]
    fn replaying_sorter_moves_sorts() {
        for n in 2..=6 {
            for h in [vec![1], vec![2, 1], vec![3, 1], vec![4, 2, 1]] {
                let Ok(seq) = validate(&h, n) else { continue };
                for p in enumerate_permutations(n).unwrap() {
                    let s = MinorSchedule::from_trace(&shellsort(&p, &seq));
                    assert!(simple_apply(&p, &seq, &s).unwrap().is_identity());
                }
            }
        }
        let seq = generate(Family::Hibbard, 500).unwrap();
        let p = trial_permutation(500, Seed(3), 0).unwrap();
        let s = MinorSchedule::from_trace(&shellsort(&p, &seq));
        assert!(simple_apply(&p, &seq, &s).unwrap().is_identity());
    }

    #[test]
    fn overflow_names_the_key_and_pass() {
        let seq = validate(&[2, 1], 4).unwrap();
        let mut s = MinorSchedule::zeros(&seq);
        // key 4 sits at slot 1 of chain 1; it cannot move at all.
        s.digits.set(4, 1, 1);
        assert_eq!(
            simple_apply(&perm(&[4, 3, 2, 1]), &seq, &s),
            Err(ScheduleError::ChainOverflow {
                key: 4,
                pass: 1,
                moves: 1,
                slot: 1
            })
        );
        let other = validate(&[1], 4).unwrap();
        assert!(matches!(
            simple_apply(&perm(&[4, 3, 2, 1]), &other, &s),
            Err(ScheduleError::Shape { .. })
        ));
    }

    #[test]
    fn candidate_examples() {
        let seq = validate(&[2, 1], 3).unwrap();
        assert_eq!(minor_candidate(&Permutation::identity(3), &seq).total(), 0);

        let c = minor_candidate(&perm(&[3, 2, 1]), &seq);
        assert_eq!(c.digits.row(1), [1, 0]);
        assert_eq!(c.digits.row(2), [0, 0]);
        assert_eq!(c.digits.row(3), [0, 0]);
        assert_eq!(c.total(), 1);

        let one = validate(&[1], 3).unwrap();
        let c = minor_candidate(&perm(&[2, 3, 1]), &one);
        assert_eq!(c.per_key(), [2, 0, 0]);
        assert_eq!(c.total(), 2);
    }

    #[test]
    fn bound_violation_reporting() {
        let seq = validate(&[2, 1], 4).unwrap();
        let mut s = MinorSchedule::zeros(&seq);
        assert_eq!(s.first_bound_violation(), None);
        s.digits.set(2, 2, 2);
        assert_eq!(s.first_bound_violation(), Some((2, 2, 2)));
        assert_eq!(s.max_bound_ratio(), 1.0);
    }
}
