//! Exhaustive minor-sequence search for tiny instances.

use super::{shift_left, MinorSchedule, ScheduleError};
use crate::increments::IncrementSequence;
use crate::perm::Permutation;
use crate::sorter::{shellsort, MoveMatrix};

pub const MAX_ORACLE_N: usize = 6;
pub const MAX_ORACLE_PASSES: usize = 3;

/// The minimal-total schedule reaching the sorted list, lexicographically
/// first (key-major, then pass) among all schedules with that total.
///
/// Depth-first over the turns of passes `1..p-1` in processing order; the
/// last pass has increment 1, so its counts are forced to the insertion
/// counts of whatever list it receives. Branches whose running total
/// already exceeds the incumbent are cut. The real Shellsort schedule seeds
/// the incumbent.
pub fn minor_oracle(
    p: &Permutation,
    seq: &IncrementSequence,
) -> Result<MinorSchedule, ScheduleError> {
    let (n, passes) = (p.len(), seq.passes());
    if n > MAX_ORACLE_N || passes > MAX_ORACLE_PASSES {
        return Err(ScheduleError::TooLarge {
            n,
            p: passes,
            max_n: MAX_ORACLE_N,
            max_p: MAX_ORACLE_PASSES,
        });
    }
    assert_eq!(seq.n(), n, "sequence was built for a different n");

    let trace = shellsort(p, seq);
    let turns = seq.increments()[..passes - 1]
        .iter()
        .map(|&h| {
            (0..h.min(n))
                .flat_map(|start| (0..(n - start).div_ceil(h)).map(move |slot| (start, slot)))
                .collect()
        })
        .collect();
    let mut search = Search {
        seq,
        turns,
        current: MoveMatrix::zeros(n, passes),
        best_total: trace.total(),
        best: trace.moves,
    };
    search.descend(0, 0, p.keys().to_vec(), 0);

    Ok(MinorSchedule {
        n,
        increments: seq.clone(),
        digits: search.best,
        minimal: true,
    })
}

struct Search<'a> {
    seq: &'a IncrementSequence,
    /// Per non-final pass, `(chain start, slot)` in processing order.
    turns: Vec<Vec<(usize, usize)>>,
    current: MoveMatrix,
    best_total: u64,
    best: MoveMatrix,
}

impl Search<'_> {
    fn descend(&mut self, pass: usize, turn: usize, keys: Vec<u32>, total: u64) {
        if total > self.best_total {
            return;
        }
        if pass == self.turns.len() {
            self.finish(&keys, total);
            return;
        }
        let Some(&(start, slot)) = self.turns[pass].get(turn) else {
            self.descend(pass + 1, 0, keys, total);
            return;
        };
        let h = self.seq.increments()[pass];
        let key = keys[start + slot * h];
        for moves in 0..=slot {
            let mut next = keys.clone();
            shift_left(&mut next, start, h, slot, moves);
            self.current.set(key, pass + 1, moves as u32);
            self.descend(pass, turn + 1, next, total + moves as u64);
        }
    }

    /// Final 1-pass: plain insertion sort.
    fn finish(&mut self, keys: &[u32], mut total: u64) {
        let last = self.seq.passes();
        for (slot, &key) in keys.iter().enumerate() {
            let moves = keys[..slot].iter().filter(|&&k| k > key).count();
            self.current.set(key, last, moves as u32);
            total += moves as u64;
        }
        let better = total < self.best_total
            || (total == self.best_total && self.current.as_slice() < self.best.as_slice());
        if better {
            self.best_total = total;
            self.best.clone_from(&self.current);
        }
    }
}
