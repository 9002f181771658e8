//! Instrumented p-pass Shellsort.
//!
//! Each pass insertion-sorts every h-chain. Chains are processed in index
//! order (the chain starting at position 1 first), each chain left to right,
//! and every key's insertion-path length is recorded. The codec replays this
//! order in reverse, so it is part of the trace.

use serde::{Deserialize, Serialize};

use crate::increments::IncrementSequence;
use crate::perm::{chain_inversions_of, Permutation};

/// Per-key, per-pass counts indexed by key `i in 1..=n` and pass `k in 1..=p`.
/// Stored key-major, so the flat data is the sequence `c_{1,1}, ..., c_{1,p},
/// c_{2,1}, ...`. Serializes as one row per key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct MoveMatrix {
    n: usize,
    passes: usize,
    data: Vec<u32>,
}

impl MoveMatrix {
    pub fn zeros(n: usize, passes: usize) -> Self {
        MoveMatrix {
            n,
            passes,
            data: vec![0; n * passes],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    pub fn get(&self, key: u32, pass: usize) -> u32 {
        self.data[self.index(key, pass)]
    }

    pub fn set(&mut self, key: u32, pass: usize, value: u32) {
        let i = self.index(key, pass);
        self.data[i] = value;
    }

    fn index(&self, key: u32, pass: usize) -> usize {
        assert!(key >= 1 && key as usize <= self.n, "key {key} out of range");
        assert!(pass >= 1 && pass <= self.passes, "pass {pass} out of range");
        (key as usize - 1) * self.passes + (pass - 1)
    }

    /// Counts of `key` across passes `1..=p`.
    pub fn row(&self, key: u32) -> &[u32] {
        let start = (key as usize - 1) * self.passes;
        &self.data[start..start + self.passes]
    }

    /// Counts of every key in `pass`, ordered by key.
    pub fn column(&self, pass: usize) -> impl Iterator<Item = u32> + '_ {
        self.data[pass - 1..].iter().step_by(self.passes).copied()
    }

    pub fn pass_sum(&self, pass: usize) -> u64 {
        self.column(pass).map(u64::from).sum()
    }

    pub fn key_sum(&self, key: u32) -> u64 {
        self.row(key).iter().copied().map(u64::from).sum()
    }

    pub fn total(&self) -> u64 {
        self.data.iter().copied().map(u64::from).sum()
    }

    /// Flat key-major data, the order in which schedules compare
    /// lexicographically.
    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }
}

impl TryFrom<Vec<Vec<u32>>> for MoveMatrix {
    type Error = String;

    fn try_from(rows: Vec<Vec<u32>>) -> Result<Self, Self::Error> {
        let n = rows.len();
        let passes = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != passes) {
            return Err("move matrix rows have unequal lengths".into());
        }
        Ok(MoveMatrix {
            n,
            passes,
            data: rows.into_iter().flatten().collect(),
        })
    }
}

impl From<MoveMatrix> for Vec<Vec<u32>> {
    fn from(m: MoveMatrix) -> Self {
        if m.passes == 0 {
            return vec![Vec::new(); m.n];
        }
        m.data.chunks(m.passes).map(<[u32]>::to_vec).collect()
    }
}

/// One key's turn in a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessedKey {
    pub key: u32,
    pub moves: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassOutcome {
    pub output: Permutation,
    /// `moves[key - 1]` is the insertion-path length of `key`.
    pub moves: Vec<u32>,
    pub order: Vec<ProcessedKey>,
}

/// Full record of one Shellsort run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortTrace {
    pub n: usize,
    pub increments: IncrementSequence,
    pub moves: MoveMatrix,
    pub pass_orders: Vec<Vec<ProcessedKey>>,
    /// `pi_0 .. pi_p`, present only when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<Vec<Permutation>>,
}

impl SortTrace {
    pub fn total(&self) -> u64 {
        self.moves.total()
    }
}

/// Insertion-sorts every `h`-chain of `keys` in place, calling `visit` with
/// each key and its move count in processing order.
#[inline]
fn insertion_pass(keys: &mut [u32], h: usize, mut visit: impl FnMut(u32, u32)) {
    assert!(h >= 1, "increment must be positive");
    let n = keys.len();
    for start in 0..h.min(n) {
        let mut i = start;
        while i < n {
            let key = keys[i];
            let mut j = i;
            while j >= start + h && keys[j - h] > key {
                keys[j] = keys[j - h];
                j -= h;
            }
            keys[j] = key;
            visit(key, ((i - j) / h) as u32);
            i += h;
        }
    }
}

pub fn run_pass(p: &Permutation, h: usize) -> PassOutcome {
    let mut keys = p.keys().to_vec();
    let mut moves = vec![0; keys.len()];
    let mut order = Vec::with_capacity(keys.len());
    insertion_pass(&mut keys, h, |key, m| {
        moves[key as usize - 1] = m;
        order.push(ProcessedKey { key, moves: m });
    });
    PassOutcome {
        output: Permutation::from_keys_unchecked(keys),
        moves,
        order,
    }
}

fn sort_with(p: &Permutation, seq: &IncrementSequence, keep_snapshots: bool) -> SortTrace {
    assert_eq!(p.len(), seq.n(), "sequence was built for a different n");
    let passes = seq.passes();
    let mut keys = p.keys().to_vec();
    let mut moves = MoveMatrix::zeros(p.len(), passes);
    let mut pass_orders = Vec::with_capacity(passes);
    let mut snapshots = keep_snapshots.then(|| vec![p.clone()]);
    for (k, &h) in seq.increments().iter().enumerate() {
        let mut order = Vec::with_capacity(keys.len());
        insertion_pass(&mut keys, h, |key, m| {
            moves.set(key, k + 1, m);
            order.push(ProcessedKey { key, moves: m });
        });
        pass_orders.push(order);
        if let Some(s) = snapshots.as_mut() {
            s.push(Permutation::from_keys_unchecked(keys.clone()));
        }
    }
    debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
    SortTrace {
        n: p.len(),
        increments: seq.clone(),
        moves,
        pass_orders,
        snapshots,
    }
}

pub fn shellsort(p: &Permutation, seq: &IncrementSequence) -> SortTrace {
    sort_with(p, seq, false)
}

/// As [`shellsort`], also keeping the intermediate permutations.
pub fn shellsort_with_snapshots(p: &Permutation, seq: &IncrementSequence) -> SortTrace {
    sort_with(p, seq, true)
}

pub fn total_inversions(t: &SortTrace) -> u64 {
    t.total()
}

/// Compact outcome of a run, for large-n sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassTotals {
    pub per_pass: Vec<u64>,
    /// Per pass, the chain-inversion count of that pass's input, when checked.
    pub oracle: Option<Vec<u64>>,
    pub sorted: bool,
}

impl PassTotals {
    pub fn total(&self) -> u64 {
        self.per_pass.iter().sum()
    }

    /// Passes whose move sum differs from the chain-inversion oracle.
    pub fn oracle_mismatches(&self) -> usize {
        self.oracle.as_ref().map_or(0, |o| {
            o.iter().zip(&self.per_pass).filter(|(a, b)| a != b).count()
        })
    }
}

/// Per-pass move sums without building a trace. With `check`, every pass
/// input is also run through the chain-inversion counter.
pub fn pass_totals(p: &Permutation, seq: &IncrementSequence, check: bool) -> PassTotals {
    assert_eq!(p.len(), seq.n(), "sequence was built for a different n");
    let mut keys = p.keys().to_vec();
    let mut per_pass = Vec::with_capacity(seq.passes());
    let mut oracle = check.then(Vec::new);
    for &h in seq.increments() {
        if let Some(o) = oracle.as_mut() {
            o.push(chain_inversions_of(&keys, h));
        }
        let mut sum = 0u64;
        insertion_pass(&mut keys, h, |_, m| sum += u64::from(m));
        per_pass.push(sum);
    }
    let sorted = keys.iter().enumerate().all(|(i, &k)| k as usize == i + 1);
    PassTotals {
        per_pass,
        oracle,
        sorted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::{generate, validate, Family};
    use crate::perm::{
        chain_inversions, enumerate_permutations, inversion_count, trial_permutation, Seed,
    };

    fn perm(keys: &[u32]) -> Permutation {
        Permutation::new(keys.to_vec()).unwrap()
    }

    #[test]
    fn run_pass_examples() {
        let out = run_pass(&perm(&[4, 3, 2, 1]), 2);
        assert_eq!(out.output, perm(&[2, 1, 4, 3]));
        assert_eq!(out.moves, [1, 1, 0, 0]);
        assert_eq!(
            out.order,
            [
                ProcessedKey { key: 4, moves: 0 },
                ProcessedKey { key: 2, moves: 1 },
                ProcessedKey { key: 3, moves: 0 },
                ProcessedKey { key: 1, moves: 1 },
            ]
        );

        let sorted = Permutation::identity(6);
        let out = run_pass(&sorted, 4);
        assert_eq!(out.output, sorted);
        assert!(out.moves.iter().all(|&m| m == 0));

        let out = run_pass(&perm(&[3, 1, 2]), 1);
        assert_eq!(out.output, perm(&[1, 2, 3]));
        assert_eq!(out.moves, [1, 1, 0]);
    }

    #[test]
    fn shellsort_examples() {
        let t = shellsort_with_snapshots(&perm(&[4, 3, 2, 1]), &validate(&[2, 1], 4).unwrap());
        assert_eq!(total_inversions(&t), 4);
        let snaps = t.snapshots.as_ref().unwrap();
        assert_eq!(snaps[1], perm(&[2, 1, 4, 3]));
        assert_eq!(snaps[2], perm(&[1, 2, 3, 4]));
        assert_eq!((t.moves.pass_sum(1), t.moves.pass_sum(2)), (2, 2));

        let t = shellsort(
            &Permutation::identity(9),
            &generate(Family::Shell, 9).unwrap(),
        );
        assert_eq!(t.total(), 0);

        let t = shellsort(&perm(&[3, 2, 1]), &validate(&[2, 1], 3).unwrap());
        assert_eq!(t.total(), 1);
        assert_eq!(t.moves.get(1, 1), 1);

        let t = shellsort(&perm(&[2, 1]), &validate(&[1], 2).unwrap());
        assert_eq!(total_inversions(&t), 1);
    }

    fn check_trace(p: &Permutation, seq: &IncrementSequence) {
        let t = shellsort_with_snapshots(p, seq);
        let snaps = t.snapshots.as_ref().unwrap();
        assert!(snaps.last().unwrap().is_identity(), "{p} under {seq}");
        for k in 1..=seq.passes() {
            assert_eq!(
                t.moves.pass_sum(k),
                chain_inversions(&snaps[k - 1], seq.increment(k)),
                "{p} pass {k}"
            );
            assert_eq!(t.pass_orders[k - 1].len(), p.len());
        }
        let compact = pass_totals(p, seq, true);
        assert_eq!(compact.total(), t.total());
        assert_eq!(compact.oracle_mismatches(), 0);
        assert!(compact.sorted);
    }

    #[test]
    fn exhaustive_small_n() {
        for n in 2..=7 {
            let mut seqs = vec![validate(&[1], n).unwrap()];
            for h in [vec![2, 1], vec![3, 1], vec![4, 2, 1], vec![5, 3, 1]] {
                if let Ok(s) = validate(&h, n) {
                    seqs.push(s);
                }
            }
            for p in enumerate_permutations(n).unwrap() {
                for seq in &seqs {
                    check_trace(&p, seq);
                }
                let single = shellsort(&p, &seqs[0]);
                assert_eq!(single.total(), inversion_count(&p));
            }
        }
    }

    #[test]
    fn random_runs_across_families() {
        for n in [10usize, 100, 1000, 10_000] {
            for family in Family::GENERATED {
                let seq = generate(family, n).unwrap();
                let trials = if n == 10_000 { 3 } else { 20 };
                for trial in 0..trials {
                    check_trace(&trial_permutation(n, Seed(11), trial).unwrap(), &seq);
                }
            }
        }
    }

    #[test]
    fn trace_json_shape() {
        let t = shellsort(&perm(&[2, 1]), &validate(&[1], 2).unwrap());
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["moves"], serde_json::json!([[1], [0]]));
        assert_eq!(v["increments"]["h"], serde_json::json!([1]));
        assert!(v.get("snapshots").is_none());
        let back: SortTrace = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }
}
