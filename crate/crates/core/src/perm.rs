//! Permutations of the keys `1..=n`, seeded sampling, exhaustive enumeration
//! and inversion counting.
//!
//! Positions and keys are 1-indexed at every public interface. Storage is a
//! plain `Vec<u32>` where slot `j - 1` holds the key at position `j`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest `n` accepted by [`enumerate_permutations`].
pub const MAX_ENUMERATION_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("permutation size must be at least 1")]
    Empty,
    #[error("key {key} is outside 1..={n}")]
    KeyOutOfRange { key: u32, n: usize },
    #[error("key {key} appears more than once")]
    DuplicateKey { key: u32 },
    #[error("enumeration of {n}! permutations refused (limit n <= {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("permutation size {0} does not fit in 32-bit keys")]
    Overflow(usize),
}

/// An arrangement of the keys `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(keys: Vec<u32>) -> Result<Self, PermError> {
        let n = keys.len();
        if n == 0 {
            return Err(PermError::Empty);
        }
        if u32::try_from(n).is_err() {
            return Err(PermError::Overflow(n));
        }
        let mut seen = vec![false; n];
        for &key in &keys {
            if key == 0 || key as usize > n {
                return Err(PermError::KeyOutOfRange { key, n });
            }
            let slot = &mut seen[key as usize - 1];
            if *slot {
                return Err(PermError::DuplicateKey { key });
            }
            *slot = true;
        }
        Ok(Permutation(keys))
    }

    /// The sorted arrangement `1, 2, ..., n`.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "identity permutation needs n >= 1");
        Permutation((1..=n as u32).collect())
    }

    /// Caller guarantees the keys form a permutation.
    pub(crate) fn from_keys_unchecked(keys: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(keys.clone()).is_ok());
        Permutation(keys)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn keys(&self) -> &[u32] {
        &self.0
    }

    pub fn into_keys(self) -> Vec<u32> {
        self.0
    }

    /// Key at 1-indexed `position`.
    pub fn key_at(&self, position: usize) -> u32 {
        self.0[position - 1]
    }

    /// 1-indexed position of every key: `positions()[key - 1]`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.len()];
        for (slot, &key) in self.0.iter().enumerate() {
            pos[key as usize - 1] = slot + 1;
        }
        pos
    }

    pub fn is_identity(&self) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(slot, &key)| key as usize == slot + 1)
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = PermError;

    fn try_from(keys: Vec<u32>) -> Result<Self, Self::Error> {
        Permutation::new(keys)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, key) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{key}")?;
        }
        f.write_str("]")
    }
}

/// Root of all randomness in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Generator for trial `index`. Each trial gets its own ChaCha stream, so
    /// a trial's input does not depend on which other trials ran or in what
    /// order.
    pub fn trial_rng(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Uniform permutation of `1..=n` drawn from stream 0 of `seed`.
pub fn random_permutation(n: usize, seed: Seed) -> Result<Permutation, PermError> {
    trial_permutation(n, seed, 0)
}

/// Uniform permutation of `1..=n` for trial `index` under `seed`.
pub fn trial_permutation(n: usize, seed: Seed, index: u64) -> Result<Permutation, PermError> {
    permutation_from_rng(n, &mut seed.trial_rng(index))
}

pub fn permutation_from_rng<R: rand::Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<Permutation, PermError> {
    if n == 0 {
        return Err(PermError::Empty);
    }
    if u32::try_from(n).is_err() {
        return Err(PermError::Overflow(n));
    }
    let mut keys: Vec<u32> = (1..=n as u32).collect();
    keys.shuffle(rng);
    Ok(Permutation(keys))
}

/// Number of pairs of positions `a < b` with `key(a) > key(b)`.
pub fn inversion_count(p: &Permutation) -> u64 {
    let mut buf = p.0.clone();
    let mut scratch = vec![0; buf.len()];
    merge_count(&mut buf, &mut scratch)
}

/// Sum of within-chain inversion counts over the `h` chains of `p`, where
/// chain `c` holds the positions congruent to `c` modulo `h`.
pub fn chain_inversions(p: &Permutation, h: usize) -> u64 {
    chain_inversions_of(&p.0, h)
}

pub(crate) fn chain_inversions_of(keys: &[u32], h: usize) -> u64 {
    assert!(h >= 1, "chain stride must be positive");
    let n = keys.len();
    if h == 1 {
        let mut buf = keys.to_vec();
        let mut scratch = vec![0; n];
        return merge_count(&mut buf, &mut scratch);
    }
    let mut buf = Vec::with_capacity(n / h + 1);
    let mut scratch = Vec::with_capacity(n / h + 1);
    let mut total = 0;
    for start in 0..h.min(n) {
        buf.clear();
        buf.extend(keys[start..].iter().step_by(h));
        scratch.resize(buf.len(), 0);
        total += merge_count(&mut buf, &mut scratch);
    }
    total
}

/// Bottom-up merge sort of `buf`, returning the number of inversions it had.
fn merge_count(buf: &mut [u32], scratch: &mut [u32]) -> u64 {
    let n = buf.len();
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut out) = (lo, mid, lo);
            while i < mid && j < hi {
                if buf[j] < buf[i] {
                    inversions += (mid - i) as u64;
                    scratch[out] = buf[j];
                    j += 1;
                } else {
                    scratch[out] = buf[i];
                    i += 1;
                }
                out += 1;
            }
            scratch[out..out + (mid - i)].copy_from_slice(&buf[i..mid]);
            out += mid - i;
            scratch[out..out + (hi - j)].copy_from_slice(&buf[j..hi]);
            lo = hi;
        }
        buf.copy_from_slice(scratch);
        width *= 2;
    }
    inversions
}

/// All `n!` permutations in lexicographic order.
pub fn enumerate_permutations(n: usize) -> Result<Lexicographic, PermError> {
    if n == 0 {
        return Err(PermError::Empty);
    }
    if n > MAX_ENUMERATION_N {
        return Err(PermError::TooLarge {
            n,
            limit: MAX_ENUMERATION_N,
        });
    }
    Ok(Lexicographic {
        next: Some((1..=n as u32).collect()),
    })
}

/// Iterator returned by [`enumerate_permutations`].
#[derive(Debug, Clone)]
pub struct Lexicographic {
    next: Option<Vec<u32>>,
}

impl Iterator for Lexicographic {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation(current))
    }
}

fn next_lexicographic(keys: &mut [u32]) -> bool {
    let n = keys.len();
    let Some(pivot) = (1..n).rev().find(|&i| keys[i - 1] < keys[i]).map(|i| i - 1) else {
        return false;
    };
    let swap_with = (pivot + 1..n)
        .rev()
        .find(|&j| keys[j] > keys[pivot])
        .unwrap();
    keys.swap(pivot, swap_with);
    keys[pivot + 1..].reverse();
    true
}

/// `log2(n!)`, the minimum mean length of any injective binary code for
/// permutations of `n` keys.
pub fn log2_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).log2()).sum()
}
