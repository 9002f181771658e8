//! Lossless permutation codec built from pass traces.
//!
//! Given `n` and the increments, the move counts of a Shellsort run, read in
//! a fixed order, determine the input permutation: start from the sorted
//! list and undo passes `p, p-1, ..., 1`, each by replaying its turns in
//! reverse processing order.

mod bits;
mod file;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::bits::{
    bin_len, decode_length_prefixed_at, decode_selfdelim, decode_selfdelim_at,
    encode_length_prefixed_into, encode_selfdelim, encode_selfdelim_into, BitString,
};
pub use self::file::{read_descriptor, write_descriptor, MAGIC};

use crate::increments::{IncrementSequence, SequenceError};
use crate::perm::Permutation;
use crate::sorter::SortTrace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("bit stream truncated in codeword starting at bit {offset}")]
    Truncated { offset: usize },
    #[error("malformed bit stream: {0}")]
    Malformed(String),
    #[error("pass {pass}: count {moves} exceeds chain slot {slot}")]
    ChainOverflow {
        pass: usize,
        slot: usize,
        moves: u64,
    },
    #[error("descriptor uses the {0:?} scheme")]
    WrongScheme(Scheme),
    #[error("per-key descriptor does not determine a permutation: {0}")]
    Ambiguous(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Every move count of the real run, doubling-coded, pass `p` first.
    Trace,
    /// One length-prefixed displacement per key. Experimental and not
    /// injective; meant for length measurement.
    PerKeyTotals,
}

impl Scheme {
    pub(crate) fn tag(self) -> u64 {
        match self {
            Scheme::Trace => 0,
            Scheme::PerKeyTotals => 1,
        }
    }

    pub(crate) fn from_tag(tag: u64) -> Option<Self> {
        match tag {
            0 => Some(Scheme::Trace),
            1 => Some(Scheme::PerKeyTotals),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Descriptor {
    pub bits: BitString,
    pub n: usize,
    pub increments: IncrementSequence,
    pub scheme: Scheme,
}

/// Bit accounting of a descriptor. `payload` charges `ceil(log2(c + 1))`
/// bits per count `c`; `overhead` is everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorLength {
    pub total: u64,
    pub payload: u64,
    pub overhead: u64,
}

/// `ceil(log2(c + 1))`: zero for zero, else the binary length.
pub fn payload_bits(c: u64) -> u64 {
    u64::from(u64::BITS - c.leading_zeros())
}

pub fn encode_trace(t: &SortTrace) -> Descriptor {
    let mut bits = BitString::new();
    for order in t.pass_orders.iter().rev() {
        for turn in order {
            encode_selfdelim_into(u64::from(turn.moves), &mut bits);
        }
    }
    Descriptor {
        bits,
        n: t.n,
        increments: t.increments.clone(),
        scheme: Scheme::Trace,
    }
}

/// `(chain start, chain length)` for each chain of stride `h`.
fn chains(n: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..h.min(n)).map(move |start| (start, (n - start).div_ceil(h)))
}

pub fn decode_trace(d: &Descriptor) -> Result<Permutation, CodecError> {
    if d.scheme != Scheme::Trace {
        return Err(CodecError::WrongScheme(d.scheme));
    }
    let seq = &d.increments;
    let n = d.n;
    if seq.n() != n {
        return Err(CodecError::Malformed(format!(
            "descriptor n {n} vs sequence n {}",
            seq.n()
        )));
    }

    // Counts per pass in processing order, read pass p first.
    let mut counts: Vec<Vec<usize>> = vec![Vec::new(); seq.passes()];
    let mut offset = 0;
    for k in (1..=seq.passes()).rev() {
        let h = seq.increment(k);
        let pass = &mut counts[k - 1];
        pass.reserve(n);
        for (_, len) in chains(n, h) {
            for slot in 0..len {
                let (moves, used) = decode_selfdelim_at(&d.bits, offset)?;
                offset += used;
                if moves > slot as u64 {
                    return Err(CodecError::ChainOverflow {
                        pass: k,
                        slot: slot + 1,
                        moves,
                    });
                }
                pass.push(moves as usize);
            }
        }
    }
    if offset != d.bits.len() {
        return Err(CodecError::Malformed(format!(
            "{} trailing bits after {} counts",
            d.bits.len() - offset,
            n * seq.passes()
        )));
    }

    let mut keys: Vec<u32> = (1..=n as u32).collect();
    for k in (1..=seq.passes()).rev() {
        let h = seq.increment(k);
        let mut turn = counts[k - 1].len();
        let chains: Vec<_> = chains(n, h).collect();
        for &(start, len) in chains.iter().rev() {
            for slot in (0..len).rev() {
                turn -= 1;
                undo_turn(&mut keys, start, h, slot, counts[k - 1][turn]);
            }
        }
    }
    Ok(Permutation::from_keys_unchecked(keys))
}

/// Inverse of one simple-process turn: the key now at chain slot `slot - moves` goes
/// back to `slot`, the keys in between shift left.
fn undo_turn(keys: &mut [u32], start: usize, h: usize, slot: usize, moves: usize) {
    let mut j = start + (slot - moves) * h;
    let key = keys[j];
    for _ in 0..moves {
        keys[j] = keys[j + h];
        j += h;
    }
    keys[j] = key;
}

/// Per-key scheme: for keys `1..=n`, the length-prefixed displacement
/// `max(j - i, 0)`.
pub fn encode_per_key_totals(p: &Permutation, seq: &IncrementSequence) -> Descriptor {
    let mut bits = BitString::new();
    for (key, &position) in (1..).zip(&p.positions()) {
        let displacement = position.saturating_sub(key) as u64;
        encode_length_prefixed_into(displacement, &mut bits);
    }
    Descriptor {
        bits,
        n: p.len(),
        increments: seq.clone(),
        scheme: Scheme::PerKeyTotals,
    }
}

/// Experimental inverse of [`encode_per_key_totals`]. Keys with a positive
/// displacement `d` go to position `key + d`; the rest fill the free
/// positions in increasing order, which places each of them at or before its
/// own index whenever any arrangement does. Displacements do not determine a
/// permutation in general (keys that travel right all read 0), so the result
/// can differ from the encoded permutation; it always re-encodes to the same
/// descriptor.
pub fn decode_per_key_totals(d: &Descriptor) -> Result<Permutation, CodecError> {
    if d.scheme != Scheme::PerKeyTotals {
        return Err(CodecError::WrongScheme(d.scheme));
    }
    let n = d.n;
    let mut slots: Vec<u32> = vec![0; n];
    let mut resting = Vec::new();
    let mut offset = 0;
    for key in 1..=n as u32 {
        let (displacement, used) = decode_length_prefixed_at(&d.bits, offset)?;
        offset += used;
        if displacement == 0 {
            resting.push(key);
            continue;
        }
        let position = key as u64 + displacement;
        if position > n as u64 {
            return Err(CodecError::Malformed(format!(
                "key {key} displaced by {displacement} past position {n}"
            )));
        }
        let slot = &mut slots[position as usize - 1];
        if *slot != 0 {
            return Err(CodecError::Ambiguous(format!(
                "keys {} and {key} both claim position {position}",
                *slot
            )));
        }
        *slot = key;
    }
    if offset != d.bits.len() {
        return Err(CodecError::Malformed(
            "trailing bits after per-key totals".into(),
        ));
    }
    let mut rest = resting.into_iter();
    for (i, slot) in slots.iter_mut().enumerate() {
        if *slot == 0 {
            let key = rest.next().expect("one free position per resting key");
            if (key as usize) < i + 1 {
                return Err(CodecError::Ambiguous(format!(
                    "key {key} cannot rest at position {}",
                    i + 1
                )));
            }
            *slot = key;
        }
    }
    Ok(Permutation::from_keys_unchecked(slots))
}

/// Decodes either scheme.
pub fn decode(d: &Descriptor) -> Result<Permutation, CodecError> {
    match d.scheme {
        Scheme::Trace => decode_trace(d),
        Scheme::PerKeyTotals => decode_per_key_totals(d),
    }
}

/// The counts a descriptor carries, in stream order.
fn stream_counts(d: &Descriptor) -> Result<Vec<u64>, CodecError> {
    let mut out = Vec::new();
    let mut offset = 0;
    while offset < d.bits.len() {
        let (v, used) = match d.scheme {
            Scheme::Trace => decode_selfdelim_at(&d.bits, offset)?,
            Scheme::PerKeyTotals => decode_length_prefixed_at(&d.bits, offset)?,
        };
        out.push(v);
        offset += used;
    }
    Ok(out)
}

pub fn descr_length(d: &Descriptor) -> Result<DescriptorLength, CodecError> {
    let payload = stream_counts(d)?.into_iter().map(payload_bits).sum();
    let total = d.bits.len() as u64;
    Ok(DescriptorLength {
        total,
        payload,
        overhead: total - payload,
    })
}
