//! Bit strings and the bit-doubling self-delimiting integer code.
//!
//! A value `v` with binary form `b_1 ... b_m` (most significant first, and
//! `bin(0) = "0"`) is written as `b_1 b_1 b_2 b_2 ... b_{m-1} b_{m-1} b_m !b_m`.
//! A reader scans bit pairs until it meets an unequal pair. Every codeword
//! has length `2m`.

use std::fmt;
use std::str::FromStr;

use super::CodecError;

/// Growable bit string, most significant bit first within each byte.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    pub fn extend_from(&mut self, other: &BitString) {
        for i in 0..other.len {
            self.push(other.get(i).unwrap());
        }
    }

    /// Appends the low `width` bits of `v`, most significant first.
    pub fn push_bits(&mut self, v: u64, width: u32) {
        for shift in (0..width).rev() {
            self.push((v >> shift) & 1 == 1);
        }
    }

    /// Packed bytes; bits past `len()` in the last byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if len > bytes.len() * 8 {
            return None;
        }
        let mut s = BitString::new();
        for i in 0..len {
            s.push(bytes[i / 8] & (0x80 >> (i % 8)) != 0);
        }
        Some(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i).unwrap())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = CodecError;

    /// Parses `0`/`1` characters; spaces are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = BitString::new();
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                ' ' => {}
                _ => return Err(CodecError::Malformed(format!("not a bit: {c:?}"))),
            }
        }
        Ok(out)
    }
}

/// Length of the binary form of `v`, counting `bin(0)` as one bit.
pub fn bin_len(v: u64) -> u32 {
    (u64::BITS - v.leading_zeros()).max(1)
}

pub fn encode_selfdelim_into(v: u64, out: &mut BitString) {
    let m = bin_len(v);
    for shift in (1..m).rev() {
        let bit = (v >> shift) & 1 == 1;
        out.push(bit);
        out.push(bit);
    }
    let last = v & 1 == 1;
    out.push(last);
    out.push(!last);
}

pub fn encode_selfdelim(v: u64) -> BitString {
    let mut out = BitString::new();
    encode_selfdelim_into(v, &mut out);
    out
}

/// Reads one codeword starting at bit `offset`; returns the value and the
/// number of bits consumed.
pub fn decode_selfdelim_at(bits: &BitString, offset: usize) -> Result<(u64, usize), CodecError> {
    let mut value = 0u64;
    let mut i = offset;
    loop {
        let (Some(a), Some(b)) = (bits.get(i), bits.get(i + 1)) else {
            return Err(CodecError::Truncated { offset });
        };
        if (i - offset) / 2 >= u64::BITS as usize {
            return Err(CodecError::Malformed(format!(
                "codeword at bit {offset} exceeds 64 bits"
            )));
        }
        value = (value << 1) | u64::from(a);
        i += 2;
        if a != b {
            return Ok((value, i - offset));
        }
    }
}

pub fn decode_selfdelim(bits: &BitString) -> Result<(u64, usize), CodecError> {
    decode_selfdelim_at(bits, 0)
}

/// Length-prefixed form: the bit length of `v` in the doubling code, then
/// the plain binary form. Costs `2 * bin_len(bin_len(v)) + bin_len(v)` bits.
pub fn encode_length_prefixed_into(v: u64, out: &mut BitString) {
    let m = bin_len(v);
    encode_selfdelim_into(u64::from(m), out);
    out.push_bits(v, m);
}

pub fn decode_length_prefixed_at(
    bits: &BitString,
    offset: usize,
) -> Result<(u64, usize), CodecError> {
    let (m, header) = decode_selfdelim_at(bits, offset)?;
    if m == 0 || m > u64::from(u64::BITS) {
        return Err(CodecError::Malformed(format!(
            "bad length field {m} at bit {offset}"
        )));
    }
    let start = offset + header;
    let mut value = 0u64;
    for i in start..start + m as usize {
        let bit = bits.get(i).ok_or(CodecError::Truncated { offset })?;
        value = (value << 1) | u64::from(bit);
    }
    Ok((value, header + m as usize))
}
