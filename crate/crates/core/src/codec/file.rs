//! On-disk descriptor format.
//!
//! ```text
//! "SHLDESC1"                              8 bytes
//! sd(n) sd(p) sd(h_1) .. sd(h_p)          header, doubling-coded
//! sd(scheme) sd(payload bit length)
//! payload bits
//! zero padding to a byte boundary
//! ```
//!
//! Everything after the magic is one MSB-first bit stream.

use super::bits::{decode_selfdelim_at, encode_selfdelim_into, BitString};
use super::{CodecError, Descriptor, Scheme};
use crate::increments::validate;

pub const MAGIC: &[u8; 8] = b"SHLDESC1";

pub fn write_descriptor(d: &Descriptor) -> Vec<u8> {
    let mut stream = BitString::new();
    encode_selfdelim_into(d.n as u64, &mut stream);
    encode_selfdelim_into(d.increments.passes() as u64, &mut stream);
    for &h in d.increments.increments() {
        encode_selfdelim_into(h as u64, &mut stream);
    }
    encode_selfdelim_into(d.scheme.tag(), &mut stream);
    encode_selfdelim_into(d.bits.len() as u64, &mut stream);
    stream.extend_from(&d.bits);

    let mut out = MAGIC.to_vec();
    out.extend_from_slice(stream.as_bytes());
    out
}

pub fn read_descriptor(bytes: &[u8]) -> Result<Descriptor, CodecError> {
    let body = bytes
        .strip_prefix(MAGIC.as_slice())
        .ok_or_else(|| CodecError::Malformed("missing SHLDESC1 magic".into()))?;
    let stream = BitString::from_bytes(body, body.len() * 8).unwrap();
    let mut offset = 0;
    let mut next = || -> Result<u64, CodecError> {
        let (v, used) = decode_selfdelim_at(&stream, offset)?;
        offset += used;
        Ok(v)
    };

    let n = next()? as usize;
    let p = next()? as usize;
    if p > n.max(1) {
        return Err(CodecError::Malformed(format!("{p} passes for n = {n}")));
    }
    let h = (0..p)
        .map(|_| next().map(|v| v as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let scheme = next()?;
    let scheme = Scheme::from_tag(scheme)
        .ok_or_else(|| CodecError::Malformed(format!("unknown scheme tag {scheme}")))?;
    let len = next()? as usize;
    let increments = validate(&h, n)?;

    let start = offset;
    if start + len > stream.len() {
        return Err(CodecError::Truncated { offset: start });
    }
    if stream.len() - (start + len) >= 8 {
        return Err(CodecError::Malformed("trailing bytes after payload".into()));
    }
    let mut bits = BitString::new();
    for i in start..start + len {
        bits.push(stream.get(i).unwrap());
    }
    Ok(Descriptor {
        bits,
        n,
        increments,
        scheme,
    })
}
