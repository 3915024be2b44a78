//! Binary bit-vector trace files.
//!
//! Layout: `"MLBV"`, version byte `0x01`, map size as `u32` little-endian,
//! then `ceil(map_size / 8)` payload bytes. Bit `j` is bit `j % 8` of byte
//! `j / 8`. Hit-count tuples are not stored.

use std::io::{Read, Write};

use crate::bitset::{words_for, BitSet};
use crate::error::{Error, Result};
use crate::model::CoverageTrace;

pub const MAGIC: [u8; 4] = *b"MLBV";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 9;

pub fn encode_trace(trace: &CoverageTrace) -> Vec<u8> {
    let map_size = trace.map_size();
    let payload_len = map_size.div_ceil(8);
    let mut out = Vec::with_capacity(HEADER_LEN + payload_len);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(map_size as u32).to_le_bytes());
    for word in trace.bits.words() {
        out.extend_from_slice(&word.to_le_bytes());
    }
    out.truncate(HEADER_LEN + payload_len);
    out
}

pub fn decode_trace(bytes: &[u8]) -> Result<CoverageTrace> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != MAGIC {
            return Err(Error::BadMagic(bytes[..4].try_into().unwrap()));
        }
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    if bytes[4] != VERSION {
        return Err(Error::UnsupportedVersion(bytes[4]));
    }
    let map_size = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    if map_size == 0 {
        return Err(Error::Format("map size is zero".into()));
    }
    let payload = &bytes[HEADER_LEN..];
    let expected = map_size.div_ceil(8);
    if payload.len() < expected {
        return Err(Error::Truncated {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::Format(format!(
            "{} trailing bytes after payload",
            payload.len() - expected
        )));
    }
    let mut words = vec![0u64; words_for(map_size)];
    for (i, chunk) in payload.chunks(8).enumerate() {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        words[i] = u64::from_le_bytes(buf);
    }
    let bits = BitSet::from_words(map_size, words.clone());
    if bits.words() != words.as_slice() {
        return Err(Error::Format("bits set beyond map size".into()));
    }
    Ok(CoverageTrace { bits, tuples: None })
}

pub fn write_trace<W: Write>(trace: &CoverageTrace, mut sink: W) -> std::io::Result<()> {
    sink.write_all(&encode_trace(trace))
}

pub fn read_trace<R: Read>(mut source: R) -> Result<CoverageTrace> {
    let mut bytes = Vec::new();
    source
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<trace>", e))?;
    decode_trace(&bytes)
}
