//! Adaptive binary arithmetic coding of byte streams.
//!
//! Bits are coded MSB-first under a context of (previous byte, position
//! and bits seen so far in the current byte); each context carries one
//! adaptive 12-bit probability. Integer-only range coder, so encoder and
//! decoder stay bit-exact across platforms.

use crate::{Error, Result};

const PROB_BITS: u32 = 12;
const PROB_INIT: u16 = 1 << (PROB_BITS - 1);
const ADAPT_SHIFT: u32 = 5;
const TOP: u32 = 1 << 24;

struct Model {
    /// prev_byte * 256 + bit-tree node (1..=255)
    probs: Vec<u16>,
}

impl Model {
    fn new() -> Self {
        Model { probs: vec![PROB_INIT; 256 * 256] }
    }

    #[inline]
    fn ctx(prev: u8, node: u32) -> usize {
        (prev as usize) << 8 | node as usize
    }
}

struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    pending: u64,
    first: bool,
    out: Vec<u8>,
}

impl RangeEncoder {
    fn new() -> Self {
        RangeEncoder { low: 0, range: u32::MAX, cache: 0, pending: 0, first: true, out: Vec::new() }
    }

    fn encode(&mut self, p0: u16, bit: bool) {
        let bound = (self.range >> PROB_BITS) * p0 as u32;
        if !bit {
            self.range = bound;
        } else {
            self.low += bound as u64;
            self.range -= bound;
        }
        while self.range < TOP {
            self.shift_low();
            self.range <<= 8;
        }
    }

    fn shift_low(&mut self) {
        if self.low < 0xFF00_0000 || self.low > 0xFFFF_FFFF {
            let carry = (self.low >> 32) as u8;
            if !self.first {
                self.out.push(self.cache.wrapping_add(carry));
            }
            while self.pending > 0 {
                self.out.push(0xFFu8.wrapping_add(carry));
                self.pending -= 1;
            }
            self.cache = (self.low >> 24) as u8;
            self.first = false;
        } else {
            self.pending += 1;
        }
        self.low = (self.low << 8) & 0xFFFF_FFFF;
    }

    fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        while self.pending > 0 {
            self.out.push(0xFF);
            self.pending -= 1;
        }
        self.out
    }
}

struct RangeDecoder<'a> {
    code: u32,
    range: u32,
    input: &'a [u8],
    pos: usize,
}

impl<'a> RangeDecoder<'a> {
    fn new(input: &'a [u8]) -> Result<Self> {
        let mut d = RangeDecoder { code: 0, range: u32::MAX, input, pos: 0 };
        for _ in 0..4 {
            d.code = (d.code << 8) | d.next()? as u32;
        }
        Ok(d)
    }

    fn next(&mut self) -> Result<u8> {
        let b = *self.input.get(self.pos).ok_or(Error::BodyLength)?;
        self.pos += 1;
        Ok(b)
    }

    fn decode(&mut self, p0: u16) -> Result<bool> {
        let bound = (self.range >> PROB_BITS) * p0 as u32;
        let bit = if self.code < bound {
            self.range = bound;
            false
        } else {
            self.code -= bound;
            self.range -= bound;
            true
        };
        while self.range < TOP {
            self.code = (self.code << 8) | self.next()? as u32;
            self.range <<= 8;
        }
        Ok(bit)
    }
}

#[inline]
fn adapt(p: &mut u16, bit: bool) {
    if bit {
        *p -= *p >> ADAPT_SHIFT;
    } else {
        *p += ((1u16 << PROB_BITS) - *p) >> ADAPT_SHIFT;
    }
}

/// Compresses a byte stream. The uncompressed length is not stored;
/// callers keep it (the container header does).
pub fn entropy_encode(data: &[u8]) -> Vec<u8> {
    let mut model = Model::new();
    let mut enc = RangeEncoder::new();
    let mut prev = 0u8;
    for &byte in data {
        let mut node = 1u32;
        for i in (0..8).rev() {
            let bit = (byte >> i) & 1 == 1;
            let p = &mut model.probs[Model::ctx(prev, node)];
            enc.encode(*p, bit);
            adapt(p, bit);
            node = (node << 1) | bit as u32;
        }
        prev = byte;
    }
    enc.finish()
}

/// Decompresses exactly `out_len` bytes, mirroring the encoder's model.
pub fn entropy_decode(data: &[u8], out_len: usize) -> Result<Vec<u8>> {
    let mut model = Model::new();
    let mut dec = RangeDecoder::new(data)?;
    let mut out = Vec::with_capacity(out_len);
    let mut prev = 0u8;
    for _ in 0..out_len {
        let mut node = 1u32;
        for _ in 0..8 {
            let p = &mut model.probs[Model::ctx(prev, node)];
            let bit = dec.decode(*p)?;
            adapt(p, bit);
            node = (node << 1) | bit as u32;
        }
        let byte = (node & 0xFF) as u8;
        out.push(byte);
        prev = byte;
    }
    Ok(out)
}
