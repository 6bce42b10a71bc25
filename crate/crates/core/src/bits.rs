//! MSB-first bit packing and Elias gamma codes.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitError {
    #[error("unexpected end of bit stream")]
    Eof,
    #[error("gamma code too long for a 64-bit value")]
    Overflow,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Writes the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            self.push_bit(value >> i & 1 == 1);
        }
    }

    /// Elias gamma code of `n ≥ 1`.
    pub fn push_gamma(&mut self, n: u64) {
        assert!(n >= 1, "gamma codes start at 1");
        let width = 64 - n.leading_zeros();
        self.push_bits(0, width - 1);
        self.push_bits(n, width);
    }

    pub fn push_gamma_big(&mut self, n: &BigUint) {
        assert!(!n.is_zero(), "gamma codes start at 1");
        let width = n.bits();
        for _ in 1..width {
            self.push_bit(false);
        }
        for i in (0..width).rev() {
            self.push_bit(n.bit(i));
        }
    }

    pub fn push_byte(&mut self, b: u8) {
        self.push_bits(b as u64, 8);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes; the final byte is zero-padded.
    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        to_hex(&self.bytes)
    }
}

/// Length in bits of the gamma code of `n`.
pub fn gamma_len(n: u64) -> usize {
    assert!(n >= 1, "gamma codes start at 1");
    2 * (64 - n.leading_zeros() as usize) - 1
}

pub fn gamma_len_big(n: &BigUint) -> usize {
    2 * n.bits() as usize - 1
}

pub fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    limit: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0, limit: bytes.len() * 8 }
    }

    /// Reader over the first `bits` bits of `bytes`.
    pub fn with_len(bytes: &'a [u8], bits: usize) -> Self {
        Self { bytes, pos: 0, limit: bits.min(bytes.len() * 8) }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.limit - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool, BitError> {
        if self.pos >= self.limit {
            return Err(BitError::Eof);
        }
        let bit = self.bytes[self.pos / 8] & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64, BitError> {
        let mut v = 0u64;
        for _ in 0..width {
            v = v << 1 | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn read_byte(&mut self) -> Result<u8, BitError> {
        Ok(self.read_bits(8)? as u8)
    }

    pub fn read_gamma(&mut self) -> Result<u64, BitError> {
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(BitError::Overflow);
            }
        }
        let rest = self.read_bits(zeros)?;
        Ok(1 << zeros | rest)
    }

    pub fn read_gamma_big(&mut self) -> Result<BigUint, BitError> {
        let mut zeros = 0u64;
        while !self.read_bit()? {
            zeros += 1;
        }
        let mut v = BigUint::one();
        for _ in 0..zeros {
            v <<= 1u32;
            if self.read_bit()? {
                v += 1u32;
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_codes() {
        let mut w = BitWriter::new();
        w.push_gamma(1);
        w.push_gamma(2);
        w.push_gamma(5);
        // 1 | 010 | 00101
        assert_eq!(w.len(), 9);
        assert_eq!(w.as_bytes(), &[0b1010_0010, 0b1000_0000]);
        assert_eq!(gamma_len(5), 5);
        let mut r = BitReader::with_len(w.as_bytes(), w.len());
        assert_eq!(r.read_gamma().unwrap(), 1);
        assert_eq!(r.read_gamma().unwrap(), 2);
        assert_eq!(r.read_gamma().unwrap(), 5);
        assert_eq!(r.read_bit(), Err(BitError::Eof));
    }

    #[test]
    fn big_gamma_matches_small() {
        for n in [1u64, 2, 3, 77, 1 << 40] {
            let mut a = BitWriter::new();
            a.push_gamma(n);
            let mut b = BitWriter::new();
            b.push_gamma_big(&BigUint::from(n));
            assert_eq!(a, b);
            let mut r = BitReader::new(b.as_bytes());
            assert_eq!(r.read_gamma_big().unwrap(), BigUint::from(n));
        }
    }
}
