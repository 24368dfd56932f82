//! Fixed-length bitstrings.
//!
//! Bits are packed most-significant-first into bytes. Padding bits in the
//! final byte are always zero, so derived equality and hashing agree with
//! bitwise equality.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_len, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits {
    len: usize,
    bytes: Vec<u8>,
}

fn byte_len(bits: usize) -> usize {
    bits.div_ceil(8)
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            bytes: vec![0; byte_len(len)],
        }
    }

    pub fn empty() -> Self {
        Self::zeros(0)
    }

    /// Takes the first `len` bits of `bytes`; surplus bytes are rejected and
    /// trailing bits beyond `len` are cleared.
    pub fn from_bytes(mut bytes: Vec<u8>, len: usize) -> Result<Self> {
        check_len(byte_len(len) * 8, bytes.len() * 8)?;
        if let Some(last) = bytes.last_mut() {
            *last &= tail_mask(len);
        }
        Ok(Self { len, bytes })
    }

    /// Like [`Bits::from_bytes`] but truncates an over-long buffer.
    pub fn from_prefix(mut bytes: Vec<u8>, len: usize) -> Self {
        assert!(bytes.len() * 8 >= len, "buffer shorter than {len} bits");
        bytes.truncate(byte_len(len));
        if let Some(last) = bytes.last_mut() {
            *last &= tail_mask(len);
        }
        Self { len, bytes }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = Self::empty();
        for b in bits {
            out.push(b);
        }
        out
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Decode(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bools)
    }

    /// Parses `len.div_ceil(4)` hex digits, most significant nibble first.
    pub fn from_hex(s: &str, len: usize) -> Result<Self> {
        let digits = len.div_ceil(4);
        if s.len() != digits {
            return Err(Error::InvalidLength {
                expected: len,
                actual: s.len() * 4,
            });
        }
        let mut padded = s.to_owned();
        if padded.len() % 2 == 1 {
            padded.push('0');
        }
        let bytes = hex::decode(&padded).map_err(|e| Error::Decode(e.to_string()))?;
        let bits = Self::from_prefix(bytes.clone(), len);
        if bits.bytes != bytes[..bits.bytes.len()] {
            return Err(Error::Decode("non-zero padding bits in hex".into()));
        }
        Ok(bits)
    }

    pub fn to_hex(&self) -> String {
        let mut s = hex::encode(&self.bytes);
        s.truncate(self.len.div_ceil(4));
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.bytes[i / 8] >> (7 - i % 8) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u8 << (7 - i % 8);
        if value {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bytes.iter().all(|&b| b == 0)
    }

    pub fn slice(&self, range: Range<usize>) -> Bits {
        assert!(
            range.start <= range.end && range.end <= self.len,
            "slice {range:?} out of range {}",
            self.len
        );
        if range.start.is_multiple_of(8) {
            return Self::from_prefix(self.bytes[range.start / 8..].to_vec(), range.len());
        }
        Self::from_bools(range.map(|i| self.get(i)))
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        if self.len.is_multiple_of(8) {
            let mut bytes = self.bytes.clone();
            bytes.extend_from_slice(&other.bytes);
            return Bits {
                len: self.len + other.len,
                bytes,
            };
        }
        let mut out = self.clone();
        for b in other.iter() {
            out.push(b);
        }
        out
    }

    pub fn xor(&self, other: &Bits) -> Result<Bits> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &Bits) -> Result<()> {
        check_len(self.len, other.len)?;
        for (a, b) in self.bytes.iter_mut().zip(&other.bytes) {
            *a ^= b;
        }
        Ok(())
    }

    /// Zero-extends to `len` bits.
    pub fn pad_to(&self, len: usize) -> Result<Bits> {
        if len < self.len {
            return Err(Error::InvalidLength {
                expected: len,
                actual: self.len,
            });
        }
        Ok(self.concat(&Bits::zeros(len - self.len)))
    }
}

fn tail_mask(len: usize) -> u8 {
    match len % 8 {
        0 => 0xff,
        r => 0xffu8 << (8 - r),
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 32 {
            let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
            write!(f, "Bits({s})")
        } else {
            write!(f, "Bits({}:{})", self.len, self.to_hex())
        }
    }
}

/// Text form used by the JSON mirror: `<len>:<hex>`.
impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (len, hex) = s
            .split_once(':')
            .ok_or_else(|| Error::Decode(format!("expected <len>:<hex>, got {s:?}")))?;
        let len = len
            .parse()
            .map_err(|_| Error::Decode(format!("bad bit length {len:?}")))?;
        Self::from_hex(hex, len)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}:{}", self.len, self.to_hex()))
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Bits {
        Bits::from_bit_str(s).unwrap()
    }

    #[test]
    fn bit_string_round_trip() {
        let x = b("1011010011");
        assert_eq!(x.len(), 10);
        assert_eq!(format!("{x:?}"), "Bits(1011010011)");
        assert_eq!(x.as_bytes(), &[0b1011_0100, 0b1100_0000]);
    }

    #[test]
    fn hex_uses_ceil_nibbles() {
        let x = b("101101");
        assert_eq!(x.to_hex(), "b4");
        assert_eq!(Bits::from_hex("b4", 6).unwrap(), x);
        assert!(Bits::from_hex("b5", 6).is_err());
        assert_eq!(b("1100").to_hex(), "c");
        assert_eq!(Bits::from_hex("c", 4).unwrap(), b("1100"));
    }

    #[test]
    fn unaligned_slice_and_concat() {
        let x = b("10110100111");
        assert_eq!(x.slice(3..9), b("101001"));
        assert_eq!(x.slice(0..8), b("10110100"));
        assert_eq!(b("101").concat(&b("0011")), b("1010011"));
        assert_eq!(b("10101010").concat(&b("11")), b("1010101011"));
    }

    #[test]
    fn xor_checks_lengths() {
        assert_eq!(b("1010").xor(&b("0110")).unwrap(), b("1100"));
        assert_eq!(
            b("1010").xor(&b("011")),
            Err(Error::InvalidLength { expected: 4, actual: 3 })
        );
    }

    #[test]
    fn json_text_form() {
        let x = b("1011010011");
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"10:b4c\"");
        assert_eq!(serde_json::from_str::<Bits>(&json).unwrap(), x);
    }
}
