//! Keyed extendable-output hashing (BLAKE3) with domain separation.

use std::ops::Range;

use crate::bits::Bits;

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct Expander {
    key: [u8; 32],
}

impl Expander {
    pub fn new(context: &str, master_seed: &[u8]) -> Self {
        Self {
            key: blake3::derive_key(context, master_seed),
        }
    }

    fn reader(&self, domain: u8, parts: &[&Bits]) -> blake3::OutputReader {
        let mut h = blake3::Hasher::new_keyed(&self.key);
        h.update(&[domain]);
        for p in parts {
            h.update(&(p.len() as u64).to_be_bytes());
            h.update(p.as_bytes());
        }
        h.finalize_xof()
    }

    pub fn bits(&self, domain: u8, parts: &[&Bits], out_len: usize) -> Bits {
        self.window(domain, parts, 0..out_len)
    }

    /// Output bits `range` of [`bits`](Self::bits), without computing the
    /// rest.
    pub fn window(&self, domain: u8, parts: &[&Bits], range: Range<usize>) -> Bits {
        read_window(&mut self.reader(domain, parts), 0, range)
    }

    /// Two independent 64-bit words.
    pub fn words(&self, domain: u8, parts: &[&Bits]) -> [u64; 2] {
        words_from(&mut self.reader(domain, parts))
    }

    /// The same two words followed by `out_len` further output bits, from a
    /// single hash invocation.
    pub fn words_and_bits(&self, domain: u8, parts: &[&Bits], out_len: usize) -> ([u64; 2], Bits) {
        self.words_and_window(domain, parts, 0..out_len)
    }

    /// The two words and bits `range` of what follows them.
    pub fn words_and_window(&self, domain: u8, parts: &[&Bits], range: Range<usize>) -> ([u64; 2], Bits) {
        let mut reader = self.reader(domain, parts);
        let words = words_from(&mut reader);
        (words, read_window(&mut reader, 16, range))
    }
}

/// Bits `range` of the stream starting at byte `base`.
fn read_window(reader: &mut blake3::OutputReader, base: u64, range: Range<usize>) -> Bits {
    let skip = range.start % 8;
    let len = range.len();
    reader.set_position(base + (range.start / 8) as u64);
    let mut out = vec![0u8; (skip + len).div_ceil(8)];
    reader.fill(&mut out);
    let bits = Bits::from_prefix(out, skip + len);
    if skip == 0 {
        bits
    } else {
        bits.slice(skip..skip + len)
    }
}

fn words_from(reader: &mut blake3::OutputReader) -> [u64; 2] {
    let mut out = [0u8; 16];
    reader.fill(&mut out);
    let (a, b) = out.split_at(8);
    [
        u64::from_be_bytes(a.try_into().unwrap()),
        u64::from_be_bytes(b.try_into().unwrap()),
    ]
}

/// Maps a uniform word to `[0, 1)` with 53 bits of precision.
pub(crate) fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 / (1u64 << 53) as f64
}
