//! Canonical binary encoding.
//!
//! Integers are big-endian `u32`. A bitstring is its bit length followed by
//! the packed bytes. A [`BotValue`] is a tag byte (`0x00` = ⊥, `0x01` = bits)
//! followed, for bits, by the bitstring. Composite values are sequences of
//! length-prefixed fields in declaration order.

use crate::bits::Bits;
use crate::bot_core::BotValue;
use crate::error::{Error, Result};

#[derive(Default, Debug)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn put_u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn put_len(&mut self, v: usize) {
        self.put_u32(u32::try_from(v).expect("length exceeds u32"));
    }

    pub fn put_raw(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    pub fn put_bytes(&mut self, bytes: &[u8]) {
        self.put_len(bytes.len());
        self.put_raw(bytes);
    }

    pub fn put_bits(&mut self, bits: &Bits) {
        self.put_len(bits.len());
        self.put_raw(bits.as_bytes());
    }

    /// Writes `value` as a length-prefixed field.
    pub fn put<T: Encode + ?Sized>(&mut self, value: &T) {
        self.put_bytes(&value.to_bytes());
    }

    pub fn put_seq<T: Encode>(&mut self, items: &[T]) {
        self.put_len(items.len());
        for item in items {
            self.put(item);
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

#[derive(Debug)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn raw(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.buf.len())
            .ok_or_else(|| Error::Decode(format!("truncated input at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.raw(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        let b = self.raw(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn len(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.len()?;
        self.raw(n)
    }

    pub fn bits(&mut self) -> Result<Bits> {
        let len = self.len()?;
        let bytes = self.raw(len.div_ceil(8))?.to_vec();
        let bits = Bits::from_bytes(bytes.clone(), len)?;
        if bits.as_bytes() != bytes.as_slice() {
            return Err(Error::Decode("non-zero padding bits".into()));
        }
        Ok(bits)
    }

    /// Reads a length-prefixed field and decodes it completely.
    pub fn get<T: Decode>(&mut self) -> Result<T> {
        T::from_bytes(self.bytes()?)
    }

    pub fn get_seq<T: Decode>(&mut self) -> Result<Vec<T>> {
        let n = self.len()?;
        // Every field costs at least its 4-byte prefix.
        if n > self.remaining() / 4 {
            return Err(Error::Decode(format!("implausible sequence length {n}")));
        }
        (0..n).map(|_| self.get()).collect()
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn finish(&self) -> Result<()> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(Error::Decode(format!("{n} trailing bytes"))),
        }
    }
}

pub trait Encode {
    fn encode(&self, w: &mut Writer);

    fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode(&mut w);
        w.into_bytes()
    }
}

pub trait Decode: Sized {
    fn decode(r: &mut Reader<'_>) -> Result<Self>;

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let v = Self::decode(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

impl Encode for Bits {
    fn encode(&self, w: &mut Writer) {
        w.put_bits(self);
    }
}

impl Decode for Bits {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.bits()
    }
}

const TAG_BOT: u8 = 0x00;
const TAG_BITS: u8 = 0x01;

impl Encode for BotValue {
    fn encode(&self, w: &mut Writer) {
        match self {
            BotValue::Bot => w.put_u8(TAG_BOT),
            BotValue::Bits(b) => {
                w.put_u8(TAG_BITS);
                w.put_bits(b);
            }
        }
    }
}

impl Decode for BotValue {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            TAG_BOT => Ok(BotValue::Bot),
            TAG_BITS => Ok(BotValue::Bits(r.bits()?)),
            t => Err(Error::Decode(format!("unknown value tag {t:#04x}"))),
        }
    }
}

impl<T: Encode> Encode for Vec<T> {
    fn encode(&self, w: &mut Writer) {
        w.put_seq(self);
    }
}

impl<T: Decode> Decode for Vec<T> {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.get_seq()
    }
}

impl<T: Encode> Encode for [T; 2] {
    fn encode(&self, w: &mut Writer) {
        w.put(&self[0]);
        w.put(&self[1]);
    }
}

impl<T: Decode> Decode for [T; 2] {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok([r.get()?, r.get()?])
    }
}

impl<T: Encode> Encode for Option<T> {
    fn encode(&self, w: &mut Writer) {
        match self {
            None => w.put_u8(0),
            Some(v) => {
                w.put_u8(1);
                w.put(v);
            }
        }
    }
}

impl<T: Decode> Decode for Option<T> {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            0 => Ok(None),
            1 => Ok(Some(r.get()?)),
            t => Err(Error::Decode(format!("unknown option tag {t:#04x}"))),
        }
    }
}

impl Encode for usize {
    fn encode(&self, w: &mut Writer) {
        w.put_len(*self);
    }
}

impl Decode for usize {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.len()
    }
}
