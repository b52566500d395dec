//! Binary sketch encoding.
//!
//! Every sketch starts with a 20-byte header: the magic `TTSK`, a format
//! version byte, a sketch kind byte, the hash range width in bits, a zero
//! byte, `k` as a little-endian `u32` and the hasher fingerprint as a
//! little-endian `u64`. The kind-specific payload follows.

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"TTSK";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum SketchKind {
    BottomK = 1,
    KPartition = 2,
    VectorK = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub kind: SketchKind,
    pub range_bits: u32,
    pub k: u32,
    pub fingerprint: u64,
}

impl Header {
    pub fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.kind as u8);
        out.push(self.range_bits as u8);
        out.push(0);
        out.extend_from_slice(&self.k.to_le_bytes());
        out.extend_from_slice(&self.fingerprint.to_le_bytes());
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Header> {
        if r.take(4)? != MAGIC {
            return Err(Error::Decode("bad magic".into()));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::Decode(format!("unsupported version {version}")));
        }
        let kind = match r.u8()? {
            1 => SketchKind::BottomK,
            2 => SketchKind::KPartition,
            3 => SketchKind::VectorK,
            other => return Err(Error::Decode(format!("unknown sketch kind {other}"))),
        };
        let range_bits = u32::from(r.u8()?);
        if range_bits == 0 || range_bits > 64 {
            return Err(Error::Decode(format!("bad range width {range_bits}")));
        }
        r.u8()?;
        let k = r.u32()?;
        let fingerprint = r.u64()?;
        Ok(Header { kind, range_bits, k, fingerprint })
    }

    pub fn expect(r: &mut Reader<'_>, kind: SketchKind) -> Result<Header> {
        let h = Self::read(r)?;
        if h.kind != kind {
            return Err(Error::Decode(format!("expected a {kind:?} sketch, found {:?}", h.kind)));
        }
        Ok(h)
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Decode("truncated input".into()));
        }
        let (a, b) = self.buf.split_at(n);
        self.buf = b;
        Ok(a)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub fn finish(self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::Decode(format!("{} trailing bytes", self.buf.len())))
        }
    }
}
