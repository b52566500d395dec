use serde::{Deserialize, Serialize};

use super::codec::{Header, Reader, SketchKind};
use crate::error::{Error, Result};
use crate::hasher::KeyHasher;
use crate::params::{low_mask, Key};

/// k-partition maximum sketch (HyperLogLog registers).
///
/// The top `log2 k` hash bits choose a bucket, the remaining bits form the
/// local hash, and each bucket keeps the largest number of leading zeros
/// of a local hash seen in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KPartitionSketch {
    log2_k: u32,
    range_bits: u32,
    fingerprint: u64,
    /// 0 for an empty bucket, otherwise leading zeros plus one.
    registers: Vec<u8>,
}

impl KPartitionSketch {
    pub fn new<H: KeyHasher>(k: usize, hasher: &H) -> Result<Self> {
        if !k.is_power_of_two() {
            return Err(Error::InvalidParams("k must be a power of two".into()));
        }
        let log2_k = k.trailing_zeros();
        let range_bits = hasher.params().range_bits;
        if log2_k >= range_bits {
            return Err(Error::InvalidParams("k leaves no local hash bits".into()));
        }
        Ok(KPartitionSketch { log2_k, range_bits, fingerprint: hasher.fingerprint(), registers: vec![0; k] })
    }

    pub fn from_keys<H: KeyHasher>(k: usize, hasher: &H, keys: &[Key]) -> Result<Self> {
        let mut s = Self::new(k, hasher)?;
        for &key in keys {
            s.insert_hashed(hasher.hash(key)?);
        }
        Ok(s)
    }

    pub fn insert<H: KeyHasher>(&mut self, hasher: &H, key: Key) -> Result<()> {
        if hasher.fingerprint() != self.fingerprint {
            return Err(Error::Incompatible("hasher differs from the sketch's".into()));
        }
        self.insert_hashed(hasher.hash(key)?);
        Ok(())
    }

    fn local_bits(&self) -> u32 {
        self.range_bits - self.log2_k
    }

    fn insert_hashed(&mut self, hash: u64) {
        let w = self.local_bits();
        let bucket = if self.log2_k == 0 { 0 } else { (hash >> w) as usize };
        let local = hash & low_mask(w);
        let lz = if local == 0 { w } else { local.leading_zeros() - (64 - w) };
        let v = (lz + 1) as u8;
        if v > self.registers[bucket] {
            self.registers[bucket] = v;
        }
    }

    pub fn k(&self) -> usize {
        self.registers.len()
    }

    /// Leading-zero count of bucket `i`, `None` if empty.
    pub fn register(&self, i: usize) -> Option<u32> {
        match self.registers[i] {
            0 => None,
            v => Some(u32::from(v) - 1),
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.log2_k != other.log2_k || self.fingerprint != other.fingerprint || self.range_bits != other.range_bits {
            return Err(Error::Incompatible("k-partition sketches differ in k or hasher".into()));
        }
        let registers = self.registers.iter().zip(&other.registers).map(|(&a, &b)| a.max(b)).collect();
        Ok(KPartitionSketch { registers, ..self.clone() })
    }

    /// Harmonic-mean estimate with linear counting for small cardinalities.
    ///
    /// With `m` buckets, `V` of them empty, and `raw` the harmonic-mean
    /// estimate: if `raw <= 2.5 m` and `V > 0` the result is `m ln(m / V)`,
    /// otherwise it is `max(raw, m ln(m / max(V, 1)))`. Taking the maximum
    /// in the second case keeps the estimate non-decreasing in every
    /// register; it only differs from `raw` right at the switch-over.
    pub fn distinct_estimate(&self) -> f64 {
        let m = self.registers.len() as f64;
        let empty = self.registers.iter().filter(|&&v| v == 0).count();
        if empty == self.registers.len() {
            return 0.0;
        }
        let sum: f64 = self.registers.iter().map(|&v| (-f64::from(v)).exp2()).sum();
        let raw = alpha(self.registers.len()) * m * m / sum;
        let linear = m * (m / empty.max(1) as f64).ln();
        if raw <= 2.5 * m && empty > 0 {
            linear
        } else {
            raw.max(linear)
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        Header {
            kind: SketchKind::KPartition,
            range_bits: self.range_bits,
            k: self.registers.len() as u32,
            fingerprint: self.fingerprint,
        }
        .write(&mut out);
        out.extend_from_slice(&self.registers);
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader::new(buf);
        let h = Header::expect(&mut r, SketchKind::KPartition)?;
        if !h.k.is_power_of_two() || h.k.trailing_zeros() >= h.range_bits {
            return Err(Error::Decode("bad k".into()));
        }
        let log2_k = h.k.trailing_zeros();
        let registers = r.take(h.k as usize)?.to_vec();
        r.finish()?;
        let max = (h.range_bits - log2_k + 1) as u8;
        if registers.iter().any(|&v| v > max) {
            return Err(Error::Decode("register exceeds the local hash width".into()));
        }
        Ok(KPartitionSketch { log2_k, range_bits: h.range_bits, fingerprint: h.fingerprint, registers })
    }
}

/// Bias correction constant; below 16 buckets the large-`m` formula is used.
fn alpha(m: usize) -> f64 {
    match m {
        16 => 0.673,
        32 => 0.697,
        64 => 0.709,
        _ => 0.7213 / (1.0 + 1.079 / m as f64),
    }
}
