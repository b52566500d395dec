use serde::{Deserialize, Serialize};

use super::codec::{Header, Reader, SketchKind};
use crate::error::{Error, Result};
use crate::hasher::KeyHasher;
use crate::params::{low_mask, Key};

/// Minimum of one coordinate: the replicated key with the smallest local
/// hash in its bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MinEntry {
    pub local: u64,
    /// Replicated key: the original key shifted up one character with the
    /// replica index in character 0.
    pub replicated: Key,
    pub hash: u64,
}

/// One-permutation style vector sample of `k` coordinates.
///
/// Each key `x` is replicated `J` times as `(j, x)` for `j = 0..J`, using
/// character 0 for the index, so the hasher must have one more character
/// than the original keys use. The top `log2 k` hash bits choose a
/// coordinate and each coordinate keeps the replicated key with the
/// smallest remaining bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorKSample {
    log2_k: u32,
    range_bits: u32,
    char_bits: u32,
    fingerprint: u64,
    replication: u32,
    slots: Vec<Option<MinEntry>>,
}

/// Replication count `J = ceil(max(n, k ln(k/P)) / n)` with `J >= 1`.
pub fn replication_for(n: usize, k: usize, target_error: f64) -> Result<u32> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if !(target_error > 0.0 && target_error < 1.0) {
        return Err(Error::Domain("target error probability must lie in (0, 1)".into()));
    }
    let need = (n as f64).max(k as f64 * (k as f64 / target_error).ln());
    Ok(((need / n as f64).ceil() as u32).max(1))
}

impl VectorKSample {
    pub fn empty<H: KeyHasher>(k: usize, hasher: &H, replication: u32) -> Result<Self> {
        if !k.is_power_of_two() {
            return Err(Error::InvalidParams("k must be a power of two".into()));
        }
        let p = hasher.params();
        let log2_k = k.trailing_zeros();
        if log2_k >= p.range_bits {
            return Err(Error::InvalidParams("k leaves no local hash bits".into()));
        }
        if p.c < 2 {
            return Err(Error::InvalidParams("the hasher needs a spare character for the replica index".into()));
        }
        if replication == 0 || u128::from(replication) > p.alphabet_size() {
            return Err(Error::InvalidParams("replication must lie in 1..=alphabet size".into()));
        }
        Ok(VectorKSample {
            log2_k,
            range_bits: p.range_bits,
            char_bits: p.char_bits,
            fingerprint: hasher.fingerprint(),
            replication,
            slots: vec![None; k],
        })
    }

    /// Builds with the replication count from [`replication_for`].
    pub fn build<H: KeyHasher>(keys: &[Key], hasher: &H, k: usize, target_error: f64) -> Result<Self> {
        let j = replication_for(keys.len(), k, target_error)?;
        Self::build_with_replication(keys, hasher, k, j)
    }

    pub fn build_with_replication<H: KeyHasher>(keys: &[Key], hasher: &H, k: usize, replication: u32) -> Result<Self> {
        let mut s = Self::empty(k, hasher, replication)?;
        for &key in keys {
            s.insert(hasher, key)?;
        }
        Ok(s)
    }

    pub fn insert<H: KeyHasher>(&mut self, hasher: &H, key: Key) -> Result<()> {
        if hasher.fingerprint() != self.fingerprint {
            return Err(Error::Incompatible("hasher differs from the sample's".into()));
        }
        let key_bits = (hasher.params().c - 1) * self.char_bits;
        if key.0 & !low_mask(key_bits) != 0 {
            return Err(Error::KeyOutOfRange { key: key.0, bits: key_bits });
        }
        let w = self.range_bits - self.log2_k;
        for j in 0..u64::from(self.replication) {
            let replicated = Key(key.0 << self.char_bits | j);
            let hash = hasher.hash_trusted(replicated);
            let bucket = if self.log2_k == 0 { 0 } else { (hash >> w) as usize };
            let entry = MinEntry { local: hash & low_mask(w), replicated, hash };
            match &self.slots[bucket] {
                Some(cur) if *cur <= entry => {}
                _ => self.slots[bucket] = Some(entry),
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.slots.len()
    }

    pub fn replication(&self) -> u32 {
        self.replication
    }

    pub fn slots(&self) -> &[Option<MinEntry>] {
        &self.slots
    }

    /// Original key and replica index of coordinate `i`.
    pub fn min_key(&self, i: usize) -> Option<(Key, u64)> {
        self.slots[i].map(|e| (Key(e.replicated.0 >> self.char_bits), e.replicated.0 & low_mask(self.char_bits)))
    }

    pub fn holes(&self) -> usize {
        self.slots.iter().filter(|s| s.is_none()).count()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.log2_k != other.log2_k
            || self.fingerprint != other.fingerprint
            || self.range_bits != other.range_bits
            || self.replication != other.replication
        {
            return Err(Error::Incompatible("vector samples differ in k, hasher or replication".into()));
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let slots = self
            .slots
            .iter()
            .zip(&other.slots)
            .map(|(a, b)| match (a, b) {
                (Some(x), Some(y)) => Some(*x.min(y)),
                (x, None) => *x,
                (None, y) => *y,
            })
            .collect();
        Ok(VectorKSample { slots, ..self.clone() })
    }

    /// Jaccard similarity estimate: among coordinates that are non-empty in
    /// at least one sample, the fraction where both hold the same key.
    pub fn jaccard(&self, other: &Self) -> Result<f64> {
        self.compatible(other)?;
        let mut used = 0usize;
        let mut same = 0usize;
        for (a, b) in self.slots.iter().zip(&other.slots) {
            match (a, b) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    used += 1;
                    if x.replicated == y.replicated {
                        same += 1;
                    }
                }
                _ => used += 1,
            }
        }
        if used == 0 {
            return Err(Error::EmptySample);
        }
        Ok(same as f64 / used as f64)
    }

    /// `+-1/sqrt(k)` per coordinate, the sign taken from the lowest hash bit
    /// of the coordinate's minimum. Fails if any coordinate is empty.
    pub fn signed_projection(&self) -> Result<Vec<f64>> {
        let holes = self.holes();
        if holes > 0 {
            return Err(Error::Holes(holes));
        }
        let scale = 1.0 / (self.slots.len() as f64).sqrt();
        Ok(self
            .slots
            .iter()
            .map(|s| if s.expect("no holes").hash & 1 == 1 { scale } else { -scale })
            .collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        Header {
            kind: SketchKind::VectorK,
            range_bits: self.range_bits,
            k: self.slots.len() as u32,
            fingerprint: self.fingerprint,
        }
        .write(&mut out);
        out.push(self.char_bits as u8);
        out.extend_from_slice(&self.replication.to_le_bytes());
        for s in &self.slots {
            match s {
                None => out.push(0),
                Some(e) => {
                    out.push(1);
                    out.extend_from_slice(&e.hash.to_le_bytes());
                    out.extend_from_slice(&e.replicated.0.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader::new(buf);
        let h = Header::expect(&mut r, SketchKind::VectorK)?;
        if !h.k.is_power_of_two() || h.k.trailing_zeros() >= h.range_bits {
            return Err(Error::Decode("bad k".into()));
        }
        let log2_k = h.k.trailing_zeros();
        let char_bits = u32::from(r.u8()?);
        if char_bits == 0 || char_bits >= 64 {
            return Err(Error::Decode("bad character width".into()));
        }
        let replication = r.u32()?;
        if replication == 0 {
            return Err(Error::Decode("replication is zero".into()));
        }
        let w = h.range_bits - log2_k;
        let mut slots = Vec::with_capacity(h.k as usize);
        for i in 0..h.k as usize {
            slots.push(match r.u8()? {
                0 => None,
                1 => {
                    let hash = r.u64()?;
                    let replicated = Key(r.u64()?);
                    let bucket = if log2_k == 0 { 0 } else { (hash >> w) as usize };
                    if bucket != i {
                        return Err(Error::Decode("entry stored in the wrong coordinate".into()));
                    }
                    Some(MinEntry { local: hash & low_mask(w), replicated, hash })
                }
                _ => return Err(Error::Decode("bad slot flag".into())),
            });
        }
        r.finish()?;
        Ok(VectorKSample { log2_k, range_bits: h.range_bits, char_bits, fingerprint: h.fingerprint, replication, slots })
    }
}
