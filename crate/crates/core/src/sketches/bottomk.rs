use serde::{Deserialize, Serialize};

use super::codec::{Header, Reader, SketchKind};
use crate::error::{Error, Result};
use crate::hasher::KeyHasher;
use crate::params::Key;

/// The `k` keys with the smallest hash values, ordered by `(hash, key)`,
/// plus the `(k+1)`-st smallest pair as the threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottomKSketch {
    k: usize,
    range_bits: u32,
    fingerprint: u64,
    /// Up to `k + 1` smallest `(hash, key)` pairs, strictly increasing.
    retained: Vec<(u64, Key)>,
}

impl BottomKSketch {
    pub fn new<H: KeyHasher>(k: usize, hasher: &H) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        Ok(BottomKSketch {
            k,
            range_bits: hasher.params().range_bits,
            fingerprint: hasher.fingerprint(),
            retained: Vec::with_capacity(k + 1),
        })
    }

    pub fn from_keys<H: KeyHasher>(k: usize, hasher: &H, keys: &[Key]) -> Result<Self> {
        let mut s = Self::new(k, hasher)?;
        for &key in keys {
            s.insert_hashed(hasher.hash(key)?, key);
        }
        Ok(s)
    }

    pub fn insert<H: KeyHasher>(&mut self, hasher: &H, key: Key) -> Result<()> {
        if hasher.fingerprint() != self.fingerprint {
            return Err(Error::Incompatible("hasher differs from the sketch's".into()));
        }
        self.insert_hashed(hasher.hash(key)?, key);
        Ok(())
    }

    fn insert_hashed(&mut self, hash: u64, key: Key) {
        let item = (hash, key);
        if self.retained.len() > self.k && item >= self.retained[self.k] {
            return;
        }
        if let Err(pos) = self.retained.binary_search(&item) {
            self.retained.insert(pos, item);
            self.retained.truncate(self.k + 1);
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// The sampled `(hash, key)` pairs.
    pub fn entries(&self) -> &[(u64, Key)] {
        &self.retained[..self.retained.len().min(self.k)]
    }

    pub fn keys(&self) -> Vec<Key> {
        self.entries().iter().map(|&(_, k)| k).collect()
    }

    /// The `(k+1)`-st smallest hash, absent when at most `k` keys were seen.
    pub fn threshold(&self) -> Option<u64> {
        self.retained.get(self.k).map(|&(h, _)| h)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.k != other.k || self.fingerprint != other.fingerprint || self.range_bits != other.range_bits {
            return Err(Error::Incompatible("bottom-k sketches differ in k or hasher".into()));
        }
        let mut out = self.clone();
        for &(h, key) in &other.retained {
            out.insert_hashed(h, key);
        }
        Ok(out)
    }

    /// `k / (h_(k+1) / 2^range_bits)`, or the exact count when at most `k`
    /// keys were seen.
    pub fn distinct_estimate(&self) -> f64 {
        match self.threshold() {
            None => self.retained.len() as f64,
            Some(t) => {
                let frac = t as f64 / 2f64.powi(self.range_bits as i32);
                self.k as f64 / frac
            }
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        Header {
            kind: SketchKind::BottomK,
            range_bits: self.range_bits,
            k: self.k as u32,
            fingerprint: self.fingerprint,
        }
        .write(&mut out);
        out.extend_from_slice(&(self.retained.len() as u32).to_le_bytes());
        for &(h, k) in &self.retained {
            out.extend_from_slice(&h.to_le_bytes());
            out.extend_from_slice(&k.0.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader::new(buf);
        let h = Header::expect(&mut r, SketchKind::BottomK)?;
        if h.k == 0 {
            return Err(Error::Decode("k is zero".into()));
        }
        let n = r.u32()? as usize;
        if n > h.k as usize + 1 {
            return Err(Error::Decode("too many entries".into()));
        }
        let mut retained = Vec::with_capacity(n);
        for _ in 0..n {
            let hash = r.u64()?;
            let key = Key(r.u64()?);
            retained.push((hash, key));
        }
        r.finish()?;
        if retained.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Decode("entries are not strictly increasing".into()));
        }
        Ok(BottomKSketch { k: h.k as usize, range_bits: h.range_bits, fingerprint: h.fingerprint, retained })
    }
}
