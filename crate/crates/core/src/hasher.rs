use crate::error::Result;
use crate::params::{HashParams, Key};

/// A seeded hash function from packed keys to `range_bits`-bit values.
pub trait KeyHasher: Send + Sync {
    fn params(&self) -> HashParams;

    /// Identifies the function. Two hashers with equal fingerprints compute
    /// the same function; sketches built with different fingerprints cannot
    /// be merged.
    fn fingerprint(&self) -> u64;

    /// Hash of a key already known to fit `params().key_bits()` bits.
    fn hash_trusted(&self, key: Key) -> u64;

    fn hash(&self, key: Key) -> Result<u64> {
        self.params().check_key(key)?;
        Ok(self.hash_trusted(key))
    }
}

impl<H: KeyHasher + ?Sized> KeyHasher for &H {
    fn params(&self) -> HashParams {
        (**self).params()
    }

    fn fingerprint(&self) -> u64 {
        (**self).fingerprint()
    }

    fn hash_trusted(&self, key: Key) -> u64 {
        (**self).hash_trusted(key)
    }
}

/// Checks that every key fits the hasher's key width.
pub fn check_keys(params: &HashParams, keys: &[Key]) -> Result<()> {
    keys.iter().try_for_each(|&k| params.check_key(k))
}
