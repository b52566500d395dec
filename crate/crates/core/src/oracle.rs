use crate::error::Result;
use crate::hasher::KeyHasher;
use crate::params::{HashParams, Key};
use crate::prng::{stream_key, stream_word, table_id, top_bits, TableRole};
use crate::simple::seeded_fingerprint;

/// Idealized fully random hash function, used as a baseline.
///
/// The value of a key is a keyed pseudorandom function of `(seed, key)`
/// rather than a lazily filled memo table, so repeated calls agree without
/// any shared mutable state and the oracle can be used from many threads.
#[derive(Debug, Clone)]
pub struct RandomOracle {
    params: HashParams,
    key: u64,
    fingerprint: u64,
}

impl RandomOracle {
    pub fn new(seed: u64, params: HashParams) -> Result<Self> {
        params.validate()?;
        Ok(RandomOracle {
            params,
            key: stream_key(seed, table_id(TableRole::Oracle, 0, 0)),
            fingerprint: seeded_fingerprint(seed, 3, &params),
        })
    }
}

impl KeyHasher for RandomOracle {
    fn params(&self) -> HashParams {
        self.params
    }

    fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    #[inline]
    fn hash_trusted(&self, key: Key) -> u64 {
        top_bits(stream_word(self.key, key.0), self.params.range_bits)
    }
}
