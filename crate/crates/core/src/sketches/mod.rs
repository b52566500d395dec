//! Hash-based samples and sketches: threshold samples, bottom-k,
//! k-partition maximum registers and vector-k samples.

pub mod bottomk;
pub mod codec;
pub mod kpm;
pub mod vectork;

pub use bottomk::BottomKSketch;
pub use kpm::KPartitionSketch;
pub use vectork::{replication_for, MinEntry, VectorKSample};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hasher::KeyHasher;
use crate::params::{Dyadic, Key};

/// Keys with `h(x) < p * 2^range_bits`, in input order.
pub fn threshold_sample<H: KeyHasher>(keys: &[Key], hasher: &H, p: Dyadic) -> Result<Vec<Key>> {
    let t = p.scaled_threshold(hasher.params().range_bits)?;
    let mut out = Vec::new();
    for &k in keys {
        if u128::from(hasher.hash(k)?) < t {
            out.push(k);
        }
    }
    Ok(out)
}

/// Fraction of sampled keys satisfying `in_subset`.
pub fn frequency_estimate(sample: &[Key], in_subset: impl Fn(Key) -> bool) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(sample.iter().filter(|&&k| in_subset(k)).count() as f64 / sample.len() as f64)
}

/// Human-readable JSON form of a sketch.
pub fn to_json<T: Serialize>(sketch: &T) -> String {
    serde_json::to_string_pretty(sketch).expect("sketches serialize")
}
