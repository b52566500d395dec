//! Tabulation hashing with tornado derivation, and the tools to study it:
//! selection of keys by hash value, the layer structure of selected sets,
//! linear independence of keys over GF(2), closed-form tail bounds, and
//! hash-based sketches.

pub mod bounds;
pub mod error;
pub mod gf2;
pub mod hasher;
pub mod oracle;
pub mod params;
pub mod prng;
pub mod selection;
pub mod simple;
pub mod sketches;
pub mod tornado;

pub use error::{Error, Result};
pub use hasher::KeyHasher;
pub use oracle::RandomOracle;
pub use params::{DerivedKey, Dyadic, HashParams, Key};
pub use simple::{LookupTables, SimpleTabulation};
pub use tornado::TornadoHasher;
