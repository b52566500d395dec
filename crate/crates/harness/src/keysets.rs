//! Fixed key sets for experiments.

use std::collections::HashSet;

use tornado_core::prng::stream_word;
use tornado_core::{HashParams, Key};

use crate::config::{ConfigError, KeyGen};

/// `n` distinct keys that fit in `key_bits` bits.
pub fn generate(gen: KeyGen, n: u64, key_bits: u32, char_bits: u32, seed: u64) -> Result<Vec<Key>, ConfigError> {
    let space = if key_bits >= 64 { u64::MAX } else { 1u64 << key_bits };
    if key_bits < 64 && n > space {
        return Err(ConfigError(format!("{n} distinct keys do not fit in {key_bits} bits")));
    }
    let mask = if key_bits >= 64 { u64::MAX } else { space - 1 };
    match gen {
        KeyGen::Sequential => Ok((0..n).map(Key).collect()),
        KeyGen::Random if key_bits < 64 && n > space / 2 => {
            // Dense: partial Fisher-Yates over the whole space.
            let mut all: Vec<u64> = (0..space).collect();
            for i in 0..n {
                let j = i + stream_word(seed, i) % (space - i);
                all.swap(i as usize, j as usize);
            }
            Ok(all[..n as usize].iter().map(|&k| Key(k)).collect())
        }
        KeyGen::Random => {
            let mut seen = HashSet::with_capacity(n as usize);
            let mut out = Vec::with_capacity(n as usize);
            let mut i = 0;
            while (out.len() as u64) < n {
                let k = stream_word(seed, i) & mask;
                i += 1;
                if seen.insert(k) {
                    out.push(Key(k));
                }
            }
            Ok(out)
        }
        KeyGen::AdversarialPrefix => {
            if key_bits <= char_bits {
                return Ok((0..n).map(Key).collect());
            }
            let alphabet = 1u64 << char_bits;
            let side = ((n as f64).sqrt().ceil() as u64).clamp(1, alphabet);
            if n.div_ceil(side) > alphabet {
                return Err(ConfigError(format!("{n} keys do not fit in a two-character grid")));
            }
            let high = mask & !((1u64 << (2 * char_bits).min(63)) - 1);
            Ok((0..n).map(|i| Key(high | ((i / side) << char_bits) | (i % side))).collect())
        }
    }
}

/// Key set of a run for keys that use every character of `params`.
pub fn for_params(gen: KeyGen, n: u64, params: &HashParams, seed: u64) -> Result<Vec<Key>, ConfigError> {
    generate(gen, n, params.key_bits(), params.char_bits, seed)
}
