use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of derived characters.
pub const MAX_DERIVED: u32 = 30;

/// Shape of a tabulation hash function.
///
/// Keys are `c` characters of `char_bits` bits each, packed little-endian
/// into a `u64` (character 0 occupies the low bits). Hash values have
/// `range_bits` bits. `d` is the number of derived characters appended by
/// tornado tabulation; simple tabulation ignores it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HashParams {
    pub c: u32,
    pub d: u32,
    pub char_bits: u32,
    pub range_bits: u32,
}

impl HashParams {
    pub fn new(c: u32, d: u32, char_bits: u32, range_bits: u32) -> Result<Self> {
        let p = HashParams { c, d, char_bits, range_bits };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c == 0 {
            return Err(Error::InvalidParams("c must be at least 1".into()));
        }
        if self.char_bits == 0 {
            return Err(Error::InvalidParams("char_bits must be at least 1".into()));
        }
        if u64::from(self.c) * u64::from(self.char_bits) > 64 {
            return Err(Error::InvalidParams(format!(
                "c * char_bits = {} exceeds 64",
                u64::from(self.c) * u64::from(self.char_bits)
            )));
        }
        if self.range_bits == 0 || self.range_bits > 64 {
            return Err(Error::InvalidParams("range_bits must be in 1..=64".into()));
        }
        if self.d > MAX_DERIVED {
            return Err(Error::InvalidParams(format!("d must be at most {MAX_DERIVED}")));
        }
        Ok(())
    }

    /// Number of bits of a packed key.
    pub fn key_bits(&self) -> u32 {
        self.c * self.char_bits
    }

    /// Length of a derived key, `c + d`.
    pub fn derived_len(&self) -> usize {
        (self.c + self.d) as usize
    }

    /// Alphabet size `2^char_bits` as a `u128` so that `char_bits = 64` is representable.
    pub fn alphabet_size(&self) -> u128 {
        1u128 << self.char_bits
    }

    pub fn char_mask(&self) -> u64 {
        low_mask(self.char_bits)
    }

    pub fn range_mask(&self) -> u64 {
        low_mask(self.range_bits)
    }

    pub fn key_mask(&self) -> u64 {
        low_mask(self.key_bits())
    }

    pub fn check_key(&self, key: Key) -> Result<()> {
        if key.0 & !self.key_mask() != 0 {
            return Err(Error::KeyOutOfRange { key: key.0, bits: self.key_bits() });
        }
        Ok(())
    }

    pub fn check_char(&self, position: usize, value: u64) -> Result<()> {
        if value & !self.char_mask() != 0 {
            return Err(Error::CharOutOfRange { position, value, char_bits: self.char_bits });
        }
        Ok(())
    }
}

pub(crate) fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A key of `c` characters in packed little-endian form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Key(pub u64);

impl Key {
    pub fn from_chars(params: &HashParams, chars: &[u64]) -> Result<Key> {
        if chars.len() != params.c as usize {
            return Err(Error::InvalidParams(format!(
                "expected {} characters, got {}",
                params.c,
                chars.len()
            )));
        }
        let mut packed = 0u64;
        for (i, &ch) in chars.iter().enumerate() {
            params.check_char(i, ch)?;
            packed |= ch << (i as u32 * params.char_bits);
        }
        Ok(Key(packed))
    }

    /// Character `i` (0-based) of the key.
    pub fn char_at(self, params: &HashParams, i: usize) -> u64 {
        (self.0 >> (i as u32 * params.char_bits)) & params.char_mask()
    }

    pub fn chars(self, params: &HashParams) -> Vec<u64> {
        (0..params.c as usize).map(|i| self.char_at(params, i)).collect()
    }
}

/// The `c + d` characters produced by tornado derivation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DerivedKey(pub Vec<u64>);

impl DerivedKey {
    pub fn chars(&self) -> &[u64] {
        &self.0
    }

    pub fn last(&self) -> u64 {
        *self.0.last().expect("derived keys are never empty")
    }

    /// The first `len` characters.
    pub fn prefix(&self, len: usize) -> &[u64] {
        &self.0[..len]
    }
}

/// An exact non-negative dyadic rational `num / 2^log2_den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    pub num: u64,
    pub log2_den: u32,
}

impl Dyadic {
    pub fn new(num: u64, log2_den: u32) -> Result<Self> {
        if log2_den > 64 {
            return Err(Error::InvalidParams("denominator exponent above 64".into()));
        }
        Ok(Dyadic { num, log2_den }.reduced())
    }

    pub fn reduced(self) -> Self {
        let mut d = self;
        while d.log2_den > 0 && d.num & 1 == 0 {
            d.num >>= 1;
            d.log2_den -= 1;
        }
        if d.num == 0 {
            d.log2_den = 0;
        }
        d
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.log2_den as i32)
    }

    /// Interprets a probability as a count of values below `p * 2^range_bits`.
    /// Fails if `p > 1` or `p` is not a multiple of `2^-range_bits`.
    pub fn scaled_threshold(&self, range_bits: u32) -> Result<u128> {
        let d = self.reduced();
        if d.log2_den > range_bits {
            return Err(Error::Domain(format!(
                "probability {}/2^{} is not a multiple of 2^-{range_bits}",
                d.num, d.log2_den
            )));
        }
        let t = u128::from(d.num) << (range_bits - d.log2_den);
        if t > 1u128 << range_bits {
            return Err(Error::Domain("probability above 1".into()));
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_is_little_endian() {
        let p = HashParams::new(4, 0, 16, 64).unwrap();
        let k = Key::from_chars(&p, &[1, 2, 3, 4]).unwrap();
        assert_eq!(k.0, 0x0004_0003_0002_0001);
        assert_eq!(k.chars(&p), vec![1, 2, 3, 4]);
    }

    #[test]
    fn out_of_range_characters_rejected() {
        let p = HashParams::new(2, 0, 4, 8).unwrap();
        assert!(matches!(
            Key::from_chars(&p, &[3, 16]),
            Err(Error::CharOutOfRange { position: 1, value: 16, .. })
        ));
        assert!(p.check_key(Key(0x100)).is_err());
        assert!(p.check_key(Key(0xff)).is_ok());
    }

    #[test]
    fn invalid_shapes() {
        assert!(HashParams::new(0, 1, 8, 8).is_err());
        assert!(HashParams::new(5, 1, 16, 8).is_err());
        assert!(HashParams::new(1, 1, 8, 0).is_err());
        assert!(HashParams::new(1, 31, 8, 8).is_err());
        assert!(HashParams::new(1, 0, 64, 64).is_ok());
    }

    #[test]
    fn dyadic_threshold() {
        let p = Dyadic::new(2, 4).unwrap();
        assert_eq!(p, Dyadic { num: 1, log2_den: 3 });
        assert_eq!(p.scaled_threshold(8).unwrap(), 32);
        assert!(p.scaled_threshold(2).is_err());
        assert_eq!(Dyadic::new(1, 0).unwrap().scaled_threshold(64).unwrap(), 1u128 << 64);
        assert!(Dyadic::new(3, 1).unwrap().scaled_threshold(8).is_err());
    }
}
