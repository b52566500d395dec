use crate::error::{Error, Result};
use crate::hasher::KeyHasher;
use crate::params::{low_mask, HashParams, Key};
use crate::prng::{mix64, stream_key, stream_word, table_id, top_bits, TableRole};

/// Upper limit on table entries held by one hash function.
pub const MAX_TABLE_ENTRIES: u64 = 1 << 26;

pub(crate) fn check_table_budget(positions: u64, char_bits: u32, words_per_entry: u64) -> Result<()> {
    if char_bits > 24 {
        return Err(Error::TooLarge(format!("tables over 2^{char_bits} characters")));
    }
    let entries = positions << char_bits;
    if entries.saturating_mul(words_per_entry) > MAX_TABLE_ENTRIES {
        return Err(Error::TooLarge(format!(
            "{entries} table entries of {words_per_entry} words exceed the budget of {MAX_TABLE_ENTRIES}"
        )));
    }
    Ok(())
}

/// One lookup table per position, each mapping a character to an
/// `out_bits`-bit value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupTables {
    positions: usize,
    char_bits: u32,
    out_bits: u32,
    data: Vec<u64>,
}

impl LookupTables {
    pub fn zeroed(positions: usize, char_bits: u32, out_bits: u32) -> Result<Self> {
        if out_bits == 0 || out_bits > 64 {
            return Err(Error::InvalidParams("out_bits must be in 1..=64".into()));
        }
        check_table_budget(positions as u64, char_bits, 1)?;
        Ok(LookupTables { positions, char_bits, out_bits, data: vec![0; positions << char_bits] })
    }

    /// Tables filled from the streams `table_id(role, function, j)`, one per position `j`.
    pub fn random(
        seed: u64,
        role: TableRole,
        function: u32,
        positions: usize,
        char_bits: u32,
        out_bits: u32,
    ) -> Result<Self> {
        let mut t = Self::zeroed(positions, char_bits, out_bits)?;
        let size = 1usize << char_bits;
        for j in 0..positions {
            let key = stream_key(seed, table_id(role, function, j as u32));
            for (ch, slot) in t.data[j * size..(j + 1) * size].iter_mut().enumerate() {
                *slot = top_bits(stream_word(key, ch as u64), out_bits);
            }
        }
        Ok(t)
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn char_bits(&self) -> u32 {
        self.char_bits
    }

    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    #[inline]
    pub fn get(&self, position: usize, ch: u64) -> u64 {
        self.data[(position << self.char_bits) | ch as usize]
    }

    pub fn set(&mut self, position: usize, ch: u64, value: u64) -> Result<()> {
        if position >= self.positions || ch >> self.char_bits != 0 {
            return Err(Error::InvalidParams(format!("no table entry ({position}, {ch})")));
        }
        if value & !low_mask(self.out_bits) != 0 {
            return Err(Error::InvalidParams(format!("value {value:#x} exceeds {} bits", self.out_bits)));
        }
        self.data[(position << self.char_bits) | ch as usize] = value;
        Ok(())
    }

    /// XOR of `T_j[chars[j]]` over all positions. Characters must be in range.
    #[inline]
    pub fn lookup_xor(&self, chars: &[u64]) -> u64 {
        debug_assert_eq!(chars.len(), self.positions);
        chars.iter().enumerate().fold(0, |acc, (j, &ch)| acc ^ self.get(j, ch))
    }

    pub(crate) fn content_fingerprint(&self) -> u64 {
        self.data.iter().fold(mix64(self.positions as u64 ^ u64::from(self.out_bits) << 32), |acc, &v| {
            mix64(acc ^ v)
        })
    }
}

/// Simple tabulation: `h(x) = T_1[x_1] ^ ... ^ T_c[x_c]`.
#[derive(Debug, Clone)]
pub struct SimpleTabulation {
    params: HashParams,
    tables: LookupTables,
    fingerprint: u64,
}

impl SimpleTabulation {
    pub fn new(seed: u64, params: HashParams) -> Result<Self> {
        params.validate()?;
        let tables = LookupTables::random(
            seed,
            TableRole::Simple,
            0,
            params.c as usize,
            params.char_bits,
            params.range_bits,
        )?;
        let fingerprint = seeded_fingerprint(seed, 1, &params);
        Ok(SimpleTabulation { params, tables, fingerprint })
    }

    /// Uses explicitly given tables, one per key position with `range_bits` outputs.
    pub fn from_tables(params: HashParams, tables: LookupTables) -> Result<Self> {
        params.validate()?;
        if tables.positions() != params.c as usize
            || tables.char_bits() != params.char_bits
            || tables.out_bits() != params.range_bits
        {
            return Err(Error::InvalidParams("table shape does not match the parameters".into()));
        }
        let fingerprint = tables.content_fingerprint();
        Ok(SimpleTabulation { params, tables, fingerprint })
    }

    pub fn tables(&self) -> &LookupTables {
        &self.tables
    }

    /// Hashes a key given as characters.
    pub fn hash_chars(&self, chars: &[u64]) -> Result<u64> {
        if chars.len() != self.params.c as usize {
            return Err(Error::InvalidParams(format!("expected {} characters", self.params.c)));
        }
        for (i, &ch) in chars.iter().enumerate() {
            self.params.check_char(i, ch)?;
        }
        Ok(self.tables.lookup_xor(chars))
    }
}

pub(crate) fn seeded_fingerprint(seed: u64, scheme: u64, params: &HashParams) -> u64 {
    let shape = u64::from(params.c)
        | u64::from(params.d) << 8
        | u64::from(params.char_bits) << 16
        | u64::from(params.range_bits) << 24
        | scheme << 40;
    stream_word(stream_key(seed, 0xF1F1_0000_0000_0000), shape)
}

impl KeyHasher for SimpleTabulation {
    fn params(&self) -> HashParams {
        self.params
    }

    fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    #[inline]
    fn hash_trusted(&self, key: Key) -> u64 {
        let bits = self.params.char_bits;
        let mask = self.params.char_mask();
        let mut h = 0;
        for j in 0..self.params.c as usize {
            h ^= self.tables.get(j, (key.0 >> (j as u32 * bits)) & mask);
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_of_table_entries() {
        let p = HashParams::new(2, 0, 2, 4).unwrap();
        let mut t = LookupTables::zeroed(2, 2, 4).unwrap();
        t.set(0, 1, 0b1010).unwrap();
        t.set(1, 3, 0b0110).unwrap();
        let h = SimpleTabulation::from_tables(p, t).unwrap();
        let k = Key::from_chars(&p, &[1, 3]).unwrap();
        assert_eq!(h.hash(k).unwrap(), 0b1100);
        assert_eq!(h.hash_chars(&[1, 0]).unwrap(), 0b1010);
        assert!(h.hash_chars(&[4, 0]).is_err());
        assert!(h.hash(Key(1 << 4)).is_err());
    }

    #[test]
    fn values_fit_range() {
        let p = HashParams::new(3, 0, 8, 5).unwrap();
        let h = SimpleTabulation::new(11, p).unwrap();
        for k in 0..5000u64 {
            assert!(h.hash(Key(k)).unwrap() < 32);
        }
    }

    #[test]
    fn table_budget_guard() {
        assert!(matches!(LookupTables::zeroed(2, 25, 8), Err(Error::TooLarge(_))));
        assert!(matches!(LookupTables::zeroed(8, 24, 8), Err(Error::TooLarge(_))));
        assert!(LookupTables::zeroed(2, 16, 64).is_ok());
    }

    #[test]
    fn bad_table_writes() {
        let mut t = LookupTables::zeroed(1, 2, 3).unwrap();
        assert!(t.set(1, 0, 0).is_err());
        assert!(t.set(0, 4, 0).is_err());
        assert!(t.set(0, 0, 8).is_err());
    }
}
