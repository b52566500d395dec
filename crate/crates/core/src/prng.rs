//! Counter-mode random words used to fill lookup tables.
//!
//! Every table is an independent SplitMix64 stream. The stream for table
//! `id` under seed `s` starts from `stream_key(s, id)`, and entry `i` of the
//! table is the `(i + 1)`-th SplitMix64 output of that state, computed
//! directly as `mix64(key + (i + 1) * GAMMA)`. Entries can therefore be
//! produced in any order and any single entry can be recomputed in O(1).

/// SplitMix64 increment.
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Starting state of stream `id` under `seed`.
#[inline]
pub fn stream_key(seed: u64, id: u64) -> u64 {
    mix64(seed ^ mix64(id.wrapping_add(GAMMA)))
}

/// Word `index` of the stream whose starting state is `key`.
#[inline]
pub fn stream_word(key: u64, index: u64) -> u64 {
    mix64(key.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// The top `bits` bits of a word.
#[inline]
pub fn top_bits(word: u64, bits: u32) -> u64 {
    match bits {
        0 => 0,
        64.. => word,
        b => word >> (64 - b),
    }
}

/// What a lookup table is used for. Part of the table id, so tables with
/// different roles never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum TableRole {
    /// Table of a standalone simple tabulation function.
    Simple = 1,
    /// Table of the function XORed into the last original character.
    Twist = 2,
    /// Table of the function producing a derived character.
    Derive = 3,
    /// Table of the final simple tabulation over the derived key.
    Top = 4,
    /// Stream of a keyed random oracle.
    Oracle = 5,
    /// Resampled final table used when conditioning on everything else.
    Resample = 6,
}

/// Stream id of table `position` of function `function` with the given role.
pub fn table_id(role: TableRole, function: u32, position: u32) -> u64 {
    ((role as u64) << 48) | (u64::from(function) << 24) | u64::from(position)
}

/// Entry `index` of a table, reduced to `bits` bits.
#[inline]
pub fn table_value(seed: u64, role: TableRole, function: u32, position: u32, index: u64, bits: u32) -> u64 {
    top_bits(stream_word(stream_key(seed, table_id(role, function, position)), index), bits)
}

/// Seed for trial `trial` of experiment `experiment` under `master`.
pub fn derive_seed(master: u64, experiment: u64, trial: u64) -> u64 {
    stream_word(stream_key(master, experiment ^ 0x5EED_0000_0000_0000), trial)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_outputs() {
        // First outputs of the SplitMix64 generator seeded with 0.
        assert_eq!(stream_word(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(stream_word(0, 1), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(stream_word(0, 2), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn top_bits_edges() {
        assert_eq!(top_bits(u64::MAX, 0), 0);
        assert_eq!(top_bits(u64::MAX, 64), u64::MAX);
        assert_eq!(top_bits(0x8000_0000_0000_0000, 1), 1);
        assert_eq!(top_bits(0xABCD_0000_0000_0000, 16), 0xABCD);
    }

    #[test]
    fn distinct_roles_give_distinct_streams() {
        let a = table_value(7, TableRole::Twist, 0, 0, 0, 64);
        let b = table_value(7, TableRole::Top, 0, 0, 0, 64);
        assert_ne!(a, b);
        assert_ne!(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
        assert_ne!(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
    }
}
