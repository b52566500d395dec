use crate::error::{Error, Result};
use crate::hasher::KeyHasher;
use crate::params::{DerivedKey, HashParams, Key, MAX_DERIVED};
use crate::prng::{mix64, stream_key, stream_word, table_id, top_bits, TableRole};
use crate::simple::{check_table_budget, seeded_fingerprint, LookupTables};

const MAX_STRIDE: usize = MAX_DERIVED as usize + 2;

/// Tornado tabulation hashing.
///
/// A key `x = (x_1, ..., x_c)` is first extended to a derived key
/// `x~ = (x~_1, ..., x~_{c+d})`:
///
/// * `x~_i = x_i` for `i < c`,
/// * `x~_c = x_c ^ h0(x_1, ..., x_{c-1})`,
/// * `x~_{c+i} = h~_i(x~_1, ..., x~_{c+i-1})` for `i = 1..d`,
///
/// where `h0` and each `h~_i` are independent simple tabulation functions
/// into the alphabet. The hash value is a final simple tabulation function
/// over all `c + d` derived characters.
///
/// Tables are stored interleaved: for each (position, character) one
/// contiguous cell holds the top-level entry followed by the entries of
/// `h0` and `h~_1..h~_d` at that position (zero where a function does not
/// read the position). Evaluation does one cell lookup per derived
/// character and keeps running XORs for every function, which computes
/// exactly the layered definition above.
#[derive(Debug, Clone)]
pub struct TornadoHasher {
    params: HashParams,
    stride: usize,
    cells: Vec<u64>,
    fingerprint: u64,
}

const TOP: usize = 0;
const TWIST: usize = 1;

impl TornadoHasher {
    /// Tables filled from per-table streams: `h0` uses role `Twist`, `h~_i`
    /// uses role `Derive` with function index `i`, the final function uses
    /// role `Top`. Position indices are 0-based.
    pub fn new(seed: u64, params: HashParams) -> Result<Self> {
        let mut h = Self::empty(params)?;
        let c = params.c as usize;
        let d = params.d as usize;
        let cb = params.char_bits;
        for j in 0..c.saturating_sub(1) {
            h.fill_slot(seed, TableRole::Twist, 0, j, TWIST, cb);
        }
        for i in 1..=d {
            for j in 0..c + i - 1 {
                h.fill_slot(seed, TableRole::Derive, i as u32, j, TWIST + i, cb);
            }
        }
        for j in 0..c + d {
            h.fill_slot(seed, TableRole::Top, 0, j, TOP, params.range_bits);
        }
        h.fingerprint = seeded_fingerprint(seed, 2, &params);
        Ok(h)
    }

    /// Builds the hasher from explicit tables: `twist` has `c - 1`
    /// positions, `derive[i - 1]` has `c + i - 1` positions (both with
    /// `char_bits`-bit outputs), and `top` has `c + d` positions with
    /// `range_bits`-bit outputs.
    pub fn from_parts(
        params: HashParams,
        twist: &LookupTables,
        derive: &[LookupTables],
        top: &LookupTables,
    ) -> Result<Self> {
        let mut h = Self::empty(params)?;
        let c = params.c as usize;
        let d = params.d as usize;
        let cb = params.char_bits;
        let shape_ok = |t: &LookupTables, positions: usize, bits: u32| {
            t.positions() == positions && t.char_bits() == cb && t.out_bits() == bits
        };
        if !shape_ok(twist, c - 1, cb) || derive.len() != d || !shape_ok(top, c + d, params.range_bits) {
            return Err(Error::InvalidParams("table shapes do not match the parameters".into()));
        }
        for (i, t) in derive.iter().enumerate() {
            if !shape_ok(t, c + i, cb) {
                return Err(Error::InvalidParams(format!("derive table {} has the wrong shape", i + 1)));
            }
        }
        let size = 1u64 << cb;
        for ch in 0..size {
            for j in 0..c - 1 {
                h.set_cell(j, ch, TWIST, twist.get(j, ch));
            }
            for (i, t) in derive.iter().enumerate() {
                for j in 0..c + i {
                    h.set_cell(j, ch, TWIST + 1 + i, t.get(j, ch));
                }
            }
            for j in 0..c + d {
                h.set_cell(j, ch, TOP, top.get(j, ch));
            }
        }
        h.fingerprint = h.cells.iter().fold(mix64(0x70AD), |a, &v| mix64(a ^ v));
        Ok(h)
    }

    fn empty(params: HashParams) -> Result<Self> {
        params.validate()?;
        let stride = params.d as usize + 2;
        let positions = params.derived_len() as u64;
        check_table_budget(positions, params.char_bits, stride as u64)?;
        Ok(TornadoHasher {
            params,
            stride,
            cells: vec![0; ((positions as usize) * stride) << params.char_bits],
            fingerprint: 0,
        })
    }

    fn fill_slot(&mut self, seed: u64, role: TableRole, function: u32, position: usize, slot: usize, bits: u32) {
        let key = stream_key(seed, table_id(role, function, position as u32));
        let size = 1u64 << self.params.char_bits;
        let base = (position << self.params.char_bits) * self.stride + slot;
        for ch in 0..size {
            self.cells[base + ch as usize * self.stride] = top_bits(stream_word(key, ch), bits);
        }
    }

    #[inline]
    fn cell_index(&self, position: usize, ch: u64) -> usize {
        ((position << self.params.char_bits) | ch as usize) * self.stride
    }

    fn set_cell(&mut self, position: usize, ch: u64, slot: usize, value: u64) {
        let i = self.cell_index(position, ch) + slot;
        self.cells[i] = value;
    }

    /// Entry of the final table at a 0-based position.
    pub fn top_value(&self, position: usize, ch: u64) -> u64 {
        self.cells[self.cell_index(position, ch) + TOP]
    }

    /// Entry of `h0` at a 0-based position `< c - 1`.
    pub fn twist_value(&self, position: usize, ch: u64) -> u64 {
        self.cells[self.cell_index(position, ch) + TWIST]
    }

    /// Entry of `h~_i` (`i` in `1..=d`) at a 0-based position `< c + i - 1`.
    pub fn derive_value(&self, i: usize, position: usize, ch: u64) -> u64 {
        self.cells[self.cell_index(position, ch) + TWIST + i]
    }

    /// The final table at the last derived position, indexed by character.
    pub fn last_table(&self) -> Vec<u64> {
        let last = self.params.derived_len() - 1;
        (0..1u64 << self.params.char_bits).map(|ch| self.top_value(last, ch)).collect()
    }

    /// Runs the derivation. Writes the derived key into `out` when given.
    /// Returns `(hbar0, hbar1, hash)` where `hbar1` is the last derived
    /// character, `hbar0` the XOR of all other final-table lookups, and
    /// `hash = hbar0 ^ T_last[hbar1]`.
    #[inline]
    fn run(&self, key: u64, mut out: Option<&mut [u64]>) -> (u64, u64, u64) {
        let c = self.params.c as usize;
        let n = c + self.params.d as usize;
        let cb = self.params.char_bits;
        let mask = self.params.char_mask();
        let stride = self.stride;
        let mut acc = [0u64; MAX_STRIDE];
        let mut hbar0 = 0;
        let mut last = 0;
        for j in 0..n {
            let ch = if j + 1 < c {
                (key >> (j as u32 * cb)) & mask
            } else if j + 1 == c {
                ((key >> (j as u32 * cb)) & mask) ^ acc[TWIST]
            } else {
                acc[TWIST + j + 1 - c]
            };
            if j + 1 == n {
                hbar0 = acc[TOP];
                last = ch;
            }
            if let Some(o) = out.as_deref_mut() {
                o[j] = ch;
            }
            let base = ((j << cb) | ch as usize) * stride;
            let cell = &self.cells[base..base + stride];
            for (a, &v) in acc[..stride].iter_mut().zip(cell) {
                *a ^= v;
            }
        }
        (hbar0, last, acc[TOP])
    }

    /// Derived key of `key`.
    pub fn derive(&self, key: Key) -> Result<DerivedKey> {
        self.params.check_key(key)?;
        let mut out = vec![0; self.params.derived_len()];
        self.run(key.0, Some(&mut out));
        Ok(DerivedKey(out))
    }

    /// Writes the derived key into `out` (length `c + d`) and returns the
    /// hash value. The key must fit the key width.
    #[inline]
    pub fn derive_trusted(&self, key: Key, out: &mut [u64]) -> u64 {
        debug_assert!(self.params.check_key(key).is_ok());
        self.run(key.0, Some(out)).2
    }

    /// `(hbar0, hbar1)` with `h(x) = hbar0(x) ^ T_last[hbar1(x)]`.
    pub fn split(&self, key: Key) -> Result<(u64, u64)> {
        if self.params.d == 0 {
            return Err(Error::Unsupported("splitting requires at least one derived character".into()));
        }
        self.params.check_key(key)?;
        let (h0, h1, _) = self.run(key.0, None);
        Ok((h0, h1))
    }

    /// Split without validation; `d` must be at least 1.
    #[inline]
    pub fn split_trusted(&self, key: Key) -> (u64, u64) {
        let (h0, h1, _) = self.run(key.0, None);
        (h0, h1)
    }

    /// The final simple tabulation function applied to an arbitrary
    /// sequence of `c + d` characters.
    pub fn hash_derived(&self, derived: &[u64]) -> Result<u64> {
        if derived.len() != self.params.derived_len() {
            return Err(Error::InvalidParams(format!("expected {} characters", self.params.derived_len())));
        }
        let mut h = 0;
        for (j, &ch) in derived.iter().enumerate() {
            self.params.check_char(j, ch)?;
            h ^= self.top_value(j, ch);
        }
        Ok(h)
    }
}

impl KeyHasher for TornadoHasher {
    fn params(&self) -> HashParams {
        self.params
    }

    fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    #[inline]
    fn hash_trusted(&self, key: Key) -> u64 {
        self.run(key.0, None).2
    }
}
