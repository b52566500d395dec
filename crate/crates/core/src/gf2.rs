//! Linear independence of keys over GF(2).
//!
//! A key is viewed as the set of its position characters `(i, x_i)`. A
//! family of keys is a zero-set when every position character occurs an
//! even number of times, and it is linearly independent when no non-empty
//! subfamily is a zero-set.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A character at a 0-based position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PositionChar {
    pub position: u32,
    pub character: u64,
}

/// A set of position characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct GeneralizedKey(Vec<PositionChar>);

impl GeneralizedKey {
    /// Set semantics: repeated position characters are kept once.
    pub fn new(items: impl IntoIterator<Item = PositionChar>) -> Self {
        let mut v: Vec<PositionChar> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        GeneralizedKey(v)
    }

    /// The position characters `(j, chars[j])` of an ordinary key.
    pub fn from_chars(chars: &[u64]) -> Self {
        GeneralizedKey(
            chars
                .iter()
                .enumerate()
                .map(|(j, &ch)| PositionChar { position: j as u32, character: ch })
                .collect(),
        )
    }

    pub fn items(&self) -> &[PositionChar] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

/// Position characters occurring an odd number of times in the family.
pub fn sym_diff(family: &[GeneralizedKey]) -> GeneralizedKey {
    let mut all: Vec<PositionChar> = family.iter().flat_map(|k| k.0.iter().copied()).collect();
    all.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j] == all[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(all[i]);
        }
        i = j;
    }
    GeneralizedKey(out)
}

pub fn is_zero_set(family: &[GeneralizedKey]) -> bool {
    sym_diff(family).is_empty()
}

/// Outcome of an independence check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Independence {
    Independent,
    /// Indices (into the checked family, increasing) of a non-empty zero-set.
    Dependent { witness: Vec<usize> },
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

/// Decides linear independence and returns a zero-set witness when dependent.
pub fn independence(family: &[GeneralizedKey]) -> Independence {
    let rows: Vec<&[PositionChar]> = family.iter().map(|k| k.items()).collect();
    independence_of_rows(&rows)
}

pub fn is_linearly_independent(family: &[GeneralizedKey]) -> bool {
    independence(family).is_independent()
}

/// Independence of ordinary keys given as character sequences of equal length.
pub fn independence_of_chars<R: AsRef<[u64]>>(keys: &[R]) -> Independence {
    let family: Vec<GeneralizedKey> = keys.iter().map(|k| GeneralizedKey::from_chars(k.as_ref())).collect();
    independence(&family)
}

/// Repeatedly drops keys holding a position character no other remaining
/// key has (such a key cannot be in any zero-set), then runs Gaussian
/// elimination on what is left.
fn independence_of_rows(rows: &[&[PositionChar]]) -> Independence {
    let mut ids: HashMap<PositionChar, usize> = HashMap::new();
    let cols: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|pc| {
                    let n = ids.len();
                    *ids.entry(*pc).or_insert(n)
                })
                .collect()
        })
        .collect();
    let ncols = ids.len();
    let mut count = vec![0usize; ncols];
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for (r, cs) in cols.iter().enumerate() {
        for &c in cs {
            count[c] += 1;
            occurs[c].push(r);
        }
    }
    let mut alive = vec![true; rows.len()];
    let mut queue: Vec<usize> = (0..ncols).filter(|&c| count[c] == 1).collect();
    while let Some(c) = queue.pop() {
        if count[c] != 1 {
            continue;
        }
        let r = *occurs[c].iter().find(|&&r| alive[r]).expect("count tracks live rows");
        alive[r] = false;
        for &c2 in &cols[r] {
            count[c2] -= 1;
            if count[c2] == 1 {
                queue.push(c2);
            }
        }
    }
    let core: Vec<usize> = (0..rows.len()).filter(|&r| alive[r]).collect();
    if core.is_empty() {
        return Independence::Independent;
    }

    let mut dense = vec![usize::MAX; ncols];
    let mut width = 0;
    for &r in &core {
        for &c in &cols[r] {
            if dense[c] == usize::MAX {
                dense[c] = width;
                width += 1;
            }
        }
    }
    let vw = width.div_ceil(64).max(1);
    let cw = core.len().div_ceil(64);
    let mut pivots: Vec<Option<(Vec<u64>, Vec<u64>)>> = vec![None; width];
    for (ci, &r) in core.iter().enumerate() {
        let mut v = vec![0u64; vw];
        for &c in &cols[r] {
            let b = dense[c];
            v[b / 64] ^= 1 << (b % 64);
        }
        let mut comb = vec![0u64; cw];
        comb[ci / 64] |= 1 << (ci % 64);
        loop {
            let Some(p) = lowest_bit(&v) else {
                let mut witness: Vec<usize> =
                    (0..core.len()).filter(|&i| comb[i / 64] >> (i % 64) & 1 == 1).map(|i| core[i]).collect();
                witness.sort_unstable();
                return Independence::Dependent { witness };
            };
            match &pivots[p] {
                Some((pv, pc)) => {
                    xor_into(&mut v, pv);
                    xor_into(&mut comb, pc);
                }
                None => {
                    pivots[p] = Some((v, comb));
                    break;
                }
            }
        }
    }
    Independence::Independent
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

fn xor_into(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

/// Largest `|S|^k` accepted by [`count_zero_ktuples`].
pub const ZERO_TUPLE_LIMIT: u64 = 100_000_000;

/// Number of ordered `k`-tuples (repetition allowed) from `set` whose
/// position characters cancel, by enumeration.
pub fn count_zero_ktuples(set: &[GeneralizedKey], k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let n = set.len() as u64;
    match n.checked_pow(k) {
        Some(t) if t <= ZERO_TUPLE_LIMIT => {}
        _ => return Err(Error::TooLarge(format!("{n}^{k} tuples exceed {ZERO_TUPLE_LIMIT}"))),
    }
    if n == 0 {
        return Ok(0);
    }
    let mut ids: HashMap<PositionChar, usize> = HashMap::new();
    for key in set {
        for pc in key.items() {
            let l = ids.len();
            ids.entry(*pc).or_insert(l);
        }
    }
    let words = ids.len().div_ceil(64).max(1);
    let rows: Vec<Vec<u64>> = set
        .iter()
        .map(|key| {
            let mut v = vec![0u64; words];
            for pc in key.items() {
                let b = ids[pc];
                v[b / 64] ^= 1 << (b % 64);
            }
            v
        })
        .collect();
    // The last element of the tuple must equal the XOR of the others.
    let mut mult: HashMap<&[u64], u64> = HashMap::new();
    for r in &rows {
        *mult.entry(r.as_slice()).or_insert(0) += 1;
    }
    let depth = (k - 1) as usize;
    if depth == 0 {
        return Ok(rows.iter().filter(|r| r.iter().all(|&w| w == 0)).count() as u64);
    }
    let mut acc = vec![vec![0u64; words]; depth + 1];
    let mut idx = vec![0usize; depth];
    let mut total = 0u64;
    let mut level = 0;
    loop {
        if level == depth {
            total += mult.get(acc[depth].as_slice()).copied().unwrap_or(0);
            level -= 1;
            idx[level] += 1;
            continue;
        }
        if idx[level] == rows.len() {
            if level == 0 {
                break;
            }
            idx[level] = 0;
            level -= 1;
            idx[level] += 1;
            continue;
        }
        let (lo, hi) = acc.split_at_mut(level + 1);
        for ((o, a), r) in hi[0].iter_mut().zip(&lo[level]).zip(&rows[idx[level]]) {
            *o = a ^ r;
        }
        level += 1;
    }
    Ok(total)
}

/// `3^c * n^(k-2)`, the bound on zero `k`-tuples of an `n`-key set of
/// `c`-character keys for even `k >= 4`.
pub fn zero_bound(n: u64, c: u32, k: u32) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::InvalidParams("k must be at least 2".into()));
    }
    Ok(BigUint::from(3u32).pow(c) * BigUint::from(n).pow(k - 2))
}
