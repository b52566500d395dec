//! Selection of keys by hash value and the layer structure of selected sets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hasher::KeyHasher;
use crate::params::{Dyadic, HashParams, Key};
use crate::prng::{stream_key, stream_word, table_id, top_bits, TableRole};
use crate::tornado::TornadoHasher;

/// Selects keys whose `t` most significant hash bits equal `mask`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selector {
    pub t: u32,
    pub mask: u64,
}

impl Selector {
    pub fn new(t: u32, mask: u64) -> Result<Self> {
        if t > 64 || (t < 64 && mask >> t != 0) {
            return Err(Error::InvalidParams(format!("mask {mask:#x} does not fit {t} bits")));
        }
        Ok(Selector { t, mask })
    }

    pub fn all() -> Self {
        Selector { t: 0, mask: 0 }
    }

    pub fn check(&self, range_bits: u32) -> Result<()> {
        if self.t > range_bits {
            return Err(Error::InvalidParams(format!(
                "cannot select on {} bits of a {range_bits}-bit hash",
                self.t
            )));
        }
        Ok(())
    }

    /// Whether a `range_bits`-bit hash value is selected. Requires `t <= range_bits`.
    #[inline]
    pub fn matches(&self, hash: u64, range_bits: u32) -> bool {
        self.t == 0 || hash >> (range_bits - self.t) == self.mask
    }

    /// Expected number of selected keys out of `n`.
    pub fn expected(&self, n: u64) -> Dyadic {
        Dyadic { num: n, log2_den: self.t }.reduced()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Selected keys in input order.
    pub selected: Vec<Key>,
    /// Expected selection size `n / 2^t`.
    pub mu: Dyadic,
}

/// Selects from a set of distinct keys.
pub fn select<H: KeyHasher>(keys: &[Key], hasher: &H, selector: &Selector) -> Result<SelectionResult> {
    let params = hasher.params();
    selector.check(params.range_bits)?;
    let mut selected = Vec::new();
    for &k in keys {
        if selector.matches(hasher.hash(k)?, params.range_bits) {
            selected.push(k);
        }
    }
    Ok(SelectionResult { selected, mu: selector.expected(keys.len() as u64) })
}

/// Selected keys grouped by their last derived character.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketDecomposition {
    pub alphabet_bits: u32,
    /// Non-empty buckets only, keyed by character.
    pub buckets: BTreeMap<u64, Vec<Key>>,
}

impl BucketDecomposition {
    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.buckets.values().map(Vec::len)
    }

    pub fn total(&self) -> usize {
        self.sizes().sum()
    }

    pub fn layers(&self) -> LayerProfile {
        LayerProfile::from_sizes(self.sizes())
    }
}

pub fn buckets_by_last_char(selected: &[Key], hasher: &TornadoHasher) -> Result<BucketDecomposition> {
    let params = hasher.params();
    if params.d == 0 {
        return Err(Error::Unsupported("buckets need at least one derived character".into()));
    }
    let mut buckets: BTreeMap<u64, Vec<Key>> = BTreeMap::new();
    for &k in selected {
        let (_, alpha) = hasher.split(k)?;
        buckets.entry(alpha).or_default().push(k);
    }
    Ok(BucketDecomposition { alphabet_bits: params.char_bits, buckets })
}

/// `S_i = #{alpha : |X_alpha| >= i}` for `i = 1..=max bucket size`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LayerProfile {
    /// `counts[i - 1] = S_i`; empty when nothing was selected.
    pub counts: Vec<u64>,
}

impl LayerProfile {
    pub fn from_sizes(sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut hist: Vec<u64> = Vec::new();
        for s in sizes {
            if s == 0 {
                continue;
            }
            if hist.len() < s {
                hist.resize(s, 0);
            }
            hist[s - 1] += 1;
        }
        let mut counts = hist;
        for i in (0..counts.len().saturating_sub(1)).rev() {
            counts[i] += counts[i + 1];
        }
        LayerProfile { counts }
    }

    /// `S_i` for `i >= 1`; zero beyond the largest bucket.
    pub fn layer(&self, i: usize) -> u64 {
        assert!(i >= 1, "layers are numbered from 1");
        self.counts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn max_bucket(&self) -> usize {
        self.counts.len()
    }

    /// `sum_i S_i`, which equals the number of selected keys.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// The split values `(hbar0(x), hbar1(x))` of a fixed key set under a fixed
/// hasher. Everything except the last final table is fixed, so the hash
/// value of each key is `hbar0 ^ T[hbar1]` for a table `T` that can be
/// resampled.
#[derive(Debug, Clone)]
pub struct HbarFixture {
    params: HashParams,
    entries: Vec<(u64, u64)>,
}

impl HbarFixture {
    pub fn new(keys: &[Key], hasher: &TornadoHasher) -> Result<Self> {
        let params = hasher.params();
        let entries = keys.iter().map(|&k| hasher.split(k)).collect::<Result<Vec<_>>>()?;
        Ok(HbarFixture { params, entries })
    }

    pub fn params(&self) -> HashParams {
        self.params
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    /// Layer profile of the selected set when the last table is `table`.
    pub fn layers_with_table(&self, table: &[u64], selector: &Selector) -> LayerProfile {
        let r = self.params.range_bits;
        let mut sizes: BTreeMap<u64, usize> = BTreeMap::new();
        for &(h0, a) in &self.entries {
            if selector.matches(h0 ^ table[a as usize], r) {
                *sizes.entry(a).or_insert(0) += 1;
            }
        }
        LayerProfile::from_sizes(sizes.into_values())
    }

    /// For each character `alpha` with keys, the probability over a uniform
    /// table entry `T[alpha]` of each bucket size. Entry `[alpha][m]` is the
    /// probability that exactly `m` keys of bucket `alpha` are selected.
    pub fn bucket_size_distributions(&self, selector: &Selector) -> Result<Vec<Vec<f64>>> {
        let r = self.params.range_bits;
        selector.check(r)?;
        if r > 20 {
            return Err(Error::TooLarge(format!("enumerating 2^{r} table values")));
        }
        let mut groups: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &(h0, a) in &self.entries {
            groups.entry(a).or_default().push(h0);
        }
        let values = 1u64 << r;
        let mut out = Vec::with_capacity(groups.len());
        for h0s in groups.values() {
            let mut dist = vec![0.0; h0s.len() + 1];
            for v in 0..values {
                let m = h0s.iter().filter(|&&h0| selector.matches(h0 ^ v, r)).count();
                dist[m] += 1.0;
            }
            for p in &mut dist {
                *p /= values as f64;
            }
            out.push(dist);
        }
        Ok(out)
    }

    /// Exact `E[S_i | hbar]` for `i = 1..=max_i`, averaging over the last table.
    pub fn exact_layer_expectations(&self, selector: &Selector, max_i: usize) -> Result<Vec<f64>> {
        let dists = self.bucket_size_distributions(selector)?;
        Ok((1..=max_i)
            .map(|i| dists.iter().map(|d| d.iter().skip(i).sum::<f64>()).sum())
            .collect())
    }

    /// Exact distribution of `S_i` given `hbar`: entry `[lambda]` is
    /// `Pr[S_i = lambda | hbar]`. The buckets are independent given `hbar`,
    /// so `S_i` is a sum of independent Bernoulli variables.
    pub fn exact_layer_distribution(&self, selector: &Selector, i: usize) -> Result<Vec<f64>> {
        if i == 0 {
            return Err(Error::InvalidParams("layers are numbered from 1".into()));
        }
        let dists = self.bucket_size_distributions(selector)?;
        let mut pmf = vec![1.0];
        for d in &dists {
            let q: f64 = d.iter().skip(i).sum();
            let mut next = vec![0.0; pmf.len() + 1];
            for (s, &p) in pmf.iter().enumerate() {
                next[s] += p * (1.0 - q);
                next[s + 1] += p * q;
            }
            pmf = next;
        }
        Ok(pmf)
    }
}

/// A resampled final table for trial `trial`, independent of the hasher's own.
pub fn resampled_last_table(params: &HashParams, seed: u64, trial: u64) -> Vec<u64> {
    let key = stream_key(stream_key(seed, table_id(TableRole::Resample, 0, 0)), trial);
    (0..1u64 << params.char_bits).map(|ch| top_bits(stream_word(key, ch), params.range_bits)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalEstimate {
    pub trials: u64,
    /// Empirical mean of `S_i`, index `i - 1`.
    pub mean_layers: Vec<f64>,
    pub mean_size: f64,
    /// Sample variance of `|X|`.
    pub var_size: f64,
}

/// Estimates `E[S_i | hbar]` by resampling only the last final table.
pub fn conditional_expectation_estimate(
    fixture: &HbarFixture,
    selector: &Selector,
    max_i: usize,
    trials: u64,
    seed: u64,
) -> Result<ConditionalEstimate> {
    selector.check(fixture.params.range_bits)?;
    if trials == 0 {
        return Err(Error::InvalidParams("at least one trial".into()));
    }
    let mut sums = vec![0.0; max_i];
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for trial in 0..trials {
        let table = resampled_last_table(&fixture.params, seed, trial);
        let prof = fixture.layers_with_table(&table, selector);
        for (i, s) in sums.iter_mut().enumerate() {
            *s += prof.layer(i + 1) as f64;
        }
        let x = prof.total() as f64;
        s1 += x;
        s2 += x * x;
    }
    let n = trials as f64;
    let mean = s1 / n;
    let var = if trials > 1 { (s2 - n * mean * mean) / (n - 1.0) } else { 0.0 };
    Ok(ConditionalEstimate {
        trials,
        mean_layers: sums.into_iter().map(|s| s / n).collect(),
        mean_size: mean,
        var_size: var.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_from_sizes() {
        let p = LayerProfile::from_sizes([3, 1, 0, 2, 1]);
        assert_eq!(p.counts, vec![4, 2, 1]);
        assert_eq!(p.layer(1), 4);
        assert_eq!(p.layer(4), 0);
        assert_eq!(p.total(), 7);
        assert_eq!(LayerProfile::from_sizes([]).total(), 0);
    }

    #[test]
    fn selector_bits() {
        let s = Selector::new(2, 0b10).unwrap();
        assert!(s.matches(0b1000_0000, 8));
        assert!(s.matches(0b1011_1111, 8));
        assert!(!s.matches(0b1100_0000, 8));
        assert!(Selector::all().matches(12345, 16));
        assert!(Selector::new(2, 4).is_err());
        assert!(s.check(1).is_err());
        assert_eq!(s.expected(12), Dyadic { num: 3, log2_den: 0 });
    }

    #[test]
    fn select_all_with_t_zero() {
        let p = HashParams::new(2, 1, 4, 8).unwrap();
        let h = TornadoHasher::new(2, p).unwrap();
        let keys: Vec<Key> = (0..100).map(Key).collect();
        let r = select(&keys, &h, &Selector::all()).unwrap();
        assert_eq!(r.selected, keys);
        assert_eq!(r.mu.as_f64(), 100.0);
    }

    #[test]
    fn buckets_cover_selection() {
        let p = HashParams::new(2, 2, 5, 16).unwrap();
        let h = TornadoHasher::new(8, p).unwrap();
        let keys: Vec<Key> = (0..1024).map(Key).collect();
        let r = select(&keys, &h, &Selector::new(3, 5).unwrap()).unwrap();
        let b = buckets_by_last_char(&r.selected, &h).unwrap();
        assert_eq!(b.total(), r.selected.len());
        assert_eq!(b.layers().total() as usize, r.selected.len());
        let p0 = HashParams::new(2, 0, 5, 16).unwrap();
        let h0 = TornadoHasher::new(8, p0).unwrap();
        assert!(buckets_by_last_char(&r.selected, &h0).is_err());
    }

    #[test]
    fn layer_distribution_sums_to_one() {
        let p = HashParams::new(2, 1, 3, 3).unwrap();
        let h = TornadoHasher::new(4, p).unwrap();
        let keys: Vec<Key> = (0..16).map(Key).collect();
        let f = HbarFixture::new(&keys, &h).unwrap();
        let sel = Selector::new(1, 0).unwrap();
        let pmf = f.exact_layer_distribution(&sel, 1).unwrap();
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mean: f64 = pmf.iter().enumerate().map(|(l, p)| l as f64 * p).sum();
        let e = f.exact_layer_expectations(&sel, 1).unwrap();
        assert!((mean - e[0]).abs() < 1e-12);
    }
}
