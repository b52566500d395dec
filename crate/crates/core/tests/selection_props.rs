//! Selection, layer profiles and conditional layer expectations.

use proptest::prelude::*;
use tornado_core::selection::{
    buckets_by_last_char, conditional_expectation_estimate, resampled_last_table, select, HbarFixture, LayerProfile,
    Selector,
};
use tornado_core::{HashParams, Key, KeyHasher, RandomOracle, TornadoHasher};

#[test]
fn exact_conditional_layers_match_full_table_enumeration() {
    // |Sigma| = 4, 2-bit hashes: 4^4 = 256 possible last tables.
    let p = HashParams::new(2, 1, 2, 2).unwrap();
    let sel = Selector::new(1, 1).unwrap();
    let keys: Vec<Key> = (0..8).map(Key).collect();
    for seed in 0..20 {
        let h = TornadoHasher::new(seed, p).unwrap();
        let f = HbarFixture::new(&keys, &h).unwrap();
        let mut sums = [0.0; 4];
        let mut tail = [0.0; 6];
        for code in 0u64..256 {
            let table: Vec<u64> = (0..4).map(|a| code >> (2 * a) & 3).collect();
            let prof = f.layers_with_table(&table, &sel);
            for (i, s) in sums.iter_mut().enumerate() {
                *s += prof.layer(i + 1) as f64 / 256.0;
            }
            tail[prof.layer(1) as usize] += 1.0 / 256.0;
        }
        let exact = f.exact_layer_expectations(&sel, 4).unwrap();
        for i in 0..4 {
            assert!((exact[i] - sums[i]).abs() < 1e-12, "seed {seed} layer {}", i + 1);
        }
        let pmf = f.exact_layer_distribution(&sel, 1).unwrap();
        for (l, &want) in tail.iter().enumerate() {
            let got = pmf.get(l).copied().unwrap_or(0.0);
            assert!((got - want).abs() < 1e-12);
        }
    }
}

#[test]
fn estimate_matches_exact_expectation() {
    let p = HashParams::new(2, 1, 2, 2).unwrap();
    let sel = Selector::new(1, 0).unwrap();
    let keys: Vec<Key> = (0..8).map(Key).collect();
    let h = TornadoHasher::new(3, p).unwrap();
    let f = HbarFixture::new(&keys, &h).unwrap();
    let exact = f.exact_layer_expectations(&sel, 3).unwrap();
    let est = conditional_expectation_estimate(&f, &sel, 3, 20_000, 77).unwrap();
    for i in 0..3 {
        // Each S_i lies in [0, 4], so its standard deviation is at most 2.
        let se = 2.0 / (20_000f64).sqrt();
        assert!((est.mean_layers[i] - exact[i]).abs() < 4.0 * se, "layer {}", i + 1);
    }
    let exact_size: f64 = f.exact_layer_expectations(&sel, 8).unwrap().iter().sum();
    let se = (est.var_size / 20_000.0).sqrt().max(1e-9);
    assert!((est.mean_size - exact_size).abs() < 4.0 * se);
}

#[test]
fn selection_frequency_fits_expectation() {
    let p = HashParams::new(2, 2, 8, 32).unwrap();
    let sel = Selector::new(3, 6).unwrap();
    let keys: Vec<Key> = (0..4096).map(Key).collect();
    let trials = 400;
    let mut total = 0usize;
    for seed in 0..trials {
        let h = TornadoHasher::new(seed, p).unwrap();
        let r = select(&keys, &h, &sel).unwrap();
        assert!(r.selected.iter().all(|k| keys.contains(k)));
        total += r.selected.len();
    }
    let mean = total as f64 / trials as f64;
    let mu: f64 = 512.0;
    // Binomial standard deviation per trial is about sqrt(448).
    let se = (mu * 7.0 / 8.0).sqrt() / (trials as f64).sqrt();
    assert!((mean - mu).abs() < 4.0 * se, "mean {mean}");
}

#[test]
fn oracle_selection_is_binomial() {
    let p = HashParams::new(2, 0, 16, 16).unwrap();
    let sel = Selector::new(2, 3).unwrap();
    let keys: Vec<Key> = (0..8192).map(Key).collect();
    let mut sizes = Vec::new();
    for seed in 0..300 {
        let o = RandomOracle::new(seed, p).unwrap();
        sizes.push(select(&keys, &o, &sel).unwrap().selected.len() as f64);
    }
    let mean = sizes.iter().sum::<f64>() / 300.0;
    let var = sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / 299.0;
    assert!((mean - 2048.0).abs() < 4.0 * (1536.0f64 / 300.0).sqrt());
    assert!(var > 1536.0 * 0.7 && var < 1536.0 * 1.35, "variance {var}");
}

#[test]
fn resampled_tables_differ_by_trial() {
    let p = HashParams::new(2, 1, 4, 16).unwrap();
    assert_ne!(resampled_last_table(&p, 1, 0), resampled_last_table(&p, 1, 1));
    assert_eq!(resampled_last_table(&p, 1, 0), resampled_last_table(&p, 1, 0));
}

proptest! {
    #[test]
    fn layers_partition_the_selection(seed: u64, t in 0u32..4, mask_bits: u64, n in 1u64..600) {
        let p = HashParams::new(2, 2, 5, 12).unwrap();
        let h = TornadoHasher::new(seed, p).unwrap();
        let sel = Selector::new(t, if t == 0 { 0 } else { mask_bits % (1 << t) }).unwrap();
        let keys: Vec<Key> = (0..n).map(Key).collect();
        let r = select(&keys, &h, &sel).unwrap();
        let b = buckets_by_last_char(&r.selected, &h).unwrap();
        let prof = b.layers();
        prop_assert_eq!(prof.total() as usize, r.selected.len());
        prop_assert!(prof.counts.windows(2).all(|w| w[0] >= w[1]));
        for (alpha, ks) in &b.buckets {
            for k in ks {
                prop_assert_eq!(h.derive(*k).unwrap().last(), *alpha);
                prop_assert!(sel.matches(h.hash(*k).unwrap(), 12));
            }
        }
    }

    #[test]
    fn fixture_reproduces_actual_layers(seed: u64, t in 0u32..3) {
        let p = HashParams::new(2, 1, 4, 10).unwrap();
        let h = TornadoHasher::new(seed, p).unwrap();
        let sel = Selector::new(t, 0).unwrap();
        let keys: Vec<Key> = (0..200).map(Key).collect();
        let f = HbarFixture::new(&keys, &h).unwrap();
        let direct = buckets_by_last_char(&select(&keys, &h, &sel).unwrap().selected, &h).unwrap().layers();
        prop_assert_eq!(f.layers_with_table(&h.last_table(), &sel), direct);
    }

    #[test]
    fn profile_total_is_sum_of_sizes(sizes in prop::collection::vec(0usize..7, 0..30)) {
        let prof = LayerProfile::from_sizes(sizes.iter().copied());
        prop_assert_eq!(prof.total() as usize, sizes.iter().sum::<usize>());
        for i in 1..8 {
            prop_assert_eq!(prof.layer(i) as usize, sizes.iter().filter(|&&s| s >= i).count());
        }
    }
}
