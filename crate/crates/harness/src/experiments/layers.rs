//! Layer sizes `S_i` of the selected set, bucketed by last derived character.
//!
//! `J` is the event that the selected derived keys without their last
//! character are linearly independent.

use tornado_core::bounds;
use tornado_core::gf2::independence_of_chars;
use tornado_core::selection::{buckets_by_last_char, select, LayerProfile};

use super::{derived_keys, dominated, run_trials, Result, Setup};
use crate::config::ExperimentConfig;
use crate::report::{Report, Table};
use crate::row;
use crate::stats::{Moments, Proportion};

#[derive(Debug, Clone, PartialEq)]
pub struct LayerOutcome {
    pub profile: LayerProfile,
    pub j: bool,
}

pub fn simulate(cfg: &ExperimentConfig, setup: &Setup) -> Result<Vec<LayerOutcome>> {
    let prefix = setup.params.derived_len() - 1;
    run_trials(cfg, |trial| {
        let h = setup.hasher(cfg, trial)?;
        let sel = select(&setup.keys, &h, &setup.selector)?.selected;
        let profile = buckets_by_last_char(&sel, &h)?.layers();
        let prefixes: Vec<Vec<u64>> = derived_keys(&h, &sel).into_iter().map(|mut k| {
            k.truncate(prefix);
            k
        }).collect();
        let j = independence_of_chars(&prefixes).is_independent();
        Ok(LayerOutcome { profile, j })
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let setup = Setup::new(cfg)?;
    let outcomes = simulate(cfg, &setup)?;
    let f = setup.mu / setup.sigma;
    let mut warnings = setup.theorem_warnings()?;
    warnings.extend(bounds::mu_bar(1, f, setup.sigma)?.warnings);
    let mut report = Report::new(cfg, warnings);

    let max_i = outcomes.iter().map(|o| o.profile.max_bucket()).max().unwrap_or(0).max(cfg.layer);
    let mut layers = Table::new("layers", &["i", "mu_bar", "mean_s_j", "se_s_j", "mean_s", "se_s", "j_freq"]);
    let j_freq = outcomes.iter().filter(|o| o.j).count() as f64 / outcomes.len() as f64;
    let mut means = Vec::with_capacity(max_i);
    for i in 1..=max_i {
        let mb = bounds::mu_bar(i as u64, f, setup.sigma)?.value;
        let sj = Moments::from_values(outcomes.iter().map(|o| if o.j { o.profile.layer(i) as f64 } else { 0.0 }));
        let s = Moments::from_values(outcomes.iter().map(|o| o.profile.layer(i) as f64));
        layers.push(row![i, mb, sj.mean(), sj.std_error(), s.mean(), s.std_error(), j_freq]);
        let (ok, d) = dominated(sj.mean(), mb, sj.std_error());
        report.check(format!("mean S_{i}[J] <= mu_bar_{i}"), ok, d);
        means.push(s.mean());
    }
    let monotone = means.windows(2).all(|w| w[0] >= w[1]);
    report.check("layer means are non-increasing", monotone, format!("{means:?}"));

    let mut tail = Table::new("layer_tail", &["i", "delta", "threshold", "hits", "freq", "lo", "hi", "bound"]);
    for i in 1..=max_i {
        let mb = bounds::mu_bar(i as u64, f, setup.sigma)?.value;
        for &delta in &cfg.deltas {
            let thr = (1.0 + delta) * mb;
            let p = Proportion::from_flags(outcomes.iter().map(|o| o.j && (o.profile.layer(i) as f64) > thr));
            let b = bounds::layer_upper_tail(i as u64, delta, f, setup.sigma)?.value;
            tail.push(row![i, delta, thr, p.hits, p.estimate, p.lo, p.hi, b]);
            let (ok, d) = dominated(p.estimate, b, p.half_width());
            report.check(format!("layer {i} upper tail at delta={delta}"), ok, d);
        }
    }

    let mut profiles = Table::new("profiles", &["trial", "i", "S_i"]);
    for (trial, o) in outcomes.iter().enumerate() {
        for (i, &s) in o.profile.counts.iter().enumerate() {
            if s > 0 {
                profiles.push(row![trial, i + 1, s]);
            }
        }
    }
    report.tables.extend([layers, tail, profiles]);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tornado_core::selection::HbarFixture;

    fn cfg(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn small_run_passes_and_is_monotone() {
        let c = cfg(r#"{"experiment":"layers","hash":{"c":2,"d":4,"char_bits":8,"range_bits":32},"n":1024,"t":3,"trials":100,"deltas":[0.5]}"#);
        let r = run(&c).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        let t = r.table("layers").unwrap();
        assert!(t.values("mean_s")[0] > 100.0);
    }

    // Averaging the exact conditional expectations over outer seeds gives
    // the unconditional mean, which the Monte Carlo run must hit within 4 SE.
    #[test]
    fn tiny_instance_matches_exhaustive_expectation() {
        let c = cfg(r#"{"experiment":"layers","hash":{"c":2,"d":1,"char_bits":2,"range_bits":2},"n":12,"t":1,"trials":4000,"deltas":[0.0]}"#);
        let setup = Setup::new(&c).unwrap();
        let outcomes = simulate(&c, &setup).unwrap();
        let mut exact = [0.0; 3];
        for trial in 0..c.trials {
            let h = setup.hasher(&c, trial).unwrap();
            let e = HbarFixture::new(&setup.keys, &h).unwrap().exact_layer_expectations(&setup.selector, 3).unwrap();
            for (a, b) in exact.iter_mut().zip(e) {
                *a += b / c.trials as f64;
            }
        }
        for i in 1..=3 {
            let m = Moments::from_values(outcomes.iter().map(|o| o.profile.layer(i) as f64));
            assert!((m.mean() - exact[i - 1]).abs() <= 4.0 * m.std_error() + 1e-12, "i={i} {} vs {}", m.mean(), exact[i - 1]);
        }
    }
}
