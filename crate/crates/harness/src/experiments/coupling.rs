//! Counting coupling: tornado hashing on `A` against the oracle on a
//! slightly larger (or smaller) set `A'`.
//!
//! With `s` the alphabet size and `P` the target error,
//! `|A'|_up = ceil(|A| (1 + 8 sqrt(ln(1/P) / s)))` and
//! `|A'|_lo = floor(|A| (1 - 9 sqrt(ln(1/P) / s)))`.

use tornado_core::bounds;
use tornado_core::selection::select;
use tornado_core::sketches::KPartitionSketch;
use tornado_core::RandomOracle;

use super::{dominated, run_trials, Result, Setup};
use crate::config::{ConfigError, ExperimentConfig};
use crate::keysets;
use crate::report::{Report, Table};
use crate::row;
use crate::seeds;
use crate::stats::{Moments, Proportion};

pub fn coupled_sizes(n: u64, sigma: f64, target_error: f64) -> (u64, u64) {
    let r = ((1.0 / target_error).ln() / sigma).sqrt();
    let up = (n as f64 * (1.0 + 8.0 * r)).ceil() as u64;
    let lo = (n as f64 * (1.0 - 9.0 * r)).floor().max(0.0) as u64;
    (up, lo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CouplingOutcome {
    size: u64,
    up: u64,
    lo: u64,
    /// k-partition estimates of `|X|`, `|X'_up|` and `|X'_lo|`.
    hll: Option<[f64; 3]>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let pe = cfg.target_error.expect("validated");
    let setup = Setup::new(cfg)?;
    let (up, lo) = coupled_sizes(cfg.n, setup.sigma, pe);
    let key_bits = setup.params.key_bits();
    if key_bits < 64 && up > 1u64 << key_bits {
        return Err(ConfigError(format!("|A'| = {up} exceeds the key space")).into());
    }
    let extended = keysets::for_params(cfg.keys, up, &setup.params, seeds::keyset_seed(cfg.master_seed))?;
    // `A` is a prefix of the extended set only for the sequential generator;
    // the oracle does not care which keys `A'` holds.
    let outcomes = run_trials(cfg, |trial| {
        let h = setup.hasher(cfg, trial)?;
        let o = RandomOracle::new(seeds::trial_seed(cfg.master_seed, cfg.experiment, trial), setup.params)?;
        let x = select(&setup.keys, &h, &setup.selector)?.selected;
        let x_up = select(&extended, &o, &setup.selector)?.selected;
        let x_lo = select(&extended[..lo as usize], &o, &setup.selector)?.selected;
        let hll = match cfg.sketch {
            Some(s) => Some([
                KPartitionSketch::from_keys(s.k, &h, &x)?.distinct_estimate(),
                KPartitionSketch::from_keys(s.k, &o, &x_up)?.distinct_estimate(),
                KPartitionSketch::from_keys(s.k, &o, &x_lo)?.distinct_estimate(),
            ]),
            None => None,
        };
        Ok(CouplingOutcome { size: x.len() as u64, up: x_up.len() as u64, lo: x_lo.len() as u64, hll })
    })?;

    let lu = bounds::local_uniformity_error(setup.sigma, setup.b())?;
    let mut warnings = setup.theorem_warnings()?;
    warnings.extend(lu.warnings.iter().cloned());
    let mut report = Report::new(cfg, warnings);

    let mut sizes = Table::new("sizes", &["set", "size"]);
    sizes.push(row!["A", cfg.n]);
    sizes.push(row!["A_up", up]);
    sizes.push(row!["A_lo", lo]);

    let mut t = Table::new("coupling", &["event", "hits", "freq", "lo", "hi", "bound"]);
    let events: [(&str, f64, fn(&CouplingOutcome) -> bool); 2] = [
        ("tornado_above_upper", 2.0 * pe + lu.value, |o| o.size > o.up),
        ("tornado_below_lower", 3.0 * pe + lu.value, |o| o.size < o.lo),
    ];
    for (name, bound, event) in events {
        let p = Proportion::from_flags(outcomes.iter().map(event));
        t.push(row![name, p.hits, p.estimate, p.lo, p.hi, bound.min(1.0)]);
        let (ok, d) = dominated(p.estimate, bound, p.half_width());
        report.check(format!("{name} frequency <= bound"), ok, d);
    }

    let mut m = Table::new("selected", &["scheme", "set", "mean", "sd"]);
    let cols: [(&str, &str, fn(&CouplingOutcome) -> u64); 3] =
        [("tornado", "A", |o| o.size), ("oracle", "A_up", |o| o.up), ("oracle", "A_lo", |o| o.lo)];
    for (scheme, set, f) in cols {
        let mo = Moments::from_values(outcomes.iter().map(|o| f(o) as f64));
        m.push(row![scheme, set, mo.mean(), mo.std_dev()]);
    }
    report.tables.extend([sizes, t, m]);

    if cfg.sketch.is_some() {
        let mut h = Table::new("k_partition", &["scheme", "set", "mean_estimate", "sd"]);
        let labels = [("tornado", "A"), ("oracle", "A_up"), ("oracle", "A_lo")];
        for (j, (scheme, set)) in labels.into_iter().enumerate() {
            let mo = Moments::from_values(outcomes.iter().map(|o| o.hll.expect("sketch configured")[j]));
            h.push(row![scheme, set, mo.mean(), mo.std_dev()]);
        }
        report.tables.push(h);
    }
    Ok(report)
}
