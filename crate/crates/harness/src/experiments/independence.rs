//! Frequency of linear dependence among the derived selected keys.

use tornado_core::bounds::{self, IndependenceVariant};
use tornado_core::gf2::independence_of_chars;
use tornado_core::selection::select;

use super::{derived_keys, dominated, run_trials, Result, Setup};
use crate::config::ExperimentConfig;
use crate::report::{Report, Table};
use crate::row;
use crate::stats::Proportion;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndependenceOutcome {
    pub selected: usize,
    /// The full derived keys are dependent.
    pub full: bool,
    /// The derived keys without their last character are dependent.
    pub prefix: bool,
}

pub fn simulate(cfg: &ExperimentConfig, setup: &Setup) -> Result<Vec<IndependenceOutcome>> {
    let len = setup.params.derived_len();
    run_trials(cfg, |trial| {
        let h = setup.hasher(cfg, trial)?;
        let sel = select(&setup.keys, &h, &setup.selector)?.selected;
        let mut derived = derived_keys(&h, &sel);
        if cfg.inject_duplicate {
            if let Some(first) = derived.first().cloned() {
                derived.push(first);
            }
        }
        let full = !independence_of_chars(&derived).is_independent();
        let prefixes: Vec<&[u64]> = derived.iter().map(|k| &k[..len - 1]).collect();
        let prefix = !independence_of_chars(&prefixes).is_independent();
        Ok(IndependenceOutcome { selected: sel.len(), full, prefix })
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let setup = Setup::new(cfg)?;
    let outcomes = simulate(cfg, &setup)?;
    let mut warnings = setup.theorem_warnings()?;
    let (mu, sigma, d, c) = (setup.mu, setup.sigma, setup.params.d, setup.params.c);
    let n = cfg.n.max(1) as f64;
    warnings.extend(bounds::independence_failure_bound(mu, sigma, d, IndependenceVariant::Original)?.warnings);
    let mut report = Report::new(cfg, warnings);

    let mut t = Table::new(
        "independence",
        &["variant", "derived_len", "failures", "freq", "lo", "hi", "bound_original", "bound_refined"],
    );
    let variants: [(&str, u32, fn(&IndependenceOutcome) -> bool); 2] =
        [("full", d, |o| o.full), ("prefix", d - 1, |o| o.prefix)];
    for (name, dd, event) in variants {
        let p = Proportion::from_flags(outcomes.iter().map(event));
        let orig = bounds::independence_failure_bound(mu, sigma, dd, IndependenceVariant::Original)?.value;
        let refined = bounds::independence_failure_bound(mu, sigma, dd, IndependenceVariant::Refined { n, c })?.value;
        t.push(row![name, c as usize + dd as usize, p.hits, p.estimate, p.lo, p.hi, orig, refined]);
        if cfg.inject_duplicate {
            let ok = outcomes.iter().all(|o| o.selected == 0 || event(o));
            report.check(format!("{name}: every selection with a duplicate is dependent"), ok, format!("{} failures", p.hits));
        } else {
            let (ok, det) = dominated(p.estimate, orig, p.half_width());
            report.check(format!("{name}: dependence frequency <= bound"), ok, det);
        }
    }
    report.tables.push(t);
    Ok(report)
}
