//! Conditional translation: for every integer `lambda`,
//! `Pr[E[S_i | hbar] >= lambda + 1] <= 2 Pr[S_i >= lambda]`,
//! both sides estimated from the same outer samples of `hbar`.

use tornado_core::selection::{conditional_expectation_estimate, HbarFixture};

use super::{dominated, run_trials, Result, Setup};
use crate::config::{ExperimentConfig, InnerMode};
use crate::report::{Report, Table};
use crate::row;
use crate::seeds;
use crate::stats::Proportion;

/// Conditional expectations are compared with this much rounding slack.
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondOutcome {
    /// `E[S_i | hbar]`, exact or estimated.
    pub expectation: f64,
    /// `S_i` under the hasher's own last table.
    pub layer: u64,
}

pub fn simulate(cfg: &ExperimentConfig, setup: &Setup) -> Result<Vec<CondOutcome>> {
    let i = cfg.layer;
    run_trials(cfg, |trial| {
        let h = setup.hasher(cfg, trial)?;
        let fx = HbarFixture::new(&setup.keys, &h)?;
        let expectation = match cfg.inner {
            InnerMode::Exact => fx.exact_layer_expectations(&setup.selector, i)?[i - 1],
            InnerMode::Resample => {
                let seed = seeds::trial_seed(cfg.master_seed, cfg.experiment, trial);
                let inner = cfg.inner_trials.unwrap_or(1);
                conditional_expectation_estimate(&fx, &setup.selector, i, inner, seed)?.mean_layers[i - 1]
            }
        };
        let layer = fx.layers_with_table(&h.last_table(), &setup.selector).layer(i);
        Ok(CondOutcome { expectation, layer })
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let setup = Setup::new(cfg)?;
    let outcomes = simulate(cfg, &setup)?;
    let mut report = Report::new(cfg, setup.theorem_warnings()?);
    let i = cfg.layer;

    let mut tr = Table::new(
        "translation",
        &["lambda", "lhs_hits", "lhs_freq", "lhs_hi", "rhs_hits", "rhs_freq", "rhs_lo", "two_rhs", "slack"],
    );
    let top = setup.sigma as u64 + 1;
    for lambda in 0..=top {
        let l = Proportion::from_flags(outcomes.iter().map(|o| o.expectation >= (lambda + 1) as f64 - EPS));
        let r = Proportion::from_flags(outcomes.iter().map(|o| o.layer >= lambda));
        let hw = l.half_width().hypot(2.0 * r.half_width());
        tr.push(row![lambda, l.hits, l.estimate, l.hi, r.hits, r.estimate, r.lo, 2.0 * r.estimate, 4.0 * hw]);
        let (ok, d) = dominated(l.estimate, 2.0 * r.estimate, hw);
        report.check(format!("Pr[E[S_{i}|hbar] >= {}] <= 2 Pr[S_{i} >= {lambda}]", lambda + 1), ok, d);
    }

    let mut outer = Table::new("outer", &["trial", "expectation", "S_i"]);
    for (t, o) in outcomes.iter().enumerate() {
        outer.push(row![t, o.expectation, o.layer]);
    }
    report.tables.extend([tr, outer]);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"experiment":"cond_translation","hash":{{"c":2,"d":2,"char_bits":3,"range_bits":3}},"n":16,"t":2,"trials":200{extra}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn trivial_lambdas() {
        let r = run(&cfg("")).unwrap();
        let t = r.table("translation").unwrap();
        // lambda = 0: the right side is 2.
        assert_eq!(t.values("two_rhs")[0], 2.0);
        // lambda beyond the alphabet: both sides vanish.
        let last = t.rows.len() - 1;
        assert_eq!(t.values("lhs_freq")[last], 0.0);
        assert_eq!(t.values("rhs_freq")[last], 0.0);
        assert!(r.passed(), "{:?}", r.checks);
    }

    #[test]
    fn resampled_inner_is_close_to_exact() {
        let exact = run(&ExperimentConfig { trials: 20, ..cfg("") }).unwrap();
        let resampled =
            run(&ExperimentConfig { trials: 20, ..cfg(r#","inner":"resample","inner_trials":4000"#) }).unwrap();
        let a = exact.table("outer").unwrap().values("expectation");
        let b = resampled.table("outer").unwrap().values("expectation");
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 0.15, "{x} vs {y}");
        }
        // Same outer samples either way.
        assert_eq!(exact.table("outer").unwrap().values("S_i"), resampled.table("outer").unwrap().values("S_i"));
    }
}
