//! Lower and upper tails of the selection size `|X|`.
//!
//! Both tails come from one pass over the trials: each trial records
//! `|X|` under tornado hashing, whether the derived selected keys are
//! linearly independent (only evaluated when `|X|` reaches the smallest
//! upper threshold), and `|X|` under the oracle on the same keys.

use tornado_core::bounds::{self, BoundInputs};
use tornado_core::gf2::independence_of_chars;
use tornado_core::selection::select;
use tornado_core::RandomOracle;

use super::{derived_keys, dominated, run_trials, Result, Setup};
use crate::config::ExperimentConfig;
use crate::report::{Report, Table};
use crate::row;
use crate::seeds;
use crate::stats::{Moments, Proportion};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailOutcome {
    pub size: u64,
    /// `None` when the size is below every upper threshold.
    pub independent: Option<bool>,
    pub oracle_size: Option<u64>,
}

pub fn simulate(cfg: &ExperimentConfig, setup: &Setup) -> Result<Vec<TailOutcome>> {
    let min_delta = cfg.deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let upper_start = (1.0 + min_delta) * setup.mu;
    run_trials(cfg, |trial| {
        let h = setup.hasher(cfg, trial)?;
        let sel = select(&setup.keys, &h, &setup.selector)?.selected;
        let size = sel.len() as u64;
        let independent = if (size as f64) >= upper_start {
            Some(independence_of_chars(&derived_keys(&h, &sel)).is_independent())
        } else {
            None
        };
        let oracle_size = if cfg.oracle_baseline {
            let o = RandomOracle::new(seeds::trial_seed(cfg.master_seed, cfg.experiment, trial), setup.params)?;
            Some(select(&setup.keys, &o, &setup.selector)?.selected.len() as u64)
        } else {
            None
        };
        Ok(TailOutcome { size, independent, oracle_size })
    })
}

fn sizes_table(outcomes: &[TailOutcome]) -> Table {
    let mut t = Table::new("sizes", &["scheme", "trials", "mean", "variance", "min", "max"]);
    let mut push = |name: &str, xs: Vec<u64>| {
        if xs.is_empty() {
            return;
        }
        let m = Moments::from_values(xs.iter().map(|&x| x as f64));
        let (lo, hi) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
        t.push(row![name, xs.len(), m.mean(), m.variance(), lo, hi]);
    };
    push("tornado", outcomes.iter().map(|o| o.size).collect());
    push("oracle", outcomes.iter().filter_map(|o| o.oracle_size).collect());
    t
}

fn opt_cell(p: Option<f64>) -> crate::report::Cell {
    match p {
        Some(v) => v.into(),
        None => "".into(),
    }
}

/// Lower- and upper-tail reports from a single set of trials.
pub fn run_both(cfg: &ExperimentConfig) -> Result<(Report, Report)> {
    cfg.validate()?;
    let setup = Setup::new(cfg)?;
    let outcomes = simulate(cfg, &setup)?;
    let warnings = setup.theorem_warnings()?;
    let mu = setup.mu;
    let n = outcomes.len() as u64;

    let mut lower = Report::new(&ExperimentConfig { experiment: crate::config::ExperimentKind::LowerTail, ..cfg.clone() }, warnings.clone());
    let mut lt = Table::new(
        "tail",
        &[
            "delta", "mu", "threshold", "tornado_hits", "tornado_freq", "tornado_lo", "tornado_hi", "oracle_hits",
            "oracle_freq", "oracle_lo", "oracle_hi", "pretty1", "classic_chernoff",
        ],
    );
    for &delta in &cfg.deltas {
        let thr = (1.0 - delta) * mu;
        let tp = Proportion::from_flags(outcomes.iter().map(|o| (o.size as f64) < thr));
        let op = cfg.oracle_baseline.then(|| {
            Proportion::from_flags(outcomes.iter().map(|o| (o.oracle_size.unwrap() as f64) < thr))
        });
        let inp = BoundInputs { delta, mu, sigma: setup.sigma, b: setup.b(), c: setup.params.c };
        let p1 = bounds::pretty1_bound(&inp)?.value;
        let classic = bounds::classic_chernoff(delta, mu)?.value;
        lt.push(row![
            delta, mu, thr, tp.hits, tp.estimate, tp.lo, tp.hi,
            opt_cell(op.map(|p| p.hits as f64)), opt_cell(op.map(|p| p.estimate)),
            opt_cell(op.map(|p| p.lo)), opt_cell(op.map(|p| p.hi)), p1, classic
        ]);
        let (ok, d) = dominated(tp.estimate, p1, tp.half_width());
        lower.check(format!("tornado lower tail <= pretty1 at delta={delta}"), ok, d);
        if let Some(op) = op {
            let slack = tp.half_width() + 3.0 * op.half_width();
            let (ok, d) = dominated(tp.estimate, 3.0 * op.estimate, slack);
            lower.check(format!("tornado lower tail <= 3 x oracle at delta={delta}"), ok, d);
            let (ok, d) = dominated(op.estimate, classic, op.half_width());
            lower.check(format!("oracle lower tail <= classic Chernoff at delta={delta}"), ok, d);
        }
    }
    lower.tables.push(lt);
    lower.tables.push(sizes_table(&outcomes));

    let mut upper = Report::new(&ExperimentConfig { experiment: crate::config::ExperimentKind::UpperTail, ..cfg.clone() }, warnings);
    let mut ut = Table::new(
        "tail",
        &[
            "delta", "mu", "threshold", "tornado_hits", "dependent_hits", "tornado_freq", "tornado_lo", "tornado_hi",
            "oracle_hits", "oracle_freq", "oracle_lo", "oracle_hi", "upper_tail", "classic_chernoff",
        ],
    );
    for &delta in &cfg.deltas {
        let thr = (1.0 + delta) * mu;
        let above = |o: &TailOutcome| (o.size as f64) >= thr;
        let tp = Proportion::from_flags(outcomes.iter().map(|o| above(o) && o.independent == Some(true)));
        let dependent = outcomes.iter().filter(|o| above(o) && o.independent == Some(false)).count() as u64;
        let op = cfg.oracle_baseline.then(|| {
            Proportion::from_flags(outcomes.iter().map(|o| (o.oracle_size.unwrap() as f64) >= thr))
        });
        let ub = bounds::upper_tail_tornado(delta, mu)?.value;
        let classic = bounds::classic_chernoff(delta, mu)?.value;
        ut.push(row![
            delta, mu, thr, tp.hits, dependent, tp.estimate, tp.lo, tp.hi,
            opt_cell(op.map(|p| p.hits as f64)), opt_cell(op.map(|p| p.estimate)),
            opt_cell(op.map(|p| p.lo)), opt_cell(op.map(|p| p.hi)), ub, classic
        ]);
        let (ok, d) = dominated(tp.estimate, ub, tp.half_width());
        upper.check(format!("tornado upper tail with independence <= Chernoff at delta={delta}"), ok, d);
        if let Some(op) = op {
            let (ok, d) = dominated(op.estimate, ub, op.half_width());
            upper.check(format!("oracle upper tail <= Chernoff at delta={delta}"), ok, d);
        }
    }
    upper.tables.push(ut);
    upper.tables.push(sizes_table(&outcomes));
    debug_assert_eq!(n, cfg.trials);
    Ok((lower, upper))
}
