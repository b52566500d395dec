//! Monte Carlo experiments. Each trial builds fresh hashers from its own
//! derived seed; trials run on a worker pool and results are collected in
//! trial order, so reports do not depend on the thread count.

pub mod cond;
pub mod coupling;
pub mod independence;
pub mod layers;
pub mod sketch;
pub mod tail;

use std::fmt;

use rayon::prelude::*;
use tornado_core::bounds::{self, BoundInputs};
use tornado_core::selection::Selector;
use tornado_core::{HashParams, Key, KeyHasher, TornadoHasher};

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};
use crate::keysets;
use crate::report::Report;
use crate::seeds;

#[derive(Debug)]
pub enum ExperimentError {
    Config(ConfigError),
    Core(tornado_core::Error),
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::Config(e) => e.fmt(f),
            ExperimentError::Core(e) => write!(f, "experiment failed: {e}"),
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<ConfigError> for ExperimentError {
    fn from(e: ConfigError) -> Self {
        ExperimentError::Config(e)
    }
}

impl From<tornado_core::Error> for ExperimentError {
    fn from(e: tornado_core::Error) -> Self {
        ExperimentError::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

/// Runs the configured experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::LowerTail => Ok(tail::run_both(cfg)?.0),
        ExperimentKind::UpperTail => Ok(tail::run_both(cfg)?.1),
        ExperimentKind::Layers => layers::run(cfg),
        ExperimentKind::CondTranslation => cond::run(cfg),
        ExperimentKind::Independence => independence::run(cfg),
        ExperimentKind::SketchAccuracy => sketch::run(cfg),
        ExperimentKind::CouplingCount => coupling::run(cfg),
    }
}

/// Parameters, selector and key set shared by the trials of a run.
pub struct Setup {
    pub params: HashParams,
    pub selector: Selector,
    pub keys: Vec<Key>,
    /// `n / 2^t`.
    pub mu: f64,
    /// Alphabet size.
    pub sigma: f64,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let params = cfg.params()?;
        let selector = cfg.selector()?;
        let keys = keysets::for_params(cfg.keys, cfg.n, &params, seeds::keyset_seed(cfg.master_seed))?;
        // Fails here, before any trial, if the tables would not fit.
        TornadoHasher::new(0, params)?;
        Ok(Setup {
            params,
            selector,
            keys,
            mu: selector.expected(cfg.n).as_f64(),
            sigma: params.alphabet_size() as f64,
        })
    }

    pub fn b(&self) -> u32 {
        self.params.d.saturating_sub(3)
    }

    pub fn hasher(&self, cfg: &ExperimentConfig, trial: u64) -> Result<TornadoHasher> {
        Ok(TornadoHasher::new(seeds::trial_seed(cfg.master_seed, cfg.experiment, trial), self.params)?)
    }

    /// Precondition warnings of the layered lower-tail theorem.
    pub fn theorem_warnings(&self) -> Result<Vec<String>> {
        let inp = BoundInputs { delta: 0.0, mu: self.mu, sigma: self.sigma, b: self.b(), c: self.params.c };
        Ok(bounds::pretty1_bound(&inp)?.warnings)
    }
}

/// Runs `f` for every trial index and returns the results in trial order.
pub(crate) fn run_trials<T, F>(cfg: &ExperimentConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| ConfigError(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..cfg.trials).into_par_iter().map(f).collect())
}

/// One-sided comparison `empirical <= bound + 4 * half_width`.
pub(crate) fn dominated(empirical: f64, bound: f64, half_width: f64) -> (bool, String) {
    let slack = 4.0 * half_width;
    (empirical <= bound + slack, format!("empirical {empirical:e} <= bound {bound:e} + slack {slack:e}"))
}

/// Derived keys of `keys`, each `c + d` characters long.
pub(crate) fn derived_keys(h: &TornadoHasher, keys: &[Key]) -> Vec<Vec<u64>> {
    let len = h.params().derived_len();
    keys.iter()
        .map(|&k| {
            let mut out = vec![0; len];
            h.derive_trusted(k, &mut out);
            out
        })
        .collect()
}
