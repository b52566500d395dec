//! Experiment configuration, read from JSON.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tornado_core::selection::Selector;
use tornado_core::HashParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    LowerTail,
    UpperTail,
    Layers,
    CondTranslation,
    Independence,
    SketchAccuracy,
    CouplingCount,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::LowerTail,
        ExperimentKind::UpperTail,
        ExperimentKind::Layers,
        ExperimentKind::CondTranslation,
        ExperimentKind::Independence,
        ExperimentKind::SketchAccuracy,
        ExperimentKind::CouplingCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::LowerTail => "lower_tail",
            ExperimentKind::UpperTail => "upper_tail",
            ExperimentKind::Layers => "layers",
            ExperimentKind::CondTranslation => "cond_translation",
            ExperimentKind::Independence => "independence",
            ExperimentKind::SketchAccuracy => "sketch_accuracy",
            ExperimentKind::CouplingCount => "coupling_count",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::LowerTail => "Pr[|X| < (1-delta) mu] for tornado and the oracle against the lower-tail bounds",
            ExperimentKind::UpperTail => {
                "Pr[|X| >= (1+delta) mu and X independent] against the Chernoff upper tail"
            }
            ExperimentKind::Layers => "mean of S_i [J] against mu_bar_i, and the layer upper tails",
            ExperimentKind::CondTranslation => "Pr[E[S_i | hbar] >= lambda + 1] against 2 Pr[S_i >= lambda]",
            ExperimentKind::Independence => "frequency of linearly dependent derived selected keys",
            ExperimentKind::SketchAccuracy => "bias of the bottom-k, k-partition, Jaccard and frequency estimators",
            ExperimentKind::CouplingCount => "tornado on A against the oracle on the coupled sets A'",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyGen {
    /// `0..n`.
    #[default]
    Sequential,
    /// `n` distinct uniformly random keys.
    Random,
    /// A grid over the two lowest characters under a fixed all-ones high
    /// part; rich in four-key zero-sets.
    AdversarialPrefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HashSpec {
    pub c: u32,
    pub d: u32,
    pub char_bits: u32,
    #[serde(default = "default_range_bits")]
    pub range_bits: u32,
}

fn default_range_bits() -> u32 {
    64
}

impl HashSpec {
    pub fn params(&self) -> Result<HashParams, ConfigError> {
        HashParams::new(self.c, self.d, self.char_bits, self.range_bits).map_err(|e| ConfigError(e.to_string()))
    }
}

/// How `E[S_i | hbar]` is obtained in `cond_translation`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMode {
    /// Exact, from the independent per-character bucket distributions.
    #[default]
    Exact,
    /// Mean over `inner_trials` fresh last tables.
    Resample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    BottomK,
    KPartition,
    Jaccard,
    SignedProjection,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SketchSpec {
    pub estimator: Estimator,
    /// Sketch size; unused by `frequency`.
    #[serde(default)]
    pub k: usize,
    /// `|A n B|` for the similarity estimators, with `|A| = |B| = n`.
    #[serde(default)]
    pub overlap: u64,
    /// Threshold sampling rate `2^-sample_log2` for `frequency`.
    #[serde(default = "default_sample_log2")]
    pub sample_log2: u32,
    /// Hole probability target for vector-k replication.
    #[serde(default = "default_target_error")]
    pub target_error: f64,
}

fn default_sample_log2() -> u32 {
    3
}

fn default_target_error() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub hash: HashSpec,
    /// Key-set size.
    pub n: u64,
    #[serde(default)]
    pub keys: KeyGen,
    /// Number of select bits.
    #[serde(default)]
    pub t: u32,
    #[serde(default)]
    pub mask: u64,
    #[serde(default)]
    pub deltas: Vec<f64>,
    pub trials: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Worker threads; results do not depend on it.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Output directory; results do not depend on it.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub oracle_baseline: bool,
    /// Layer index `i` for `cond_translation`.
    #[serde(default = "default_layer")]
    pub layer: usize,
    #[serde(default)]
    pub inner: InnerMode,
    #[serde(default)]
    pub inner_trials: Option<u64>,
    /// Adds a copy of one selected key in `independence`.
    #[serde(default)]
    pub inject_duplicate: bool,
    #[serde(default)]
    pub sketch: Option<SketchSpec>,
    /// Target error probability `P` for `coupling_count`.
    #[serde(default)]
    pub target_error: Option<f64>,
}

fn default_true() -> bool {
    true
}

fn default_layer() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn parse_u64(s: &str) -> Option<u64> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies the `MASTER_SEED` and `THREADS` overrides.
    pub fn apply_env(&mut self, master_seed: Option<&str>, threads: Option<&str>) -> Result<(), ConfigError> {
        if let Some(s) = master_seed {
            self.master_seed = parse_u64(s).ok_or_else(|| bad(format!("MASTER_SEED is not an integer: {s:?}")))?;
        }
        if let Some(s) = threads {
            let t = parse_u64(s).filter(|&t| t >= 1).ok_or_else(|| bad(format!("THREADS must be a positive integer: {s:?}")))?;
            self.threads = Some(t as usize);
        }
        Ok(())
    }

    pub fn params(&self) -> Result<HashParams, ConfigError> {
        self.hash.params()
    }

    pub fn selector(&self) -> Result<Selector, ConfigError> {
        Selector::new(self.t, self.mask).map_err(|e| bad(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = self.params()?;
        if self.trials < 1 {
            return Err(bad("trials must be at least 1"));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(bad(format!("delta {d} is outside [0, 1]")));
        }
        self.selector()?.check(p.range_bits).map_err(|e| bad(e.to_string()))?;
        if p.key_bits() < 64 && self.n > 1u64 << p.key_bits() {
            return Err(bad(format!("n = {} exceeds the key space of {} bits", self.n, p.key_bits())));
        }
        if self.threads == Some(0) {
            return Err(bad("threads must be positive"));
        }
        let needs_derived = matches!(
            self.experiment,
            ExperimentKind::Layers | ExperimentKind::CondTranslation | ExperimentKind::Independence
        );
        if needs_derived && p.d == 0 {
            return Err(bad("this experiment needs d >= 1"));
        }
        if self.layer == 0 {
            return Err(bad("layer index starts at 1"));
        }
        match self.experiment {
            ExperimentKind::CondTranslation => {
                if p.char_bits > 16 {
                    return Err(bad("cond_translation enumerates the alphabet; use char_bits <= 16"));
                }
                if self.inner == InnerMode::Resample && self.inner_trials.unwrap_or(0) == 0 {
                    return Err(bad("inner = resample needs inner_trials >= 1"));
                }
            }
            ExperimentKind::SketchAccuracy => {
                let s = self.sketch.ok_or_else(|| bad("sketch_accuracy needs a sketch section"))?;
                self.validate_sketch(&s, &p)?;
            }
            ExperimentKind::CouplingCount => {
                let pe = self.target_error.ok_or_else(|| bad("coupling_count needs target_error"))?;
                if !(pe > 0.0 && pe < 1.0) {
                    return Err(bad("target_error must lie in (0, 1)"));
                }
                if let Some(s) = self.sketch {
                    if s.estimator != Estimator::KPartition {
                        return Err(bad("coupling_count only takes a k_partition sketch"));
                    }
                    self.validate_sketch(&s, &p)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn validate_sketch(&self, s: &SketchSpec, p: &HashParams) -> Result<(), ConfigError> {
        match s.estimator {
            Estimator::Frequency => {
                if s.sample_log2 > p.range_bits {
                    return Err(bad("sample_log2 exceeds range_bits"));
                }
            }
            Estimator::BottomK => {
                if s.k == 0 {
                    return Err(bad("k must be positive"));
                }
            }
            Estimator::KPartition | Estimator::Jaccard | Estimator::SignedProjection => {
                if !s.k.is_power_of_two() {
                    return Err(bad("k must be a power of two"));
                }
            }
        }
        if matches!(s.estimator, Estimator::Jaccard | Estimator::SignedProjection) {
            if p.c < 2 {
                return Err(bad("vector-k samples need c >= 2"));
            }
            if s.overlap > self.n {
                return Err(bad("overlap exceeds n"));
            }
            if !(s.target_error > 0.0 && s.target_error < 1.0) {
                return Err(bad("sketch target_error must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    /// SHA-256 of the JSON form with `threads` and `output` removed.
    pub fn sha256(&self) -> String {
        let canonical = ExperimentConfig { threads: None, output: None, ..self.clone() };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        format!("{:x}", Sha256::digest(bytes))
    }
}
