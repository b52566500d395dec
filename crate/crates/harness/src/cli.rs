//! The `tornado` command line.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tornado_core::bounds::{self, precise, BoundInputs, BoundValue, IndependenceVariant, RegularThreshold};
use tornado_core::bounds::{SymbolConfig, SymbolInputs};
use tornado_core::gf2::{independence, GeneralizedKey, Independence, PositionChar};
use tornado_core::sketches::codec::{Header, Reader, SketchKind};
use tornado_core::sketches::{self, BottomKSketch, KPartitionSketch, VectorKSample};
use tornado_core::{HashParams, Key, KeyHasher, RandomOracle, SimpleTabulation, TornadoHasher};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::experiments::{self, ExperimentError};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tornado", version, about = "Tornado tabulation hashing: experiments, bounds, hashing and sketches")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo experiments.
    Experiment {
        #[command(subcommand)]
        command: ExperimentCommand,
    },
    /// Evaluate a bound formula.
    Bounds {
        #[command(subcommand)]
        command: BoundsCommand,
    },
    /// Hash keys read one per line in hex.
    Hash {
        #[command(flatten)]
        hasher: HasherArgs,
        /// Key file, or `-` for standard input.
        #[arg(long)]
        keys: PathBuf,
    },
    /// Build, merge and query sketches.
    Sketch {
        #[command(subcommand)]
        command: SketchCommand,
    },
    /// Linear independence of generalized keys.
    Independence {
        /// One key per line as whitespace-separated `position:character` tokens.
        #[arg(long)]
        check: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum ExperimentCommand {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory for the CSV and JSON reports; overrides the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the experiment kinds.
    List,
}

#[derive(Debug, Subcommand)]
enum BoundsCommand {
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Formula {
    Pretty1,
    Subsampling,
    ClassicChernoff,
    UpperTail,
    GeneralizedChernoff,
    LocalUniformity,
    PError,
    Bernstein,
    MuBar,
    LayerUpperTail,
    LambertWUpper,
    Independence,
    SymbolTable,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    formula: Formula,
    /// Evaluate at high precision.
    #[arg(long)]
    precise: bool,
    /// Print JSON instead of the bare value.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Alphabet size.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    /// Layer index.
    #[arg(long)]
    i: Option<u64>,
    /// `mu / sigma`.
    #[arg(long)]
    f: Option<f64>,
    /// Target error probability.
    #[arg(long)]
    p: Option<f64>,
    /// Deviation for the Bernstein tail.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    variance: Option<f64>,
    /// Bound on each summand for the Bernstein tail.
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    /// Key-set size; selects the refined independence bound.
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    sel_bits: Option<u32>,
    #[arg(long)]
    s_sec: Option<f64>,
    #[arg(long)]
    s_all: Option<f64>,
    /// Use `ln(1/p)` inside `p_reg`.
    #[arg(long)]
    inverse_p: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    Tornado,
    Simple,
    Oracle,
}

#[derive(Debug, Args)]
struct HasherArgs {
    #[arg(long, value_enum, default_value = "tornado")]
    scheme: Scheme,
    #[arg(long, default_value_t = 4)]
    c: u32,
    #[arg(long, default_value_t = 4)]
    d: u32,
    #[arg(long, default_value_t = 16)]
    char_bits: u32,
    #[arg(long, default_value_t = 64)]
    range_bits: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SketchType {
    BottomK,
    KPartition,
    VectorK,
}

#[derive(Debug, Subcommand)]
enum SketchCommand {
    /// Build a sketch of the keys in a file.
    Build {
        #[arg(long, value_enum)]
        kind: SketchType,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        hasher: HasherArgs,
        #[arg(long)]
        keys: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Hole probability target for vector-k replication.
        #[arg(long, default_value_t = 0.01)]
        target_error: f64,
        /// Fixed replication count for vector-k, overriding the target.
        #[arg(long)]
        replication: Option<u32>,
    },
    /// Union of two sketches built with the same hash function.
    Merge {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distinct-count estimate.
    Estimate { file: PathBuf },
    /// Jaccard similarity of two vector-k samples.
    Jaccard { a: PathBuf, b: PathBuf },
    /// Print a sketch as JSON.
    Show { file: PathBuf },
}

/// Overrides taken from the environment.
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub master_seed: Option<String>,
    pub threads: Option<String>,
}

impl Env {
    pub fn from_process() -> Self {
        Env { master_seed: std::env::var("MASTER_SEED").ok(), threads: std::env::var("THREADS").ok() }
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, env: &Env, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                EXIT_OK
            } else {
                let _ = write!(err, "{text}");
                EXIT_CONFIG
            };
        }
    };
    match dispatch(cli.command, env, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_CONFIG
        }
    }
}

fn dispatch(cmd: Command, env: &Env, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    match cmd {
        Command::Experiment { command: ExperimentCommand::List } => {
            for k in ExperimentKind::ALL {
                writeln!(out, "{:<18} {}", k.name(), k.description())?;
            }
            Ok(EXIT_OK)
        }
        Command::Experiment { command: ExperimentCommand::Run { config, output } } => {
            run_experiment(&config, output, env, out, err)
        }
        Command::Bounds { command: BoundsCommand::Eval(a) } => {
            eval_bound(&a, out)?;
            Ok(EXIT_OK)
        }
        Command::Hash { hasher, keys } => {
            let h = build_hasher(&hasher)?;
            for k in read_keys(&keys)? {
                writeln!(out, "{:016x} {:016x}", k.0, h.hash(k)?)?;
            }
            Ok(EXIT_OK)
        }
        Command::Sketch { command } => {
            sketch_command(command, out)?;
            Ok(EXIT_OK)
        }
        Command::Independence { check } => {
            let family = read_family(&check)?;
            match independence(&family) {
                Independence::Independent => writeln!(out, "independent")?,
                Independence::Dependent { witness } => {
                    let w: Vec<String> = witness.iter().map(|i| i.to_string()).collect();
                    writeln!(out, "dependent: zero-set of keys {}", w.join(" "))?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn run_experiment(
    path: &Path,
    output: Option<PathBuf>,
    env: &Env,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<i32> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = match ExperimentConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            writeln!(err, "{e}")?;
            return Ok(EXIT_CONFIG);
        }
    };
    if let Err(e) = cfg.apply_env(env.master_seed.as_deref(), env.threads.as_deref()) {
        writeln!(err, "{e}")?;
        return Ok(EXIT_CONFIG);
    }
    if output.is_some() {
        cfg.output = output;
    }
    let report = match experiments::run(&cfg) {
        Ok(r) => r,
        Err(e @ ExperimentError::Config(_)) | Err(e @ ExperimentError::Core(_)) => {
            writeln!(err, "{e}")?;
            return Ok(EXIT_CONFIG);
        }
    };
    for w in &report.warnings {
        writeln!(err, "out of theorem: {w}")?;
    }
    for c in &report.checks {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    match &cfg.output {
        Some(dir) => {
            for p in report.write(dir).with_context(|| format!("writing to {}", dir.display()))? {
                writeln!(out, "wrote {}", p.display())?;
            }
        }
        None => writeln!(out, "{}", report.json())?,
    }
    Ok(exit_code(&report))
}

pub fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn need<T: Copy>(v: Option<T>, name: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| anyhow!("this formula needs --{name}"))
}

#[derive(Debug, Serialize)]
struct BoundJson {
    value: f64,
    exp_term: f64,
    additive_term: f64,
    vacuous: bool,
    warnings: Vec<String>,
}

impl BoundJson {
    fn from_double(b: BoundValue) -> Self {
        BoundJson { value: b.value, exp_term: b.exp_term, additive_term: b.additive_term, vacuous: b.vacuous, warnings: b.warnings }
    }

    /// High-precision parts with the double route's warnings.
    fn from_precise(p: precise::PreciseBound, warnings: Vec<String>) -> Self {
        BoundJson {
            value: p.raw.clamp(0.0, 1.0),
            exp_term: p.exp_term,
            additive_term: p.additive_term,
            vacuous: p.raw >= 1.0,
            warnings,
        }
    }

    fn scalar(value: f64, warnings: Vec<String>) -> Self {
        BoundJson { value, exp_term: value, additive_term: 0.0, vacuous: false, warnings }
    }
}

fn eval_bound(a: &EvalArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    if a.formula == Formula::SymbolTable {
        let inp = SymbolInputs {
            p: need(a.p, "p")?,
            mu: need(a.mu, "mu")?,
            sigma: need(a.sigma, "sigma")?,
            c: need(a.c, "c")?,
            d: need(a.d, "d")?,
            sel_bits: a.sel_bits.unwrap_or(0),
        };
        let mut cfg = SymbolConfig::default();
        cfg.s_sec = a.s_sec.unwrap_or(cfg.s_sec);
        cfg.s_all = a.s_all.unwrap_or(cfg.s_all);
        if a.inverse_p {
            cfg.threshold = RegularThreshold::InverseP;
        }
        let text = if a.precise {
            serde_json::to_string_pretty(&PreciseSymbolsJson::from(precise::symbol_table(&inp, &cfg)?))?
        } else {
            let u = bounds::ugly_bound(&inp, &cfg)?;
            serde_json::to_string_pretty(&u)?
        };
        writeln!(out, "{text}")?;
        return Ok(());
    }
    let b = evaluate(a)?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&b)?)?;
    } else {
        writeln!(out, "{:e}", b.value)?;
        for w in &b.warnings {
            writeln!(out, "warning: {w}")?;
        }
    }
    Ok(())
}

fn evaluate(a: &EvalArgs) -> anyhow::Result<BoundJson> {
    let hp = a.precise;
    let delta = || need(a.delta, "delta");
    let mu = || need(a.mu, "mu");
    let sigma = || need(a.sigma, "sigma");
    Ok(match a.formula {
        Formula::Pretty1 | Formula::Subsampling => {
            let inp = BoundInputs { delta: delta()?, mu: mu()?, sigma: sigma()?, b: need(a.b, "b")?, c: need(a.c, "c")? };
            let pretty = a.formula == Formula::Pretty1;
            let dbl = if pretty { bounds::pretty1_bound(&inp)? } else { bounds::subsampling_bound(&inp)? };
            if hp {
                let f = if pretty { precise::pretty1_bound } else { precise::subsampling_bound };
                BoundJson::from_precise(f(inp.delta, inp.mu, inp.sigma, inp.b, inp.c)?, dbl.warnings)
            } else {
                BoundJson::from_double(dbl)
            }
        }
        Formula::ClassicChernoff | Formula::UpperTail => {
            let (d, m) = (delta()?, mu()?);
            let classic = a.formula == Formula::ClassicChernoff;
            if hp {
                let p = if classic { precise::classic_chernoff(d, m)? } else { precise::upper_tail_tornado(d, m)? };
                BoundJson::from_precise(p, Vec::new())
            } else if classic {
                BoundJson::from_double(bounds::classic_chernoff(d, m)?)
            } else {
                BoundJson::from_double(bounds::upper_tail_tornado(d, m)?)
            }
        }
        Formula::GeneralizedChernoff => {
            if hp {
                bail!("generalized_chernoff has no high-precision route");
            }
            BoundJson::from_double(bounds::generalized_chernoff(delta()?, mu()?)?)
        }
        Formula::LocalUniformity => {
            let (s, b) = (sigma()?, need(a.b, "b")?);
            let dbl = bounds::local_uniformity_error(s, b)?;
            if hp {
                BoundJson::from_precise(precise::local_uniformity_error(s, b)?, dbl.warnings)
            } else {
                BoundJson::from_double(dbl)
            }
        }
        Formula::PError => {
            let (c, d, s) = (need(a.c, "c")?, need(a.d, "d")?, sigma()?);
            let dbl = bounds::p_error(c, d, s)?;
            if hp {
                BoundJson::from_precise(precise::p_error(c, d, s)?, dbl.warnings)
            } else {
                BoundJson::from_double(dbl)
            }
        }
        Formula::Bernstein => {
            let (t, v, m) = (need(a.t, "t")?, need(a.variance, "variance")?, need(a.m, "m")?);
            let dbl = bounds::bernstein_tail(t, v, m)?;
            if hp {
                BoundJson::from_precise(precise::bernstein_tail(t, v, m)?, dbl.warnings)
            } else {
                BoundJson::from_double(dbl)
            }
        }
        Formula::MuBar => {
            let (i, f, s) = (need(a.i, "i")?, need(a.f, "f")?, sigma()?);
            let dbl = bounds::mu_bar(i, f, s)?;
            let v = if hp { precise::mu_bar(i, f, s)? } else { dbl.value };
            BoundJson::scalar(v, dbl.warnings)
        }
        Formula::LayerUpperTail => {
            let (i, d, f, s) = (need(a.i, "i")?, delta()?, need(a.f, "f")?, sigma()?);
            let dbl = bounds::layer_upper_tail(i, d, f, s)?;
            if hp {
                BoundJson::from_precise(precise::layer_upper_tail(i, d, f, s)?, dbl.warnings)
            } else {
                BoundJson::from_double(dbl)
            }
        }
        Formula::LambertWUpper => {
            let x = need(a.x, "x")?;
            let dbl = bounds::lambert_w_upper(x)?;
            let v = if hp { precise::lambert_w_upper(x)? } else { dbl.value };
            BoundJson::scalar(v, dbl.warnings)
        }
        Formula::Independence => {
            let (m, s, d) = (mu()?, sigma()?, need(a.d, "d")?);
            let variant = match a.n {
                Some(n) => IndependenceVariant::Refined { n, c: need(a.c, "c")? },
                None => IndependenceVariant::Original,
            };
            let dbl = bounds::independence_failure_bound(m, s, d, variant)?;
            if hp {
                BoundJson::from_precise(precise::independence_failure_bound(m, s, d, variant)?, dbl.warnings)
            } else {
                BoundJson::from_double(dbl)
            }
        }
        Formula::SymbolTable => unreachable!("handled by the caller"),
    })
}

#[derive(Serialize)]
struct PreciseSymbolsJson {
    p_reg: f64,
    i_nr: u64,
    i_max: f64,
    n_top: f64,
    p_top: f64,
    eps3: f64,
    delta_reg: f64,
    delta_inr: f64,
    delta_top: f64,
    delta_nonreg: f64,
    gamma1: f64,
    gamma2: f64,
    deviation: f64,
}

impl From<precise::PreciseSymbols> for PreciseSymbolsJson {
    fn from(p: precise::PreciseSymbols) -> Self {
        PreciseSymbolsJson {
            p_reg: p.p_reg,
            i_nr: p.i_nr,
            i_max: p.i_max,
            n_top: p.n_top,
            p_top: p.p_top,
            eps3: p.eps3,
            delta_reg: p.delta_reg,
            delta_inr: p.delta_inr,
            delta_top: p.delta_top,
            delta_nonreg: p.delta_nonreg,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            deviation: p.deviation,
        }
    }
}

fn build_hasher(a: &HasherArgs) -> anyhow::Result<Box<dyn KeyHasher>> {
    let p = HashParams::new(a.c, a.d, a.char_bits, a.range_bits)?;
    Ok(match a.scheme {
        Scheme::Tornado => Box::new(TornadoHasher::new(a.seed, p)?),
        Scheme::Simple => Box::new(SimpleTabulation::new(a.seed, p)?),
        Scheme::Oracle => Box::new(RandomOracle::new(a.seed, p)?),
    })
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_u64(s: &str) -> Option<u64> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16).ok(),
        None => s.parse().ok(),
    }
}

fn read_keys(path: &Path) -> anyhow::Result<Vec<Key>> {
    let text = read_text(path)?;
    content_lines(&text)
        .map(|(n, l)| {
            let h = l.strip_prefix("0x").or_else(|| l.strip_prefix("0X")).unwrap_or(l);
            u64::from_str_radix(h, 16).map(Key).map_err(|_| anyhow!("line {n}: {l:?} is not a hex key"))
        })
        .collect()
}

fn read_family(path: &Path) -> anyhow::Result<Vec<GeneralizedKey>> {
    let text = read_text(path)?;
    content_lines(&text)
        .map(|(n, l)| {
            let items = l
                .split_whitespace()
                .map(|tok| {
                    let (p, c) = tok.split_once(':').ok_or_else(|| anyhow!("line {n}: expected position:character, got {tok:?}"))?;
                    let position = p.parse().map_err(|_| anyhow!("line {n}: bad position {p:?}"))?;
                    let character = parse_u64(c).ok_or_else(|| anyhow!("line {n}: bad character {c:?}"))?;
                    Ok(PositionChar { position, character })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            Ok(GeneralizedKey::new(items))
        })
        .collect()
}

enum AnySketch {
    BottomK(BottomKSketch),
    KPartition(KPartitionSketch),
    VectorK(VectorKSample),
}

impl AnySketch {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let h = Header::read(&mut Reader::new(&bytes)).with_context(|| format!("decoding {}", path.display()))?;
        Ok(match h.kind {
            SketchKind::BottomK => AnySketch::BottomK(BottomKSketch::from_bytes(&bytes)?),
            SketchKind::KPartition => AnySketch::KPartition(KPartitionSketch::from_bytes(&bytes)?),
            SketchKind::VectorK => AnySketch::VectorK(VectorKSample::from_bytes(&bytes)?),
        })
    }

    fn to_bytes(&self) -> Vec<u8> {
        match self {
            AnySketch::BottomK(s) => s.to_bytes(),
            AnySketch::KPartition(s) => s.to_bytes(),
            AnySketch::VectorK(s) => s.to_bytes(),
        }
    }

    fn union(&self, other: &Self) -> anyhow::Result<Self> {
        Ok(match (self, other) {
            (AnySketch::BottomK(a), AnySketch::BottomK(b)) => AnySketch::BottomK(a.union(b)?),
            (AnySketch::KPartition(a), AnySketch::KPartition(b)) => AnySketch::KPartition(a.union(b)?),
            (AnySketch::VectorK(a), AnySketch::VectorK(b)) => AnySketch::VectorK(a.union(b)?),
            _ => bail!("sketches are of different kinds"),
        })
    }

    fn json(&self) -> String {
        match self {
            AnySketch::BottomK(s) => sketches::to_json(s),
            AnySketch::KPartition(s) => sketches::to_json(s),
            AnySketch::VectorK(s) => sketches::to_json(s),
        }
    }
}

fn sketch_command(cmd: SketchCommand, out: &mut dyn Write) -> anyhow::Result<()> {
    match cmd {
        SketchCommand::Build { kind, k, hasher, keys, out: path, target_error, replication } => {
            let h = build_hasher(&hasher)?;
            let h = &*h;
            let keys = read_keys(&keys)?;
            let s = match kind {
                SketchType::BottomK => AnySketch::BottomK(BottomKSketch::from_keys(k, &h, &keys)?),
                SketchType::KPartition => AnySketch::KPartition(KPartitionSketch::from_keys(k, &h, &keys)?),
                SketchType::VectorK => AnySketch::VectorK(match replication {
                    Some(j) => VectorKSample::build_with_replication(&keys, &h, k, j)?,
                    None => VectorKSample::build(&keys, &h, k, target_error)?,
                }),
            };
            fs::write(&path, s.to_bytes()).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "wrote {}", path.display())?;
        }
        SketchCommand::Merge { a, b, out: path } => {
            let u = AnySketch::load(&a)?.union(&AnySketch::load(&b)?)?;
            fs::write(&path, u.to_bytes()).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "wrote {}", path.display())?;
        }
        SketchCommand::Estimate { file } => {
            let v = match AnySketch::load(&file)? {
                AnySketch::BottomK(s) => s.distinct_estimate(),
                AnySketch::KPartition(s) => s.distinct_estimate(),
                AnySketch::VectorK(_) => bail!("vector-k samples estimate similarity; use `sketch jaccard`"),
            };
            writeln!(out, "{v}")?;
        }
        SketchCommand::Jaccard { a, b } => match (AnySketch::load(&a)?, AnySketch::load(&b)?) {
            (AnySketch::VectorK(x), AnySketch::VectorK(y)) => writeln!(out, "{}", x.jaccard(&y)?)?,
            _ => bail!("jaccard needs two vector-k samples"),
        },
        SketchCommand::Show { file } => writeln!(out, "{}", AnySketch::load(&file)?.json())?,
    }
    Ok(())
}
