//! Accuracy of the sketch estimators against the exact answer.
//!
//! For the similarity estimators the two sets are `A = keys[0..n]` and
//! `B = keys[n - overlap..2n - overlap]`, so `J(A, B) = overlap / (2n - overlap)`.
//! A trial whose estimate is undefined (holes, empty sample) is left out
//! and counted in the `skipped` column.

use tornado_core::sketches::{
    frequency_estimate, threshold_sample, BottomKSketch, KPartitionSketch, VectorKSample,
};
use tornado_core::{Dyadic, Error, Key, KeyHasher, RandomOracle};

use super::{run_trials, Result, Setup};
use crate::config::{Estimator, ExperimentConfig, SketchSpec};
use crate::keysets;
use crate::report::{Report, Table};
use crate::row;
use crate::seeds;
use crate::stats::Moments;

/// Keys and exact answer of a sketch run.
struct Instance {
    keys: Vec<Key>,
    truth: f64,
}

fn instance(cfg: &ExperimentConfig, s: &SketchSpec, setup: &Setup) -> Result<Instance> {
    let p = setup.params;
    match s.estimator {
        Estimator::BottomK | Estimator::KPartition => Ok(Instance { keys: setup.keys.clone(), truth: cfg.n as f64 }),
        Estimator::Frequency => {
            let even = setup.keys.iter().filter(|k| k.0 % 2 == 0).count() as f64;
            Ok(Instance { keys: setup.keys.clone(), truth: even / cfg.n.max(1) as f64 })
        }
        Estimator::Jaccard | Estimator::SignedProjection => {
            // One character is reserved for the replica index.
            let total = 2 * cfg.n - s.overlap;
            let keys = keysets::generate(
                cfg.keys,
                total,
                (p.c - 1) * p.char_bits,
                p.char_bits,
                seeds::keyset_seed(cfg.master_seed),
            )?;
            Ok(Instance { keys, truth: s.overlap as f64 / total as f64 })
        }
    }
}

fn similarity_sets<'a>(cfg: &ExperimentConfig, s: &SketchSpec, keys: &'a [Key]) -> (&'a [Key], &'a [Key]) {
    let n = cfg.n as usize;
    let start = n - s.overlap as usize;
    (&keys[..n], &keys[start..start + n])
}

/// One estimate, or `None` when it is undefined for this hash function.
fn estimate<H: KeyHasher>(cfg: &ExperimentConfig, s: &SketchSpec, keys: &[Key], h: &H) -> Result<Option<f64>> {
    let undefined = |e: Error| match e {
        Error::Holes(_) | Error::EmptySample => Ok(None),
        e => Err(e.into()),
    };
    match s.estimator {
        Estimator::BottomK => Ok(Some(BottomKSketch::from_keys(s.k, h, keys)?.distinct_estimate())),
        Estimator::KPartition => Ok(Some(KPartitionSketch::from_keys(s.k, h, keys)?.distinct_estimate())),
        Estimator::Frequency => {
            let sample = threshold_sample(keys, h, Dyadic::new(1, s.sample_log2)?)?;
            frequency_estimate(&sample, |k| k.0 % 2 == 0).map(Some).or_else(undefined)
        }
        Estimator::Jaccard | Estimator::SignedProjection => {
            let (a, b) = similarity_sets(cfg, s, keys);
            let va = VectorKSample::build(a, h, s.k, s.target_error)?;
            let vb = VectorKSample::build(b, h, s.k, s.target_error)?;
            if va.holes() > 0 || vb.holes() > 0 {
                return Ok(None);
            }
            if s.estimator == Estimator::Jaccard {
                va.jaccard(&vb).map(Some).or_else(undefined)
            } else {
                let (pa, pb) = (va.signed_projection()?, vb.signed_projection()?);
                Ok(Some(pa.iter().zip(&pb).map(|(x, y)| x * y).sum()))
            }
        }
    }
}

/// Standard error of one estimate under a fully random hash function.
fn model_se(cfg: &ExperimentConfig, s: &SketchSpec, truth: f64) -> f64 {
    let k = s.k as f64;
    match s.estimator {
        Estimator::BottomK => truth / (k - 1.0).max(1.0).sqrt(),
        Estimator::KPartition => 1.04 * truth / k.sqrt(),
        Estimator::Jaccard => (truth * (1.0 - truth) / k).sqrt(),
        Estimator::SignedProjection => ((1.0 - truth * truth) / k).sqrt(),
        Estimator::Frequency => {
            let m = cfg.n as f64 * (-(s.sample_log2 as f64)).exp2();
            (truth * (1.0 - truth) / m.max(1.0)).sqrt()
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let s = cfg.sketch.expect("validated");
    let setup = Setup::new(cfg)?;
    let inst = instance(cfg, &s, &setup)?;
    let est: Vec<(Option<f64>, Option<f64>)> = run_trials(cfg, |trial| {
        let h = setup.hasher(cfg, trial)?;
        let t = estimate(cfg, &s, &inst.keys, &h)?;
        let o = if cfg.oracle_baseline {
            let o = RandomOracle::new(seeds::trial_seed(cfg.master_seed, cfg.experiment, trial), setup.params)?;
            estimate(cfg, &s, &inst.keys, &o)?
        } else {
            None
        };
        Ok((t, o))
    })?;
    let mut report = Report::new(cfg, Vec::new());

    let mut summary = Table::new(
        "estimator",
        &["scheme", "truth", "trials", "skipped", "mean", "sd", "se_empirical", "se_model", "z"],
    );
    let mut schemes = vec![("tornado", est.iter().map(|e| e.0).collect::<Vec<_>>())];
    if cfg.oracle_baseline {
        schemes.push(("oracle", est.iter().map(|e| e.1).collect()));
    }
    for (name, values) in &schemes {
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        let skipped = values.len() - defined.len();
        let m = Moments::from_values(defined.iter().copied());
        let se = m.std_error();
        let z = if se > 0.0 { (m.mean() - inst.truth) / se } else { 0.0 };
        summary.push(row![
            *name, inst.truth, defined.len(), skipped, m.mean(), m.std_dev(), se,
            model_se(cfg, &s, inst.truth), z
        ]);
        let ok = defined.len() >= 2 && (m.mean() - inst.truth).abs() <= 4.0 * se;
        report.check(
            format!("{name}: mean estimate within 4 standard errors of truth"),
            ok,
            format!("mean {:e}, truth {:e}, se {se:e}, {} trials", m.mean(), inst.truth, defined.len()),
        );
    }

    let mut rows = Table::new("estimates", &["trial", "scheme", "estimate"]);
    for (trial, (t, o)) in est.iter().enumerate() {
        for (name, v) in [("tornado", t), ("oracle", o)] {
            if let Some(v) = v {
                rows.push(row![trial, name, *v]);
            }
        }
    }
    report.tables.extend([summary, rows]);
    Ok(report)
}
