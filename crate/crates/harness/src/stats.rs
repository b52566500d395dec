//! Binomial confidence intervals and running moments.

use serde::Serialize;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.5758293035489004;

/// Wilson score interval for `hits` successes in `trials` Bernoulli trials.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && hits <= trials, "need 0 <= hits <= trials, trials > 0");
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / den;
    let half = z / den * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // Rounding can push an endpoint past the point estimate at p = 0 or 1.
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// An empirical frequency with its 99% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        let (lo, hi) = wilson_interval(hits, trials, Z99);
        Proportion { hits, trials, estimate: hits as f64 / trials as f64, lo, hi }
    }

    pub fn from_flags(flags: impl IntoIterator<Item = bool>) -> Self {
        let (mut hits, mut trials) = (0, 0);
        for f in flags {
            trials += 1;
            hits += u64::from(f);
        }
        Self::new(hits, trials)
    }

    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn from_values(xs: impl IntoIterator<Item = f64>) -> Self {
        let mut m = Moments::default();
        for x in xs {
            m.push(x);
        }
        m
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance; 0 with fewer than two values.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.std_dev() / (self.n as f64).sqrt()
        }
    }
}
