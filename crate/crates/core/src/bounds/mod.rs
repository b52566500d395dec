//! Closed-form tail bounds and the symbols of the layered lower-tail bound.
//!
//! Everything here is evaluated in double precision, in the log domain
//! where a value is a power or an exponential. [`precise`] evaluates the
//! same formulas directly at high precision and serves as a reference.

pub mod precise;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability bound together with its parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    /// `raw` clamped to `[0, 1]`.
    pub value: f64,
    pub raw: f64,
    pub exp_term: f64,
    pub additive_term: f64,
    /// The unclamped value is at least 1.
    pub vacuous: bool,
    pub warnings: Vec<String>,
}

impl BoundValue {
    fn new(exp_term: f64, additive_term: f64, warnings: Vec<String>) -> Self {
        let raw = exp_term + additive_term;
        BoundValue { value: raw.clamp(0.0, 1.0), raw, exp_term, additive_term, vacuous: raw >= 1.0, warnings }
    }
}

/// A real-valued result with precondition warnings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub warnings: Vec<String>,
}

/// Parameters shared by the bound formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub delta: f64,
    pub mu: f64,
    /// Alphabet size `|Sigma|`.
    pub sigma: f64,
    /// Number of derived characters beyond three.
    pub b: u32,
    pub c: u32,
}

const LN2: f64 = std::f64::consts::LN_2;

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn require(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(domain(msg))
    }
}

/// `2^(-s/2)`.
fn half_pow(s: f64) -> f64 {
    (-0.5 * s).exp2()
}

/// `(3/s)^b` via logarithms.
fn three_over(s: f64, b: i64) -> f64 {
    (b as f64 * (3.0 / s).ln()).exp()
}

/// `delta - (1 + delta) ln(1 + delta)`, accurate for small `delta`.
pub fn chernoff_exponent(delta: f64) -> f64 {
    if delta < 0.1 {
        // sum_{k>=2} (-1)^(k+1) delta^k / (k (k - 1))
        let mut term = delta * delta;
        let mut sum = 0.0;
        for k in 2..40u32 {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            sum += sign * term / (f64::from(k) * f64::from(k - 1));
            term *= delta;
            if term < 1e-20 * delta * delta {
                break;
            }
        }
        sum
    } else {
        delta - (1.0 + delta) * delta.ln_1p()
    }
}

/// `2 exp(-mu delta^2 / 3)`, for `delta` in `[0, 1]`.
pub fn classic_chernoff(delta: f64, mu: f64) -> Result<BoundValue> {
    require((0.0..=1.0).contains(&delta), "delta must lie in [0, 1]")?;
    require(mu >= 0.0, "mu must be non-negative")?;
    Ok(BoundValue::new(2.0 * (-mu * delta * delta / 3.0).exp(), 0.0, vec![]))
}

/// `(e^delta / (1 + delta)^(1 + delta))^mu`.
pub fn upper_tail_tornado(delta: f64, mu: f64) -> Result<BoundValue> {
    require(delta >= 0.0, "delta must be non-negative")?;
    require(mu >= 0.0, "mu must be non-negative")?;
    Ok(BoundValue::new((mu * chernoff_exponent(delta)).exp(), 0.0, vec![]))
}

/// Chernoff upper tail for sums dominated by independent variables; the
/// same formula as [`upper_tail_tornado`].
pub fn generalized_chernoff(delta: f64, mu: f64) -> Result<BoundValue> {
    upper_tail_tornado(delta, mu)
}

/// `24 (3/s)^b + 2^(-s/2)`.
pub fn local_uniformity_error(sigma: f64, b: u32) -> Result<BoundValue> {
    require(sigma >= 2.0, "alphabet size must be at least 2")?;
    Ok(BoundValue::new(0.0, 24.0 * three_over(sigma, i64::from(b)) + half_pow(sigma), vec![]))
}

fn theorem_warnings(inp: &BoundInputs, mu_range: (f64, f64), mu_desc: &str) -> Vec<String> {
    let mut w = Vec::new();
    if inp.b < 1 {
        w.push("b < 1".to_string());
    }
    if f64::from(inp.c) > inp.sigma.ln() {
        w.push("c > ln(sigma)".to_string());
    }
    if inp.sigma < 65536.0 * f64::from(inp.b) * f64::from(inp.b) {
        w.push("sigma < 2^16 b^2".to_string());
    }
    if inp.mu < mu_range.0 || inp.mu > mu_range.1 {
        w.push(format!("mu outside {mu_desc}"));
    }
    w
}

fn layered_additive(factor: u32, sigma: f64, b: u32) -> f64 {
    f64::from(factor) * sigma.ln() * (49.0 * three_over(sigma, i64::from(b)) + 3.0 * half_pow(sigma))
}

fn check_inputs(inp: &BoundInputs) -> Result<()> {
    require(inp.delta >= 0.0, "delta must be non-negative")?;
    require(inp.mu >= 0.0, "mu must be non-negative")?;
    require(inp.sigma > 1.0, "alphabet size must exceed 1")
}

/// `3 exp(-delta^2 mu / 7) + (c + b + 1) ln(s) (49 (3/s)^b + 3 * 2^(-s/2))`.
pub fn pretty1_bound(inp: &BoundInputs) -> Result<BoundValue> {
    check_inputs(inp)?;
    let w = theorem_warnings(inp, (inp.sigma / 4.0, inp.sigma / 2.0), "[s/4, s/2]");
    let exp_term = 3.0 * (-inp.delta * inp.delta * inp.mu / 7.0).exp();
    Ok(BoundValue::new(exp_term, layered_additive(inp.c + inp.b + 1, inp.sigma, inp.b), w))
}

/// `5 exp(-delta^2 mu / 3) + (c + b + 2) ln(s) (49 (3/s)^b + 3 * 2^(-s/2))`.
pub fn subsampling_bound(inp: &BoundInputs) -> Result<BoundValue> {
    check_inputs(inp)?;
    let mut w = theorem_warnings(inp, (0.0, inp.sigma / 278.0), "(0, s/278]");
    if inp.delta >= 1.0 {
        w.push("delta >= 1".to_string());
    }
    let exp_term = 5.0 * (-inp.delta * inp.delta * inp.mu / 3.0).exp();
    Ok(BoundValue::new(exp_term, layered_additive(inp.c + inp.b + 2, inp.sigma, inp.b), w))
}

/// `exp(-t^2 / 2 / (variance_sum + t M / 3))`.
pub fn bernstein_tail(t: f64, variance_sum: f64, m: f64) -> Result<BoundValue> {
    require(t >= 0.0 && variance_sum >= 0.0 && m >= 0.0, "arguments must be non-negative")?;
    if t == 0.0 {
        return Ok(BoundValue::new(1.0, 0.0, vec![]));
    }
    let den = variance_sum + t * m / 3.0;
    let v = if den == 0.0 { 0.0 } else { (-0.5 * t * t / den).exp() };
    Ok(BoundValue::new(v, 0.0, vec![]))
}

/// `ln(i!)`.
pub fn ln_factorial(i: u64) -> f64 {
    (2..=i).map(|k| (k as f64).ln()).sum()
}

/// Expected layer size `|Sigma| f^i / i!`.
pub fn mu_bar(i: u64, f: f64, sigma: f64) -> Result<Flagged> {
    require(f >= 0.0, "f must be non-negative")?;
    require(sigma > 0.0, "alphabet size must be positive")?;
    let mut warnings = Vec::new();
    if f > 0.5 {
        warnings.push("f > 1/2".to_string());
    }
    let value = if f == 0.0 {
        if i == 0 {
            sigma
        } else {
            0.0
        }
    } else {
        (sigma.ln() + i as f64 * f.ln() - ln_factorial(i)).exp()
    };
    Ok(Flagged { value, warnings })
}

/// Upper tail of layer `i`: [`upper_tail_tornado`] with `mu = mu_bar(i, f, s)`.
pub fn layer_upper_tail(i: u64, delta: f64, f: f64, sigma: f64) -> Result<BoundValue> {
    let m = mu_bar(i, f, sigma)?;
    let mut b = upper_tail_tornado(delta, m.value)?;
    b.warnings = m.warnings;
    Ok(b)
}

/// `ln(2x / (ln x + 1))`, an upper bound on the Lambert W function for `x > 1/e`.
pub fn lambert_w_upper(x: f64) -> Result<Flagged> {
    require(x > (-1.0f64).exp(), "x must exceed 1/e")?;
    let den = x.ln() + 1.0;
    let mut warnings = Vec::new();
    if den < 1e-6 {
        warnings.push("x is close to 1/e".to_string());
    }
    Ok(Flagged { value: (2.0 * x / den).ln(), warnings })
}

/// Principal branch of the Lambert W function by Newton iteration on `w e^w = x`.
pub fn lambert_w(x: f64) -> Result<f64> {
    require(x >= -(-1.0f64).exp(), "x must be at least -1/e")?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < 1.0 { x } else { x.ln() - x.ln().ln().max(0.0) };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let step = f / (ew * (w + 1.0));
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 1e-16 * w.abs().max(1e-300) {
            break;
        }
    }
    Ok(w)
}

/// `(c + d - 2) ln(s) (49 (3/s)^(d-3) + 3 * 2^(-s/2))`.
pub fn p_error(c: u32, d: u32, sigma: f64) -> Result<BoundValue> {
    require(sigma > 1.0, "alphabet size must exceed 1")?;
    let mut w = Vec::new();
    if sigma < 2048.0 {
        w.push("sigma < 2^11".to_string());
    }
    if f64::from(c) > sigma.ln() {
        w.push("c > ln(sigma)".to_string());
    }
    if d <= 3 {
        w.push("d <= 3 makes the bound vacuous".to_string());
    }
    let factor = (f64::from(c) + f64::from(d) - 2.0).max(0.0);
    let add = factor * sigma.ln() * (49.0 * three_over(sigma, i64::from(d) - 3) + 3.0 * half_pow(sigma));
    Ok(BoundValue::new(0.0, add, w))
}

/// Which bound on the failure probability of linear independence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant")]
pub enum IndependenceVariant {
    /// `7 mu^3 (3/s)^(d+1) + 2^(-s/2)`.
    Original,
    /// `3^c s / n * 3 mu^3 (3/s)^(d+1) + f^(s/2)` with `f = mu / s`.
    Refined { n: f64, c: u32 },
}

pub fn independence_failure_bound(mu: f64, sigma: f64, d: u32, variant: IndependenceVariant) -> Result<BoundValue> {
    require(mu >= 0.0, "mu must be non-negative")?;
    require(sigma > 1.0, "alphabet size must exceed 1")?;
    let mut w = Vec::new();
    if mu > sigma / 2.0 {
        w.push("mu > sigma/2".to_string());
    }
    let cube = 3.0 * mu.ln() + (f64::from(d) + 1.0) * (3.0 / sigma).ln();
    let (first, second) = match variant {
        IndependenceVariant::Original => {
            let first = if mu == 0.0 { 0.0 } else { (7f64.ln() + cube).exp() };
            (first, half_pow(sigma))
        }
        IndependenceVariant::Refined { n, c } => {
            require(n > 0.0, "n must be positive")?;
            let first = if mu == 0.0 {
                0.0
            } else {
                (f64::from(c) * 3f64.ln() + sigma.ln() - n.ln() + 3f64.ln() + cube).exp()
            };
            let f = mu / sigma;
            let second = if f == 0.0 { 0.0 } else { (0.5 * sigma * f.ln()).exp() };
            (first, second)
        }
    };
    Ok(BoundValue::new(first, second, w))
}

/// Which `p_reg` formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularThreshold {
    /// `p / (log6((mu/2) / ln(s_sec/p)) * s_all)`.
    #[default]
    Table,
    /// The same with `ln(1/p)` in place of `ln(s_sec/p)`.
    InverseP,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolConfig {
    pub s_sec: f64,
    pub s_all: f64,
    pub threshold: RegularThreshold,
}

impl Default for SymbolConfig {
    fn default() -> Self {
        SymbolConfig { s_sec: 20.0, s_all: 160.0, threshold: RegularThreshold::Table }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolInputs {
    pub p: f64,
    pub mu: f64,
    pub sigma: f64,
    pub c: u32,
    pub d: u32,
    pub sel_bits: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolTable {
    pub s_sec: f64,
    pub s_all: f64,
    pub p_reg: f64,
    pub i_nr: u64,
    /// `ln(s^(d-2) 2^sel_bits)`; used rounded up where an index is needed.
    pub i_max: f64,
    pub n_top: f64,
    pub p_top: f64,
    pub eps3: f64,
    pub delta_reg: f64,
    pub delta_inr: f64,
    pub delta_top: f64,
    pub delta_nonreg: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub warnings: Vec<String>,
}

impl SymbolTable {
    pub fn i_max_index(&self) -> u64 {
        self.i_max.max(0.0).ceil() as u64
    }
}

/// Upper limit on the scan for the first non-regular layer.
pub const MAX_LAYER_SCAN: u64 = 1_000_000;

fn log6(x: f64) -> f64 {
    x.ln() / 6f64.ln()
}

pub fn symbol_table(inp: &SymbolInputs, cfg: &SymbolConfig) -> Result<SymbolTable> {
    let SymbolInputs { p, mu, sigma, d, sel_bits, .. } = *inp;
    require(p > 0.0 && p < 1.0, "p must lie in (0, 1)")?;
    require(mu > 0.0, "mu must be positive")?;
    require(sigma > 1.0, "alphabet size must exceed 1")?;
    let mut warnings = Vec::new();
    if mu < sigma / 4.0 || mu > sigma / 2.0 {
        warnings.push("mu outside [s/4, s/2]".to_string());
    }
    let l = (1.0 / p).ln();
    if l > mu / 8.6 {
        warnings.push("ln(1/p) > mu/8.6".to_string());
    }
    let inner = match cfg.threshold {
        RegularThreshold::Table => (cfg.s_sec / p).ln(),
        RegularThreshold::InverseP => l,
    };
    let p_reg = p / (log6((mu / 2.0) / inner) * cfg.s_all);
    if !(p_reg > 0.0 && p_reg.is_finite()) {
        warnings.push("p_reg is not a positive probability; mu is too small".to_string());
    }
    let f = mu / sigma;
    let cut = (cfg.s_all / p_reg).ln();
    let mut i_nr = 3;
    while i_nr < MAX_LAYER_SCAN && !(mu_bar(i_nr, f, sigma)?.value < cut) {
        i_nr += 1;
    }
    let i_max = (f64::from(d) - 2.0) * sigma.ln() + f64::from(sel_bits) * LN2;
    let n_top = log6((cfg.s_sec / p_reg).ln() * cfg.s_all / p);
    let p_top = (p_reg / cfg.s_sec).min(p / (n_top * cfg.s_all));
    let eps3 = (2.0 + 6f64.sqrt()) * ((cfg.s_sec / p).ln() / sigma).sqrt() + (0.5 * l + 6.0) / mu;
    let delta_reg = 0.181 * (l * mu).sqrt() + 0.066 * (mu / l).sqrt() + 2f64.sqrt();
    let delta_inr = 1.33 * std::f64::consts::E * (cfg.s_sec / p_reg).ln() + 1.0;
    let delta_top = 2.0 * (1.0 / p_top).ln() * (2.0 + n_top.ln().ln()) + n_top;
    let delta_nonreg = delta_inr + delta_top + 3.0;
    let gamma1 = (7.0 / 3.0 * (1.0 + eps3)).sqrt() + 0.181;
    let gamma2 = delta_reg - 0.181 * (l * mu).sqrt() + delta_nonreg + l;
    Ok(SymbolTable {
        s_sec: cfg.s_sec,
        s_all: cfg.s_all,
        p_reg,
        i_nr,
        i_max,
        n_top,
        p_top,
        eps3,
        delta_reg,
        delta_inr,
        delta_top,
        delta_nonreg,
        gamma1,
        gamma2,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UglyBound {
    /// `sqrt(ln(1/p) mu) gamma1 + gamma2`.
    pub deviation: f64,
    /// `3p + P_error`.
    pub probability: BoundValue,
    pub symbols: SymbolTable,
}

/// `Pr[X < mu - deviation] < probability`.
pub fn ugly_bound(inp: &SymbolInputs, cfg: &SymbolConfig) -> Result<UglyBound> {
    let symbols = symbol_table(inp, cfg)?;
    let pe = p_error(inp.c, inp.d, inp.sigma)?;
    let deviation = ((1.0 / inp.p).ln() * inp.mu).sqrt() * symbols.gamma1 + symbols.gamma2;
    let mut warnings = symbols.warnings.clone();
    warnings.extend(pe.warnings.iter().cloned());
    let probability = BoundValue::new(0.0, 3.0 * inp.p + pe.raw, warnings);
    Ok(UglyBound { deviation, probability, symbols })
}
