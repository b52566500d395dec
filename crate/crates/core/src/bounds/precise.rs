//! Direct high-precision evaluation of the bound formulas.
//!
//! Each formula is evaluated as written (powers, quotients, factorials)
//! with binary floating point of [`PRECISION_BITS`] bits, about 57
//! significant decimal digits, and rounded to `f64` only at the end.

use dashu_float::FBig;
use dashu_int::IBig;

use super::{IndependenceVariant, RegularThreshold, SymbolConfig, SymbolInputs};
use crate::error::{Error, Result};

pub const PRECISION_BITS: usize = 192;

type F = FBig;

fn num(x: f64) -> F {
    F::try_from(x).expect("finite input").with_precision(PRECISION_BITS).value()
}

fn int(n: i64) -> F {
    F::from(n).with_precision(PRECISION_BITS).value()
}

fn to_f64(x: &F) -> f64 {
    x.to_f64().value()
}

fn ln6() -> F {
    int(6).ln()
}

/// `2^(-s/2)`, exact when `s` is an even integer.
fn half_pow(s: f64) -> F {
    let h = s / 2.0;
    if h.fract() == 0.0 && h.abs() < 1e15 {
        F::from_parts(IBig::ONE, -(h as isize)).with_precision(PRECISION_BITS).value()
    } else {
        (-(num(h) * int(2).ln())).exp()
    }
}

fn three_over_pow(s: f64, b: i64) -> F {
    (int(3) / num(s)).powi(IBig::from(b))
}

/// A bound evaluated at high precision, rounded to `f64` per part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreciseBound {
    pub raw: f64,
    pub exp_term: f64,
    pub additive_term: f64,
}

fn bound(exp_term: F, additive: F) -> PreciseBound {
    let raw = &exp_term + &additive;
    PreciseBound { raw: to_f64(&raw), exp_term: to_f64(&exp_term), additive_term: to_f64(&additive) }
}

fn check(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(msg.into()))
    }
}

pub fn classic_chernoff(delta: f64, mu: f64) -> Result<PreciseBound> {
    check((0.0..=1.0).contains(&delta) && mu >= 0.0, "delta in [0, 1], mu >= 0")?;
    let d = num(delta);
    let e = (-(num(mu) * &d * &d) / int(3)).exp();
    Ok(bound(int(2) * e, int(0)))
}

fn upper_tail_f(delta: &F, mu: &F) -> F {
    let one_plus = int(1) + delta;
    let base = delta.exp() / one_plus.powf(&one_plus);
    base.powf(mu)
}

pub fn upper_tail_tornado(delta: f64, mu: f64) -> Result<PreciseBound> {
    check(delta >= 0.0 && mu >= 0.0, "delta >= 0, mu >= 0")?;
    if mu == 0.0 {
        return Ok(bound(int(1), int(0)));
    }
    Ok(bound(upper_tail_f(&num(delta), &num(mu)), int(0)))
}

pub fn local_uniformity_error(sigma: f64, b: u32) -> Result<PreciseBound> {
    check(sigma >= 2.0, "alphabet size at least 2")?;
    Ok(bound(int(0), int(24) * three_over_pow(sigma, i64::from(b)) + half_pow(sigma)))
}

fn layered_additive(factor: u32, sigma: f64, b: u32) -> F {
    int(i64::from(factor)) * num(sigma).ln() * (int(49) * three_over_pow(sigma, i64::from(b)) + int(3) * half_pow(sigma))
}

pub fn pretty1_bound(delta: f64, mu: f64, sigma: f64, b: u32, c: u32) -> Result<PreciseBound> {
    check(delta >= 0.0 && mu >= 0.0 && sigma > 1.0, "delta, mu >= 0, sigma > 1")?;
    let d = num(delta);
    let e = int(3) * (-(&d * &d * num(mu)) / int(7)).exp();
    Ok(bound(e, layered_additive(c + b + 1, sigma, b)))
}

pub fn subsampling_bound(delta: f64, mu: f64, sigma: f64, b: u32, c: u32) -> Result<PreciseBound> {
    check(delta >= 0.0 && mu >= 0.0 && sigma > 1.0, "delta, mu >= 0, sigma > 1")?;
    let d = num(delta);
    let e = int(5) * (-(&d * &d * num(mu)) / int(3)).exp();
    Ok(bound(e, layered_additive(c + b + 2, sigma, b)))
}

pub fn bernstein_tail(t: f64, variance_sum: f64, m: f64) -> Result<PreciseBound> {
    check(t >= 0.0 && variance_sum >= 0.0 && m >= 0.0, "non-negative arguments")?;
    if t == 0.0 {
        return Ok(bound(int(1), int(0)));
    }
    let t = num(t);
    let den = num(variance_sum) + &t * num(m) / int(3);
    Ok(bound((-(num(0.5) * &t * &t) / den).exp(), int(0)))
}

fn factorial(i: u64) -> F {
    let mut acc = IBig::ONE;
    for k in 2..=i {
        acc *= IBig::from(k);
    }
    F::from(acc).with_precision(PRECISION_BITS).value()
}

fn mu_bar_f(i: u64, f: f64, sigma: f64) -> F {
    num(sigma) * num(f).powi(IBig::from(i)) / factorial(i)
}

pub fn mu_bar(i: u64, f: f64, sigma: f64) -> Result<f64> {
    check(f >= 0.0 && sigma > 0.0, "f >= 0, sigma > 0")?;
    Ok(to_f64(&mu_bar_f(i, f, sigma)))
}

pub fn layer_upper_tail(i: u64, delta: f64, f: f64, sigma: f64) -> Result<PreciseBound> {
    check(delta >= 0.0 && f >= 0.0 && sigma > 0.0, "non-negative arguments")?;
    let m = mu_bar_f(i, f, sigma);
    if m == int(0) {
        return Ok(bound(int(1), int(0)));
    }
    Ok(bound(upper_tail_f(&num(delta), &m), int(0)))
}

pub fn lambert_w_upper(x: f64) -> Result<f64> {
    check(x > (-1.0f64).exp(), "x must exceed 1/e")?;
    let x = num(x);
    Ok(to_f64(&((int(2) * &x) / (x.ln() + int(1))).ln()))
}

pub fn p_error(c: u32, d: u32, sigma: f64) -> Result<PreciseBound> {
    check(sigma > 1.0, "sigma > 1")?;
    let factor = (i64::from(c) + i64::from(d) - 2).max(0);
    let add = int(factor)
        * num(sigma).ln()
        * (int(49) * three_over_pow(sigma, i64::from(d) - 3) + int(3) * half_pow(sigma));
    Ok(bound(int(0), add))
}

pub fn independence_failure_bound(mu: f64, sigma: f64, d: u32, variant: IndependenceVariant) -> Result<PreciseBound> {
    check(mu >= 0.0 && sigma > 1.0, "mu >= 0, sigma > 1")?;
    let m = num(mu);
    let cube = &m * &m * &m * three_over_pow(sigma, i64::from(d) + 1);
    Ok(match variant {
        IndependenceVariant::Original => bound(int(7) * cube, half_pow(sigma)),
        IndependenceVariant::Refined { n, c } => {
            check(n > 0.0, "n > 0")?;
            let lead = int(3).powi(IBig::from(c)) * num(sigma) / num(n);
            let f = &m / num(sigma);
            let second = if mu == 0.0 { int(0) } else { f.powf(&(num(sigma) / int(2))) };
            bound(lead * int(3) * cube, second)
        }
    })
}

/// The symbol table, each entry rounded to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreciseSymbols {
    pub p_reg: f64,
    pub i_nr: u64,
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
    pub deviation: f64,
}

fn min(a: F, b: F) -> F {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn symbol_table(inp: &SymbolInputs, cfg: &SymbolConfig) -> Result<PreciseSymbols> {
    check(inp.p > 0.0 && inp.p < 1.0 && inp.mu > 0.0 && inp.sigma > 1.0, "p in (0,1), mu > 0, sigma > 1")?;
    let p = num(inp.p);
    let mu = num(inp.mu);
    let s = num(inp.sigma);
    let s_sec = num(cfg.s_sec);
    let s_all = num(cfg.s_all);
    let l = (int(1) / &p).ln();
    let lsec = (&s_sec / &p).ln();
    let inner = match cfg.threshold {
        RegularThreshold::Table => lsec.clone(),
        RegularThreshold::InverseP => l.clone(),
    };
    let p_reg = &p / (((&mu / int(2)) / inner).ln() / ln6() * &s_all);
    let cut = (&s_all / &p_reg).ln();
    let f = inp.mu / inp.sigma;
    let mut i_nr = 3u64;
    while i_nr < super::MAX_LAYER_SCAN && mu_bar_f(i_nr, f, inp.sigma) >= cut {
        i_nr += 1;
    }
    let i_max = int(i64::from(inp.d) - 2) * s.ln() + int(i64::from(inp.sel_bits)) * int(2).ln();
    let lreg = (&s_sec / &p_reg).ln();
    let n_top = (&lreg * &s_all / &p).ln() / ln6();
    let p_top = min(&p_reg / &s_sec, &p / (&n_top * &s_all));
    let sqrt6 = int(6).sqrt();
    let eps3 = (int(2) + sqrt6) * (&lsec / &s).sqrt() + (num(0.5) * &l + int(6)) / &mu;
    let root = (&l * &mu).sqrt();
    let delta_reg = num(0.181) * &root + num(0.066) * (&mu / &l).sqrt() + int(2).sqrt();
    let delta_inr = num(1.33) * int(1).exp() * &lreg + int(1);
    let delta_top = int(2) * (int(1) / &p_top).ln() * (int(2) + n_top.ln().ln()) + &n_top;
    let delta_nonreg = &delta_inr + &delta_top + int(3);
    let gamma1 = (int(7) / int(3) * (int(1) + &eps3)).sqrt() + num(0.181);
    let gamma2 = &delta_reg - num(0.181) * &root + &delta_nonreg + &l;
    let deviation = &root * &gamma1 + &gamma2;
    Ok(PreciseSymbols {
        p_reg: to_f64(&p_reg),
        i_nr,
        i_max: to_f64(&i_max),
        n_top: to_f64(&n_top),
        p_top: to_f64(&p_top),
        eps3: to_f64(&eps3),
        delta_reg: to_f64(&delta_reg),
        delta_inr: to_f64(&delta_inr),
        delta_top: to_f64(&delta_top),
        delta_nonreg: to_f64(&delta_nonreg),
        gamma1: to_f64(&gamma1),
        gamma2: to_f64(&gamma2),
        deviation: to_f64(&deviation),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let v = classic_chernoff(0.1, 2100.0).unwrap();
        assert!((v.raw - 2.0 * (-7.0f64).exp()).abs() < 1e-17);
        let u = upper_tail_tornado(1.0, 10.0).unwrap();
        let want = (std::f64::consts::E / 4.0).powi(10);
        assert!((u.raw / want - 1.0).abs() < 1e-14);
        assert_eq!(half_pow(8.0), F::from_parts(IBig::ONE, -4));
        assert!((mu_bar(3, 0.5, 256.0).unwrap() - 16.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn tiny_values_survive() {
        let v = pretty1_bound(1.0, 32768.0, 65536.0, 1, 4).unwrap();
        assert!(v.exp_term > 0.0 || v.exp_term == 0.0);
        assert!(v.additive_term > 0.14 && v.additive_term < 0.16);
    }
}
