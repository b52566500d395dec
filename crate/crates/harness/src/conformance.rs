//! Agreement of the double-precision bound formulas with their
//! high-precision evaluation on random valid inputs.

use serde::Serialize;
use tornado_core::bounds::{self, precise, BoundInputs, IndependenceVariant, SymbolConfig, SymbolInputs};
use tornado_core::prng::{stream_key, stream_word};

/// Largest accepted relative error.
pub const TOLERANCE: f64 = 1e-9;

/// Below this magnitude a reference value is treated as zero, and the
/// double result only has to be that small too.
pub const UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaResult {
    pub formula: String,
    pub samples: u64,
    pub failures: u64,
    pub max_rel_err: f64,
    /// First failing comparison, if any.
    pub example: Option<String>,
}

impl FormulaResult {
    fn new(formula: &str) -> Self {
        FormulaResult { formula: formula.to_string(), samples: 0, failures: 0, max_rel_err: 0.0, example: None }
    }

    fn compare(&mut self, double: f64, reference: f64, what: impl FnOnce() -> String) {
        let ok = if reference.abs() < UNDERFLOW {
            double.abs() <= UNDERFLOW
        } else {
            let rel = (double - reference).abs() / reference.abs();
            self.max_rel_err = self.max_rel_err.max(rel);
            rel <= TOLERANCE
        };
        if !ok {
            self.failures += 1;
            if self.example.is_none() {
                self.example = Some(format!("{}: {double:e} vs {reference:e}", what()));
            }
        }
    }

    fn exact<T: PartialEq + std::fmt::Debug>(&mut self, a: T, b: T, what: &str) {
        if a != b {
            self.failures += 1;
            if self.example.is_none() {
                self.example = Some(format!("{what}: {a:?} vs {b:?}"));
            }
        }
    }
}

/// Uniform draws from the core counter-based stream.
struct Draws {
    key: u64,
    i: u64,
}

impl Draws {
    fn unit(&mut self) -> f64 {
        self.i += 1;
        (stream_word(self.key, self.i) >> 11) as f64 * (-53f64).exp2()
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn int(&mut self, lo: u32, hi: u32) -> u32 {
        lo + (self.unit() * f64::from(hi - lo)) as u32
    }
}

type Res<T> = tornado_core::Result<T>;

/// `samples` random inputs per formula.
pub fn sweep(samples: u64, seed: u64) -> Res<Vec<FormulaResult>> {
    let mut r = Draws { key: stream_key(seed, 0x434F_4E46), i: 0 };
    let names = [
        "pretty1", "subsampling", "symbol_table", "p_error", "bernstein", "lambert_w_upper", "mu_bar",
        "layer_upper_tail", "classic_chernoff", "upper_tail", "local_uniformity", "independence",
    ];
    let mut out: Vec<FormulaResult> = names.iter().map(|n| FormulaResult::new(n)).collect();
    for _ in 0..samples {
        let sigma = r.range(11.0, 24.0).exp2().round();
        let delta = r.unit();
        let mu = r.range(0.0, 20.0).exp2();
        let (b, c) = (r.int(1, 6), r.int(1, 8));
        let inp = BoundInputs { delta, mu, sigma, b, c };
        let what = || format!("delta={delta} mu={mu} sigma={sigma} b={b} c={c}");
        out[0].compare(bounds::pretty1_bound(&inp)?.raw, precise::pretty1_bound(delta, mu, sigma, b, c)?.raw, what);
        out[1].compare(
            bounds::subsampling_bound(&inp)?.raw,
            precise::subsampling_bound(delta, mu, sigma, b, c)?.raw,
            what,
        );

        let sinp = SymbolInputs {
            p: (-r.range(2.0, 30.0)).exp2(),
            mu: (sigma * r.range(0.25, 0.5)).round(),
            sigma,
            c: r.int(1, 6),
            d: r.int(3, 8),
            sel_bits: r.int(0, 10),
        };
        let cfg = SymbolConfig::default();
        let a = bounds::symbol_table(&sinp, &cfg)?;
        let p = precise::symbol_table(&sinp, &cfg)?;
        let dev = bounds::ugly_bound(&sinp, &cfg)?.deviation;
        let st = &mut out[2];
        st.exact(a.i_nr, p.i_nr, "i_nr");
        for (x, y, n) in [
            (a.p_reg, p.p_reg, "p_reg"),
            (a.i_max, p.i_max, "i_max"),
            (a.n_top, p.n_top, "n_top"),
            (a.p_top, p.p_top, "p_top"),
            (a.eps3, p.eps3, "eps3"),
            (a.delta_reg, p.delta_reg, "delta_reg"),
            (a.delta_inr, p.delta_inr, "delta_inr"),
            (a.delta_top, p.delta_top, "delta_top"),
            (a.delta_nonreg, p.delta_nonreg, "delta_nonreg"),
            (a.gamma1, p.gamma1, "gamma1"),
            (a.gamma2, p.gamma2, "gamma2"),
            (dev, p.deviation, "deviation"),
        ] {
            st.compare(x, y, || format!("{n} at {sinp:?}"));
        }

        let d = r.int(0, 10);
        out[3].compare(bounds::p_error(c, d, sigma)?.raw, precise::p_error(c, d, sigma)?.raw, || format!("c={c} d={d} sigma={sigma}"));
        let (t, v, m) = (r.range(0.0, 100.0), r.range(0.1, 1000.0), r.range(0.0, 10.0));
        out[4].compare(bounds::bernstein_tail(t, v, m)?.raw, precise::bernstein_tail(t, v, m)?.raw, || format!("t={t} v={v} m={m}"));
        let x = r.range(0.0, 40.0).exp2();
        out[5].compare(bounds::lambert_w_upper(x)?.value, precise::lambert_w_upper(x)?, || format!("x={x}"));
        let (i, f, s) = (u64::from(r.int(1, 20)), r.range(0.01, 0.5), r.range(8.0, 20.0).exp2());
        let dl = r.range(0.0, 4.0);
        out[6].compare(bounds::mu_bar(i, f, s)?.value, precise::mu_bar(i, f, s)?, || format!("i={i} f={f} s={s}"));
        out[7].compare(
            bounds::layer_upper_tail(i, dl, f, s)?.raw,
            precise::layer_upper_tail(i, dl, f, s)?.raw,
            || format!("i={i} delta={dl} f={f} s={s}"),
        );
        out[8].compare(bounds::classic_chernoff(delta, mu)?.raw, precise::classic_chernoff(delta, mu)?.raw, what);
        out[9].compare(bounds::upper_tail_tornado(delta, mu)?.raw, precise::upper_tail_tornado(delta, mu)?.raw, what);
        out[10].compare(
            bounds::local_uniformity_error(sigma, b)?.raw,
            precise::local_uniformity_error(sigma, b)?.raw,
            what,
        );
        let mu_i = sigma * r.range(0.0, 0.5);
        let n = sigma * r.range(1.0, 64.0);
        for variant in [IndependenceVariant::Original, IndependenceVariant::Refined { n, c }] {
            out[11].compare(
                bounds::independence_failure_bound(mu_i, sigma, d, variant)?.raw,
                precise::independence_failure_bound(mu_i, sigma, d, variant)?.raw,
                || format!("mu={mu_i} sigma={sigma} d={d} {variant:?}"),
            );
        }
        for f in &mut out {
            f.samples += 1;
        }
    }
    Ok(out)
}
