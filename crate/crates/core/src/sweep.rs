//! Parameter-grid sweeps driven by a TOML config.
//!
//! ```toml
//! prime_list = [5, 7, 11, 13]
//! seed = 1
//! workers = 4
//! output_path = "sweep.csv"
//!
//! [grids.weyl]
//! j = [1]
//! l_frac = [0.5, 1.0]      # L = max(1, round(l_frac · r))
//! m_frac = [0.5, 1.0]      # M = max(1, floor(m_frac · r / 2))
//! h_frac = [0.25, 1.0]     # H = max(1, floor(h_frac · M))
//! kinds = ["ones", "spike", "random-phase"]
//! eps = 0.05
//!
//! [grids.family]           # every v in [1, p)
//! h = 1
//! u = 1
//! j = 1
//!
//! [grids.palpha]           # α = b/p² + z(Q, γ), Δ = 1/Q³
//! q = [100]
//! gamma = [0.0, 0.25]
//! b = [1]
//!
//! [grids.sieve]            # seeded ±1 coefficients, independent of p
//! q = [2, 4, 8]
//! n = [64, 512]
//! ```
//!
//! Grid points are numbered weyl, family, palpha, sieve, each block in
//! increasing `p` then in the listed order of its parameters. Point `i` uses
//! seed [`derive_seed`]`(seed, i)`. Rows are written in point order, so the
//! output does not depend on the worker count.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::cochrane::{critical_v_set, family_sum, CochraneError};
use crate::counting::{
    self, large_sieve_lhs, ls_bound, p_alpha, p_bound_thm12, weyl_ratio, z_from_gamma, CountingError, FareyWindow,
    SqrtPairParams,
};
use crate::modular::is_prime;
use crate::prng::derive_seed;
use crate::report::{fmt_sig, CsvTable};
use crate::sequences::{generate_sequences, sign_sequence, SequenceKind};

pub const SWEEP_HEADER: [&str; 12] = [
    "p", "r", "j", "L", "M", "H", "gamma", "quantity", "value", "bound", "ratio", "seed",
];

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Counting(#[from] CountingError),
    #[error("{0}")]
    Cochrane(#[from] CochraneError),
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub prime_list: Vec<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub grids: Grids,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub weyl: Option<WeylGrid>,
    pub family: Option<FamilyGrid>,
    pub palpha: Option<PalphaGrid>,
    pub sieve: Option<SieveGrid>,
}

fn default_j() -> Vec<i64> {
    vec![1]
}

fn default_kinds() -> Vec<SequenceKind> {
    SequenceKind::ALL.to_vec()
}

fn default_eps() -> f64 {
    counting::DEFAULT_EPS
}

fn one() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylGrid {
    #[serde(default = "default_j")]
    pub j: Vec<i64>,
    pub l_frac: Vec<f64>,
    pub m_frac: Vec<f64>,
    pub h_frac: Vec<f64>,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<SequenceKind>,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyGrid {
    #[serde(default = "one")]
    pub h: i64,
    #[serde(default = "one")]
    pub u: i64,
    #[serde(default = "one")]
    pub j: i64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PalphaGrid {
    pub q: Vec<u64>,
    pub gamma: Vec<f64>,
    #[serde(default = "default_j")]
    pub b: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveGrid {
    pub q: Vec<u64>,
    pub n: Vec<u64>,
    #[serde(default)]
    pub offset: u64,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, SweepError> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| SweepError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |msg: String| Err(SweepError::Config(msg));
        if self.workers == 0 {
            return bad("workers must be positive".into());
        }
        let needs_primes = self.grids.weyl.is_some() || self.grids.family.is_some() || self.grids.palpha.is_some();
        if needs_primes && self.prime_list.is_empty() {
            return bad("prime_list is empty".into());
        }
        for &p in &self.prime_list {
            if p <= 3 || !is_prime(p) {
                return bad(format!("prime_list entry {p} is not a prime > 3"));
            }
            if p * p > u32::MAX as u64 {
                return bad(format!("prime {p} too large for a sweep"));
            }
        }
        let frac_ok = |v: &[f64]| !v.is_empty() && v.iter().all(|&x| x > 0.0 && x <= 1.0);
        if let Some(w) = &self.grids.weyl {
            if !(frac_ok(&w.l_frac) && frac_ok(&w.m_frac) && frac_ok(&w.h_frac)) {
                return bad("weyl fractions must be non-empty lists in (0, 1]".into());
            }
            if w.j.is_empty() || w.kinds.is_empty() {
                return bad("weyl j and kinds must be non-empty".into());
            }
            if !(w.eps >= 0.0 && w.eps.is_finite()) {
                return bad(format!("weyl eps = {} must be finite and >= 0", w.eps));
            }
            for &p in &self.prime_list {
                if let Some(&j) = w.j.iter().find(|&&j| j.rem_euclid(p as i64) == 0) {
                    return bad(format!("weyl j = {j} is divisible by p = {p}"));
                }
            }
        }
        if let Some(f) = &self.grids.family {
            for &p in &self.prime_list {
                if [f.h, f.u, f.j].iter().any(|x| x.rem_euclid(p as i64) == 0) {
                    return bad(format!("family needs p = {p} coprime to j h u"));
                }
            }
        }
        if let Some(g) = &self.grids.palpha {
            if g.q.is_empty() || g.q.iter().any(|&q| !(2..=100_000).contains(&q)) {
                return bad("palpha q must be a non-empty list in [2, 100000]".into());
            }
            if g.gamma.is_empty() || g.gamma.iter().any(|&x| !(0.0..=0.5).contains(&x)) {
                return bad("palpha gamma must be a non-empty list in [0, 1/2]".into());
            }
            for &p in &self.prime_list {
                if g.b.is_empty() || g.b.iter().any(|b| b.rem_euclid(p as i64) == 0) {
                    return bad(format!("palpha b must be non-empty and coprime to p = {p}"));
                }
            }
        }
        if let Some(s) = &self.grids.sieve {
            if s.q.is_empty() || s.n.is_empty() || s.q.contains(&0) || s.n.contains(&0) {
                return bad("sieve q and n must be non-empty lists of positive integers".into());
            }
            if s.q.iter().any(|&q| q > 64) || s.n.iter().any(|&n| n > 1 << 16) {
                return bad("sieve grid exceeds q <= 64, n <= 65536".into());
            }
        }
        Ok(())
    }

    fn primes(&self) -> Vec<u64> {
        let mut ps = self.prime_list.clone();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// Every grid point, in output order.
    pub fn points(&self) -> Vec<GridPoint> {
        let primes = self.primes();
        let mut out = Vec::new();
        if let Some(w) = &self.grids.weyl {
            for &p in &primes {
                let r = p * p;
                for &j in &w.j {
                    for &lf in &w.l_frac {
                        let l = ((lf * r as f64).round() as u64).max(1);
                        for &mf in &w.m_frac {
                            let m = ((mf * (r / 2) as f64).floor() as u64).max(1);
                            for &hf in &w.h_frac {
                                let h = ((hf * m as f64).floor() as u64).max(1);
                                for &kind in &w.kinds {
                                    out.push(GridPoint::Weyl {
                                        p,
                                        j,
                                        l,
                                        m,
                                        h,
                                        kind,
                                        eps: w.eps,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        if let Some(f) = &self.grids.family {
            for &p in &primes {
                for v in 1..p as i64 {
                    out.push(GridPoint::Family {
                        p,
                        h: f.h,
                        u: f.u,
                        v,
                        j: f.j,
                    });
                }
            }
        }
        if let Some(g) = &self.grids.palpha {
            for &p in &primes {
                for &q in &g.q {
                    for &gamma in &g.gamma {
                        for &b in &g.b {
                            out.push(GridPoint::Palpha { p, q, gamma, b });
                        }
                    }
                }
            }
        }
        if let Some(s) = &self.grids.sieve {
            for &q in &s.q {
                for &n in &s.n {
                    out.push(GridPoint::Sieve { q, n, offset: s.offset });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridPoint {
    Weyl {
        p: u64,
        j: i64,
        l: u64,
        m: u64,
        h: u64,
        kind: SequenceKind,
        eps: f64,
    },
    Family {
        p: u64,
        h: i64,
        u: i64,
        v: i64,
        j: i64,
    },
    Palpha {
        p: u64,
        q: u64,
        gamma: f64,
        b: i64,
    },
    Sieve {
        q: u64,
        n: u64,
        offset: u64,
    },
}

/// One CSV row; `None` columns are left empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: Option<u64>,
    pub r: Option<u64>,
    pub j: Option<i64>,
    pub l: Option<u64>,
    pub m: Option<u64>,
    pub h: Option<u64>,
    pub gamma: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub bound: f64,
    pub seed: u64,
}

impl SweepRow {
    fn blank(quantity: String, value: f64, bound: f64, seed: u64) -> Self {
        Self {
            p: None,
            r: None,
            j: None,
            l: None,
            m: None,
            h: None,
            gamma: None,
            quantity,
            value,
            bound,
            seed,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.value / self.bound
    }

    pub fn fields(&self) -> Vec<String> {
        fn opt<T: fmt::Display>(x: Option<T>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        vec![
            opt(self.p),
            opt(self.r),
            opt(self.j),
            opt(self.l),
            opt(self.m),
            opt(self.h),
            self.gamma.map(fmt_sig).unwrap_or_default(),
            self.quantity.clone(),
            fmt_sig(self.value),
            fmt_sig(self.bound),
            fmt_sig(self.ratio()),
            self.seed.to_string(),
        ]
    }
}

impl GridPoint {
    pub fn evaluate(&self, seed: u64) -> Result<SweepRow, SweepError> {
        match *self {
            GridPoint::Weyl {
                p,
                j,
                l,
                m,
                h,
                kind,
                eps,
            } => {
                let r = p * p;
                let params = SqrtPairParams::new(r, j, l, m, h, eps)?;
                let seqs = generate_sequences(kind, l, m, seed);
                let rep = weyl_ratio(&params, &seqs, None)?;
                Ok(SweepRow {
                    p: Some(p),
                    r: Some(r),
                    j: Some(j),
                    l: Some(l),
                    m: Some(m),
                    h: Some(h),
                    gamma: None,
                    quantity: format!("weyl[kind={kind};eps={}]", fmt_sig(eps)),
                    value: rep.lhs_value,
                    bound: rep.bound_value,
                    seed,
                })
            }
            GridPoint::Family { p, h, u, v, j } => {
                let s = family_sum(h, u, v, j, p)?;
                let a = j * h * u * u;
                let critical = critical_v_set(h, a, p)?.contains(&(v.rem_euclid(p as i64) as u64));
                let bound = if critical { (p as f64).powf(1.5) } else { p as f64 };
                let mut row = SweepRow::blank(
                    format!("family_sum[h={h};u={u};v={v};critical={}]", critical as u8),
                    s.abs(),
                    bound,
                    seed,
                );
                row.p = Some(p);
                row.r = Some(p * p);
                row.j = Some(j);
                Ok(row)
            }
            GridPoint::Palpha { p, q, gamma, b } => {
                let r = p * p;
                let z = z_from_gamma(q as f64, gamma, r as f64);
                let alpha =
                    BigRational::new(BigInt::from(b), BigInt::from(r)) + BigRational::from_float(z).expect("finite z");
                let delta = BigRational::new(BigInt::from(1), BigInt::from(q).pow(3));
                let count = p_alpha(&FareyWindow::new(q, alpha, delta)?);
                let mut row = SweepRow::blank(
                    format!("palpha[Q={q};b={b}]"),
                    count as f64,
                    p_bound_thm12(q as f64, r)?,
                    seed,
                );
                row.p = Some(p);
                row.r = Some(r);
                row.j = Some(b);
                row.gamma = Some(gamma);
                Ok(row)
            }
            GridPoint::Sieve { q, n, offset } => {
                let coeffs = sign_sequence(n as usize, seed);
                let (lhs, z) = large_sieve_lhs(q, offset, &coeffs)?;
                Ok(SweepRow::blank(
                    format!("sieve_lhs[Q={q};N={n};offset={offset}]"),
                    lhs,
                    ls_bound(q as f64, n as f64, z),
                    seed,
                ))
            }
        }
    }
}

/// Evaluate every grid point on a pool of `config.workers` threads.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    config.validate()?;
    let points = config.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| SweepError::Config(e.to_string()))?;
    pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, pt)| pt.evaluate(derive_seed(config.seed, i as u64)))
            .collect()
    })
}

pub fn rows_to_csv(rows: &[SweepRow]) -> CsvTable {
    let mut t = CsvTable::new(SWEEP_HEADER);
    for row in rows {
        t.push(row.fields());
    }
    t
}

/// Split a `name[k=v;…]` quantity into its name and parameters.
pub fn parse_quantity(q: &str) -> (&str, Vec<(&str, &str)>) {
    match q.split_once('[') {
        Some((name, rest)) => {
            let inner = rest.trim_end_matches(']');
            let params = inner
                .split(';')
                .filter(|s| !s.is_empty())
                .filter_map(|kv| kv.split_once('='))
                .collect();
            (name, params)
        }
        None => (q, Vec::new()),
    }
}

/// Largest `|family_sum|` over critical and over non-critical `v`.
pub fn family_maxima(rows: &[SweepRow], p: u64) -> (Option<f64>, Option<f64>) {
    let mut crit: Option<f64> = None;
    let mut non: Option<f64> = None;
    for row in rows.iter().filter(|r| r.p == Some(p)) {
        let (name, params) = parse_quantity(&row.quantity);
        if name != "family_sum" {
            continue;
        }
        let slot = if params.contains(&("critical", "1")) {
            &mut crit
        } else {
            &mut non
        };
        *slot = Some(slot.map_or(row.value, |x: f64| x.max(row.value)));
    }
    (crit, non)
}
