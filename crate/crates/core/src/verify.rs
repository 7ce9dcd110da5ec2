//! Self-check suites: closed forms against brute force, fast paths against
//! exhaustive scans, and the identities the library relies on. Each suite
//! counts its individual checks and keeps the first few failures.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;

use crate::cochrane::{cochrane_check, critical_v_set, disc_g, disc_g_closed, CochraneError, IntPoly, RationalFunc};
use crate::counting::{a_of_d, a_of_d_hashed, a_of_d_naive, gcd_avg, RootDifferenceTable, SqrtPairParams};
use crate::expsum::{gauss_brute_with, gauss_closed, gauss_star_brute_with, gauss_star_closed, RootTable};
use crate::modular::{self, divisor_count, is_prime, sqrt_set};
use crate::prng::SplitMix64;
use crate::report::{fmt_sig, Status};
use crate::smoothing::{phi_nu, poisson_check, smoothed_majorant_check, Kernel};

const KEPT_FAILURES: usize = 5;

/// Suite names accepted by [`run_suite`], in `all` order.
pub const SUITES: [&str; 9] = [
    "gauss",
    "gauss-star",
    "gauss-identity",
    "sqrt",
    "cochrane",
    "disc",
    "counting",
    "smoothing",
    "gcd",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub checks: u64,
    pub failed: u64,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            checks: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(detail());
            }
        }
    }

    fn merge(&mut self, other: SuiteResult) {
        self.checks += other.checks;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(f);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}/{} passed", self.name, self.checks - self.failed, self.checks)?;
        for msg in &self.failures {
            write!(f, "\n  {msg}")?;
        }
        Ok(())
    }
}

/// Run one named suite; `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64) -> Option<SuiteResult> {
    Some(match name {
        "gauss" => gauss_suite(),
        "gauss-star" => gauss_star_suite(),
        "gauss-identity" => gauss_identity_suite(),
        "sqrt" => sqrt_suite(seed),
        "cochrane" => cochrane_suite(seed),
        "disc" => disc_suite(seed),
        "counting" => counting_suite(),
        "smoothing" => smoothing_suite(),
        "gcd" => gcd_suite(seed),
        _ => return None,
    })
}

fn merged(name: &str, parts: Vec<SuiteResult>) -> SuiteResult {
    let mut out = SuiteResult::new(name);
    for p in parts {
        out.merge(p);
    }
    out
}

/// `gauss_closed` against `gauss_brute` for odd `c ≤ 99`, all `(a, b)`.
pub fn gauss_suite() -> SuiteResult {
    let parts = (1..=99u64)
        .step_by(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|c| {
            let mut s = SuiteResult::new("gauss");
            let table = RootTable::new(c);
            let tol = 1e-6 * (c as f64).sqrt();
            for a in 0..c as i64 {
                for b in 0..c as i64 {
                    let brute = gauss_brute_with(&table, a, b);
                    let closed = gauss_closed(a, b, c).map(|g| g.value());
                    s.check(closed.is_ok_and(|v| v.approx_eq(brute, tol)), || {
                        format!("G({a},{b},{c}): brute {brute}")
                    });
                }
            }
            s
        })
        .collect();
    merged("gauss", parts)
}

/// `gauss_star_closed` against brute force for `p ∈ {5, 7, 11, 13}`.
pub fn gauss_star_suite() -> SuiteResult {
    let parts = [5u64, 7, 11, 13]
        .into_par_iter()
        .map(|p| {
            let mut s = SuiteResult::new("gauss-star");
            let q = p * p;
            let table = RootTable::new(q);
            for a in 0..q as i64 {
                for b in 0..q as i64 {
                    let brute = gauss_star_brute_with(&table, a, b);
                    let Ok(closed) = gauss_star_closed(a, b, p) else {
                        s.check(false, || format!("G*({a},{b},{p}) rejected"));
                        continue;
                    };
                    s.check(closed.value().approx_eq(brute, 1e-6 * p as f64), || {
                        format!("G*({a},{b},{p}): closed {closed} brute {brute}")
                    });
                    if a % p as i64 != 0 && b % p as i64 == 0 {
                        s.check(closed.is_zero() && brute.abs() <= 1e-9 * p as f64, || {
                            format!(
                                "G*({a},{b},{p}) should vanish: {closed}, |brute| = {}",
                                fmt_sig(brute.abs())
                            )
                        });
                    }
                }
            }
            s
        })
        .collect();
    merged("gauss-star", parts)
}

/// `G*(a, b, p²) = G(a, b, p²) − Σ_{n<p} e_p(bn)` for `p ∈ {5, 7}`.
pub fn gauss_identity_suite() -> SuiteResult {
    let mut s = SuiteResult::new("gauss-identity");
    for p in [5u64, 7] {
        let q = p * p;
        let big = RootTable::new(q);
        let small = RootTable::new(p);
        for a in 0..q as i64 {
            for b in 0..q as i64 {
                let mut rhs = gauss_brute_with(&big, a, b);
                for n in 0..p as i128 {
                    rhs = rhs - small.at(b as i128 * n);
                }
                let lhs = gauss_star_brute_with(&big, a, b);
                s.check(lhs.approx_eq(rhs, 1e-8 * q as f64), || format!("p={p} a={a} b={b}"));
            }
        }
    }
    s
}

/// `sqrt_set` against a table of all squares, for every `r ≤ 2000` and 200
/// seeded residues per `r`; `|sqrt_set(0, p²)| = p` for primes `p ≤ 43`.
pub fn sqrt_suite(seed: u64) -> SuiteResult {
    let parts: Vec<SuiteResult> = (1..=2000u64)
        .into_par_iter()
        .map(|r| {
            let mut s = SuiteResult::new("sqrt");
            let mut roots: Vec<Vec<u64>> = vec![Vec::new(); r as usize];
            for k in 0..r {
                roots[modular::mul_mod(k, k, r) as usize].push(k);
            }
            let mut rng = SplitMix64::new(seed ^ r);
            for _ in 0..200 {
                let x = rng.range_i64(-(r as i64) * 3, r as i64 * 3);
                let got = sqrt_set(x, r);
                let want = &roots[modular::reduce(x as i128, r) as usize];
                s.check(got.as_ref().is_ok_and(|g| g == want), || format!("sqrt_set({x}, {r})"));
            }
            s
        })
        .collect();
    let mut out = merged("sqrt", parts);
    for p in (3..=43u64).filter(|&p| is_prime(p)) {
        let n = sqrt_set(0, p * p).map(|v| v.len());
        out.check(n == Ok(p as usize), || format!("|sqrt_set(0, {p}²)| = {n:?}"));
    }
    out
}

/// Fifty seeded rational functions with `t ≤ m − 2`, `p ∈ {5, 7}`,
/// `m ∈ {2, 3}`, as `(f, p, m)`.
pub fn cochrane_corpus(seed: u64, size: usize) -> Vec<(RationalFunc, u64, u32)> {
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::new();
    while out.len() < size {
        let p = if rng.below(2) == 0 { 5 } else { 7 };
        let m = 2 + rng.below(2) as u32;
        let deg = 1 + rng.below(4) as usize;
        let num: Vec<i64> = (0..=deg).map(|_| rng.range_i64(-9, 9)).collect();
        let den: Vec<i64> = if rng.below(2) == 0 {
            vec![1]
        } else {
            (0..=1 + rng.below(2) as usize).map(|_| rng.range_i64(-6, 6)).collect()
        };
        let Ok(f) = RationalFunc::new(IntPoly::from_i64(&num), IntPoly::from_i64(&den)) else {
            continue;
        };
        if f.is_constant() {
            continue;
        }
        match cochrane_check(&f, p, m) {
            Ok(rep) if rep.applicable => out.push((f, p, m)),
            Ok(_) | Err(CochraneError::DegenerateDerivative(_)) | Err(CochraneError::ConstantFunction) => {}
            Err(e) => panic!("corpus generation: {e}"),
        }
    }
    out
}

/// Vanishing, Cochrane's bound, and the splitting identity on the corpus.
pub fn cochrane_suite(seed: u64) -> SuiteResult {
    let parts = cochrane_corpus(seed, 50)
        .into_par_iter()
        .map(|(f, p, m)| {
            let mut s = SuiteResult::new("cochrane");
            let rep = cochrane_check(&f, p, m).expect("corpus entry");
            for rec in &rep.records {
                s.check(rec.status == Status::Pass, || {
                    format!(
                        "f = {f}, p = {p}, m = {m}, alpha = {}: |S| = {}, bound {:?}",
                        rec.alpha,
                        fmt_sig(rec.value.abs()),
                        rec.bound
                    )
                });
            }
            let full = crate::cochrane::full_sum(&f, p, m).expect("corpus entry");
            let pm = p.pow(m) as f64;
            s.check(rep.total.approx_eq(full, 1e-8 * pm), || {
                format!("splitting, f = {f}, p = {p}, m = {m}")
            });
            s
        })
        .collect();
    merged("cochrane", parts)
}

/// Resultant discriminant against the closed form; `critical_v_set`
/// against an exhaustive scan of `disc ≡ 0 mod p`.
pub fn disc_suite(seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("disc");
    let mut rng = SplitMix64::new(seed);
    let mut done = 0;
    while done < 100 {
        let (h, a, v) = (rng.range_i64(-50, 50), rng.range_i64(-50, 50), rng.range_i64(-50, 50));
        if v == 0 {
            continue;
        }
        done += 1;
        let d = disc_g(h, a, v);
        s.check(d.as_ref().is_ok_and(|d| *d == disc_g_closed(h, a, v)), || {
            format!("disc(g_({h},{a},{v})) = {d:?}")
        });
    }
    for p in [5u64, 7, 11, 13, 17, 19, 31] {
        for h in 1..=6i64 {
            for a in 1..=6i64 {
                if (h * a) % p as i64 == 0 {
                    continue;
                }
                let exhaustive: Vec<u64> = (1..p)
                    .filter(|&v| {
                        let d = disc_g_closed(h, a, v as i64);
                        (d % num_bigint::BigInt::from(p)) == num_bigint::BigInt::from(0)
                    })
                    .collect();
                let got = critical_v_set(h, a, p);
                s.check(got.as_ref() == Ok(&exhaustive), || {
                    format!("critical_v_set({h},{a},{p}) = {got:?}, scan {exhaustive:?}")
                });
                if [5, 11, 17].contains(&p) {
                    s.check(exhaustive.is_empty(), || format!("p = {p} should have no critical v"));
                }
            }
        }
    }
    s
}

fn counting_grids() -> Vec<SqrtPairParams> {
    let mut out = Vec::new();
    for r in [25u64, 49, 121] {
        for j in [1i64, 2, 3] {
            if j.unsigned_abs().gcd(&r) != 1 {
                continue;
            }
            for m in [r / 4, r / 2] {
                for h in [1, m / 3, m] {
                    if let Ok(p) = SqrtPairParams::new(r, j, 1, m, h.max(1), crate::counting::DEFAULT_EPS) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Naive against tabulated `𝒜(d)`, symmetry, and the reference value.
pub fn counting_suite() -> SuiteResult {
    let mut s = SuiteResult::new("counting");
    let reference = SqrtPairParams::new(25, 1, 1, 12, 12, crate::counting::DEFAULT_EPS).expect("valid");
    s.check(a_of_d(&reference, 0) == 10, || {
        "a_of_d(r=25, j=1, M=12, H=12, d=0) != 10".into()
    });
    for params in counting_grids() {
        let table = RootDifferenceTable::new(&params);
        let hashed = a_of_d_hashed(&params);
        let r = params.r as i64;
        for d in -r..=r {
            let naive = a_of_d_naive(&params, d);
            let key = modular::reduce(d as i128, params.r);
            s.check(
                table.get(d) == naive && hashed.get(&key).copied().unwrap_or(0) == naive,
                || format!("a_of_d mismatch at {params:?}, d = {d}"),
            );
            s.check(table.get(d) == table.get(-d), || {
                format!("asymmetry at {params:?}, d = {d}")
            });
        }
    }
    s
}

/// Envelope, Poisson summation, and the smoothed majorant of `𝒜(d)`.
pub fn smoothing_suite() -> SuiteResult {
    let mut s = SuiteResult::new("smoothing");
    for nu in [0.01, 0.1, 0.5] {
        for i in 0..10_000 {
            let y = i as f64 / 10_000.0;
            let inside = y.min(1.0 - y) <= nu;
            let v = phi_nu(y, nu).expect("nu in range");
            s.check(!inside || v >= 1.0, || format!("envelope fails at y = {y}, nu = {nu}"));
        }
    }
    for kernel in [Kernel::Gaussian, Kernel::Bump] {
        for l in [1.0, 2.0, 10.0, 100.0] {
            for alpha in [0.0, 0.3, 0.5, 1.0 / 7.0] {
                let rep = poisson_check(kernel, l, alpha).expect("L >= 1");
                s.check(rep.status == Status::Pass, || {
                    format!(
                        "Poisson {kernel:?} L = {l} alpha = {alpha}: diff {}",
                        fmt_sig(rep.lhs_value)
                    )
                });
            }
        }
    }
    for params in counting_grids() {
        for d in -10..=10 {
            let rep = smoothed_majorant_check(&params, d);
            s.check(rep.status == Status::Pass, || {
                format!(
                    "majorant {params:?} d = {d}: {} > {}",
                    rep.lhs_value,
                    fmt_sig(rep.bound_value)
                )
            });
        }
    }
    s
}

/// `M ≤ Σ_{m≤M} (r, m) ≤ M d(r)` on 1000 seeded `(r, M)` with `r, M ≤ 10⁴`.
pub fn gcd_suite(seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("gcd");
    let mut rng = SplitMix64::new(seed);
    for _ in 0..1000 {
        let r = 1 + rng.below(10_000);
        let m = 1 + rng.below(10_000);
        let g = gcd_avg(r, m);
        s.check(m <= g && g <= m * divisor_count(r), || {
            format!("gcd_avg({r}, {m}) = {g}")
        });
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        for name in ["gauss-identity", "disc", "gcd", "counting"] {
            let r = run_suite(name, 1).unwrap();
            assert!(r.passed(), "{r}");
            assert!(r.checks > 0);
        }
        assert!(run_suite("nope", 1).is_none());
    }

    #[test]
    fn corpus_is_deterministic_and_applicable() {
        let a = cochrane_corpus(9, 10);
        let b = cochrane_corpus(9, 10);
        assert_eq!(a.len(), 10);
        for ((f, p, m), (g, q, n)) in a.iter().zip(&b) {
            assert_eq!((f.to_string(), p, m), (g.to_string(), q, n));
        }
    }

    #[test]
    fn report_format() {
        let mut s = SuiteResult::new("x");
        s.check(true, String::new);
        s.check(false, || "bad".into());
        assert_eq!(s.to_string(), "x: 1/2 passed\n  bad");
    }
}
