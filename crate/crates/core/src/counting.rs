//! Exact counts and sums behind the bilinear-sum and large-sieve bounds:
//! Farey-fraction counts `P(α)`, root-difference counts `𝒜(d)` and `𝒜`, the
//! bilinear sum `Σ(r, j, L, M, α, β, f)`, the large-sieve left-hand side, and
//! evaluators for the bound expressions they are compared with.
//!
//! Bound evaluators drop implied constants and `r^ε`, `Q^ε` factors, so any
//! report built from them is [`Status::Monitor`].

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::expsum::{CompensatedSum, ComplexVal, RootTable};
use crate::modular::{self, factorize, inv_mod, sqrt_set_in, ResidueRing};
use crate::report::{BoundReport, Status};

/// Default `ε` in `D = ⌊2 r^{1+ε} / L⌋`.
pub const DEFAULT_EPS: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountingError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("j = {j} is not coprime to r = {r}")]
    NotCoprime { j: i64, r: u64 },
    #[error("window radius must be non-negative")]
    NegativeDelta,
    #[error("sequence lengths do not match L = {l} and M = {m}")]
    SequenceLength { l: u64, m: u64 },
    #[error(transparent)]
    Modular(#[from] modular::ModError),
}

/// `r, j, L, M, H, ε` of the bilinear sum and its Weyl-differenced count.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtPairParams {
    pub r: u64,
    pub j: i64,
    pub l: u64,
    pub m: u64,
    pub h: u64,
    pub eps: f64,
}

impl SqrtPairParams {
    /// Checks `1 ≤ H ≤ M ≤ r/2` and `gcd(j, r) = 1`. `L = 0` is allowed for
    /// the bare sum but has no `D`.
    pub fn new(r: u64, j: i64, l: u64, m: u64, h: u64, eps: f64) -> Result<Self, CountingError> {
        if r < 2 {
            return Err(CountingError::InvalidParams(format!("r = {r} must be at least 2")));
        }
        if !(1 <= h && h <= m && 2 * m <= r) {
            return Err(CountingError::InvalidParams(format!(
                "need 1 <= H <= M <= r/2, got H = {h}, M = {m}, r = {r}"
            )));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(CountingError::InvalidParams(format!(
                "eps = {eps} must be finite and >= 0"
            )));
        }
        if (j.unsigned_abs() % r).gcd(&r) != 1 {
            return Err(CountingError::NotCoprime { j, r });
        }
        Ok(Self { r, j, l, m, h, eps })
    }

    /// `D = ⌊2 r^{1+ε} / L⌋`.
    pub fn d_window(&self) -> Result<u64, CountingError> {
        if self.l == 0 {
            return Err(CountingError::InvalidParams("L must be positive to define D".into()));
        }
        let r = self.r as f64;
        let scaled = if self.eps == 0.0 {
            2.0 * r
        } else {
            2.0 * r.powf(1.0 + self.eps)
        };
        Ok((scaled / self.l as f64).floor() as u64)
    }

    fn root_table(&self) -> Vec<Vec<u64>> {
        let ring = ResidueRing::new(self.r).expect("validated modulus");
        (1..=self.m)
            .map(|m| sqrt_set_in(self.j as i128 * m as i128, &ring))
            .collect()
    }
}

/// Counts of `k₁ − k₂ mod r` over root pairs `kᵢ² ≡ j mᵢ`, `|m₁ − m₂| ≤ H`.
/// Stored densely by residue, so each `𝒜(d)` is one lookup.
#[derive(Debug, Clone)]
pub struct RootDifferenceTable {
    r: u64,
    counts: Vec<u64>,
}

impl RootDifferenceTable {
    pub fn new(params: &SqrtPairParams) -> Self {
        let roots = params.root_table();
        let r = params.r;
        let mut counts = vec![0u64; r as usize];
        let m = params.m as usize;
        let h = params.h as usize;
        for m1 in 0..m {
            if roots[m1].is_empty() {
                continue;
            }
            for m2 in m1.saturating_sub(h)..(m1 + h + 1).min(m) {
                for &k1 in &roots[m1] {
                    for &k2 in &roots[m2] {
                        counts[modular::sub_mod(k1, k2, r) as usize] += 1;
                    }
                }
            }
        }
        Self { r, counts }
    }

    /// `𝒜(d)`.
    pub fn get(&self, d: i64) -> u64 {
        self.counts[modular::reduce(d as i128, self.r) as usize]
    }

    /// Sum over a complete residue system.
    pub fn period_total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `Σ_{|d| ≤ D} 𝒜(d)` over integers `d`.
    pub fn window_total(&self, d_max: u64) -> u64 {
        let r = self.r;
        let full = (2 * d_max + 1) / r;
        let mut total = full * self.period_total();
        let rest = (2 * d_max + 1) % r;
        // remaining integers -D .. -D + rest - 1
        let start = modular::reduce(-(d_max as i128), r);
        for k in 0..rest {
            total += self.counts[((start + k) % r) as usize];
        }
        total
    }
}

/// `𝒜(d)` through the residue-difference table.
pub fn a_of_d(params: &SqrtPairParams, d: i64) -> u64 {
    RootDifferenceTable::new(params).get(d)
}

/// `𝒜(d)` by looping over every admissible `(m₁, m₂)` and their roots.
pub fn a_of_d_naive(params: &SqrtPairParams, d: i64) -> u64 {
    let roots = params.root_table();
    let r = params.r;
    let target = modular::reduce(d as i128, r);
    let mut count = 0;
    for m1 in 1..=params.m {
        for m2 in 1..=params.m {
            if m1.abs_diff(m2) > params.h {
                continue;
            }
            for &k1 in &roots[(m1 - 1) as usize] {
                for &k2 in &roots[(m2 - 1) as usize] {
                    if modular::sub_mod(k1, k2, r) == target {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Difference counts keyed by residue, built with a hash map; an
/// independent route to the dense table.
pub fn a_of_d_hashed(params: &SqrtPairParams) -> HashMap<u64, u64> {
    let roots = params.root_table();
    let mut map = HashMap::new();
    for m1 in 1..=params.m {
        for m2 in m1.saturating_sub(params.h).max(1)..=(m1 + params.h).min(params.m) {
            for &k1 in &roots[(m1 - 1) as usize] {
                for &k2 in &roots[(m2 - 1) as usize] {
                    *map.entry(modular::sub_mod(k1, k2, params.r)).or_insert(0) += 1;
                }
            }
        }
    }
    map
}

/// `𝒜 = Σ_{|d| ≤ D} 𝒜(d)` together with the `D` used.
pub fn a_total(params: &SqrtPairParams) -> Result<(u64, u64), CountingError> {
    let d = params.d_window()?;
    Ok((RootDifferenceTable::new(params).window_total(d), d))
}

/// `α_l` for `|l| ≤ L` and `β_m` for `1 ≤ m ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequencePair {
    alpha: Vec<ComplexVal>,
    beta: Vec<ComplexVal>,
}

impl SequencePair {
    /// `alpha[i]` is `α_{i − L}`, `beta[i]` is `β_{i + 1}`.
    pub fn new(alpha: Vec<ComplexVal>, beta: Vec<ComplexVal>) -> Result<Self, CountingError> {
        if alpha.len().is_multiple_of(2) {
            return Err(CountingError::InvalidParams("alpha must have odd length 2L + 1".into()));
        }
        Ok(Self { alpha, beta })
    }

    pub fn l(&self) -> u64 {
        (self.alpha.len() / 2) as u64
    }

    pub fn m(&self) -> u64 {
        self.beta.len() as u64
    }

    pub fn alpha(&self, l: i64) -> ComplexVal {
        self.alpha[(l + self.l() as i64) as usize]
    }

    pub fn beta(&self, m: u64) -> ComplexVal {
        self.beta[(m - 1) as usize]
    }

    pub fn alpha_slice(&self) -> &[ComplexVal] {
        &self.alpha
    }

    pub fn beta_slice(&self) -> &[ComplexVal] {
        &self.beta
    }

    /// `‖α‖₂`.
    pub fn alpha_l2(&self) -> f64 {
        self.alpha.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖β‖∞`.
    pub fn beta_sup(&self) -> f64 {
        self.beta.iter().map(|z| z.abs()).fold(0.0, f64::max)
    }

    pub fn norms(&self) -> Norms {
        Norms {
            alpha_l2: self.alpha_l2(),
            beta_sup: self.beta_sup(),
        }
    }

    /// Pointwise sum of the `α` sequences, same `β`.
    pub fn with_alpha_sum(&self, other: &SequencePair) -> SequencePair {
        SequencePair {
            alpha: self.alpha.iter().zip(&other.alpha).map(|(a, b)| *a + *b).collect(),
            beta: self.beta.clone(),
        }
    }
}

/// `‖α‖₂` and `‖β‖∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub alpha_l2: f64,
    pub beta_sup: f64,
}

impl Norms {
    pub const UNIT: Norms = Norms {
        alpha_l2: 1.0,
        beta_sup: 1.0,
    };

    fn product(self) -> f64 {
        self.alpha_l2 * self.beta_sup
    }
}

/// `Σ_{|l|≤L} Σ_{m≤M} α_l β_m e_r(l√(jm)) e(l f(m))`, summing over every
/// square root of `jm` modulo `r`. `f = None` means `f ≡ 0`.
pub fn bilinear_sigma(
    params: &SqrtPairParams,
    seqs: &SequencePair,
    f: Option<&(dyn Fn(f64) -> f64 + Sync)>,
) -> Result<ComplexVal, CountingError> {
    if seqs.l() != params.l || seqs.m() != params.m {
        return Err(CountingError::SequenceLength {
            l: params.l,
            m: params.m,
        });
    }
    let r = params.r;
    let table = RootTable::new(r);
    let roots = params.root_table();
    let l_max = params.l as i64;
    let mut acc = CompensatedSum::new();
    for (mi, ks) in roots.iter().enumerate() {
        let beta = seqs.beta[mi];
        if ks.is_empty() || (beta.re == 0.0 && beta.im == 0.0) {
            continue;
        }
        let fm = f.map(|f| f((mi + 1) as f64));
        for l in -l_max..=l_max {
            let alpha = seqs.alpha(l);
            let mut inner = CompensatedSum::new();
            for &k in ks {
                inner.add(table.at(l as i128 * k as i128));
            }
            let mut term = alpha * beta * inner.value();
            if let Some(fm) = fm {
                term = term * ComplexVal::e(l as f64 * fm);
            }
            acc.add(term);
        }
    }
    Ok(acc.value())
}

/// `|Σ|² / ((LM/H) ‖α‖₂² ‖β‖∞² 𝒜)`, reported as monitor-only.
pub fn weyl_ratio(
    params: &SqrtPairParams,
    seqs: &SequencePair,
    f: Option<&(dyn Fn(f64) -> f64 + Sync)>,
) -> Result<BoundReport, CountingError> {
    let norms = seqs.norms();
    if norms.alpha_l2 == 0.0 || norms.beta_sup == 0.0 || params.l == 0 {
        return Ok(BoundReport::not_applicable("zero norm or L = 0"));
    }
    let (a, d) = a_total(params)?;
    if a == 0 {
        return Ok(BoundReport::not_applicable("A = 0"));
    }
    let sigma = bilinear_sigma(params, seqs, f)?;
    let lhs = sigma.norm_sqr();
    let bound = params.l as f64 * params.m as f64 / params.h as f64
        * norms.alpha_l2.powi(2)
        * norms.beta_sup.powi(2)
        * a as f64;
    Ok(BoundReport::new(lhs, bound, Status::Monitor)
        .with_param("A", a)
        .with_param("D", d))
}

fn pow(x: u64, e: f64) -> f64 {
    (x as f64).powf(e)
}

/// Both branches of the general bilinear bound and their minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thm11Bound {
    pub first: f64,
    pub second: f64,
    pub value: f64,
}

/// `min{H^{-1/2}L^{1/2}M^{1/2}r^{1/2} + M^{1/2}r^{1/4} + M,
/// H^{-1/2}L^{1/2}M + H^{-1/2}M^{1/2}r^{1/2}s₀^{-1/4} + L^{1/2}M^{1/2}r^{1/4}s₁^{1/8} + M}
/// · ‖α‖₂‖β‖∞`.
pub fn thm11_bound(params: &SqrtPairParams, norms: Norms) -> Result<Thm11Bound, CountingError> {
    let (s0, s1) = modular::squarefree_squarefull(params.r)?;
    let (l, m, h, r) = (params.l, params.m, params.h, params.r);
    let first = pow(h, -0.5) * pow(l, 0.5) * pow(m, 0.5) * pow(r, 0.5) + pow(m, 0.5) * pow(r, 0.25) + m as f64;
    let second = pow(h, -0.5) * pow(l, 0.5) * m as f64
        + pow(h, -0.5) * pow(m, 0.5) * pow(r, 0.5) * pow(s0, -0.25)
        + pow(l, 0.5) * pow(m, 0.5) * pow(r, 0.25) * pow(s1, 0.125)
        + m as f64;
    let k = norms.product();
    Ok(Thm11Bound {
        first: first * k,
        second: second * k,
        value: first.min(second) * k,
    })
}

/// `(H^{-1/2}L^{1/2}M + H^{-1/2}L^{1/2}M^{1/2}r^{3/8} + L^{1/2}M^{1/2}r^{1/4} + M) · ‖α‖₂‖β‖∞`.
pub fn thm15_bound(params: &SqrtPairParams, norms: Norms) -> f64 {
    let (l, m, h, r) = (params.l, params.m, params.h, params.r);
    (pow(h, -0.5) * pow(l, 0.5) * m as f64
        + pow(h, -0.5) * pow(l, 0.5) * pow(m, 0.5) * pow(r, 0.375)
        + pow(l, 0.5) * pow(m, 0.5) * pow(r, 0.25)
        + m as f64)
        * norms.product()
}

/// `(L^{1/2}M^{1/2}r^{1/4} + L^{1/2}r^{3/8} + M) · ‖α‖₂‖β‖∞`.
pub fn cor16_bound(params: &SqrtPairParams, norms: Norms) -> f64 {
    let (l, m, r) = (params.l, params.m, params.r);
    (pow(l, 0.5) * pow(m, 0.5) * pow(r, 0.25) + pow(l, 0.5) * pow(r, 0.375) + m as f64) * norms.product()
}

/// `Q^{5/8}r^{-1/4} + Q^{1/2}s₀^{-1/4} + Q^{1/4}r^{1/4}s₁^{1/8}`.
pub fn p_bound_thm12(q: f64, r: u64) -> Result<f64, CountingError> {
    let (s0, s1) = modular::squarefree_squarefull(r)?;
    Ok(q.powf(0.625) * pow(r, -0.25) + q.sqrt() * pow(s0, -0.25) + q.powf(0.25) * pow(r, 0.25) * pow(s1, 0.125))
}

/// `Q^{5/8}r^{-1/4} + Q^{1/4}r^{1/4}`, the squarefree specialization.
pub fn p_bound_squarefree(q: f64, r: u64) -> f64 {
    q.powf(0.625) * pow(r, -0.25) + q.powf(0.25) * pow(r, 0.25)
}

/// `Q^{5/8}r^{-1/4} + Q^{3/8}r^{1/8} + Q^{1/4}r^{1/4}`.
pub fn p_bound_thm13(q: f64, r: u64) -> f64 {
    q.powf(0.625) * pow(r, -0.25) + q.powf(0.375) * pow(r, 0.125) + q.powf(0.25) * pow(r, 0.25)
}

/// The window `|a/q² − α| ≤ Δ`, `q ≤ Q`, in exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct FareyWindow {
    pub q_max: u64,
    pub alpha: BigRational,
    pub delta: BigRational,
}

impl FareyWindow {
    pub fn new(q_max: u64, alpha: BigRational, delta: BigRational) -> Result<Self, CountingError> {
        if q_max == 0 {
            return Err(CountingError::InvalidParams("Q must be at least 1".into()));
        }
        if delta.is_negative() {
            return Err(CountingError::NegativeDelta);
        }
        Ok(Self { q_max, alpha, delta })
    }

    /// Window from floats, converted exactly (every finite `f64` is a dyadic
    /// rational).
    pub fn from_f64(q_max: u64, alpha: f64, delta: f64) -> Result<Self, CountingError> {
        let conv = |x: f64| {
            BigRational::from_float(x).ok_or_else(|| CountingError::InvalidParams(format!("{x} is not finite")))
        };
        Self::new(q_max, conv(alpha)?, conv(delta)?)
    }
}

/// Integers in `[lo, hi]` coprime to `q`, by inclusion–exclusion over the
/// primes of `q`.
fn coprime_count_in(lo: i128, hi: i128, primes: &[u64]) -> u64 {
    if hi < lo {
        return 0;
    }
    let mut total: i128 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let d: i128 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p as i128)
            .product();
        let n = Integer::div_floor(&hi, &d) - Integer::div_floor(&(lo - 1), &d);
        if mask.count_ones() % 2 == 0 {
            total += n;
        } else {
            total -= n;
        }
    }
    total as u64
}

/// `P(α) = #{(q, a) : 1 ≤ q ≤ Q, (q, a) = 1, |a/q² − α| ≤ Δ}` (closed window).
pub fn p_alpha(w: &FareyWindow) -> u64 {
    let lo_r = &w.alpha - &w.delta;
    let hi_r = &w.alpha + &w.delta;
    (1..=w.q_max)
        .map(|q| {
            let q2 = BigRational::from_integer(BigInt::from(q) * BigInt::from(q));
            let lo = (&lo_r * &q2).ceil().to_integer().to_i128().expect("fits i128");
            let hi = (&hi_r * &q2).floor().to_integer().to_i128().expect("fits i128");
            let primes: Vec<u64> = factorize(q).into_iter().map(|(p, _)| p).collect();
            coprime_count_in(lo, hi, &primes)
        })
        .sum()
}

/// Left-hand side of the large sieve with square moduli,
/// `Σ_{q≤Q} Σ_{a ≤ q², (a,q)=1} |Σ_{M<n≤M+N} a_n e(na/q²)|²`, and
/// `Z = Σ|a_n|²`. `coeffs[i]` is `a_{M+1+i}`.
pub fn large_sieve_lhs(q_max: u64, offset: u64, coeffs: &[ComplexVal]) -> Result<(f64, f64), CountingError> {
    if q_max == 0 || coeffs.is_empty() {
        return Err(CountingError::InvalidParams("need Q >= 1 and N >= 1".into()));
    }
    let per_q: Vec<f64> = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let q2 = q * q;
            let table = RootTable::new(q2);
            let mut total = 0.0;
            for a in (1..=q2).filter(|a| a.gcd(&q) == 1) {
                // phase index of n = offset + 1, stepped by a each term
                let mut idx = modular::mul_mod((offset + 1) % q2, a % q2, q2);
                let step = a % q2;
                let mut acc = CompensatedSum::new();
                for &c in coeffs {
                    acc.add(c * table.get(idx));
                    idx = modular::add_mod(idx, step, q2);
                }
                total += acc.value().norm_sqr();
            }
            total
        })
        .collect();
    let lhs = per_q.iter().sum();
    let z = coeffs.iter().map(|c| c.norm_sqr()).sum();
    Ok((lhs, z))
}

/// `(Q³ + N + min{Q²N^{1/2}, Q^{1/2}N}) Z`.
pub fn ls_bound(q: f64, n: f64, z: f64) -> f64 {
    (q.powi(3) + n + (q * q * n.sqrt()).min(q.sqrt() * n)) * z
}

/// `Σ_{1≤m≤M} gcd(r, m)`.
pub fn gcd_avg(r: u64, m: u64) -> u64 {
    (1..=m).map(|k| r.gcd(&k)).sum()
}

/// `f(x) = coef · √x` with `|f′| ≤ F` on the relevant range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtPhase {
    pub coef: f64,
    pub derivative_bound: f64,
}

impl SqrtPhase {
    pub fn eval(&self, x: f64) -> f64 {
        self.coef * x.sqrt()
    }
}

/// Concrete parameter choices for the `P(b/r + z)` estimate at `N = Q³`.
#[derive(Debug, Clone, PartialEq)]
pub struct Section4Params {
    pub q: f64,
    pub r: u64,
    pub gamma: f64,
    pub eps: f64,
    pub l: f64,
    pub m0: f64,
    pub m: f64,
    pub f_bound: f64,
    pub h: f64,
    pub delta: f64,
    pub d: f64,
    pub phase: SqrtPhase,
    /// `Q^{1/2+γ+ε} ≤ r ≤ Q^{1−2ε}` and `γ ≤ 1/2`.
    pub in_window: bool,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section4Constants {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for Section4Constants {
    fn default() -> Self {
        Self {
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
        }
    }
}

/// `L = r^{1/2}/Q^{1/4+γ/2}`, `M₀ = C₀Q^{1/2−γ}`, `M = C₁Q^{1/2−γ}`,
/// `F = C₂Q^{1/2+γ}/r`, `H = 1/(LF)`, `δ = Q^{5/4+γ/2+ε}r^{1/2}`,
/// `D = 2r^{1+ε}/L`, and `f(x) = −Q^{3/4+γ/2}√x / r`. Outside the validity
/// window the values are still filled in and the status is not-applicable.
pub fn section4_parameters(
    q: f64,
    r: u64,
    gamma: f64,
    consts: Section4Constants,
    eps: f64,
) -> Result<Section4Params, CountingError> {
    if q.is_nan() || q < 2.0 || r == 0 || gamma.is_nan() || gamma < 0.0 {
        return Err(CountingError::InvalidParams(format!(
            "need Q >= 2, r >= 1, gamma >= 0; got Q = {q}, r = {r}, gamma = {gamma}"
        )));
    }
    let rf = r as f64;
    let l = rf.sqrt() / q.powf(0.25 + gamma / 2.0);
    let m0 = consts.c0 * q.powf(0.5 - gamma);
    let m = consts.c1 * q.powf(0.5 - gamma);
    let f_bound = consts.c2 * q.powf(0.5 + gamma) / rf;
    let h = 1.0 / (l * f_bound);
    let delta = q.powf(1.25 + gamma / 2.0 + eps) * rf.sqrt();
    let d = 2.0 * rf.powf(1.0 + eps) / l;
    let phase = SqrtPhase {
        coef: -q.powf(0.75 + gamma / 2.0) / rf,
        derivative_bound: f_bound,
    };
    let in_window = q.powf(0.5 + gamma + eps) <= rf && rf <= q.powf(1.0 - 2.0 * eps) && gamma <= 0.5;
    Ok(Section4Params {
        q,
        r,
        gamma,
        eps,
        l,
        m0,
        m,
        f_bound,
        h,
        delta,
        d,
        phase,
        in_window,
        status: if in_window {
            Status::Monitor
        } else {
            Status::NotApplicable
        },
    })
}

/// `1 + Q² r z + Q³ Δ`.
pub fn lemma_al_bound(q: f64, r: f64, z: f64, delta: f64) -> f64 {
    1.0 + q * q * r * z + q.powi(3) * delta
}

/// `z = 1 / (Q^{3/2+γ} r)`.
pub fn z_from_gamma(q: f64, gamma: f64, r: f64) -> f64 {
    1.0 / (q.powf(1.5 + gamma) * r)
}

/// Inverse of [`z_from_gamma`].
pub fn gamma_from_z(q: f64, z: f64, r: f64) -> f64 {
    -(z * r).ln() / q.ln() - 1.5
}

/// `b̄` modulo `r`, needed to place `b/r` on the circle.
pub fn residue_inverse(b: i64, r: u64) -> Option<u64> {
    inv_mod(b as i128, r)
}
