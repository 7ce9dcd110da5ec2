//! Exponential sums `S(f, p^m)` of rational functions over prime powers, their
//! partial sums `S_α` over residue classes mod `p`, critical points with
//! multiplicities, and the quartic family `g_{h,A,v}` with its discriminant.
//!
//! Polynomial and resultant arithmetic runs on `BigInt`; sums stay in `u128`
//! modular arithmetic with a root-of-unity table.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::expsum::{CompensatedSum, ComplexVal, RootTable};
use crate::modular::{inv_mod, is_prime, mul_mod, pow_mod, sqrt_mod_prime};
use crate::report::Status;

/// `λ = (5/4)^5`.
pub const LAMBDA: f64 = 3.0517578125;

/// Non-critical partial sums must vanish to within this multiple of `p^m`.
pub const VANISHING_TOL: f64 = 1e-9;

/// Relative slack when comparing a critical `|S_α|` against its bound; for
/// simple critical points the bound is attained exactly.
pub const BOUND_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CochraneError {
    #[error("p-adic order of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("f is constant; its derivative has no p-adic order")]
    ConstantFunction,
    #[error("normalized derivative is degenerate modulo {0}")]
    DegenerateDerivative(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("prime must exceed 3, got {0}")]
    PrimeTooSmall(u64),
    #[error("g_(h,A,v) is not quartic when v = 0")]
    NotQuartic,
    #[error("{what} must be coprime to p = {p}")]
    NotCoprime { what: &'static str, p: u64 },
    #[error("exponent m must be at least 1")]
    ZeroExponent,
}

/// Integer polynomial, coefficient `i` multiplies `x^i`. The highest stored
/// coefficient is nonzero unless the polynomial is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// The monomial `c x^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c.into();
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Largest `k` with `p^k` dividing every coefficient.
    pub fn ord_p(&self, p: u64) -> Result<i64, CochraneError> {
        if self.is_zero() {
            return Err(CochraneError::ZeroPolynomial);
        }
        let p = BigInt::from(p);
        Ok(self
            .coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| {
                let mut c = c.clone();
                let mut k = 0;
                while c.is_multiple_of(&p) {
                    c /= &p;
                    k += 1;
                }
                k
            })
            .min()
            .expect("nonzero coefficient"))
    }

    /// Divide every coefficient by `p^k` (must be exact).
    pub fn remove_p_power(&self, p: u64, k: i64) -> Self {
        let d = BigInt::from(p).pow(k as u32);
        Self::new(self.coeffs.iter().map(|c| c / &d).collect())
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: u64) -> Vec<u64> {
        let mb = BigInt::from(m);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&mb).to_u64().expect("reduced"))
            .collect()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).cloned().unwrap_or_default() + o.coeffs.get(i).cloned().unwrap_or_default())
                .collect(),
        )
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, o: &IntPoly) -> IntPoly {
        self + &(-o)
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

/// `numerator / denominator` over the integers; not kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunc {
    numerator: IntPoly,
    denominator: IntPoly,
}

impl RationalFunc {
    pub fn new(numerator: IntPoly, denominator: IntPoly) -> Result<Self, CochraneError> {
        if denominator.is_zero() {
            return Err(CochraneError::ZeroDenominator);
        }
        Ok(Self { numerator, denominator })
    }

    pub fn polynomial(p: IntPoly) -> Self {
        Self {
            numerator: p,
            denominator: IntPoly::constant(1),
        }
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.denominator
    }

    pub fn is_constant(&self) -> bool {
        self.derivative().numerator.is_zero()
    }

    /// Quotient rule `(f₁′f₂ − f₁f₂′) / f₂²`, unreduced.
    pub fn derivative(&self) -> Self {
        let (f1, f2) = (&self.numerator, &self.denominator);
        let num = &(&f1.derivative() * f2) - &(f1 * &f2.derivative());
        Self {
            numerator: num,
            denominator: f2 * f2,
        }
    }

    /// `ord_p(f₁) − ord_p(f₂)`.
    pub fn ord_p(&self, p: u64) -> Result<i64, CochraneError> {
        Ok(self.numerator.ord_p(p)? - self.denominator.ord_p(p)?)
    }

    /// `f(x) mod m`, or `None` when the denominator vanishes mod `p`.
    fn evaluator(&self, p: u64, m: u64) -> ModEvaluator {
        ModEvaluator {
            p,
            modulus: m,
            num: self.numerator.reduce_mod(m),
            den: self.denominator.reduce_mod(m),
        }
    }

    /// True when the denominator is nonzero mod `p` at `alpha`.
    pub fn defined_at(&self, alpha: u64, p: u64) -> bool {
        fp_eval(&self.denominator.reduce_mod(p), alpha, p) != 0
    }
}

impl fmt::Display for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

struct ModEvaluator {
    p: u64,
    modulus: u64,
    num: Vec<u64>,
    den: Vec<u64>,
}

impl ModEvaluator {
    fn horner(coeffs: &[u64], x: u64, m: u64) -> u64 {
        coeffs.iter().rev().fold(0u64, |acc, &c| {
            ((acc as u128 * x as u128 + c as u128) % m as u128) as u64
        })
    }

    fn eval(&self, x: u64) -> Option<u64> {
        let d = Self::horner(&self.den, x, self.modulus);
        if d.is_multiple_of(self.p) {
            return None;
        }
        let n = Self::horner(&self.num, x, self.modulus);
        let inv = inv_mod(d as i128, self.modulus).expect("unit mod p is a unit mod p^m");
        Some(mul_mod(n, inv, self.modulus))
    }
}

// --- polynomials over F_p, coefficients low to high in [0, p) -------------

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn fp_eval(a: &[u64], x: u64, p: u64) -> u64 {
    ModEvaluator::horner(a, x % p, p)
}

fn fp_derivative(a: &[u64], p: u64) -> Vec<u64> {
    fp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect(),
    )
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let b = fp_trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = fp_trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod(*b.last().unwrap() as i128, p).expect("field");
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        q[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            let t = mul_mod(c, bc, p);
            r[i + shift] = (r[i + shift] + p - t) % p;
        }
        r = fp_trim(r);
    }
    (fp_trim(q), r)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = fp_trim(a.to_vec());
    let mut b = fp_trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = fp_divrem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = inv_mod(lead as i128, p).expect("field");
        a.iter_mut().for_each(|c| *c = mul_mod(*c, inv, p));
    }
    a
}

/// A root of the normalized derivative `p^{-t} f′` over `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CriticalPoint {
    pub alpha: u64,
    pub multiplicity: u32,
}

/// `t_p(f) = ord_p(f′)`.
pub fn t_value(f: &RationalFunc, p: u64) -> Result<i64, CochraneError> {
    let d = f.derivative();
    if d.numerator.is_zero() {
        return Err(CochraneError::ConstantFunction);
    }
    d.ord_p(p)
}

/// Numerator of `p^{-t} f′` over `F_p`, written as a reduced fraction.
fn normalized_derivative_numerator(f: &RationalFunc, p: u64) -> Result<Vec<u64>, CochraneError> {
    let d = f.derivative();
    if d.numerator.is_zero() {
        return Err(CochraneError::ConstantFunction);
    }
    let num = d.numerator.remove_p_power(p, d.numerator.ord_p(p)?).reduce_mod(p);
    let den = d.denominator.remove_p_power(p, d.denominator.ord_p(p)?).reduce_mod(p);
    let num = fp_trim(num);
    if num.is_empty() {
        return Err(CochraneError::DegenerateDerivative(p));
    }
    let g = fp_gcd(&num, &den, p);
    let (q, r) = fp_divrem(&num, &g, p);
    debug_assert!(r.is_empty());
    Ok(q)
}

/// Critical points `α ∈ F_p` (with `f` defined at `α`) and their multiplicities.
pub fn critical_points(f: &RationalFunc, p: u64) -> Result<Vec<CriticalPoint>, CochraneError> {
    let c = normalized_derivative_numerator(f, p)?;
    let mut out = Vec::new();
    for alpha in 0..p {
        if fp_eval(&c, alpha, p) != 0 || !f.defined_at(alpha, p) {
            continue;
        }
        // smallest k whose k-th derivative is nonzero at alpha
        let mut deriv = c.clone();
        let mut k = 0u32;
        loop {
            if deriv.is_empty() {
                return Err(CochraneError::DegenerateDerivative(p));
            }
            if fp_eval(&deriv, alpha, p) != 0 {
                break;
            }
            deriv = fp_derivative(&deriv, p);
            k += 1;
        }
        out.push(CriticalPoint { alpha, multiplicity: k });
    }
    Ok(out)
}

fn require_odd_prime(p: u64) -> Result<(), CochraneError> {
    if p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(CochraneError::NotOddPrime(p))
    }
}

/// `S(f, p^m)` and its partial sums, sharing one evaluator and root table.
pub struct PrimePowerSum {
    p: u64,
    modulus: u64,
    eval: ModEvaluator,
    table: RootTable,
}

impl PrimePowerSum {
    pub fn new(f: &RationalFunc, p: u64, m: u32) -> Result<Self, CochraneError> {
        require_odd_prime(p)?;
        if m == 0 {
            return Err(CochraneError::ZeroExponent);
        }
        let modulus = p.pow(m);
        Ok(Self {
            p,
            modulus,
            eval: f.evaluator(p, modulus),
            table: RootTable::new(modulus),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `S_α`: `x` in `[1, p^m]` with `x ≡ α mod p`, skipping undefined points.
    pub fn partial(&self, alpha: u64) -> ComplexVal {
        let start = match alpha % self.p {
            0 => self.p,
            a => a,
        };
        let mut acc = CompensatedSum::new();
        let mut x = start;
        while x <= self.modulus {
            if let Some(v) = self.eval.eval(x % self.modulus) {
                acc.add(self.table.get(v));
            }
            x += self.p;
        }
        acc.value()
    }

    /// `S(f, p^m)` by one pass over `x` in `[1, p^m]`.
    pub fn full(&self) -> ComplexVal {
        (1..=self.modulus)
            .filter_map(|x| self.eval.eval(x % self.modulus))
            .map(|v| self.table.get(v))
            .collect::<CompensatedSum>()
            .value()
    }
}

pub fn s_alpha(f: &RationalFunc, p: u64, m: u32, alpha: u64) -> Result<ComplexVal, CochraneError> {
    Ok(PrimePowerSum::new(f, p, m)?.partial(alpha))
}

pub fn full_sum(f: &RationalFunc, p: u64, m: u32) -> Result<ComplexVal, CochraneError> {
    Ok(PrimePowerSum::new(f, p, m)?.full())
}

/// Cochrane's bound `λ_α p^{t/(ν+1)} p^{m(1 − 1/(ν+1))}` with `λ_α = min(ν, λ)`.
pub fn cochrane_bound(p: u64, m: u32, t: i64, nu: u32) -> f64 {
    let lam = (nu as f64).min(LAMBDA);
    let e = 1.0 / (nu as f64 + 1.0);
    lam * (p as f64).powf(t as f64 * e) * (p as f64).powf(m as f64 * (1.0 - e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRecord {
    pub alpha: u64,
    pub defined: bool,
    pub multiplicity: Option<u32>,
    pub value: ComplexVal,
    pub bound: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CochraneReport {
    pub p: u64,
    pub m: u32,
    pub t: i64,
    pub applicable: bool,
    pub records: Vec<AlphaRecord>,
    pub total: ComplexVal,
}

impl CochraneReport {
    pub fn status(&self) -> Status {
        if !self.applicable {
            Status::NotApplicable
        } else if self.records.iter().all(|r| r.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn critical(&self) -> impl Iterator<Item = &AlphaRecord> {
        self.records.iter().filter(|r| r.multiplicity.is_some())
    }
}

/// Evaluate every `S_α` and compare with Cochrane's statement. When
/// `t > m − 2` the records are filled in but marked not-applicable.
pub fn cochrane_check(f: &RationalFunc, p: u64, m: u32) -> Result<CochraneReport, CochraneError> {
    let sums = PrimePowerSum::new(f, p, m)?;
    let t = t_value(f, p)?;
    let applicable = t <= m as i64 - 2;
    let crit = critical_points(f, p)?;
    let pm = sums.modulus() as f64;
    let records: Vec<AlphaRecord> = (0..p)
        .map(|alpha| {
            let value = sums.partial(alpha);
            let defined = f.defined_at(alpha, p);
            let nu = crit.iter().find(|c| c.alpha == alpha).map(|c| c.multiplicity);
            let bound = nu.map(|nu| cochrane_bound(p, m, t, nu));
            let status = if !applicable {
                Status::NotApplicable
            } else {
                let ok = match bound {
                    Some(b) => value.abs() <= b * (1.0 + BOUND_REL_TOL),
                    None => value.abs() <= VANISHING_TOL * pm,
                };
                if ok {
                    Status::Pass
                } else {
                    Status::Fail
                }
            };
            AlphaRecord {
                alpha,
                defined,
                multiplicity: nu,
                value,
                bound,
                status,
            }
        })
        .collect();
    let total = records.iter().map(|r| r.value).collect::<CompensatedSum>().value();
    Ok(CochraneReport {
        p,
        m,
        t,
        applicable,
        records,
        total,
    })
}

/// `g_{h,A,v}(x) = A(2x − h) + 4v x²(h − x)²`.
pub fn g_family(h: i64, a: i64, v: i64) -> IntPoly {
    let (h, a, v) = (BigInt::from(h), BigInt::from(a), BigInt::from(v));
    IntPoly::new(vec![
        -(&a * &h),
        &a * BigInt::from(2),
        &v * &h * &h * BigInt::from(4),
        -(&v * &h * BigInt::from(8)),
        &v * BigInt::from(4),
    ])
}

/// Sylvester-matrix resultant, determinant by fraction-free (Bareiss)
/// elimination.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return BigInt::zero();
    };
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..n {
        for (k, c) in f.coeffs().iter().rev().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in g.coeffs().iter().rev().enumerate() {
            mat[n + row][row + k] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `disc(f) = (−1)^{n(n−1)/2} Res(f, f′) / lc(f)`.
pub fn discriminant(f: &IntPoly) -> BigInt {
    let n = f.degree().unwrap_or(0);
    let res = resultant(f, &f.derivative());
    let d = res / f.leading().expect("nonzero polynomial");
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Discriminant of `g_{h,A,v}` computed by resultant.
pub fn disc_g(h: i64, a: i64, v: i64) -> Result<BigInt, CochraneError> {
    if v == 0 {
        return Err(CochraneError::NotQuartic);
    }
    Ok(discriminant(&g_family(h, a, v)))
}

/// `−256 A² v² (27 A² + 16 v² h⁶)`.
pub fn disc_g_closed(h: i64, a: i64, v: i64) -> BigInt {
    let (h, a, v) = (BigInt::from(h), BigInt::from(a), BigInt::from(v));
    let a2 = &a * &a;
    let v2 = &v * &v;
    BigInt::from(-256) * &a2 * &v2 * (BigInt::from(27) * &a2 + BigInt::from(16) * &v2 * h.pow(6))
}

fn require_prime_above_3(p: u64) -> Result<(), CochraneError> {
    require_odd_prime(p)?;
    if p <= 3 {
        return Err(CochraneError::PrimeTooSmall(p));
    }
    Ok(())
}

/// The residues `v ≢ 0 mod p` at which `g_{h,A,v}` acquires a repeated root:
/// `v ≡ ±√−3 · 3A · \overline{4h³}`, empty when `−3` is a non-residue.
pub fn critical_v_set(h: i64, a: i64, p: u64) -> Result<Vec<u64>, CochraneError> {
    require_prime_above_3(p)?;
    let hp = h.rem_euclid(p as i64) as u64;
    let ap = a.rem_euclid(p as i64) as u64;
    if hp == 0 || ap == 0 {
        return Err(CochraneError::NotCoprime { what: "hA", p });
    }
    let Some(s) = sqrt_mod_prime(p - 3, p) else {
        return Ok(Vec::new());
    };
    let h3 = pow_mod(hp, 3, p);
    let inv = inv_mod(4 * h3 as i128, p).expect("unit");
    let v = mul_mod(mul_mod(s, 3 * ap % p, p), inv, p);
    let mut out = vec![v, p - v];
    out.sort_unstable();
    Ok(out)
}

fn family_guard(h: i64, u: i64, j: i64, p: u64) -> Result<(), CochraneError> {
    require_prime_above_3(p)?;
    let jhu = (j as i128 * h as i128 % p as i128) * u as i128 % p as i128;
    if jhu == 0 {
        return Err(CochraneError::NotCoprime { what: "jhu", p });
    }
    Ok(())
}

/// `Σ_{n mod p², (n(h−n), p) = 1} e_{p²}(j h u² \overline{4n(h−n)} + v n)`.
pub fn family_sum(h: i64, u: i64, v: i64, j: i64, p: u64) -> Result<ComplexVal, CochraneError> {
    family_guard(h, u, j, p)?;
    Ok(family_sum_with(&RootTable::new(p * p), h, u, v, j, p))
}

fn family_sum_with(table: &RootTable, h: i64, u: i64, v: i64, j: i64, p: u64) -> ComplexVal {
    let q = p * p;
    let qi = q as i128;
    let a = (j as i128 * h as i128 % qi * (u as i128 * u as i128 % qi)).rem_euclid(qi) as u64;
    let h = (h as i128).rem_euclid(qi) as u64;
    let v = (v as i128).rem_euclid(qi) as u64;
    let mut acc = CompensatedSum::new();
    for n in 1..=q {
        let w = mul_mod(n % q, (h + q - n % q) % q, q);
        if w.is_multiple_of(p) {
            continue;
        }
        let inv = inv_mod(4 * w as i128, q).expect("unit");
        let val = (mul_mod(a, inv, q) + mul_mod(v, n % q, q)) % q;
        acc.add(table.get(val));
    }
    acc.value()
}

/// `f_{h,u,v}(x) = j h u² / (4x(h − x)) + v x` as a single fraction.
pub fn family_rational(h: i64, u: i64, v: i64, j: i64) -> RationalFunc {
    let a = BigInt::from(j) * BigInt::from(h) * BigInt::from(u) * BigInt::from(u);
    let num = IntPoly::new(vec![
        a,
        BigInt::zero(),
        BigInt::from(4) * BigInt::from(v) * BigInt::from(h),
        BigInt::from(-4) * BigInt::from(v),
    ]);
    let den = IntPoly::new(vec![
        BigInt::zero(),
        BigInt::from(4) * BigInt::from(h),
        BigInt::from(-4),
    ]);
    RationalFunc::new(num, den).expect("nonzero denominator")
}

/// The same sum assembled from the partial sums `S_α(f_{h,u,v}, p²)`.
pub fn family_sum_by_alpha(h: i64, u: i64, v: i64, j: i64, p: u64) -> Result<ComplexVal, CochraneError> {
    family_guard(h, u, j, p)?;
    let sums = PrimePowerSum::new(&family_rational(h, u, v, j), p, 2)?;
    Ok((0..p).map(|a| sums.partial(a)).collect::<CompensatedSum>().value())
}

/// `family_sum` for every `v` in `[0, v_count)`, in increasing `v`.
pub fn family_sweep(h: i64, u: i64, j: i64, p: u64, v_count: u64) -> Result<Vec<(u64, ComplexVal)>, CochraneError> {
    family_guard(h, u, j, p)?;
    let table = RootTable::new(p * p);
    Ok((0..v_count)
        .into_par_iter()
        .map(|v| (v, family_sum_with(&table, h, u, v as i64, j, p)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn rf(n: &[i64], d: &[i64]) -> RationalFunc {
        RationalFunc::new(poly(n), poly(d)).unwrap()
    }

    #[test]
    fn ord_examples() {
        assert_eq!(poly(&[0, 5, 25]).ord_p(5).unwrap(), 1);
        assert_eq!(poly(&[1, 1]).ord_p(7).unwrap(), 0);
        assert_eq!(rf(&[0, 5], &[25]).ord_p(5).unwrap(), -1);
        assert_eq!(IntPoly::zero().ord_p(5), Err(CochraneError::ZeroPolynomial));
    }

    #[test]
    fn derivative_examples() {
        let d = RationalFunc::polynomial(poly(&[0, 0, 1])).derivative();
        assert_eq!(d.numerator(), &poly(&[0, 2]));
        let d = rf(&[1], &[0, 1]).derivative();
        assert_eq!(d.numerator(), &poly(&[-1]));
        assert_eq!(d.denominator(), &poly(&[0, 0, 1]));
        // A / (4x(1 - x)) with A = 3: numerator 4A(2x - 1) over (4x - 4x²)²
        let d = rf(&[3], &[0, 4, -4]).derivative();
        assert_eq!(d.numerator(), &poly(&[-12, 24]));
        assert_eq!(d.denominator(), &(&poly(&[0, 4, -4]) * &poly(&[0, 4, -4])));
        assert!(RationalFunc::new(poly(&[1]), IntPoly::zero()).is_err());
    }

    #[test]
    fn t_examples() {
        let cube = RationalFunc::polynomial(poly(&[0, 0, 0, 1]));
        assert_eq!(t_value(&cube, 5).unwrap(), 0);
        assert_eq!(t_value(&RationalFunc::polynomial(poly(&[0, 0, 5])), 5).unwrap(), 1);
        assert_eq!(t_value(&RationalFunc::polynomial(poly(&[0, 1])), 7).unwrap(), 0);
        assert_eq!(
            t_value(&RationalFunc::polynomial(poly(&[4])), 7),
            Err(CochraneError::ConstantFunction)
        );
    }

    #[test]
    fn critical_point_examples() {
        let cube = RationalFunc::polynomial(poly(&[0, 0, 0, 1]));
        assert_eq!(
            critical_points(&cube, 5).unwrap(),
            vec![CriticalPoint {
                alpha: 0,
                multiplicity: 2
            }]
        );
        let f = RationalFunc::polynomial(poly(&[0, 1, 1]));
        assert_eq!(
            critical_points(&f, 7).unwrap(),
            vec![CriticalPoint {
                alpha: 3,
                multiplicity: 1
            }]
        );
        assert!(critical_points(&RationalFunc::polynomial(poly(&[0, 1])), 5)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn critical_points_drop_common_factors_and_poles() {
        // f = 1/x: f' = -1/x², no finite critical points; 0 is a pole
        assert!(critical_points(&rf(&[1], &[0, 1]), 7).unwrap().is_empty());
        // f = x²/(x - 1): f' = (x² - 2x)/(x - 1)², roots 0 and 2
        let pts = critical_points(&rf(&[0, 0, 1], &[-1, 1]), 7).unwrap();
        assert_eq!(pts.iter().map(|c| c.alpha).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn s_alpha_examples() {
        let cube = RationalFunc::polynomial(poly(&[0, 0, 0, 1]));
        let s0 = s_alpha(&cube, 5, 3, 0).unwrap();
        assert!(s0.approx_eq(ComplexVal::new(25.0, 0.0), 1e-9));
        assert!(s_alpha(&cube, 5, 3, 1).unwrap().abs() < 1e-9);
        let lin = RationalFunc::polynomial(poly(&[0, 1]));
        assert!(s_alpha(&lin, 5, 2, 2).unwrap().abs() < 1e-9);
    }

    #[test]
    fn cochrane_check_examples() {
        let cube = RationalFunc::polynomial(poly(&[0, 0, 0, 1]));
        let rep = cochrane_check(&cube, 5, 3).unwrap();
        assert_eq!(rep.status(), Status::Pass);
        let crit: Vec<_> = rep.critical().collect();
        assert_eq!(crit.len(), 1);
        assert!((crit[0].value.abs() - 25.0).abs() < 1e-9);
        assert!((crit[0].bound.unwrap() - 50.0).abs() < 1e-9);

        let sq = RationalFunc::polynomial(poly(&[0, 0, 1]));
        let rep = cochrane_check(&sq, 5, 3).unwrap();
        assert_eq!(rep.status(), Status::Pass);
        let b = rep.critical().next().unwrap().bound.unwrap();
        assert!((b - 5f64.powf(1.5)).abs() < 1e-9);

        let lin = RationalFunc::polynomial(poly(&[0, 1]));
        let rep = cochrane_check(&lin, 5, 3).unwrap();
        assert_eq!(rep.critical().count(), 0);
        assert!(rep.total.abs() < 1e-9);
        assert!(full_sum(&lin, 5, 3).unwrap().abs() < 1e-9);
    }

    #[test]
    fn cochrane_not_applicable_when_t_too_large() {
        let f = RationalFunc::polynomial(poly(&[0, 0, 5]));
        let rep = cochrane_check(&f, 5, 2).unwrap();
        assert!(!rep.applicable);
        assert_eq!(rep.status(), Status::NotApplicable);
    }

    #[test]
    fn g_family_examples() {
        assert_eq!(g_family(1, 1, 0), poly(&[-1, 2]));
        assert_eq!(g_family(1, 1, 1), poly(&[-1, 2, 4, -8, 4]));
        assert_eq!(g_family(0, 3, 2), poly(&[0, 6, 0, 0, 8]));
    }

    #[test]
    fn disc_examples() {
        assert_eq!(disc_g(1, 1, 1).unwrap(), BigInt::from(-11008));
        assert_eq!(disc_g(1, 1, -1).unwrap(), BigInt::from(-11008));
        assert_eq!(disc_g(2, 1, 1).unwrap(), BigInt::from(-269056));
        assert_eq!(disc_g_closed(2, 1, 1), BigInt::from(-269056));
        assert_eq!(disc_g(1, 1, 0), Err(CochraneError::NotQuartic));
    }

    #[test]
    fn discriminant_of_small_polys() {
        // x² + bx + c -> b² - 4c ; x³ + px + q -> -4p³ - 27q²
        assert_eq!(discriminant(&poly(&[3, 5, 1])), BigInt::from(25 - 12));
        assert_eq!(discriminant(&poly(&[2, -3, 0, 1])), BigInt::from(-4 * -27 - 27 * 4));
        assert_eq!(discriminant(&poly(&[1, -2, 1])), BigInt::zero());
    }

    #[test]
    fn g_derivative_identities() {
        for (h, a, v) in [(1, 1, 1), (3, -2, 5), (-4, 7, -3)] {
            let g = g_family(h, a, v);
            let g2 = g.derivative().derivative();
            let g3 = g2.derivative();
            assert_eq!(g2, poly(&[8 * v * h * h, -48 * v * h, 48 * v]));
            assert_eq!(g3, poly(&[-48 * v * h, 96 * v]));
        }
    }

    #[test]
    fn critical_v_examples() {
        assert_eq!(critical_v_set(1, 1, 7).unwrap(), vec![2, 5]);
        assert!(critical_v_set(1, 1, 5).unwrap().is_empty());
        assert!(critical_v_set(1, 1, 11).unwrap().is_empty());
        assert!(matches!(critical_v_set(7, 1, 7), Err(CochraneError::NotCoprime { .. })));
        assert_eq!(critical_v_set(1, 1, 3), Err(CochraneError::PrimeTooSmall(3)));
    }

    #[test]
    fn family_sum_two_routes_agree() {
        for p in [5u64, 7, 11] {
            for v in 0..p as i64 {
                let direct = family_sum(1, 1, v, 1, p).unwrap();
                let split = family_sum_by_alpha(1, 1, v, 1, p).unwrap();
                assert!(direct.approx_eq(split, 1e-9), "p={p} v={v}");
            }
        }
        let direct = family_sum(2, 3, 4, 5, 13).unwrap();
        let split = family_sum_by_alpha(2, 3, 4, 5, 13).unwrap();
        assert!(direct.approx_eq(split, 1e-9));
    }

    #[test]
    fn family_sum_conjugation() {
        for v in -3..10 {
            let a = family_sum(2, 1, v, 3, 7).unwrap();
            let b = family_sum(2, 1, -v, -3, 7).unwrap();
            assert!(a.conj().approx_eq(b, 1e-9));
        }
    }

    #[test]
    fn family_sum_guards() {
        assert!(matches!(
            family_sum(7, 1, 1, 1, 7),
            Err(CochraneError::NotCoprime { .. })
        ));
        assert_eq!(family_sum(1, 1, 1, 1, 3), Err(CochraneError::PrimeTooSmall(3)));
        assert_eq!(family_sum(1, 1, 1, 1, 9), Err(CochraneError::NotOddPrime(9)));
    }

    #[test]
    fn family_derivative_numerator_is_g() {
        for (h, u, v, j) in [(1, 1, 1, 1), (2, 3, -1, 5), (5, 2, 7, -3)] {
            let d = family_rational(h, u, v, j).derivative();
            let g = g_family(h, j * h * u * u, v);
            // f' = g / (4x²(h − x)²)
            let x_hx = poly(&[0, h, -1]);
            let four_sq = &(&x_hx * &x_hx) * &IntPoly::constant(4);
            assert_eq!(d.numerator() * &four_sq, &g * d.denominator());
        }
    }

    #[test]
    fn resultant_of_shared_root_is_zero() {
        let f = &poly(&[-1, 1]) * &poly(&[2, 1]);
        let g = &poly(&[-1, 1]) * &poly(&[5, 0, 1]);
        assert!(resultant(&f, &g).is_zero());
        assert_eq!(resultant(&poly(&[-2, 1]), &poly(&[-3, 1])), BigInt::from(-1));
    }
}
