//! Exact modular arithmetic: gcd and inverses, Jacobi symbols, primality and
//! factorization of 64-bit moduli, and the full set of modular square roots.
//!
//! Residues are kept in `[0, r)` and every product goes through `u128`, so any
//! modulus up to `2^63 - 1` is safe.

use num_integer::Integer;
use thiserror::Error;

/// Largest modulus accepted anywhere in the crate.
pub const MAX_MODULUS: u64 = (1 << 63) - 1;

/// Moduli at or below this size take the exhaustive path in [`sqrt_set`].
pub const EXHAUSTIVE_SQRT_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModError {
    #[error("gcd(0, 0) is undefined")]
    Degenerate,
    #[error("{x} is not invertible modulo {modulus}")]
    NotInvertible { x: i64, modulus: u64 },
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("modulus {0} must be odd")]
    EvenModulus(u64),
    #[error("modulus {0} exceeds 2^63 - 1")]
    TooLarge(u64),
}

/// A modulus together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueRing {
    modulus: u64,
    factors: Vec<(u64, u32)>,
}

impl ResidueRing {
    pub fn new(modulus: u64) -> Result<Self, ModError> {
        check_modulus(modulus)?;
        Ok(Self {
            modulus,
            factors: factorize(modulus),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Prime factorization with strictly increasing primes.
    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn residue(&self, value: i128) -> Residue {
        Residue::new(value, self.modulus)
    }

    /// `(s0, s1)`: squarefree and squarefull parts of the modulus.
    pub fn squarefree_squarefull(&self) -> (u64, u64) {
        split_squarefree(&self.factors)
    }
}

/// A residue class `value mod modulus` with `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i128, modulus: u64) -> Self {
        assert!(modulus >= 1, "residue modulus must be positive");
        Self {
            value: reduce(value, modulus),
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }
}

impl std::fmt::Display for Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn check_modulus(m: u64) -> Result<(), ModError> {
    match m {
        0 => Err(ModError::ZeroModulus),
        m if m > MAX_MODULUS => Err(ModError::TooLarge(m)),
        _ => Ok(()),
    }
}

/// Canonical representative of `x` in `[0, m)`.
#[inline]
pub fn reduce(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    let (a, b) = (a % m, b % m);
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Extended Euclid: `(g, x, y)` with `g = gcd(a, b) > 0` and `a*x + b*y = g`.
pub fn egcd(a: i64, b: i64) -> Result<(i64, i64, i64), ModError> {
    if a == 0 && b == 0 {
        return Err(ModError::Degenerate);
    }
    let (g, x, y) = egcd_i128(a as i128, b as i128);
    Ok((g as i64, x as i64, y as i64))
}

fn egcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    // Iterative form of the textbook recursion; same coefficients.
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Inverse of `x` modulo `c` in `[0, c)`, or `None` when `gcd(x, c) > 1`.
pub fn inv_mod(x: i128, c: u64) -> Option<u64> {
    if c == 1 {
        return Some(0);
    }
    let (g, s, _) = egcd_i128(reduce(x, c) as i128, c as i128);
    (g == 1).then(|| reduce(s, c))
}

/// Multiplicative inverse `x̄` of `x` modulo `c`, reduced to `[0, c)`.
pub fn mod_inverse(x: i64, c: u64) -> Result<Residue, ModError> {
    check_modulus(c)?;
    inv_mod(x as i128, c)
        .map(|v| Residue { value: v, modulus: c })
        .ok_or(ModError::NotInvertible { x, modulus: c })
}

/// Jacobi symbol `(a / c)` for odd positive `c`.
pub fn jacobi(a: i64, c: u64) -> Result<i8, ModError> {
    check_modulus(c)?;
    if c.is_multiple_of(2) {
        return Err(ModError::EvenModulus(c));
    }
    Ok(jacobi_unchecked(reduce(a as i128, c), c))
}

pub(crate) fn jacobi_unchecked(a: u64, c: u64) -> i8 {
    let mut a = a % c;
    let mut n = c;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// `ε_c` as a power of `i`: 0 (the unit 1) when `c ≡ 1 mod 4`, 1 (the unit `i`)
/// when `c ≡ 3 mod 4`.
pub fn epsilon_c(c: u64) -> Result<u8, ModError> {
    check_modulus(c)?;
    match c % 4 {
        1 => Ok(0),
        3 => Ok(1),
        _ => Err(ModError::EvenModulus(c)),
    }
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut y, mut g, mut r, mut q) = (2u64, 1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        let m = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorization `[(p, e)]`, primes strictly increasing. `factorize(1)`
/// is empty.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut n = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
        } else {
            let d = pollard_brent(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn split_squarefree(factors: &[(u64, u32)]) -> (u64, u64) {
    factors.iter().fold(
        (1, 1),
        |(s0, s1), &(p, e)| {
            if e == 1 {
                (s0 * p, s1)
            } else {
                (s0, s1 * p.pow(e))
            }
        },
    )
}

/// `r = s0 * s1` with `s0` squarefree, `s1` squarefull and `gcd(s0, s1) = 1`.
pub fn squarefree_squarefull(r: u64) -> Result<(u64, u64), ModError> {
    check_modulus(r)?;
    Ok(split_squarefree(&factorize(r)))
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// A square root of `s` modulo the odd prime `p` (Tonelli–Shanks), or `None`
/// when `s` is a non-residue.
pub fn sqrt_mod_prime(s: u64, p: u64) -> Option<u64> {
    let s = s % p;
    if p == 2 || s == 0 {
        return Some(s);
    }
    if pow_mod(s, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(s, (p + 1) / 4, p));
    }
    let e = (p - 1).trailing_zeros();
    let q = (p - 1) >> e;
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = e;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(s, q, p);
    let mut x = pow_mod(s, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        x = mul_mod(x, b, p);
    }
    Some(x)
}

/// Square roots of a unit `s` modulo `p^f`, `p` prime.
fn unit_roots_prime_power(s: u64, p: u64, f: u32) -> Vec<u64> {
    let pf = p.pow(f);
    let s = s % pf;
    if p == 2 {
        // Roots mod 2^min(f, 3) by inspection, then lift one bit at a time;
        // beyond 2^3 each root has two candidate lifts and the set stays at 4.
        let base = f.min(3);
        let m = 1u64 << base;
        let mut roots: Vec<u64> = (0..m).filter(|&k| (k * k) % m == s % m && k % 2 == 1).collect();
        for i in base..f {
            let next = 1u64 << (i + 1);
            roots = roots
                .iter()
                .flat_map(|&x| [x, x + (1 << i)])
                .filter(|&x| mul_mod(x, x, next) == s % next)
                .collect();
        }
        return roots;
    }
    let Some(mut x) = sqrt_mod_prime(s, p) else {
        return Vec::new();
    };
    // Hensel: x <- x - (x^2 - s) / (2x), one power of p at a time.
    let mut pk = p;
    for _ in 1..f {
        pk *= p;
        let fx = sub_mod(mul_mod(x, x, pk), s % pk, pk);
        let inv = inv_mod(2 * x as i128, pk).expect("2x is a unit");
        x = sub_mod(x, mul_mod(fx, inv, pk), pk);
    }
    let mut roots = vec![x, (pf - x) % pf];
    roots.dedup();
    roots
}

/// All `k mod p^e` with `k^2 ≡ s`.
pub fn sqrt_set_prime_power(s: i128, p: u64, e: u32) -> Vec<u64> {
    let pe = p.pow(e);
    let s = reduce(s, pe);
    let mut out = Vec::new();
    if s == 0 {
        // k ≡ 0 mod p^ceil(e/2)
        let step = p.pow(e.div_ceil(2));
        out.extend((0..pe / step).map(|t| t * step));
        return out;
    }
    let mut v = 0u32;
    let mut unit = s;
    while unit.is_multiple_of(p) {
        unit /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return out;
    }
    let f = e - v;
    let half = p.pow(v / 2);
    let pf = p.pow(f);
    // k = p^(v/2) k' with k'^2 ≡ unit mod p^f; k' is needed mod p^(e - v/2).
    for root in unit_roots_prime_power(unit, p, f) {
        for t in 0..half {
            out.push(mul_mod(half, root + t * pf, pe));
        }
    }
    out.sort_unstable();
    out
}

/// Exhaustive scan `{k in [0, r) : k^2 ≡ s mod r}`.
pub fn sqrt_set_exhaustive(s: i64, r: u64) -> Result<Vec<u64>, ModError> {
    check_modulus(r)?;
    let target = reduce(s as i128, r);
    Ok((0..r).filter(|&k| mul_mod(k, k, r) == target).collect())
}

/// Tonelli–Shanks per prime, Hensel lifting to prime powers, CRT across them.
pub fn sqrt_set_lifted(s: i64, r: u64) -> Result<Vec<u64>, ModError> {
    let ring = ResidueRing::new(r)?;
    Ok(sqrt_set_in(s as i128, &ring))
}

pub(crate) fn sqrt_set_in(s: i128, ring: &ResidueRing) -> Vec<u64> {
    let mut acc = vec![0u64];
    let mut modulus = 1u64;
    for &(p, e) in ring.factorization() {
        let pe = p.pow(e);
        let local = sqrt_set_prime_power(s, p, e);
        if local.is_empty() {
            return Vec::new();
        }
        // x ≡ a mod modulus, x ≡ b mod pe
        let inv = inv_mod(modulus as i128, pe).expect("coprime prime powers");
        let next = modulus * pe;
        let mut combined = Vec::with_capacity(acc.len() * local.len());
        for &a in &acc {
            for &b in &local {
                let t = mul_mod(sub_mod(b, a % pe, pe), inv, pe);
                combined.push(add_mod(a, mul_mod(modulus, t, next), next));
            }
        }
        acc = combined;
        modulus = next;
    }
    acc.sort_unstable();
    acc
}

/// All modular square roots of `s` modulo `r`, sorted. Small moduli are
/// scanned exhaustively; larger ones go through [`sqrt_set_lifted`].
pub fn sqrt_set(s: i64, r: u64) -> Result<Vec<u64>, ModError> {
    if r <= EXHAUSTIVE_SQRT_LIMIT {
        sqrt_set_exhaustive(s, r)
    } else {
        sqrt_set_lifted(s, r)
    }
}
