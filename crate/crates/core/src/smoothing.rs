//! The smooth majorant `Φ`, its Fourier transform `Φ̂`, the periodization
//! `φ_ν`, and numerical checks of Poisson summation and of the smoothed
//! upper bound for `𝒜(d)`.
//!
//! `Φ` is 1 on `[−1, 1]`, 0 outside `(−2, 2)`, and on `1 < |x| < 2` equals
//! `s(2 − |x|)` with `s(t) = ψ(t) / (ψ(t) + ψ(1 − t))`, `ψ(t) = exp(−1/t)`.
//! Because `s(t) + s(1 − t) = 1`, the integer translates of `Φ` sum to 3, so
//! `Φ̂(0) = 3` and `Φ̂(k) = 0` for every other integer `k`.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::counting::{a_of_d, SqrtPairParams};
use crate::modular::{self, inv_mod};
use crate::report::{BoundReport, Status};

/// Tolerance on a Poisson check, relative to `L`.
pub const POISSON_REL_TOL: f64 = 1e-6;
/// Table step for `Φ̂`.
pub const TABLE_STEP: f64 = 1.0 / 256.0;
/// Upper end of the tabulated range of `Φ̂`.
pub const TABLE_MAX: f64 = 96.0;
/// `|Φ̂(y)|` below which terms are dropped from truncated sums.
pub const TRUNCATION_LEVEL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmoothingError {
    #[error("nu = {0} must lie in (0, 1]")]
    NuOutOfRange(f64),
    #[error("L = {0} must be at least 1")]
    LengthTooSmall(f64),
}

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Taper `s` on `[0, 1]`: 0 at 0, 1 at 1, `s(t) + s(1 − t) = 1`.
pub fn taper(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = psi(t);
        a / (a + psi(1.0 - t))
    }
}

/// `Φ(x)`.
pub fn phi(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        taper(2.0 - x)
    }
}

/// Which even kernel a Poisson check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// The compactly supported `Φ`.
    Bump,
    /// `e^{−πx²}`, its own transform; used to validate the pipeline.
    Gaussian,
}

impl Kernel {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Kernel::Bump => phi(x),
            Kernel::Gaussian => (-PI * x * x).exp(),
        }
    }

    /// Half-width beyond which the kernel is treated as 0 (exactly 0 for
    /// the bump, below `1e-60` for the Gaussian).
    pub fn support(self) -> f64 {
        match self {
            Kernel::Bump => 2.0,
            Kernel::Gaussian => 7.0,
        }
    }

    pub fn transform(self, y: f64) -> f64 {
        match self {
            Kernel::Bump => phi_hat(y),
            Kernel::Gaussian => (-PI * y * y).exp(),
        }
    }

    /// Half-width beyond which `|transform| ≤ TRUNCATION_LEVEL`.
    pub fn transform_cutoff(self) -> f64 {
        match self {
            Kernel::Bump => fourier_table().decay_point(TRUNCATION_LEVEL),
            Kernel::Gaussian => (-TRUNCATION_LEVEL.ln() / PI).sqrt(),
        }
    }
}

const GL_ORDER: usize = 20;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64); GL_ORDER] {
    static RULE: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut rule = [(0.0, 0.0); GL_ORDER];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

/// `∫_a^b g` by composite Gauss–Legendre on `panels` equal panels.
fn integrate(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre();
    let w = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * w;
        let part: f64 = rule.iter().map(|&(x, wt)| wt * g(mid + 0.5 * w * x)).sum();
        total += 0.5 * w * part;
    }
    total
}

fn panels_for(y: f64, width: f64) -> usize {
    // at least two panels per oscillation period
    ((2.0 * width * (y.abs() + 1.0)).ceil() as usize).max(4)
}

/// `∫ f(x) e(−xy) dx` for an even `f` supported in `[−a, a]`, with the
/// integration split at the listed break points of `f`.
pub fn fourier_even(f: impl Fn(f64) -> f64, breaks: &[f64], y: f64) -> f64 {
    let mut total = 0.0;
    let mut lo = 0.0;
    for &hi in breaks {
        total += integrate(|x| f(x) * (TAU * x * y).cos(), lo, hi, panels_for(y, hi - lo));
        lo = hi;
    }
    2.0 * total
}

fn fourier_even_derivative(f: impl Fn(f64) -> f64, breaks: &[f64], y: f64) -> f64 {
    let mut total = 0.0;
    let mut lo = 0.0;
    for &hi in breaks {
        total += integrate(
            |x| -TAU * x * f(x) * (TAU * x * y).sin(),
            lo,
            hi,
            panels_for(y, hi - lo),
        );
        lo = hi;
    }
    2.0 * total
}

/// `Φ̂(y)` by quadrature, without the table.
pub fn phi_hat_direct(y: f64) -> f64 {
    fourier_even(phi, &[1.0, 2.0], y)
}

/// `Φ̂` and `Φ̂′` on `[0, TABLE_MAX]`, interpolated by cubic Hermite.
#[derive(Debug, Clone)]
pub struct FourierTable {
    step: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl FourierTable {
    pub fn build(step: f64, y_max: f64) -> Self {
        let n = (y_max / step).round() as usize;
        let (values, derivs) = (0..=n)
            .into_par_iter()
            .map(|i| {
                let y = i as f64 * step;
                (phi_hat_direct(y), fourier_even_derivative(phi, &[1.0, 2.0], y))
            })
            .unzip();
        Self { step, values, derivs }
    }

    pub fn y_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (i as f64 * self.step, v))
    }

    /// Interpolated value; `None` outside the table.
    pub fn get(&self, y: f64) -> Option<f64> {
        let y = y.abs();
        let pos = y / self.step;
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return (i + 1 == self.values.len() && pos == i as f64).then(|| self.values[i]);
        }
        let t = pos - i as f64;
        let h = self.step;
        let (p0, p1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.derivs[i] * h, self.derivs[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        Some((2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1)
    }

    /// Smallest tabulated `y₀` with `|Φ̂(y)| ≤ level` at every grid point
    /// `y ≥ y₀`; the table end if the level is never reached.
    pub fn decay_point(&self, level: f64) -> f64 {
        match self.values.iter().rposition(|v| v.abs() > level) {
            Some(i) => ((i + 1) as f64 * self.step).min(self.y_max()),
            None => 0.0,
        }
    }
}

/// The shared table, built on first use.
pub fn fourier_table() -> &'static FourierTable {
    static TABLE: OnceLock<FourierTable> = OnceLock::new();
    TABLE.get_or_init(|| FourierTable::build(TABLE_STEP, TABLE_MAX))
}

/// `Φ̂(y) = ∫ Φ(x) e(−xy) dx`.
pub fn phi_hat(y: f64) -> f64 {
    fourier_table().get(y).unwrap_or_else(|| phi_hat_direct(y))
}

/// `φ_ν(y) = Σ_h Φ((y + h)/ν)`, a finite sum since `Φ` vanishes off `(−2, 2)`.
pub fn phi_nu(y: f64, nu: f64) -> Result<f64, SmoothingError> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(SmoothingError::NuOutOfRange(nu));
    }
    let y = y - y.floor();
    let lo = (-y - 2.0 * nu).ceil() as i64;
    let hi = (-y + 2.0 * nu).floor() as i64;
    Ok((lo..=hi).map(|h| phi((y + h as f64) / nu)).sum())
}

/// `ν Σ_{|h| ≤ H} Φ̂(hν) e(hy)` with `H` from the decay of `Φ̂`.
pub fn phi_nu_fourier(y: f64, nu: f64) -> Result<f64, SmoothingError> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(SmoothingError::NuOutOfRange(nu));
    }
    let h_max = (Kernel::Bump.transform_cutoff() / nu).ceil() as i64;
    let tail: f64 = (1..=h_max)
        .map(|h| phi_hat(h as f64 * nu) * (TAU * h as f64 * y).cos())
        .sum();
    Ok(nu * (phi_hat(0.0) + 2.0 * tail))
}

/// Both sides of `Σ_l Φ(l/L) e(lα) = L Σ_n Φ̂(L(α − n))` for a kernel.
pub fn poisson_sides(kernel: Kernel, l: f64, alpha: f64) -> Result<(f64, f64), SmoothingError> {
    if l.is_nan() || l < 1.0 {
        return Err(SmoothingError::LengthTooSmall(l));
    }
    // both sides are real for an even kernel
    let l_max = (kernel.support() * l).floor() as i64;
    let lhs: f64 = (-l_max..=l_max)
        .map(|k| kernel.eval(k as f64 / l) * (TAU * k as f64 * alpha).cos())
        .sum();
    let reach = kernel.transform_cutoff() / l;
    let n_lo = (alpha - reach).floor() as i64;
    let n_hi = (alpha + reach).ceil() as i64;
    let rhs = l
        * (n_lo..=n_hi)
            .map(|n| kernel.transform(l * (alpha - n as f64)))
            .sum::<f64>();
    Ok((lhs, rhs))
}

/// Pass iff `|LHS − RHS| ≤ 10⁻⁶ L`. The report's `lhs_value` is the
/// discrepancy and `bound_value` the tolerance.
pub fn poisson_check(kernel: Kernel, l: f64, alpha: f64) -> Result<BoundReport, SmoothingError> {
    let (lhs, rhs) = poisson_sides(kernel, l, alpha)?;
    let diff = (lhs - rhs).abs();
    let tol = POISSON_REL_TOL * l;
    let status = if diff <= tol { Status::Pass } else { Status::Fail };
    Ok(BoundReport::new(diff, tol, status)
        .with_param("lhs", lhs)
        .with_param("rhs", rhs))
}

/// `Σ_{k mod r, (k,r)=1} φ_{M/r}(j̄k²/r) φ_{H/r}(j̄(2dk + d²)/r)`.
pub fn smoothed_majorant(params: &SqrtPairParams, d: i64) -> f64 {
    let r = params.r;
    let j_inv = inv_mod(params.j as i128, r).expect("j coprime to r");
    let nu_m = params.m as f64 / r as f64;
    let nu_h = params.h as f64 / r as f64;
    let d_r = modular::reduce(d as i128, r);
    let d2 = modular::mul_mod(d_r, d_r, r);
    (1..r)
        .filter(|k| k.gcd(&r) == 1)
        .map(|k| {
            let m = modular::mul_mod(j_inv, modular::mul_mod(k, k, r), r);
            let lin = modular::add_mod(modular::mul_mod(2 * d_r % r, k, r), d2, r);
            let dm = modular::mul_mod(j_inv, lin, r);
            let a = phi_nu(m as f64 / r as f64, nu_m).expect("M <= r/2");
            if a == 0.0 {
                return 0.0;
            }
            a * phi_nu(dm as f64 / r as f64, nu_h).expect("H <= r/2")
        })
        .sum()
}

/// `𝒜(d)` against its smoothed majorant; only for `r = p²`, `p` an odd prime.
pub fn smoothed_majorant_check(params: &SqrtPairParams, d: i64) -> BoundReport {
    let p = (params.r as f64).sqrt().round() as u64;
    if p * p != params.r || p.is_multiple_of(2) || !modular::is_prime(p) {
        return BoundReport::not_applicable("r is not the square of an odd prime");
    }
    let count = a_of_d(params, d) as f64;
    let smooth = smoothed_majorant(params, d);
    let status = if count <= smooth * (1.0 + 1e-12) {
        Status::Pass
    } else {
        Status::Fail
    };
    BoundReport::new(count, smooth, status).with_param("d", d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::DEFAULT_EPS;

    #[test]
    fn bump_values() {
        assert_eq!(phi(0.5), 1.0);
        assert_eq!(phi(-1.0), 1.0);
        assert_eq!(phi(3.0), 0.0);
        assert_eq!(phi(2.0), 0.0);
        let v = phi(1.5);
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(phi(-1.5), v);
        assert!((v - 0.5).abs() < 1e-15);
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((taper(t) + taper(1.0 - t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let v = integrate(|x| x.powi(9) - 3.0 * x * x, 0.0, 2.0, 1);
        assert!((v - (102.4 - 8.0)).abs() < 1e-12);
        let w: f64 = gauss_legendre().iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn transform_values() {
        assert!((phi_hat(0.0) - 3.0).abs() < 1e-12);
        for k in 1..=40 {
            assert!(phi_hat(k as f64).abs() < 1e-12, "k = {k}");
        }
        for y in [0.3, 1.7, 12.25] {
            assert_eq!(phi_hat(-y), phi_hat(y));
        }
        // Gaussian through the same quadrature
        let g = |x: f64| (-PI * x * x).exp();
        for y in [0.0, 0.4, 1.0, 2.5] {
            assert!((fourier_even(g, &[7.0], y) - g(y)).abs() < 1e-12);
        }
    }

    #[test]
    fn table_interpolation_error() {
        let t = fourier_table();
        let mut worst: f64 = 0.0;
        for i in 0..2000 {
            let y = 0.001 + i as f64 * (TABLE_MAX - 0.01) / 2000.0 + 0.37 * TABLE_STEP;
            worst = worst.max((t.get(y).unwrap() - phi_hat_direct(y)).abs());
        }
        assert!(worst <= 1e-8, "worst interpolation error {worst}");
        assert!(t.get(TABLE_MAX + 1.0).is_none());
    }

    #[test]
    fn decay() {
        let t = fourier_table();
        let y6 = t.decay_point(1e-6);
        let y13 = t.decay_point(TRUNCATION_LEVEL);
        assert!(y6 < y13 && y13 < t.y_max(), "decay points {y6} {y13}");
        for y in [y13 + 1.0, y13 + 7.3, TABLE_MAX + 3.0] {
            assert!(phi_hat(y).abs() <= TRUNCATION_LEVEL);
        }
    }

    #[test]
    fn periodization() {
        assert_eq!(phi_nu(0.5, 0.1).unwrap(), 0.0);
        assert!(phi_nu(0.0, 0.0).is_err());
        assert!(phi_nu(0.0, 1.5).is_err());
        for nu in [0.01, 0.1, 0.5, 1.0] {
            for i in 0..50 {
                let y = i as f64 / 50.0 - 0.3;
                assert!((phi_nu(y + 1.0, nu).unwrap() - phi_nu(y, nu).unwrap()).abs() < 1e-12);
            }
        }
        // ν = 1: integer translates sum to 3
        assert!((phi_nu(0.37, 1.0).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn envelope() {
        for nu in [0.01, 0.1, 0.5] {
            for i in 0..10_000 {
                let y = i as f64 / 10_000.0;
                let dist = y.min(1.0 - y);
                if dist <= nu {
                    assert!(phi_nu(y, nu).unwrap() >= 1.0);
                }
            }
        }
    }

    #[test]
    fn fourier_series_agrees() {
        for nu in [0.05, 0.1, 0.5] {
            for i in 0..40 {
                let y = i as f64 / 40.0;
                let a = phi_nu(y, nu).unwrap();
                let b = phi_nu_fourier(y, nu).unwrap();
                assert!((a - b).abs() < 1e-6, "nu={nu} y={y}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn poisson() {
        let (lhs, rhs) = poisson_sides(Kernel::Gaussian, 1.0, 0.0).unwrap();
        let theta: f64 = (-10..=10).map(|n: i32| (-PI * (n * n) as f64).exp()).sum();
        assert!((lhs - theta).abs() < 1e-14 && (rhs - theta).abs() < 1e-14);
        for kernel in [Kernel::Bump, Kernel::Gaussian] {
            for l in [1.0, 2.0, 10.0, 100.0] {
                for alpha in [0.0, 0.3, 0.5, 1.0 / 7.0] {
                    let rep = poisson_check(kernel, l, alpha).unwrap();
                    assert_eq!(rep.status, Status::Pass, "{kernel:?} L={l} a={alpha}: {rep:?}");
                }
            }
        }
        let (a, _) = poisson_sides(Kernel::Bump, 10.0, 0.3).unwrap();
        let (b, _) = poisson_sides(Kernel::Bump, 10.0, 1.3).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(poisson_check(Kernel::Bump, 0.5, 0.0).is_err());
    }

    #[test]
    fn majorant_examples() {
        let p = SqrtPairParams::new(25, 1, 1, 12, 12, DEFAULT_EPS).unwrap();
        let rep = smoothed_majorant_check(&p, 0);
        assert_eq!(rep.lhs_value, 10.0);
        assert!(rep.bound_value >= 10.0);
        assert_eq!(rep.status, Status::Pass);

        let p = SqrtPairParams::new(49, 3, 1, 20, 6, DEFAULT_EPS).unwrap();
        for d in -5..=5 {
            assert_eq!(smoothed_majorant_check(&p, d).status, Status::Pass);
        }
        let p = SqrtPairParams::new(35, 1, 1, 12, 4, DEFAULT_EPS).unwrap();
        assert_eq!(smoothed_majorant_check(&p, 0).status, Status::NotApplicable);
    }
}
