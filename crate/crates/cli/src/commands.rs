use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use lssq_core::cochrane::{
    cochrane_check, critical_v_set, family_sum, family_sum_by_alpha, CochraneError, IntPoly, RationalFunc,
};
use lssq_core::counting::{
    bilinear_sigma, cor16_bound, large_sieve_lhs, lemma_al_bound, ls_bound, p_alpha, p_bound_squarefree, p_bound_thm12,
    p_bound_thm13, section4_parameters, thm11_bound, thm15_bound, weyl_ratio, z_from_gamma, CountingError, FareyWindow,
    Norms, Section4Constants, SqrtPairParams,
};
use lssq_core::expsum::{gauss_brute, gauss_closed, gauss_star_brute, gauss_star_closed, ExpSumError};
use lssq_core::modular::{sqrt_set, ModError};
use lssq_core::report::{fmt_sig, CsvTable, Status};
use lssq_core::sequences::{generate_sequences, sign_sequence, SequenceKind};
use lssq_core::sweep::{rows_to_csv, run_sweep, SweepConfig, SweepError};
use lssq_core::verify::{run_suite, SUITES};

use crate::{
    BilinearArgs, BoundsArgs, CochraneArgs, Command, GaussArgs, GaussStarArgs, Method, PalphaArgs, SieveArgs, SqrtArgs,
    SweepArgs, VerifyArgs,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("{0}")]
    Config(String),
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}

domain_from!(ModError, ExpSumError, CountingError, CochraneError);

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Config(msg) => CliError::Config(msg),
            other => CliError::Domain(other.to_string()),
        }
    }
}

/// What a subcommand produced: text to write, an optional default
/// destination, and whether it counts as a verification success.
pub struct Output {
    pub text: String,
    pub path: Option<PathBuf>,
    pub verdict: Result<(), CliError>,
}

impl Output {
    fn text(text: String) -> Self {
        Self {
            text,
            path: None,
            verdict: Ok(()),
        }
    }
}

pub fn run(cmd: &Command, out: &Option<PathBuf>) -> Result<Output, CliError> {
    match cmd {
        Command::Gauss(a) => gauss(a),
        Command::GaussStar(a) => gauss_star(a),
        Command::Sqrt(a) => sqrt(a),
        Command::Palpha(a) => palpha(a),
        Command::Bilinear(a) => bilinear(a),
        Command::Cochrane(a) => cochrane(a),
        Command::SieveLhs(a) => sieve(a),
        Command::Bounds(a) => bounds(a),
        Command::Sweep(a) => sweep(a, out),
        Command::Verify(a) => verify(a),
    }
}

fn gauss(args: &GaussArgs) -> Result<Output, CliError> {
    let closed = match args.method {
        Method::Brute => None,
        Method::Closed => Some(gauss_closed(args.a, args.b, args.c)?),
        Method::Auto => gauss_closed(args.a, args.b, args.c).ok(),
    };
    if args.c == 0 {
        return Err(CliError::Domain("modulus must be positive".into()));
    }
    let mut text = match &closed {
        Some(g) => format!("{}\n", g.value()),
        None => format!("{}\n", gauss_brute(args.a, args.b, args.c)),
    };
    if let (true, Some(g)) = (args.exact, &closed) {
        let _ = writeln!(text, "{g}");
    }
    Ok(Output::text(text))
}

fn gauss_star(args: &GaussStarArgs) -> Result<Output, CliError> {
    let closed = match args.method {
        Method::Brute => None,
        Method::Closed => Some(gauss_star_closed(args.a, args.b, args.p)?),
        Method::Auto => Some(gauss_star_closed(args.a, args.b, args.p)?),
    };
    let mut text = match &closed {
        Some(g) => format!("{}\n", g.value()),
        None => {
            if args.p < 3 || args.p.is_multiple_of(2) {
                return Err(CliError::Domain(format!("p = {} must be an odd prime", args.p)));
            }
            format!("{}\n", gauss_star_brute(args.a, args.b, args.p))
        }
    };
    if let (true, Some(g)) = (args.exact, &closed) {
        let _ = writeln!(text, "{g}");
    }
    Ok(Output::text(text))
}

fn sqrt(args: &SqrtArgs) -> Result<Output, CliError> {
    let roots = sqrt_set(args.s, args.r)?;
    let list: Vec<String> = roots.iter().map(u64::to_string).collect();
    Ok(Output::text(format!("{}\n", list.join(","))))
}

/// `a/b`, a plain decimal, or anything `f64` parses (taken exactly).
fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Domain(format!("cannot parse `{s}` as a rational"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let decimal = !body.is_empty()
        && int.chars().all(|c| c.is_ascii_digit())
        && frac.chars().all(|c| c.is_ascii_digit())
        && !(int.is_empty() && frac.is_empty());
    if decimal {
        let digits: BigInt = format!("{int}{frac}")
            .trim_start_matches('0')
            .parse()
            .unwrap_or_default();
        let value = BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32));
        return Ok(if neg { -value } else { value });
    }
    let x: f64 = s.parse().map_err(|_| bad())?;
    BigRational::from_float(x).ok_or_else(bad)
}

fn palpha(args: &PalphaArgs) -> Result<Output, CliError> {
    let alpha = match (&args.alpha, args.b, args.r) {
        (Some(a), None, None) => parse_rational(a)?,
        (None, Some(b), Some(r)) => {
            if r == 0 {
                return Err(CliError::Domain("r must be positive".into()));
            }
            let z = z_from_gamma(args.q as f64, args.gamma.unwrap_or(0.0), r as f64);
            BigRational::new(BigInt::from(b), BigInt::from(r)) + BigRational::from_float(z).expect("finite")
        }
        _ => {
            return Err(CliError::Domain(
                "give either --alpha, or --b and --r (with optional --gamma)".into(),
            ))
        }
    };
    let delta = match &args.delta {
        Some(d) => parse_rational(d)?,
        None => BigRational::new(BigInt::from(1), BigInt::from(args.q).pow(3)),
    };
    let w = FareyWindow::new(args.q, alpha, delta)?;
    Ok(Output::text(format!("{}\n", p_alpha(&w))))
}

fn bilinear(args: &BilinearArgs) -> Result<Output, CliError> {
    let kind: SequenceKind = args.kind.parse().map_err(CliError::Domain)?;
    let h = args.h.unwrap_or(args.m);
    let params = SqrtPairParams::new(args.r, args.j, args.l, args.m, h, args.eps)?;
    let seqs = generate_sequences(kind, args.l, args.m, args.seed);
    let phase = args.sqrt_phase.map(|c| move |x: f64| c * x.sqrt());
    let f = phase.as_ref().map(|f| f as &(dyn Fn(f64) -> f64 + Sync));
    let sigma = bilinear_sigma(&params, &seqs, f)?;
    let mut t = CsvTable::new([
        "r",
        "j",
        "L",
        "M",
        "H",
        "kind",
        "seed",
        "sigma_re",
        "sigma_im",
        "abs2",
        "weyl_bound",
        "ratio",
        "A",
        "D",
        "status",
    ]);
    let mut row = vec![
        args.r.to_string(),
        args.j.to_string(),
        args.l.to_string(),
        args.m.to_string(),
        h.to_string(),
        kind.to_string(),
        args.seed.to_string(),
        fmt_sig(sigma.re),
        fmt_sig(sigma.im),
        fmt_sig(sigma.norm_sqr()),
    ];
    if args.l > 0 {
        let rep = weyl_ratio(&params, &seqs, f)?;
        let param = |k: &str| rep.parameters.get(k).cloned().unwrap_or_default();
        row.extend([
            fmt_sig(rep.bound_value),
            rep.ratio().map(fmt_sig).unwrap_or_default(),
            param("A"),
            param("D"),
            rep.status.to_string(),
        ]);
    } else {
        row.extend([
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            Status::NotApplicable.to_string(),
        ]);
    }
    t.push(row);
    Ok(Output::text(t.to_csv()))
}

fn parse_coeffs(s: &str) -> Result<IntPoly, CliError> {
    let coeffs = s
        .split(',')
        .map(|c| c.trim().parse::<BigInt>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Domain(format!("cannot parse coefficients `{s}`")))?;
    Ok(IntPoly::new(coeffs))
}

fn cochrane(args: &CochraneArgs) -> Result<Output, CliError> {
    match (&args.num, args.h, args.u, args.v, args.j) {
        (Some(num), None, None, None, None) => {
            let f = RationalFunc::new(parse_coeffs(num)?, parse_coeffs(&args.den)?)?;
            let rep = cochrane_check(&f, args.p, args.m)?;
            let mut t = CsvTable::new([
                "p",
                "m",
                "t",
                "alpha",
                "defined",
                "multiplicity",
                "abs",
                "bound",
                "ratio",
                "status",
            ]);
            for r in &rep.records {
                t.push(vec![
                    args.p.to_string(),
                    args.m.to_string(),
                    rep.t.to_string(),
                    r.alpha.to_string(),
                    (r.defined as u8).to_string(),
                    r.multiplicity.map(|n| n.to_string()).unwrap_or_default(),
                    fmt_sig(r.value.abs()),
                    r.bound.map(fmt_sig).unwrap_or_default(),
                    r.bound.map(|b| fmt_sig(r.value.abs() / b)).unwrap_or_default(),
                    r.status.to_string(),
                ]);
            }
            let verdict = if rep.status() == Status::Fail {
                Err(CliError::Verify(format!("a partial sum exceeds its bound for {f}")))
            } else {
                Ok(())
            };
            Ok(Output {
                text: t.to_csv(),
                path: None,
                verdict,
            })
        }
        (None, Some(h), Some(u), Some(v), Some(j)) => {
            let direct = family_sum(h, u, v, j, args.p)?;
            let split = family_sum_by_alpha(h, u, v, j, args.p)?;
            let critical = critical_v_set(h, j * h * u * u, args.p)?.contains(&(v.rem_euclid(args.p as i64) as u64));
            let tol = 1e-8 * (args.p * args.p) as f64;
            let verdict = if direct.approx_eq(split, tol) {
                Ok(())
            } else {
                Err(CliError::Verify(format!(
                    "direct {direct} and split {split} sums disagree"
                )))
            };
            let mut t = CsvTable::new(["p", "h", "u", "v", "j", "critical", "value", "abs"]);
            t.push(vec![
                args.p.to_string(),
                h.to_string(),
                u.to_string(),
                v.to_string(),
                j.to_string(),
                (critical as u8).to_string(),
                direct.to_string(),
                fmt_sig(direct.abs()),
            ]);
            Ok(Output {
                text: t.to_csv(),
                path: None,
                verdict,
            })
        }
        _ => Err(CliError::Domain(
            "give --num/--den/--m for a rational function, or all of --h --u --v --j for the family".into(),
        )),
    }
}

fn sieve(args: &SieveArgs) -> Result<Output, CliError> {
    let coeffs = sign_sequence(args.n as usize, args.seed);
    let (lhs, z) = large_sieve_lhs(args.q, args.offset, &coeffs)?;
    let bound = ls_bound(args.q as f64, args.n as f64, z);
    let mut t = CsvTable::new(["Q", "N", "M", "seed", "lhs", "Z", "bound", "ratio"]);
    t.push(vec![
        args.q.to_string(),
        args.n.to_string(),
        args.offset.to_string(),
        args.seed.to_string(),
        fmt_sig(lhs),
        fmt_sig(z),
        fmt_sig(bound),
        fmt_sig(lhs / bound),
    ]);
    Ok(Output::text(t.to_csv()))
}

fn bounds(args: &BoundsArgs) -> Result<Output, CliError> {
    let mut t = CsvTable::new(["quantity", "value"]);
    let mut put = |name: &str, v: f64| t.push(vec![name.to_string(), fmt_sig(v)]);
    if let (Some(l), Some(m)) = (args.l, args.m) {
        let params = SqrtPairParams::new(args.r, 1, l, m, args.h.unwrap_or(m), args.eps)?;
        let b11 = thm11_bound(&params, Norms::UNIT)?;
        put("thm11_first", b11.first);
        put("thm11_second", b11.second);
        put("thm11", b11.value);
        put("thm15", thm15_bound(&params, Norms::UNIT));
        put("cor16", cor16_bound(&params, Norms::UNIT));
    }
    if let Some(q) = args.q {
        put("p_thm12", p_bound_thm12(q, args.r)?);
        put("p_thm13", p_bound_thm13(q, args.r));
        put("p_squarefree", p_bound_squarefree(q, args.r));
        let n = args.n.unwrap_or(q.powi(3));
        put("ls_bound", ls_bound(q, n, 1.0));
        if let Some(gamma) = args.gamma {
            let s = section4_parameters(q, args.r, gamma, Section4Constants::default(), args.eps)?;
            put("z", z_from_gamma(q, gamma, args.r as f64));
            put(
                "lemma_al",
                lemma_al_bound(q, args.r as f64, z_from_gamma(q, gamma, args.r as f64), 1.0 / n),
            );
            put("sec4_L", s.l);
            put("sec4_M0", s.m0);
            put("sec4_M", s.m);
            put("sec4_F", s.f_bound);
            put("sec4_H", s.h);
            put("sec4_delta", s.delta);
            put("sec4_D", s.d);
            put("sec4_in_window", s.in_window as u8 as f64);
        }
    }
    if t.rows().is_empty() {
        return Err(CliError::Domain("give --L and --M, or --Q".into()));
    }
    Ok(Output::text(t.to_csv()))
}

fn sweep(args: &SweepArgs, out: &Option<PathBuf>) -> Result<Output, CliError> {
    let text =
        fs::read_to_string(&args.config).map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = SweepConfig::from_toml(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(path) = out {
        cfg.output_path = Some(path.display().to_string());
    }
    let rows = run_sweep(&cfg)?;
    Ok(Output {
        text: rows_to_csv(&rows).to_csv(),
        path: cfg.output_path.map(PathBuf::from),
        verdict: Ok(()),
    })
}

fn verify(args: &VerifyArgs) -> Result<Output, CliError> {
    let names: Vec<&str> = if args.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&args.suite.as_str()) {
        vec![args.suite.as_str()]
    } else {
        return Err(CliError::Domain(format!(
            "unknown suite `{}` (expected all or one of {})",
            args.suite,
            SUITES.join(", ")
        )));
    };
    let mut text = String::new();
    let mut failed = Vec::new();
    for name in names {
        let r = run_suite(name, args.seed).expect("known suite");
        let _ = writeln!(text, "{r}");
        if !r.passed() {
            failed.push(name);
        }
    }
    let verdict = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed.join(", ")))
    };
    Ok(Output {
        text,
        path: None,
        verdict,
    })
}
