//! Coefficient sequences for experiments: constant, single spike, and
//! seeded unimodular phases.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::counting::SequencePair;
use crate::expsum::ComplexVal;
use crate::prng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    /// `α ≡ 1`, `β ≡ 1`.
    Ones,
    /// `α_l = [l = 0]`, `β ≡ 1`.
    Spike,
    /// `α_l = e(θ_l)`, `β_m = e(θ'_m)` with uniform seeded phases.
    RandomPhase,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 3] = [SequenceKind::Ones, SequenceKind::Spike, SequenceKind::RandomPhase];

    pub fn name(self) -> &'static str {
        match self {
            SequenceKind::Ones => "ones",
            SequenceKind::Spike => "spike",
            SequenceKind::RandomPhase => "random-phase",
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SequenceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SequenceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown sequence kind `{s}` (expected ones, spike or random-phase)"))
    }
}

/// Sequences of lengths `2L + 1` and `M`. Random phases draw all of `α`
/// (from `l = −L` upward) and then all of `β`, one `next_f64` each.
pub fn generate_sequences(kind: SequenceKind, l: u64, m: u64, seed: u64) -> SequencePair {
    let n_alpha = (2 * l + 1) as usize;
    let (alpha, beta) = match kind {
        SequenceKind::Ones => (vec![ComplexVal::ONE; n_alpha], vec![ComplexVal::ONE; m as usize]),
        SequenceKind::Spike => {
            let mut alpha = vec![ComplexVal::ZERO; n_alpha];
            alpha[l as usize] = ComplexVal::ONE;
            (alpha, vec![ComplexVal::ONE; m as usize])
        }
        SequenceKind::RandomPhase => {
            let mut rng = SplitMix64::new(seed);
            let alpha = (0..n_alpha).map(|_| ComplexVal::e(rng.next_f64())).collect();
            let beta = (0..m).map(|_| ComplexVal::e(rng.next_f64())).collect();
            (alpha, beta)
        }
    };
    SequencePair::new(alpha, beta).expect("odd alpha length")
}

/// `N` seeded signs `±1`, the sign taken from the top bit of each draw.
pub fn sign_sequence(n: usize, seed: u64) -> Vec<ComplexVal> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| {
            let s = if rng.next_u64() >> 63 == 1 { -1.0 } else { 1.0 };
            ComplexVal::new(s, 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        let s = generate_sequences(SequenceKind::Ones, 4, 6, 0);
        assert!((s.alpha_l2() - 3.0).abs() < 1e-15);
        assert_eq!(s.beta_sup(), 1.0);
        let s = generate_sequences(SequenceKind::Spike, 4, 6, 0);
        assert_eq!(s.alpha_l2(), 1.0);
        assert_eq!(s.alpha(0), ComplexVal::ONE);
        let s = generate_sequences(SequenceKind::RandomPhase, 5, 7, 99);
        for z in s.alpha_slice().iter().chain(s.beta_slice()) {
            assert!((z.abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic() {
        let a = generate_sequences(SequenceKind::RandomPhase, 3, 3, 7);
        let b = generate_sequences(SequenceKind::RandomPhase, 3, 3, 7);
        let c = generate_sequences(SequenceKind::RandomPhase, 3, 3, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(sign_sequence(50, 1), sign_sequence(50, 1));
        assert!(sign_sequence(200, 1).iter().all(|z| z.re.abs() == 1.0 && z.im == 0.0));
    }

    #[test]
    fn parse_kind() {
        for k in SequenceKind::ALL {
            assert_eq!(k.name().parse::<SequenceKind>(), Ok(k));
        }
        assert!("twos".parse::<SequenceKind>().is_err());
    }
}
