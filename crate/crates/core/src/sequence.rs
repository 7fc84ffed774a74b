//! The quaternary sequence itself: a symbol mapping (a, b, c, d, e) applied
//! to the partition of Z_{2p^m q^n}.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::cyclotomy::{classify_index, Bucket, CyclotomicSystem};
use crate::gf4::{Gf4, Gf4Poly};

/// Symbols for the four buckets (`a`..`d`) and for index p^m q^n (`e`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Mapping {
    pub a: Gf4,
    pub b: Gf4,
    pub c: Gf4,
    pub d: Gf4,
    pub e: Gf4,
}

impl Default for Mapping {
    /// (α, α+1, 1, 0, 1).
    fn default() -> Self {
        Mapping {
            a: Gf4::ALPHA,
            b: Gf4::ALPHA_SQ,
            c: Gf4::ONE,
            d: Gf4::ZERO,
            e: Gf4::ONE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingParseError {
    #[error("expected five comma-separated digits, got {0}")]
    WrongLength(usize),
    #[error("'{0}' is not a digit in 0..=3")]
    BadDigit(String),
}

impl FromStr for Mapping {
    type Err = MappingParseError;

    /// Parses `a,b,c,d,e` digits, e.g. `2,3,1,0,1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(MappingParseError::WrongLength(parts.len()));
        }
        let mut digits = [Gf4::ZERO; 5];
        for (slot, part) in digits.iter_mut().zip(&parts) {
            *slot = part
                .parse::<u8>()
                .ok()
                .and_then(Gf4::from_digit)
                .ok_or_else(|| MappingParseError::BadDigit(part.to_string()))?;
        }
        Ok(Mapping::from_array(digits))
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e] = self.to_array().map(Gf4::digit);
        write!(f, "{a},{b},{c},{d},{e}")
    }
}

impl Mapping {
    pub fn from_array([a, b, c, d, e]: [Gf4; 5]) -> Self {
        Mapping { a, b, c, d, e }
    }

    pub fn to_array(self) -> [Gf4; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }

    pub fn symbol(&self, bucket: Bucket) -> Gf4 {
        match bucket {
            Bucket::A => self.a,
            Bucket::B => self.b,
            Bucket::C => self.c,
            Bucket::D => self.d,
            Bucket::Zero => Gf4::ZERO,
            Bucket::Half => self.e,
        }
    }

    fn pairwise_distinct(&self) -> bool {
        let s = [self.a, self.b, self.c, self.d];
        (0..4).all(|i| (i + 1..4).all(|j| s[i] != s[j]))
    }

    /// True when (a, b, c, d) is a permutation of GF(4) and e ≠ 0, but e
    /// hits one of the values excluded for this p.
    pub fn is_degenerate_for(&self, p: u64) -> bool {
        let v = validate_mapping(p, self);
        !v.is_empty() && v.iter().all(MappingViolation::is_e_constraint)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MappingViolation {
    NotPairwiseDistinct,
    ZeroE,
    /// p ≡ ±1 (mod 8) requires e ≠ b + d.
    EEqualsBPlusD,
    /// p ≡ ±3 (mod 8) requires e ≠ b.
    EEqualsB,
    /// p ≡ ±3 (mod 8) requires e ≠ b + c.
    EEqualsBPlusC,
}

impl MappingViolation {
    pub fn is_e_constraint(&self) -> bool {
        matches!(
            self,
            MappingViolation::EEqualsBPlusD
                | MappingViolation::EEqualsB
                | MappingViolation::EEqualsBPlusC
        )
    }
}

impl fmt::Display for MappingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MappingViolation::NotPairwiseDistinct => "a, b, c, d are not pairwise distinct",
            MappingViolation::ZeroE => "e must be nonzero",
            MappingViolation::EEqualsBPlusD => "e = b+d forbidden for p≡±1 mod 8",
            MappingViolation::EEqualsB => "e = b forbidden for p≡±3 mod 8",
            MappingViolation::EEqualsBPlusC => "e = b+c forbidden for p≡±3 mod 8",
        })
    }
}

/// `true` for p ≡ ±1 (mod 8), i.e. when 2 is a square mod p.
pub fn is_plus_minus_one_mod_8(p: u64) -> bool {
    matches!(p % 8, 1 | 7)
}

/// All constraint violations of `mapping` for the prime `p`; empty means
/// valid.
pub fn validate_mapping(p: u64, mapping: &Mapping) -> Vec<MappingViolation> {
    let mut out = Vec::new();
    if !mapping.pairwise_distinct() {
        out.push(MappingViolation::NotPairwiseDistinct);
    }
    if mapping.e.is_zero() {
        out.push(MappingViolation::ZeroE);
    }
    let Mapping { b, c, d, e, .. } = *mapping;
    if is_plus_minus_one_mod_8(p) {
        if e == b + d {
            out.push(MappingViolation::EEqualsBPlusD);
        }
    } else {
        if e == b {
            out.push(MappingViolation::EEqualsB);
        }
        if e == b + c {
            out.push(MappingViolation::EEqualsBPlusC);
        }
    }
    out
}

/// Every mapping with (a, b, c, d) a permutation of GF(4) and e ≠ 0, in
/// lexicographic digit order.
pub fn all_permutation_mappings() -> Vec<Mapping> {
    let mut out = Vec::new();
    for a in Gf4::ALL {
        for b in Gf4::ALL {
            for c in Gf4::ALL {
                for d in Gf4::ALL {
                    for e in &Gf4::ALL[1..] {
                        let m = Mapping { a, b, c, d, e: *e };
                        if m.pairwise_distinct() {
                            out.push(m);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Valid mappings for `p`, default mapping first when it is valid.
pub fn valid_mappings(p: u64) -> Vec<Mapping> {
    let default = Mapping::default();
    let mut out: Vec<Mapping> = validate_mapping(p, &default)
        .is_empty()
        .then_some(default)
        .into_iter()
        .collect();
    out.extend(
        all_permutation_mappings()
            .into_iter()
            .filter(|m| *m != default && validate_mapping(p, m).is_empty()),
    );
    out
}

/// Mappings with distinct a, b, c, d and nonzero e that break only the
/// e-constraints for `p`, in lexicographic order.
pub fn degenerate_mappings(p: u64) -> Vec<Mapping> {
    all_permutation_mappings()
        .into_iter()
        .filter(|m| m.is_degenerate_for(p))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("invalid mapping {mapping}: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidMapping {
        mapping: Mapping,
        violations: Vec<MappingViolation>,
    },
}

/// Whether e-constraint violations are tolerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MappingMode {
    #[default]
    Strict,
    /// Accept mappings that only break the e-constraints.
    AllowDegenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SequenceParams {
    pub p: u64,
    pub q: u64,
    pub m: u32,
    pub n: u32,
    pub mapping: Mapping,
}

/// One period of the sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuaternarySequence {
    symbols: Vec<Gf4>,
    params: SequenceParams,
}

impl QuaternarySequence {
    pub fn symbols(&self) -> &[Gf4] {
        &self.symbols
    }

    pub fn params(&self) -> &SequenceParams {
        &self.params
    }

    pub fn period(&self) -> usize {
        self.symbols.len()
    }

    /// Symbol string over {0,1,2,3}.
    pub fn to_digits(&self) -> String {
        self.symbols.iter().map(|s| s.to_char()).collect()
    }
}

/// Builds one period from the partition labels.
pub fn build_sequence(
    system: &CyclotomicSystem,
    mapping: &Mapping,
    mode: MappingMode,
) -> Result<QuaternarySequence, SequenceError> {
    let c = system.constants();
    let violations = validate_mapping(c.p, mapping);
    let acceptable = match mode {
        MappingMode::Strict => violations.is_empty(),
        MappingMode::AllowDegenerate => violations.iter().all(MappingViolation::is_e_constraint),
    };
    if !acceptable {
        return Err(SequenceError::InvalidMapping {
            mapping: *mapping,
            violations,
        });
    }
    let symbols = system
        .partition()
        .iter()
        .map(|label| mapping.symbol(label.bucket()))
        .collect();
    Ok(QuaternarySequence {
        symbols,
        params: SequenceParams {
            p: c.p,
            q: c.q,
            m: c.m,
            n: c.n,
            mapping: *mapping,
        },
    })
}

/// Same sequence, derived index by index via [`classify_index`] instead of
/// the partition array. Used as a cross-check.
pub fn build_sequence_by_classification(system: &CyclotomicSystem, mapping: &Mapping) -> Vec<Gf4> {
    (0..system.constants().period())
        .map(|i| mapping.symbol(classify_index(system, i).bucket()))
        .collect()
}

/// Symbol counts and bucket sizes over one period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalanceProfile {
    /// Indexed by symbol digit.
    pub symbol_counts: [usize; 4],
    /// Sizes of buckets a, b, c, d.
    pub bucket_sizes: [usize; 4],
    pub period: usize,
}

impl BalanceProfile {
    /// Each bucket has (p^m q^n − 1)/2 cells.
    pub fn buckets_equal(&self) -> bool {
        let expected = (self.period / 2 - 1) / 2;
        self.bucket_sizes.iter().all(|&s| s == expected)
    }
}

pub fn balance_profile(system: &CyclotomicSystem, seq: &QuaternarySequence) -> BalanceProfile {
    let mut symbol_counts = [0; 4];
    for s in seq.symbols() {
        symbol_counts[s.digit() as usize] += 1;
    }
    let mut bucket_sizes = [0; 4];
    for label in system.partition() {
        if let Some(k) = Bucket::SYMBOL_BUCKETS
            .iter()
            .position(|&b| b == label.bucket())
        {
            bucket_sizes[k] += 1;
        }
    }
    BalanceProfile {
        symbol_counts,
        bucket_sizes,
        period: seq.period(),
    }
}

/// `S(x) = s_0 + s_1 x + ... + s_{N-1} x^{N-1}` over one period.
pub fn generating_polynomial(symbols: &[Gf4]) -> Gf4Poly {
    Gf4Poly::from_coeffs(symbols.to_vec())
}
