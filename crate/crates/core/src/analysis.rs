//! Linear complexity by two independent routes: Berlekamp–Massey on the
//! symbols, and `N - deg gcd(x^N - 1, S(x))` on the generating polynomial.

use serde::Serialize;
use thiserror::Error;

use crate::cyclotomy::CyclotomicSystem;
use crate::gf4::{poly_gcd, x_pow_n_minus_1, Gf4, Gf4Poly};
use crate::sequence::{
    build_sequence, generating_polynomial, validate_mapping, Mapping, MappingMode,
    QuaternarySequence, SequenceError,
};

/// Output of Berlekamp–Massey.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmResult {
    pub linear_complexity: usize,
    /// `C(x) = 1 + c_1 x + ... + c_L x^L`, with
    /// `s_i + c_1 s_{i-1} + ... + c_L s_{i-L} = 0` for `i >= L`.
    pub connection: Gf4Poly,
}

/// Berlekamp–Massey over GF(4).
pub fn berlekamp_massey(symbols: &[Gf4]) -> BmResult {
    run_bm(symbols).0
}

/// Linear complexity of every prefix: entry `i` is the complexity of
/// `symbols[..=i]`.
pub fn complexity_profile(symbols: &[Gf4]) -> Vec<usize> {
    run_bm(symbols).1
}

fn run_bm(symbols: &[Gf4]) -> (BmResult, Vec<usize>) {
    let n = symbols.len();
    let mut profile = Vec::with_capacity(n);
    let mut c = vec![Gf4::ZERO; n + 1];
    let mut b = vec![Gf4::ZERO; n + 1];
    c[0] = Gf4::ONE;
    b[0] = Gf4::ONE;
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = Gf4::ONE;
    for i in 0..n {
        let mut discrepancy = symbols[i];
        for j in 1..=l {
            discrepancy += c[j] * symbols[i - j];
        }
        if discrepancy.is_zero() {
            shift += 1;
            profile.push(l);
            continue;
        }
        let coef = discrepancy * last.inv().expect("nonzero");
        if 2 * l <= i {
            let prev = c.clone();
            for j in shift..=n {
                c[j] += coef * b[j - shift];
            }
            l = i + 1 - l;
            b = prev;
            last = discrepancy;
            shift = 1;
        } else {
            for j in shift..=n {
                c[j] += coef * b[j - shift];
            }
            shift += 1;
        }
        profile.push(l);
    }
    c.truncate(l + 1);
    let result = BmResult {
        linear_complexity: l,
        connection: Gf4Poly::from_coeffs(c),
    };
    (result, profile)
}

/// Linear complexity of a periodic sequence from one period, with the
/// monic minimal polynomial `(x^N - 1) / gcd(x^N - 1, S(x))`.
pub fn lc_via_gcd(period: &[Gf4]) -> (usize, Gf4Poly) {
    let n = period.len();
    if n == 0 {
        return (0, Gf4Poly::one());
    }
    let modulus = x_pow_n_minus_1(n);
    let s = generating_polynomial(period);
    let g = poly_gcd(&modulus, &s);
    let (minimal, _) = modulus.divmod(&g).expect("gcd is nonzero");
    (n - g.degree().unwrap_or(0), minimal.monic())
}

/// Berlekamp–Massey on two copies of one period.
pub fn lc_via_bm(period: &[Gf4]) -> BmResult {
    let two: Vec<Gf4> = period.iter().chain(period).copied().collect();
    berlekamp_massey(&two)
}

/// Both routes on one period.
#[derive(Debug, Clone, Serialize)]
pub struct LinearComplexityReport {
    pub period: usize,
    pub lc_bm: usize,
    pub lc_gcd: usize,
    pub minimal_polynomial: Gf4Poly,
    pub methods_agree: bool,
    /// The monic BM connection polynomial equals the minimal polynomial.
    pub connection_consistent: bool,
    pub theorem_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_bound: Option<u64>,
}

pub fn analyze_period(period: &[Gf4]) -> LinearComplexityReport {
    let bm = lc_via_bm(period);
    let (lc_gcd, minimal) = lc_via_gcd(period);
    let connection = bm.connection.monic();
    LinearComplexityReport {
        period: period.len(),
        lc_bm: bm.linear_complexity,
        lc_gcd,
        connection_consistent: connection == minimal,
        minimal_polynomial: minimal,
        methods_agree: bm.linear_complexity == lc_gcd,
        theorem_holds: lc_gcd == period.len() && bm.linear_complexity == lc_gcd,
        degenerate_bound: None,
    }
}

#[derive(Debug, Clone, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("Berlekamp-Massey gives {lc_bm} but the gcd method gives {lc_gcd}")]
    MethodDisagreement { lc_bm: usize, lc_gcd: usize },
    #[error("linear complexity {} is below the full period {}", .0.lc_gcd, .0.period)]
    TheoremViolation(Box<LinearComplexityReport>),
    #[error("mapping {0} is not degenerate for p = {1}")]
    NotDegenerate(Mapping, u64),
}

/// Builds the sequence for a valid mapping and checks that its linear
/// complexity equals the full period 2p^m q^n by both methods.
pub fn verify_theorem(
    system: &CyclotomicSystem,
    mapping: &Mapping,
) -> Result<LinearComplexityReport, AnalysisError> {
    let seq = build_sequence(system, mapping, MappingMode::Strict)?;
    let report = analyze_sequence(&seq);
    if !report.methods_agree {
        return Err(AnalysisError::MethodDisagreement {
            lc_bm: report.lc_bm,
            lc_gcd: report.lc_gcd,
        });
    }
    if !report.theorem_holds {
        return Err(AnalysisError::TheoremViolation(Box::new(report)));
    }
    Ok(report)
}

pub fn analyze_sequence(seq: &QuaternarySequence) -> LinearComplexityReport {
    analyze_period(seq.symbols())
}

/// `(p^m + 1)(q^n + 1) / 2`.
pub fn degenerate_lower_bound(p: u64, q: u64, m: u32, n: u32) -> u64 {
    (p.pow(m) + 1) * (q.pow(n) + 1) / 2
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateReport {
    pub mapping: Mapping,
    pub lc_bm: usize,
    pub lc_gcd: usize,
    /// `2N - r1 - r2`, counting roots β^k of `S` among the N-th roots of
    /// unity (`r1`) and those that are also roots of `S'` (`r2`).
    pub lc_roots: usize,
    pub simple_or_multiple_roots: usize,
    pub multiple_roots: usize,
    pub bound: u64,
    pub period: usize,
    pub bound_holds: bool,
    pub below_full: bool,
}

impl DegenerateReport {
    pub fn methods_agree(&self) -> bool {
        self.lc_bm == self.lc_gcd && self.lc_gcd == self.lc_roots
    }
}

/// Linear complexity of a sequence whose mapping breaks only the
/// e-constraints, compared against `(p^m + 1)(q^n + 1) / 2`.
pub fn analyze_degenerate(
    system: &CyclotomicSystem,
    mapping: &Mapping,
) -> Result<DegenerateReport, AnalysisError> {
    let c = system.constants();
    if !mapping.is_degenerate_for(c.p) {
        return Err(AnalysisError::NotDegenerate(*mapping, c.p));
    }
    debug_assert!(!validate_mapping(c.p, mapping).is_empty());
    let seq = build_sequence(system, mapping, MappingMode::AllowDegenerate)?;
    let bm = lc_via_bm(seq.symbols());
    let (lc_gcd, _) = lc_via_gcd(seq.symbols());

    // x^{2N} - 1 = (x^N - 1)^2 with x^N - 1 squarefree (N odd), so each
    // root contributes min(2, multiplicity) to the gcd degree.
    let half = c.half_period() as usize;
    let s = generating_polynomial(seq.symbols());
    let roots = poly_gcd(&x_pow_n_minus_1(half), &s);
    let multiple = poly_gcd(&roots, &s.derivative());
    let r1 = roots.degree().unwrap_or(0);
    let r2 = multiple.degree().unwrap_or(0);
    let period = seq.period();
    let bound = degenerate_lower_bound(c.p, c.q, c.m, c.n);
    Ok(DegenerateReport {
        mapping: *mapping,
        lc_bm: bm.linear_complexity,
        lc_gcd,
        lc_roots: period - r1 - r2,
        simple_or_multiple_roots: r1,
        multiple_roots: r2,
        bound,
        period,
        bound_holds: lc_gcd as u64 >= bound,
        below_full: lc_gcd < period,
    })
}
