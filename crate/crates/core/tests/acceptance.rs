//! Acceptance gate. Runs each criterion, prints one PASS/FAIL line per
//! criterion with its evidence, and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cycloseq_core::analysis::{analyze_degenerate, analyze_period, berlekamp_massey, lc_via_gcd};
use cycloseq_core::cyclotomy::{
    build_partition, check_class_invariants, check_residue_lemmas, check_structural_lemmas,
    classify_index, residue_side_of_2, two_is_square_mod, Bucket, CyclotomicSystem, Shape,
};
use cycloseq_core::extfield::{verify_case_table, verify_sum_tables, ExtFieldContext};
use cycloseq_core::gf4::{poly_gcd, x_pow_n_minus_1, Gf4};
use cycloseq_core::numtheory::{is_prime, SystemConstants};
use cycloseq_core::sequence::{
    balance_profile, build_sequence, degenerate_mappings, generating_polynomial, valid_mappings,
    Mapping, MappingMode,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const EXAMPLE_BUDGET: Duration = Duration::from_secs(1);
const SWEEP_BUDGET: Duration = Duration::from_secs(300);
const EXTENSION_BUDGET: Duration = Duration::from_secs(120);
const SWEEP_PERIOD_LIMIT: u64 = 100_000;
const MAPPINGS_PER_POINT: usize = 3;
const ORACLE_SEQUENCES: usize = 200;
const ORACLE_SEED: u64 = 0x5eed_c7c1;
const SINGLE_PRIME_LIMIT: u64 = 1000;
const PAIR_PRIME_LIMIT: u64 = 100;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn system(p: u64, q: u64, m: u32, n: u32) -> CyclotomicSystem {
    CyclotomicSystem::new(SystemConstants::new(p, q, m, n).unwrap()).unwrap()
}

fn sweep_points() -> Vec<(u64, u64, u32, u32)> {
    let pairs: [(u64, u64); 6] = [(3, 5), (3, 7), (5, 7), (3, 11), (5, 11), (7, 11)];
    let exps: [(u32, u32); 3] = [(1, 1), (2, 1), (1, 2)];
    pairs
        .iter()
        .flat_map(|&(p, q)| exps.iter().map(move |&(m, n)| (p, q, m, n)))
        .filter(|&(p, q, m, n)| 2 * p.pow(m) * q.pow(n) <= SWEEP_PERIOD_LIMIT)
        .collect()
}

/// Bucket sets a..d, LC by both methods, and the gcd with x^N - 1.
fn example(p: u64, q: u64, expected: [&[u64]; 4], period: usize) -> Outcome {
    let start = Instant::now();
    let s = system(p, q, 1, 1);
    let mut problems = Vec::new();
    for (bucket, want) in Bucket::SYMBOL_BUCKETS.iter().zip(expected) {
        if s.bucket_set(*bucket) != want {
            problems.push(format!("bucket {bucket:?} = {:?}", s.bucket_set(*bucket)));
        }
    }
    let seq = build_sequence(&s, &Mapping::default(), MappingMode::Strict).unwrap();
    let g = poly_gcd(
        &x_pow_n_minus_1(period / 2),
        &generating_polynomial(seq.symbols()),
    );
    if g.degree() != Some(0) {
        problems.push(format!("gcd(x^N - 1, S) = {g}"));
    }
    let r = analyze_period(seq.symbols());
    if r.lc_bm != period || r.lc_gcd != period {
        problems.push(format!("lc_bm = {}, lc_gcd = {}", r.lc_bm, r.lc_gcd));
    }
    let elapsed = start.elapsed();
    if elapsed > EXAMPLE_BUDGET {
        problems.push(format!("took {elapsed:?}"));
    }
    let detail = if problems.is_empty() {
        format!("sets match, gcd = 1, LC = {period} by BM and gcd ({elapsed:.1?})")
    } else {
        problems.join("; ")
    };
    Outcome::new(problems.is_empty(), detail)
}

fn criterion_1() -> Outcome {
    example(
        3,
        5,
        [
            &[1, 3, 5, 11, 19, 27, 29],
            &[7, 9, 13, 17, 21, 23, 25],
            &[2, 6, 8, 10, 22, 24, 28],
            &[4, 12, 14, 16, 18, 20, 26],
        ],
        30,
    )
}

fn criterion_2() -> Outcome {
    example(
        3,
        7,
        [
            &[1, 3, 7, 11, 23, 25, 27, 29, 33, 37],
            &[5, 9, 13, 15, 17, 19, 31, 35, 39, 41],
            &[2, 4, 6, 8, 12, 14, 16, 22, 24, 32],
            &[10, 18, 20, 26, 28, 30, 34, 36, 38, 40],
        ],
        42,
    )
}

/// Mapping choice: the default mapping, then the next valid mappings in
/// lexicographic order.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rows = 0;
    let mut failures = Vec::new();
    for (p, q, m, n) in sweep_points() {
        let s = system(p, q, m, n);
        let period = s.constants().period() as usize;
        let mappings = valid_mappings(p);
        assert!(mappings.len() >= MAPPINGS_PER_POINT);
        for mapping in mappings.iter().take(MAPPINGS_PER_POINT) {
            rows += 1;
            let seq = build_sequence(&s, mapping, MappingMode::Strict).unwrap();
            let r = analyze_period(seq.symbols());
            if r.lc_bm != period || r.lc_gcd != period {
                failures.push(format!(
                    "({p},{q},{m},{n}) {mapping}: lc_bm {} lc_gcd {} of {period}",
                    r.lc_bm, r.lc_gcd
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    let in_time = elapsed <= SWEEP_BUDGET;
    let detail = if failures.is_empty() {
        format!("{rows} rows, all LC = period ({elapsed:.1?})")
    } else {
        format!(
            "{} of {rows} rows below full period ({elapsed:.1?}); first: {}",
            failures.len(),
            failures[..failures.len().min(3)].join(", ")
        )
    };
    Outcome::new(failures.is_empty() && in_time, detail)
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(ORACLE_SEED);
    let mut mismatches = Vec::new();
    let mut lc_total = 0;
    for _ in 0..ORACLE_SEQUENCES {
        let n = 2 * rng.gen_range(1..=249) + 1;
        // mix dense and sparse sequences so low complexities also occur
        let density: f64 = rng.gen_range(0.02..=1.0);
        let period: Vec<Gf4> = (0..2 * n)
            .map(|_| {
                if rng.gen_bool(density) {
                    Gf4::from_digit(rng.gen_range(1..4)).unwrap()
                } else {
                    Gf4::ZERO
                }
            })
            .collect();
        let two: Vec<Gf4> = period.iter().chain(&period).copied().collect();
        let bm = berlekamp_massey(&two).linear_complexity;
        let (gcd, _) = lc_via_gcd(&period);
        lc_total += gcd;
        if bm != gcd {
            mismatches.push((n, bm, gcd));
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!(
            "{ORACLE_SEQUENCES} sequences (seed {ORACLE_SEED:#x}), {} mismatches, mean LC {:.1}",
            mismatches.len(),
            lc_total as f64 / ORACLE_SEQUENCES as f64
        ),
    )
}

/// Every mapping with distinct a..d and e ∈ {b, b+c}, e ≠ 0 (for p = 3
/// these are exactly the degenerate mappings).
fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for (p, q) in [(3, 5), (3, 7)] {
        let s = system(p, q, 1, 1);
        let mappings = degenerate_mappings(p);
        assert!(mappings.iter().all(|m| m.e == m.b || m.e == m.b + m.c));
        let mut below_bound = Vec::new();
        let mut full = Vec::new();
        let mut lcs = Vec::new();
        let mut bound = 0;
        for mapping in &mappings {
            let r = analyze_degenerate(&s, mapping).unwrap();
            assert!(r.methods_agree(), "{mapping}");
            bound = r.bound;
            lcs.push(r.lc_gcd);
            if !r.bound_holds {
                below_bound.push(format!("{mapping} lc {}", r.lc_gcd));
            }
            if !r.below_full {
                full.push(mapping.to_string());
            }
        }
        let min = lcs.iter().min().unwrap();
        let max = lcs.iter().max().unwrap();
        passed &= below_bound.is_empty() && full.is_empty();
        parts.push(format!(
            "({p},{q}) {} mappings, LC {min}..{max}, bound {bound}: {} below bound{}, {} at full period",
            mappings.len(),
            below_bound.len(),
            below_bound.first().map(|s| format!(" (e.g. {s})")).unwrap_or_default(),
            full.len(),
        ));
    }
    Outcome::new(passed, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let mut singles = 0;
    let mut bad_single = Vec::new();
    for p in (5..SINGLE_PRIME_LIMIT).filter(|&p| is_prime(p)).chain([3]) {
        let q = if p == 3 { 5 } else { 3 };
        let s = system(p, q, 1, 1);
        let side = residue_side_of_2(&s, Shape::P { i: 1 }).unwrap();
        let oracle = two_is_square_mod(p);
        let by_residue = matches!(p % 8, 1 | 7);
        singles += 1;
        if (side == 0) != oracle || oracle != by_residue {
            bad_single.push(p);
        }
    }
    let primes: Vec<u64> = (3..PAIR_PRIME_LIMIT).filter(|&p| is_prime(p)).collect();
    let mut pairs = 0;
    let mut bad_pair = Vec::new();
    for &p in &primes {
        for &q in primes.iter().filter(|&&q| q != p) {
            let s = system(p, q, 1, 1);
            let side = residue_side_of_2(&s, Shape::PQ { i: 1, j: 1 }).unwrap();
            pairs += 1;
            if (side == 0) != two_is_square_mod(q)
                || (side == 0) != matches!(q % 8, 1 | 7)
                || !check_residue_lemmas(&s).passed()
            {
                bad_pair.push((p, q));
            }
        }
    }
    Outcome::new(
        bad_single.is_empty() && bad_pair.is_empty(),
        format!(
            "{singles} primes < {SINGLE_PRIME_LIMIT}: {} counterexamples; {pairs} ordered pairs < {PAIR_PRIME_LIMIT}: {} counterexamples",
            bad_single.len(),
            bad_pair.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut identities = 0;
    let mut indices = 0u64;
    let mut problems = Vec::new();
    for (p, q, m, n) in sweep_points() {
        let s = system(p, q, m, n);
        for r in [check_structural_lemmas(&s), check_class_invariants(&s)] {
            identities += r.identities_checked;
            if let Some(v) = r.violations.first() {
                problems.push(format!("({p},{q},{m},{n}) {v}"));
            }
        }
        match build_partition(&s) {
            Err(e) => problems.push(format!("({p},{q},{m},{n}) {e}")),
            Ok(labels) => {
                for i in 0..s.constants().period() {
                    indices += 1;
                    if labels[i as usize] != classify_index(&s, i) {
                        problems.push(format!("({p},{q},{m},{n}) index {i}"));
                        break;
                    }
                }
            }
        }
    }
    Outcome::new(
        problems.is_empty(),
        format!(
            "{} parameter sets, {identities} set identities, {indices} indices labeled once: {} violations{}",
            sweep_points().len(),
            problems.len(),
            problems.first().map(|p| format!(" (first: {p})")).unwrap_or_default()
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut passed = true;
    let mut parts = Vec::new();
    for (p, q, m, n) in [(3, 5, 1, 1), (3, 7, 1, 1), (3, 5, 2, 1)] {
        let s = system(p, q, m, n);
        let ctx = ExtFieldContext::new(s.constants()).unwrap();
        let sums = verify_sum_tables(&s, &ctx);
        let case = verify_case_table(&s, &ctx, &Mapping::default()).unwrap();
        let ok = sums.passed() && case.passed();
        passed &= ok;
        let mut part = format!(
            "({p},{q},{m},{n}) d={}: sums {}/{} cells ({} constant rows), S(1)=e {}, case {:?} const {} at {}/{} k",
            ctx.field().degree(),
            sums.cells_checked - sums.violations.len(),
            sums.cells_checked,
            sums.constant_cells,
            case.s_at_one_is_e,
            case.case,
            case.expected,
            ctx.n() - 1 - case.violations.len() as u64,
            ctx.n() - 1,
        );
        if !case.violations.is_empty() {
            let observed: Vec<String> = case
                .observed
                .iter()
                .map(|o| format!("{:?}→{:?}", o.class, o.values))
                .collect();
            part += &format!(" [observed {}]", observed.join(" "));
        }
        parts.push(part);
    }
    let elapsed = start.elapsed();
    Outcome::new(
        passed && elapsed <= EXTENSION_BUDGET,
        format!("{} ({elapsed:.1?})", parts.join("; ")),
    )
}

fn criterion_9() -> Outcome {
    let mut sequences = 0;
    let mut bad = Vec::new();
    for (p, q, m, n) in sweep_points() {
        let s = system(p, q, m, n);
        let half = (s.constants().half_period() - 1) / 2;
        for mapping in valid_mappings(p).iter().take(MAPPINGS_PER_POINT) {
            let seq = build_sequence(&s, mapping, MappingMode::Strict).unwrap();
            let b = balance_profile(&s, &seq);
            sequences += 1;
            if b.bucket_sizes.iter().any(|&x| x as u64 != half) {
                bad.push(format!("({p},{q},{m},{n}) {mapping}: {:?}", b.bucket_sizes));
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("{sequences} sequences, {} with unequal buckets", bad.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("(3,5,1,1) reproduction", criterion_1),
        ("(3,7,1,1) reproduction", criterion_2),
        ("full complexity sweep", criterion_3),
        ("BM / gcd oracle equivalence", criterion_4),
        ("degenerate lower bound", criterion_5),
        ("residue of 2", criterion_6),
        ("structure and partition", criterion_7),
        ("extension-field tables", criterion_8),
        ("balance", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let status = if out.passed { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} {name}: {}", i + 1, out.detail);
        failed += usize::from(!out.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
