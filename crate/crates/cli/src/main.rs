mod seqfile;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cycloseq_core::analysis::{analyze_degenerate, analyze_period, LinearComplexityReport};
use cycloseq_core::cyclotomy::{
    build_partition, check_class_invariants, check_residue_lemmas, check_structural_lemmas,
    classify_index, CyclotomicSystem, StructuralReport,
};
use cycloseq_core::extfield::{
    ord_4_mod, verify_case_table, verify_sum_tables, CaseTableReport, ExtFieldContext,
    ExtFieldError, SumTableReport, DEFAULT_MAX_DEGREE,
};
use cycloseq_core::numtheory::{NumberTheoryError, SystemConstants};
use cycloseq_core::sequence::{build_sequence, Mapping, MappingMode, QuaternarySequence};
use cycloseq_core::sweep::{
    default_grid, grid, run_sweep, MappingSelection, ParamPoint, SweepConfig, SweepRow,
};
use seqfile::Sidecar;
use serde::Serialize;

const DEFAULT_CAP: &str = "1000000";
/// Largest N = p^m q^n accepted by `verify`.
const VERIFY_MAX_N: u64 = 5000;

#[derive(Parser)]
#[command(
    name = "cycloseq",
    version,
    about = "Quaternary generalized cyclotomic sequences of period 2p^m q^n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one period of the sequence as a digit file.
    Generate(GenerateArgs),
    /// Linear complexity of a sequence file or of a generated sequence.
    Analyze(AnalyzeArgs),
    /// Check the class structure and the evaluation tables for one parameter set.
    Verify(VerifyArgs),
    /// Linear complexity over a grid of parameters and mappings.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Args, Clone)]
struct Params {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    n: u32,
}

#[derive(Args, Clone)]
struct Common {
    /// Symbols a,b,c,d,e as digits 0-3 (2 = α, 3 = α+1).
    #[arg(long = "map", default_value = "2,3,1,0,1")]
    mapping: Mapping,
    /// Accept mappings that only break the e-constraints.
    #[arg(long)]
    degenerate: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Largest period 2p^m q^n accepted.
    #[arg(long, env = "CYCLOSEQ_CAP", default_value = DEFAULT_CAP)]
    cap: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    params: Params,
    #[command(flatten)]
    common: Common,
    /// Digit file to write (a `.json` sidecar is written next to it).
    /// Without it the digits go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Sequence file; if absent the sequence is generated from --p/--q/--m/--n.
    file: Option<PathBuf>,
    #[arg(long, required_unless_present = "file")]
    p: Option<u64>,
    #[arg(long, required_unless_present = "file")]
    q: Option<u64>,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    params: Params,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Prime pairs as `p:q,...`; empty for an empty grid.
    #[arg(long)]
    pairs: Option<String>,
    /// Exponent pairs as `m:n,...`.
    #[arg(long)]
    exponents: Option<String>,
    /// Restrict to one prime pair.
    #[arg(long, requires = "q")]
    p: Option<u64>,
    #[arg(long, requires = "p")]
    q: Option<u64>,
    /// Restrict to one exponent pair.
    #[arg(long, requires = "n")]
    m: Option<u32>,
    #[arg(long, requires = "m")]
    n: Option<u32>,
    /// Valid mappings per point: the default one, then lexicographic order.
    #[arg(long, default_value_t = 3, conflicts_with_all = ["all_mappings", "map"])]
    mappings: usize,
    #[arg(long)]
    all_mappings: bool,
    /// One fixed mapping instead of a selection.
    #[arg(long = "map")]
    map: Option<Mapping>,
    /// Sweep every degenerate mapping and check the lower bound.
    #[arg(long)]
    degenerate: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long, env = "CYCLOSEQ_CAP", default_value = DEFAULT_CAP)]
    cap: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit status.
#[derive(Debug)]
enum Failure {
    Violation(String),
    Invalid(String),
    Cap(String),
    Malformed(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Malformed(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Violation(s)
            | Failure::Invalid(s)
            | Failure::Cap(s)
            | Failure::Malformed(s) => s,
        }
    }
}

impl From<NumberTheoryError> for Failure {
    fn from(e: NumberTheoryError) -> Self {
        match e {
            NumberTheoryError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn emit(out: Option<&PathBuf>, text: String) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Invalid(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("row serializes");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn system_for(p: u64, q: u64, m: u32, n: u32, cap: u64) -> Result<CyclotomicSystem, Failure> {
    let c = SystemConstants::with_cap(p, q, m, n, cap)?;
    CyclotomicSystem::new(c).map_err(|e| Failure::Invalid(e.to_string()))
}

fn build(system: &CyclotomicSystem, common: &Common) -> Result<QuaternarySequence, Failure> {
    let mode = if common.degenerate {
        MappingMode::AllowDegenerate
    } else {
        MappingMode::Strict
    };
    build_sequence(system, &common.mapping, mode).map_err(|e| Failure::Invalid(e.to_string()))
}

fn generate(a: GenerateArgs) -> Result<(), Failure> {
    let Params { p, q, m, n } = a.params;
    let system = system_for(p, q, m, n, a.common.cap)?;
    let seq = build(&system, &a.common)?;
    let sidecar = Sidecar::new(system.constants(), &seq);
    match &a.out {
        Some(path) => {
            seqfile::write(path, &seq, &sidecar)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
            let summary = match a.common.format {
                Format::Json => to_json(&sidecar),
                Format::Csv => to_csv(&[&sidecar]),
                Format::Text => format!("wrote {} digits to {}\n", seq.period(), path.display()),
            };
            emit(None, summary)
        }
        None => emit(None, format!("{}\n", seq.to_digits())),
    }
}

#[derive(Serialize)]
struct AnalyzeOutput {
    #[serde(flatten)]
    report: LinearComplexityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<Sidecar>,
}

/// Flat projection for CSV.
#[derive(Serialize)]
struct AnalyzeRow<'a> {
    period: usize,
    lc_bm: usize,
    lc_gcd: usize,
    minimal_polynomial: String,
    methods_agree: bool,
    theorem_holds: bool,
    degenerate_bound: Option<u64>,
    mapping: Option<&'a str>,
}

fn analyze(a: AnalyzeArgs) -> Result<(), Failure> {
    let (symbols, params, bound) = match &a.file {
        Some(path) => {
            let (symbols, sidecar) = seqfile::read(path).map_err(Failure::Malformed)?;
            if symbols.len() as u64 > a.common.cap {
                return Err(Failure::Cap(format!(
                    "period {} exceeds the cap {}",
                    symbols.len(),
                    a.common.cap
                )));
            }
            (symbols, sidecar, None)
        }
        None => {
            let (p, q) = (
                a.p.expect("required by clap"),
                a.q.expect("required by clap"),
            );
            let system = system_for(p, q, a.m, a.n, a.common.cap)?;
            let seq = build(&system, &a.common)?;
            let bound = if a.common.mapping.is_degenerate_for(p) {
                Some(
                    analyze_degenerate(&system, &a.common.mapping)
                        .expect("degenerate")
                        .bound,
                )
            } else {
                None
            };
            let sidecar = Sidecar::new(system.constants(), &seq);
            (seq.symbols().to_vec(), Some(sidecar), bound)
        }
    };
    let mut report = analyze_period(&symbols);
    report.degenerate_bound = bound;
    let text = match a.common.format {
        Format::Json => to_json(&AnalyzeOutput { report, params }),
        Format::Csv => to_csv(&[AnalyzeRow {
            period: report.period,
            lc_bm: report.lc_bm,
            lc_gcd: report.lc_gcd,
            minimal_polynomial: report.minimal_polynomial.to_digits(),
            methods_agree: report.methods_agree,
            theorem_holds: report.theorem_holds,
            degenerate_bound: report.degenerate_bound,
            mapping: params.as_ref().map(|s| s.mapping.as_str()),
        }]),
        Format::Text => {
            let mut s = String::new();
            if let Some(sc) = &params {
                writeln!(
                    s,
                    "params       p={} q={} m={} n={} map={}",
                    sc.p, sc.q, sc.m, sc.n, sc.mapping
                )
                .unwrap();
            }
            writeln!(s, "period       {}", report.period).unwrap();
            writeln!(s, "lc (BM)      {}", report.lc_bm).unwrap();
            writeln!(s, "lc (gcd)     {}", report.lc_gcd).unwrap();
            writeln!(s, "minimal poly {}", report.minimal_polynomial).unwrap();
            if let Some(b) = report.degenerate_bound {
                writeln!(s, "lower bound  {b}").unwrap();
            }
            writeln!(s, "full period  {}", report.theorem_holds).unwrap();
            s
        }
    };
    emit(a.out.as_ref(), text)
}

#[derive(Serialize)]
struct Section {
    name: &'static str,
    checked: usize,
    violations: usize,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_violation: Option<String>,
}

impl Section {
    fn structural(name: &'static str, r: &StructuralReport) -> Self {
        Section {
            name,
            checked: r.identities_checked,
            violations: r.violations.len(),
            passed: r.passed(),
            first_violation: r.violations.first().map(|v| v.to_string()),
        }
    }
}

#[derive(Serialize)]
struct VerifyOutput {
    params: Sidecar,
    extension_degree: u32,
    modulus_poly: String,
    passed: bool,
    sections: Vec<Section>,
    sum_tables: SumTableReport,
    case_table: CaseTableReport,
    linear_complexity: LinearComplexityReport,
}

fn check_partition(system: &CyclotomicSystem) -> Section {
    let period = system.constants().period();
    let (violations, first) = match build_partition(system) {
        Err(e) => (1, Some(e.to_string())),
        Ok(labels) => {
            let bad: Vec<u64> = (0..period)
                .filter(|&i| {
                    labels[i as usize] != classify_index(system, i)
                        || labels[i as usize] != system.label(i)
                })
                .collect();
            let first = bad
                .first()
                .map(|i| format!("index {i} labeled inconsistently"));
            (bad.len(), first)
        }
    };
    Section {
        name: "partition",
        checked: period as usize,
        violations,
        passed: violations == 0,
        first_violation: first,
    }
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let Params { p, q, m, n } = a.params;
    let system = system_for(p, q, m, n, a.common.cap)?;
    let c = system.constants();
    let big_n = c.half_period();
    if big_n > VERIFY_MAX_N {
        return Err(Failure::Cap(format!(
            "N = {big_n} exceeds {VERIFY_MAX_N} for extension-field checks"
        )));
    }
    let ctx = ExtFieldContext::with_max_degree(c, DEFAULT_MAX_DEGREE).map_err(|e| match e {
        ExtFieldError::CapExceeded { .. } => Failure::Cap(e.to_string()),
        ExtFieldError::NotCoprime(_) => Failure::Invalid(e.to_string()),
    })?;
    debug_assert_eq!(ord_4_mod(big_n).ok(), Some(ctx.field().degree()));
    let seq = build(&system, &a.common)?;

    let mut sections = vec![
        Section::structural("structural", &check_structural_lemmas(&system)),
        Section::structural("class_invariants", &check_class_invariants(&system)),
        Section::structural("residues", &check_residue_lemmas(&system)),
        check_partition(&system),
    ];
    let sums = verify_sum_tables(&system, &ctx);
    sections.push(Section {
        name: "sum_tables",
        checked: sums.cells_checked,
        violations: sums.violations.len(),
        passed: sums.passed(),
        first_violation: sums.violations.first().map(|v| {
            format!(
                "k = {}, class {} D_{}: expected {:?}, got {:?}",
                v.k, v.class.shape, v.class.h, v.expected, v.actual_even
            )
        }),
    });
    let case = verify_case_table(&system, &ctx, &a.common.mapping)
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    sections.push(Section {
        name: "case_table",
        checked: case.points_checked,
        violations: case.violations.len()
            + case.expansion_violations.len()
            + usize::from(!case.s_at_one_is_e),
        passed: case.passed(),
        first_violation: if !case.s_at_one_is_e {
            Some(format!(
                "S(1) = {:?}, expected e = {}",
                case.s_at_one, a.common.mapping.e
            ))
        } else {
            case.violations
                .first()
                .map(|v| format!("S(β^{}) = {:?}, expected {}", v.k, v.actual, v.expected))
        },
    });
    let lc = analyze_period(seq.symbols());
    let full_expected = !a.common.mapping.is_degenerate_for(p);
    sections.push(Section {
        name: "linear_complexity",
        checked: 1,
        violations: usize::from(full_expected && !lc.theorem_holds || !lc.methods_agree),
        passed: (!full_expected || lc.theorem_holds) && lc.methods_agree,
        first_violation: (full_expected && !lc.theorem_holds || !lc.methods_agree).then(|| {
            format!(
                "lc_bm = {}, lc_gcd = {}, period = {}",
                lc.lc_bm, lc.lc_gcd, lc.period
            )
        }),
    });

    let passed = sections.iter().all(|s| s.passed);
    let first = sections.iter().find(|s| !s.passed).map(|s| {
        format!(
            "{}: {}",
            s.name,
            s.first_violation.clone().unwrap_or_default()
        )
    });
    let extension_degree = ctx.field().degree();
    let modulus_poly = ctx.field().modulus().to_digits();
    let text = match a.common.format {
        Format::Json => to_json(&VerifyOutput {
            params: Sidecar::new(c, &seq),
            extension_degree,
            modulus_poly,
            passed,
            sections,
            sum_tables: sums,
            case_table: case,
            linear_complexity: lc,
        }),
        Format::Csv => to_csv(&sections),
        Format::Text => {
            let mut s = format!(
                "p={p} q={q} m={m} n={n} map={} d={extension_degree}\n",
                a.common.mapping
            );
            for sec in &sections {
                let status = if sec.passed { "PASS" } else { "FAIL" };
                writeln!(
                    s,
                    "{status} {:<18} {:>7} checked {:>5} violations",
                    sec.name, sec.checked, sec.violations
                )
                .unwrap();
                if let Some(v) = &sec.first_violation {
                    writeln!(s, "     first: {v}").unwrap();
                }
            }
            s
        }
    };
    emit(a.out.as_ref(), text)?;
    match first {
        None => Ok(()),
        Some(msg) => Err(Failure::Violation(msg)),
    }
}

fn parse_pairs<T: std::str::FromStr>(s: &str) -> Result<Vec<(T, T)>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (x, y) = t
                .split_once(':')
                .ok_or_else(|| Failure::Invalid(format!("expected x:y, got {t:?}")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<T>()
                    .map_err(|_| Failure::Invalid(format!("bad number in {t:?}")))
            };
            Ok((parse(x)?, parse(y)?))
        })
        .collect()
}

#[derive(Serialize)]
struct SweepOutput {
    rows: Vec<SweepRow>,
    failures: usize,
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let points: Vec<ParamPoint> =
        if a.pairs.is_none() && a.exponents.is_none() && a.p.is_none() && a.m.is_none() {
            default_grid()
        } else {
            let pairs = match (a.p, a.q, &a.pairs) {
                (Some(p), Some(q), _) => vec![(p, q)],
                (_, _, Some(s)) => parse_pairs(s)?,
                _ => vec![(3, 5), (3, 7), (5, 7), (3, 11)],
            };
            let exps = match (a.m, a.n, &a.exponents) {
                (Some(m), Some(n), _) => vec![(m, n)],
                (_, _, Some(s)) => parse_pairs(s)?,
                _ => vec![(1, 1), (2, 1), (1, 2)],
            };
            grid(&pairs, &exps)
        };
    let selection = match (a.degenerate, a.map, a.all_mappings) {
        (true, _, _) => MappingSelection::Degenerate,
        (false, Some(m), _) => MappingSelection::Fixed(m),
        (false, None, true) => MappingSelection::AllValid,
        (false, None, false) => MappingSelection::Valid(a.mappings),
    };
    let rows = run_sweep(&SweepConfig {
        points,
        selection,
        cap: a.cap,
        jobs: a.jobs,
    });
    let failures = rows.iter().filter(|r| !r.ok()).count();
    let text = match a.format {
        Format::Json => to_json(&SweepOutput { rows, failures }),
        Format::Csv => {
            if rows.is_empty() {
                String::new()
            } else {
                to_csv(&rows)
            }
        }
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                let status = if r.ok() { "ok  " } else { "FAIL" };
                let lc = r.lc_gcd.map_or("-".to_string(), |v| v.to_string());
                write!(
                    s,
                    "{status} ({},{},{},{}) map={:<9} lc={lc:>5}/{:<5}",
                    r.p, r.q, r.m, r.n, r.mapping, r.period
                )
                .unwrap();
                if let Some(b) = r.bound {
                    write!(s, " bound={b}").unwrap();
                }
                if let Some(e) = &r.error {
                    write!(s, " error: {e}").unwrap();
                }
                s.push('\n');
            }
            writeln!(s, "{} rows, {failures} failing", rows.len()).unwrap();
            s
        }
    };
    emit(a.out.as_ref(), text)?;
    if failures > 0 {
        return Err(Failure::Violation(format!("{failures} sweep rows failed")));
    }
    Ok(())
}
