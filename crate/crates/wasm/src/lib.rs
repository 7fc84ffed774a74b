//! Browser bindings: build a sequence, look at its partition and classes,
//! and watch its linear complexity grow. Every call returns a JSON string.

use cycloseq_core::analysis::{analyze_period, complexity_profile};
use cycloseq_core::cyclotomy::{Bucket, CyclotomicSystem};
use cycloseq_core::numtheory::SystemConstants;
use cycloseq_core::sequence::{build_sequence, validate_mapping, Mapping, MappingMode};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Periods above this are refused; the page is meant for small examples.
pub const DEMO_CAP: u64 = 20_000;

#[derive(Serialize)]
struct Generated {
    p: u64,
    q: u64,
    m: u32,
    n: u32,
    g: u64,
    y: u64,
    period: u64,
    mapping: String,
    valid: bool,
    problems: Vec<String>,
    digits: String,
    /// Bucket letter per index: a, b, c, d, 0 (index 0) or h (index N).
    buckets: String,
}

#[derive(Serialize)]
struct Complexity {
    period: usize,
    lc_bm: usize,
    lc_gcd: usize,
    full: bool,
    minimal_polynomial: String,
    /// Complexity of every prefix of two periods.
    profile: Vec<usize>,
}

#[derive(Serialize)]
struct ClassListing {
    shape: String,
    modulus: u64,
    d0: Vec<u64>,
    d1: Vec<u64>,
}

#[derive(Serialize)]
struct Classes {
    buckets: Vec<(char, Vec<u64>)>,
    classes: Vec<ClassListing>,
}

fn system(p: u32, q: u32, m: u32, n: u32) -> Result<CyclotomicSystem, String> {
    let c =
        SystemConstants::with_cap(p as u64, q as u64, m, n, DEMO_CAP).map_err(|e| e.to_string())?;
    CyclotomicSystem::new(c).map_err(|e| e.to_string())
}

fn mapping(text: &str) -> Result<Mapping, String> {
    text.parse()
        .map_err(|e: cycloseq_core::sequence::MappingParseError| e.to_string())
}

fn bucket_letter(b: Bucket) -> char {
    match b {
        Bucket::A => 'a',
        Bucket::B => 'b',
        Bucket::C => 'c',
        Bucket::D => 'd',
        Bucket::Zero => '0',
        Bucket::Half => 'h',
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializes")
}

pub fn generate_json(p: u32, q: u32, m: u32, n: u32, map: &str) -> Result<String, String> {
    let system = system(p, q, m, n)?;
    let mapping = mapping(map)?;
    let problems: Vec<String> = validate_mapping(p as u64, &mapping)
        .iter()
        .map(|v| v.to_string())
        .collect();
    let seq = build_sequence(&system, &mapping, MappingMode::AllowDegenerate)
        .map_err(|e| e.to_string())?;
    let c = system.constants();
    Ok(json(&Generated {
        p: c.p,
        q: c.q,
        m,
        n,
        g: c.g,
        y: c.y,
        period: c.period(),
        mapping: mapping.to_string(),
        valid: problems.is_empty(),
        problems,
        digits: seq.to_digits(),
        buckets: system
            .partition()
            .iter()
            .map(|l| bucket_letter(l.bucket()))
            .collect(),
    }))
}

pub fn complexity_json(p: u32, q: u32, m: u32, n: u32, map: &str) -> Result<String, String> {
    let system = system(p, q, m, n)?;
    let mapping = mapping(map)?;
    let seq = build_sequence(&system, &mapping, MappingMode::AllowDegenerate)
        .map_err(|e| e.to_string())?;
    let report = analyze_period(seq.symbols());
    let two: Vec<_> = seq.symbols().iter().chain(seq.symbols()).copied().collect();
    Ok(json(&Complexity {
        period: report.period,
        lc_bm: report.lc_bm,
        lc_gcd: report.lc_gcd,
        full: report.theorem_holds,
        minimal_polynomial: report.minimal_polynomial.to_string(),
        profile: complexity_profile(&two),
    }))
}

pub fn classes_json(p: u32, q: u32, m: u32, n: u32) -> Result<String, String> {
    let system = system(p, q, m, n)?;
    let c = system.constants();
    let mut listing: Vec<ClassListing> = Vec::new();
    for (id, set) in system.classes() {
        if id.h == 0 {
            listing.push(ClassListing {
                shape: id.shape.to_string(),
                modulus: id.shape.modulus(c),
                d0: set.to_vec(),
                d1: Vec::new(),
            });
        } else if let Some(entry) = listing.iter_mut().find(|e| e.shape == id.shape.to_string()) {
            entry.d1 = set.to_vec();
        }
    }
    let buckets = [Bucket::A, Bucket::B, Bucket::C, Bucket::D]
        .into_iter()
        .map(|b| (bucket_letter(b), system.bucket_set(b)))
        .collect();
    Ok(json(&Classes {
        buckets,
        classes: listing,
    }))
}

/// Sequence digits and the partition bucket of each index.
#[wasm_bindgen]
pub fn generate(p: u32, q: u32, m: u32, n: u32, map: &str) -> Result<String, JsValue> {
    generate_json(p, q, m, n, map).map_err(|e| JsValue::from_str(&e))
}

/// Linear complexity by both methods plus the prefix profile.
#[wasm_bindgen]
pub fn complexity(p: u32, q: u32, m: u32, n: u32, map: &str) -> Result<String, JsValue> {
    complexity_json(p, q, m, n, map).map_err(|e| JsValue::from_str(&e))
}

/// The four bucket sets and every class pair D_0, D_1.
#[wasm_bindgen]
pub fn classes(p: u32, q: u32, m: u32, n: u32) -> Result<String, JsValue> {
    classes_json(p, q, m, n).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn three_five_round_trip() {
        let g: Value =
            serde_json::from_str(&generate_json(3, 5, 1, 1, "2,3,1,0,1").unwrap()).unwrap();
        assert_eq!(g["digits"], "021202131312030103020313130212");
        assert_eq!(g["valid"], true);
        let buckets = g["buckets"].as_str().unwrap();
        assert_eq!(buckets.len(), 30);
        assert_eq!(&buckets[0..1], "0");
        assert_eq!(&buckets[15..16], "h");
        for l in ['a', 'b', 'c', 'd'] {
            assert_eq!(buckets.chars().filter(|&c| c == l).count(), 7);
        }

        let lc: Value =
            serde_json::from_str(&complexity_json(3, 5, 1, 1, "2,3,1,0,1").unwrap()).unwrap();
        assert_eq!(lc["lc_bm"], 30);
        assert_eq!(lc["profile"].as_array().unwrap().len(), 60);
        assert_eq!(lc["profile"][59], 30);

        let cl: Value = serde_json::from_str(&classes_json(3, 5, 1, 1).unwrap()).unwrap();
        assert_eq!(
            cl["buckets"][0][1],
            serde_json::json!([1, 3, 5, 11, 19, 27, 29])
        );
        assert_eq!(cl["classes"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn degenerate_mapping_flagged() {
        let g: Value =
            serde_json::from_str(&generate_json(3, 5, 1, 1, "2,3,1,0,3").unwrap()).unwrap();
        assert_eq!(g["valid"], false);
        assert!(!g["problems"].as_array().unwrap().is_empty());
    }

    #[test]
    fn errors_are_messages() {
        assert!(generate_json(3, 3, 1, 1, "2,3,1,0,1").is_err());
        assert!(generate_json(3, 5, 1, 1, "2,3,1").is_err());
        assert!(complexity_json(3, 5, 9, 9, "2,3,1,0,1").is_err());
    }
}
