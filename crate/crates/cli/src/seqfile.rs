//! Sequence files: one line of digits 0-3, plus an optional JSON sidecar
//! `<file>.json` describing how the sequence was built.

use std::fs;
use std::path::{Path, PathBuf};

use cycloseq_core::gf4::Gf4;
use cycloseq_core::numtheory::SystemConstants;
use cycloseq_core::sequence::QuaternarySequence;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub p: u64,
    pub q: u64,
    pub m: u32,
    pub n: u32,
    pub g: u64,
    pub y: u64,
    pub mapping: String,
    pub period: u64,
}

impl Sidecar {
    pub fn new(c: &SystemConstants, seq: &QuaternarySequence) -> Self {
        Sidecar {
            p: c.p,
            q: c.q,
            m: c.m,
            n: c.n,
            g: c.g,
            y: c.y,
            mapping: seq.params().mapping.to_string(),
            period: seq.period() as u64,
        }
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write(path: &Path, seq: &QuaternarySequence, sidecar: &Sidecar) -> std::io::Result<()> {
    fs::write(path, format!("{}\n", seq.to_digits()))?;
    let json = serde_json::to_string_pretty(sidecar).expect("sidecar serializes");
    fs::write(sidecar_path(path), json + "\n")
}

/// Parses file contents: digits only, then at most one line ending.
pub fn parse_digits(text: &str) -> Result<Vec<Gf4>, String> {
    let body = text
        .strip_suffix('\n')
        .map(|s| s.strip_suffix('\r').unwrap_or(s))
        .unwrap_or(text);
    if body.is_empty() {
        return Err("empty sequence".into());
    }
    body.chars()
        .enumerate()
        .map(|(i, ch)| {
            Gf4::from_char(ch).ok_or_else(|| format!("byte {i}: {ch:?} is not a digit 0-3"))
        })
        .collect()
}

/// Period must be 2N with N odd.
pub fn check_period(len: usize) -> Result<(), String> {
    if len % 2 == 1 || (len / 2).is_multiple_of(2) {
        return Err(format!("length {len} is not twice an odd number"));
    }
    Ok(())
}

pub fn read(path: &Path) -> Result<(Vec<Gf4>, Option<Sidecar>), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let symbols = parse_digits(&text)?;
    check_period(symbols.len())?;
    let side = sidecar_path(path);
    let sidecar = if side.exists() {
        let raw = fs::read_to_string(&side).map_err(|e| format!("{}: {e}", side.display()))?;
        let s: Sidecar =
            serde_json::from_str(&raw).map_err(|e| format!("{}: {e}", side.display()))?;
        if s.period != symbols.len() as u64 {
            return Err(format!(
                "sidecar period {} does not match {} digits",
                s.period,
                symbols.len()
            ));
        }
        Some(s)
    } else {
        None
    };
    Ok((symbols, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits() {
        assert_eq!(parse_digits("0123\n").unwrap().len(), 4);
        assert_eq!(parse_digits("0123\r\n").unwrap().len(), 4);
        assert_eq!(parse_digits("01").unwrap().len(), 2);
        assert!(parse_digits("").is_err());
        assert!(parse_digits("\n").is_err());
        assert!(parse_digits("0124\n").is_err());
        assert!(parse_digits("01\n\n").is_err());
        assert!(parse_digits("0 1\n").is_err());
    }

    #[test]
    fn periods() {
        assert!(check_period(30).is_ok());
        assert!(check_period(2).is_ok());
        assert!(check_period(29).is_err());
        assert!(check_period(28).is_err());
    }

    #[test]
    fn sidecar_next_to_file() {
        assert_eq!(
            sidecar_path(Path::new("out/s.txt")),
            PathBuf::from("out/s.txt.json")
        );
    }
}
