//! Built-in code catalog.
//!
//! Each entry is embedded as a text file: `# key: value` headers carry the
//! metadata and the claimed properties, the data rows carry the classical
//! generators. Table entries list the G₁ rows with the first `g2_rows` of
//! them doubling as G₂; check entries list a single matrix H used as both
//! H₁ and G₂ (self-dual-containing family). File contents are pinned by
//! SHA-256 so a silently edited data file fails loudly.

use super::{CaseClass, CssCode};
use crate::error::{Error, Result};
use crate::gf2::BinMatrix;
use sha2::{Digest, Sha256};

const FILES: &[(&str, &str, &str)] = &[
    (
        "css-13",
        include_str!("../../data/css-13.txt"),
        "05dbece54118192015aa2b2387ae04d8a702abd339455e4db558435a6b648437",
    ),
    (
        "css-15",
        include_str!("../../data/css-15.txt"),
        "ffb5d9ea26b46aac9d8d1c20c3852607378c7bf332ebc3620705f0648afe50a6",
    ),
    (
        "case3-10",
        include_str!("../../data/case3-10.txt"),
        "d18cead32d47c5572910915525ce523fa9448dcf746ebc75cac0ea0789b724cc",
    ),
    (
        "steane-7",
        include_str!("../../data/steane-7.txt"),
        "3df84f32aa5d53e5164ba53d8dd0e2f856e3ec1943fa1d84da4527f281f6e6e1",
    ),
    (
        "hamming-15",
        include_str!("../../data/hamming-15.txt"),
        "dece4efef1e3a53e203d5c567d83b0c0f925ca403d0fae3acbec7f50c3abbd58",
    ),
    (
        "hamming-31",
        include_str!("../../data/hamming-31.txt"),
        "905af2005c66ad85d50f2710cf1ff185dd7f8b752e2fc5c69b4d3e90700bbd1e",
    ),
    (
        "golay-23",
        include_str!("../../data/golay-23.txt"),
        "19c59575f82ea1e0ac4aeff6f70abb1c77d897dbfaaf5bed80a501a3199ceb0a",
    ),
];

/// Properties a catalog entry claims for itself; `verify_catalog_entry`
/// recomputes all of them.
#[derive(Clone, Debug, Default)]
pub struct Claims {
    pub d1: Option<usize>,
    pub d2: Option<usize>,
    pub case: Option<CaseClass>,
    pub perfect: Option<bool>,
    pub t: Option<usize>,
    pub lemma1: Option<bool>,
    pub restricted: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub css: CssCode,
    pub claims: Claims,
}

/// All built-in codes, in catalog order.
pub fn catalog() -> Result<Vec<CatalogEntry>> {
    FILES
        .iter()
        .map(|&(name, text, digest)| {
            let got = hex_sha256(text.as_bytes());
            if got != digest {
                return Err(Error::Integrity(format!(
                    "catalog entry '{name}': checksum {got} ≠ pinned {digest}"
                )));
            }
            let entry = parse_entry(text)?;
            if entry.name != name {
                return Err(Error::Integrity(format!(
                    "catalog entry '{name}' declares name '{}'",
                    entry.name
                )));
            }
            Ok(entry)
        })
        .collect()
}

/// Look up a single built-in code by name.
pub fn catalog_entry(name: &str) -> Result<CatalogEntry> {
    catalog()?
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| {
            let names: Vec<&str> = FILES.iter().map(|f| f.0).collect();
            Error::Malformed(format!(
                "no catalog entry '{name}' (available: {})",
                names.join(", ")
            ))
        })
}

fn hex_sha256(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Parse a code description in the catalog text format. Also used by the CLI
/// to load user-supplied code files.
pub fn parse_entry(text: &str) -> Result<CatalogEntry> {
    let mut name = None;
    let mut m = None;
    let mut kind = None;
    let mut g2_rows = None;
    let mut claims = Claims::default();
    let mut rows = String::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once(':') {
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "name" => name = Some(value.to_string()),
                    "M" => m = Some(parse_num(key, value)?),
                    "kind" => kind = Some(value.to_string()),
                    "g2_rows" => g2_rows = Some(parse_num(key, value)?),
                    "d1" => claims.d1 = Some(parse_num(key, value)?),
                    "d2" => claims.d2 = Some(parse_num(key, value)?),
                    "t" => claims.t = Some(parse_num(key, value)?),
                    "case" => claims.case = Some(value.parse()?),
                    "perfect" => claims.perfect = Some(parse_bool(key, value)?),
                    "lemma1" => claims.lemma1 = Some(parse_bool(key, value)?),
                    "restricted" => claims.restricted = Some(parse_bool(key, value)?),
                    _ => {} // free-form comment that happens to contain a colon
                }
            }
            continue;
        }
        rows.push_str(trimmed);
        rows.push('\n');
    }
    let name = name.ok_or_else(|| Error::Malformed("missing '# name:' header".into()))?;
    let kind = kind.ok_or_else(|| Error::Malformed("missing '# kind:' header".into()))?;
    let mat = BinMatrix::from_text(&rows)?;
    if let Some(m) = m {
        if mat.cols() != m {
            return Err(Error::Malformed(format!(
                "'{name}': rows have {} columns but M = {m}",
                mat.cols()
            )));
        }
    }
    let css = match kind.as_str() {
        "table" => {
            let split =
                g2_rows.ok_or_else(|| Error::Malformed("table entry missing g2_rows".into()))?;
            if split > mat.rows() {
                return Err(Error::Malformed(format!(
                    "'{name}': g2_rows = {split} exceeds {} rows",
                    mat.rows()
                )));
            }
            let mut g2 = BinMatrix::zeros(split, mat.cols());
            for i in 0..split {
                g2.set_row(i, &mat.row(i));
            }
            CssCode::from_generators(&mat, g2)?
        }
        "check" => CssCode::new(mat.clone(), mat)?,
        other => {
            return Err(Error::Malformed(format!(
                "'{name}': unknown kind '{other}'"
            )))
        }
    };
    Ok(CatalogEntry { name, css, claims })
}

fn parse_num(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Malformed(format!("header '{key}': bad number '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Malformed(format!(
            "header '{key}': bad bool '{value}'"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads_all_entries() {
        let all = catalog().unwrap();
        assert_eq!(all.len(), 7);
        let names: Vec<&str> = all.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "css-13",
                "css-15",
                "case3-10",
                "steane-7",
                "hamming-15",
                "hamming-31",
                "golay-23"
            ]
        );
    }

    #[test]
    fn entry_shapes() {
        let e = catalog_entry("css-13").unwrap();
        assert_eq!(e.css.m, 13);
        assert_eq!(e.css.g2.rows(), 4);
        assert_eq!(e.css.h1.rows(), 13 - 5); // k1 = 5
        assert_eq!(e.css.k(), 1);

        let e = catalog_entry("steane-7").unwrap();
        assert_eq!(e.css.m, 7);
        assert_eq!(e.css.h1.rows(), 3);
        assert_eq!(e.css.g2.rows(), 3);
        assert_eq!(e.css.k(), 1);

        let e = catalog_entry("golay-23").unwrap();
        assert_eq!(e.css.m, 23);
        assert_eq!(e.css.k(), 1);
    }

    #[test]
    fn unknown_name_is_error() {
        assert!(catalog_entry("no-such-code").is_err());
    }

    #[test]
    fn claims_parsed() {
        let e = catalog_entry("golay-23").unwrap();
        assert_eq!(e.claims.d1, Some(7));
        assert_eq!(e.claims.d2, Some(7));
        assert_eq!(e.claims.case, Some(CaseClass::II));
        assert_eq!(e.claims.perfect, Some(true));
        assert_eq!(e.claims.t, Some(3));
    }

    #[test]
    fn tampered_text_fails_parse_or_checksum() {
        // parse_entry itself accepts any consistent text; checksum pinning is
        // what catches edits to the embedded files
        let text = "# name: x\n# kind: check\n1 1 0\n";
        let e = parse_entry(text).unwrap();
        assert_eq!(e.css.m, 3);
        let bad = "# name: x\n# kind: check\n1 1\n1 0 1\n";
        assert!(parse_entry(bad).is_err());
    }
}
