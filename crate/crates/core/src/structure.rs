//! Structure-definition files: the unit of CLI ingestion.
//!
//! A definition carries a chart, the upper-triangular components of P, the
//! matrix entries of N, an optional volume density expression and the
//! hierarchy depth. Files are accepted in JSON or TOML with the same
//! field names.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::chart::{Chart, ChartError};
use crate::expr::parse::ParseError;
use crate::expr::{parse_expr, RatFunc};
use crate::modular::{ModularError, VolumeDensity};
use crate::tensor::{EndoField, Multivector};

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("failed to parse structure definition: {0}")]
    Format(String),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("coords has {got} names but dim = {want}")]
    CoordCount { got: usize, want: usize },
    #[error("P entry ({i},{j}): indices must satisfy 1 <= i < j <= {dim}")]
    BadPIndices { i: usize, j: usize, dim: usize },
    #[error("N entry ({i},{j}): indices must lie in 1..={dim}")]
    BadNIndices { i: usize, j: usize, dim: usize },
    #[error("duplicate {kind} entry ({i},{j})")]
    DuplicateEntry { kind: &'static str, i: usize, j: usize },
    #[error("in {context}: {source}")]
    Expr { context: String, source: ParseError },
    #[error("kmax must be at least 1")]
    BadKmax,
    #[error("volume density: {0}")]
    Volume(#[from] ModularError),
}

/// One sparse tensor entry: indices and a component expression.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    pub expr: String,
}

fn default_volume() -> String {
    "1".to_string()
}

fn default_kmax() -> usize {
    3
}

/// A chart together with (P, N, volume density, kmax).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StructureDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub coords: Vec<String>,
    #[serde(rename = "P")]
    pub p: Vec<Entry>,
    #[serde(rename = "N")]
    pub n: Vec<Entry>,
    #[serde(default = "default_volume")]
    pub volume: String,
    #[serde(default = "default_kmax")]
    pub kmax: usize,
}

/// Validated, parsed structure ready for the check suites.
#[derive(Debug, Clone)]
pub struct Structure {
    pub name: String,
    pub hash: String,
    pub chart: Arc<Chart>,
    pub p: Multivector,
    pub n: EndoField,
    pub volume: VolumeDensity,
    pub kmax: usize,
}

impl StructureDef {
    pub fn from_json(text: &str) -> Result<StructureDef, StructureError> {
        serde_json::from_str(text).map_err(|e| StructureError::Format(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<StructureDef, StructureError> {
        toml::from_str(text).map_err(|e| StructureError::Format(e.to_string()))
    }

    /// Parse by extension hint, falling back to sniffing the first byte.
    pub fn from_text(text: &str, extension: Option<&str>) -> Result<StructureDef, StructureError> {
        match extension {
            Some("json") => StructureDef::from_json(text),
            Some("toml") => StructureDef::from_toml(text),
            _ => {
                if text.trim_start().starts_with('{') {
                    StructureDef::from_json(text)
                } else {
                    StructureDef::from_toml(text)
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Stable content hash of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("serializable");
        let mut h = Sha256::new();
        h.update(canonical.as_bytes());
        let digest = h.finalize();
        hex_prefix(&digest, 12)
    }

    /// Validate invariants and parse every expression.
    pub fn build(&self, fallback_name: &str) -> Result<Structure, StructureError> {
        let chart = Chart::new(self.coords.clone())?;
        if self.coords.len() != self.dim {
            return Err(StructureError::CoordCount { got: self.coords.len(), want: self.dim });
        }
        if self.kmax < 1 {
            return Err(StructureError::BadKmax);
        }
        let dim = self.dim;
        let mut p = Multivector::zero(&chart, 2);
        let mut seen_p = Vec::new();
        for e in &self.p {
            if e.i < 1 || e.j <= e.i || e.j > dim {
                return Err(StructureError::BadPIndices { i: e.i, j: e.j, dim });
            }
            if seen_p.contains(&(e.i, e.j)) {
                return Err(StructureError::DuplicateEntry { kind: "P", i: e.i, j: e.j });
            }
            seen_p.push((e.i, e.j));
            let v = parse_entry(&chart, &e.expr, format!("P[{},{}]", e.i, e.j))?;
            p.insert(&[e.i as u8, e.j as u8], v);
        }
        let mut n = EndoField::zero(&chart);
        let mut seen_n = Vec::new();
        for e in &self.n {
            if e.i < 1 || e.i > dim || e.j < 1 || e.j > dim {
                return Err(StructureError::BadNIndices { i: e.i, j: e.j, dim });
            }
            if seen_n.contains(&(e.i, e.j)) {
                return Err(StructureError::DuplicateEntry { kind: "N", i: e.i, j: e.j });
            }
            seen_n.push((e.i, e.j));
            let v = parse_entry(&chart, &e.expr, format!("N[{},{}]", e.i, e.j))?;
            n.set(e.i, e.j, v);
        }
        let rho = parse_entry(&chart, &self.volume, "volume".to_string())?;
        let volume = VolumeDensity::new(rho)?;
        Ok(Structure {
            name: self.name.clone().unwrap_or_else(|| fallback_name.to_string()),
            hash: self.hash(),
            chart,
            p,
            n,
            volume,
            kmax: self.kmax,
        })
    }
}

fn parse_entry(chart: &Arc<Chart>, text: &str, context: String) -> Result<RatFunc, StructureError> {
    parse_expr(text, chart).map_err(|source| StructureError::Expr { context, source })
}

fn hex_prefix(bytes: &[u8], chars: usize) -> String {
    let mut s = String::new();
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
        if s.len() >= chars {
            break;
        }
    }
    s.truncate(chars);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIX_A_JSON: &str = r#"{
        "name": "FIX-A",
        "dim": 2,
        "coords": ["x", "y"],
        "P": [{"i": 1, "j": 2, "expr": "1"}],
        "N": [{"i": 1, "j": 1, "expr": "x"}, {"i": 2, "j": 2, "expr": "x"}],
        "kmax": 3
    }"#;

    #[test]
    fn parses_json_with_defaults() {
        let def = StructureDef::from_json(FIX_A_JSON).unwrap();
        assert_eq!(def.volume, "1");
        assert_eq!(def.kmax, 3);
        let s = def.build("fallback").unwrap();
        assert_eq!(s.name, "FIX-A");
        assert_eq!(s.chart.dim(), 2);
        assert!(s.p.get(&[1, 2]).is_one());
        assert_eq!(s.n.get(1, 1), &parse_expr("x", &s.chart).unwrap());
        assert_eq!(s.hash.len(), 12);
    }

    #[test]
    fn parses_toml() {
        let text = r#"
            dim = 2
            coords = ["x", "y"]
            kmax = 2

            [[P]]
            i = 1
            j = 2
            expr = "1"

            [[N]]
            i = 1
            j = 1
            expr = "x"

            [[N]]
            i = 2
            j = 2
            expr = "x"
        "#;
        let def = StructureDef::from_toml(text).unwrap();
        let s = def.build("from-toml").unwrap();
        assert_eq!(s.name, "from-toml");
        assert_eq!(s.kmax, 2);
    }

    #[test]
    fn rejects_bad_indices_and_duplicates() {
        let mut def = StructureDef::from_json(FIX_A_JSON).unwrap();
        def.p.push(Entry { i: 2, j: 1, expr: "1".into() });
        assert!(matches!(def.build("t"), Err(StructureError::BadPIndices { .. })));

        let mut def2 = StructureDef::from_json(FIX_A_JSON).unwrap();
        def2.p.push(Entry { i: 1, j: 2, expr: "x".into() });
        assert!(matches!(def2.build("t"), Err(StructureError::DuplicateEntry { .. })));

        let mut def3 = StructureDef::from_json(FIX_A_JSON).unwrap();
        def3.n.push(Entry { i: 5, j: 1, expr: "x".into() });
        assert!(matches!(def3.build("t"), Err(StructureError::BadNIndices { .. })));
    }

    #[test]
    fn expression_errors_carry_context() {
        let mut def = StructureDef::from_json(FIX_A_JSON).unwrap();
        def.n[0].expr = "x + w".into();
        match def.build("t") {
            Err(StructureError::Expr { context, .. }) => assert_eq!(context, "N[1,1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        let a = StructureDef::from_json(FIX_A_JSON).unwrap();
        let b = StructureDef::from_json(FIX_A_JSON).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = StructureDef::from_json(FIX_A_JSON).unwrap();
        c.kmax = 4;
        assert_ne!(a.hash(), c.hash());
    }
}
