//! Versioned JSON schemas for curvature data.
//!
//! - `curv4.blocks.v1`: `{"format":"curv4.blocks.v1","A":[[..]],"B":[[..]],"C":[[..]]}`,
//!   3×3 row-major blocks; A and C must be symmetric within the input
//!   tolerance and tr A = tr C.
//! - `curv4.riemann.v1`: `{"format":"curv4.riemann.v1","components":[{"ijkl":[1,2,1,2],"value":1.0},..]}`
//!   with 1-based indices; unlisted components are completed by symmetry and
//!   conflicting duplicates are rejected.
//! - `curv4.report.v1`: pinching report (see [`crate::pinching::PinchingReport`]).
//! - `curv4.sweep.v1`: sweep result with config echo, maximum, argmax and
//!   equality hits.

use crate::curvature::{blocks_from_riemann, CurvatureBlocks, RiemannTensor, INPUT_TOL};
use crate::error::{CurvError, Result};
use crate::extremal::SweepResult;
use crate::mat3::{Mat3, Sym3};
use crate::pinching::PinchingReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const BLOCKS_FORMAT: &str = "curv4.blocks.v1";
pub const RIEMANN_FORMAT: &str = "curv4.riemann.v1";
pub const REPORT_FORMAT: &str = "curv4.report.v1";
pub const SWEEP_FORMAT: &str = "curv4.sweep.v1";

#[derive(Serialize, Deserialize)]
struct BlocksFile {
    format: String,
    #[serde(rename = "A")]
    a: [[f64; 3]; 3],
    #[serde(rename = "B")]
    b: [[f64; 3]; 3],
    #[serde(rename = "C")]
    c: [[f64; 3]; 3],
}

#[derive(Serialize, Deserialize)]
struct RiemannComponent {
    ijkl: [usize; 4],
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct RiemannFile {
    format: String,
    components: Vec<RiemannComponent>,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    format: &'static str,
    #[serde(flatten)]
    report: &'a PinchingReport,
}

#[derive(Serialize)]
struct SweepFile<'a> {
    format: &'static str,
    #[serde(flatten)]
    result: &'a SweepResult,
}

fn sym3_from_rows(rows: &[[f64; 3]; 3], name: &str) -> Result<Sym3> {
    let m = Mat3::new(*rows);
    let scale = 1.0 + m.norm();
    if m.asymmetry() > INPUT_TOL * scale {
        return Err(CurvError::invalid(format!(
            "block {name} must be symmetric (asymmetry {:.3e})",
            m.asymmetry()
        )));
    }
    Ok(m.symmetric_part())
}

fn mat3_rows(m: &Mat3) -> [[f64; 3]; 3] {
    *m.rows()
}

fn sym3_rows(s: &Sym3) -> [[f64; 3]; 3] {
    mat3_rows(&s.to_mat3())
}

/// Serializes blocks in the `curv4.blocks.v1` schema.
pub fn blocks_to_json(b: &CurvatureBlocks) -> String {
    serde_json::to_string_pretty(&BlocksFile {
        format: BLOCKS_FORMAT.to_string(),
        a: sym3_rows(&b.a),
        b: mat3_rows(&b.b),
        c: sym3_rows(&b.c),
    })
    .expect("blocks serialize")
}

/// Serializes a Riemann tensor in the `curv4.riemann.v1` schema (canonical
/// nonzero components only).
pub fn riemann_to_json(r: &RiemannTensor) -> String {
    let components = r
        .canonical_components()
        .into_iter()
        .map(|(ijkl, value)| RiemannComponent { ijkl, value })
        .collect();
    serde_json::to_string_pretty(&RiemannFile {
        format: RIEMANN_FORMAT.to_string(),
        components,
    })
    .expect("riemann serialize")
}

pub fn report_to_json(r: &PinchingReport) -> String {
    serde_json::to_string_pretty(&ReportFile {
        format: REPORT_FORMAT,
        report: r,
    })
    .expect("report serialize")
}

pub fn sweep_to_json(r: &SweepResult) -> String {
    serde_json::to_string_pretty(&SweepFile {
        format: SWEEP_FORMAT,
        result: r,
    })
    .expect("sweep serialize")
}

/// Any input document this crate understands.
pub enum Document {
    Blocks(CurvatureBlocks),
    Riemann(RiemannTensor),
}

impl Document {
    /// The block form of the document, converting if necessary.
    pub fn into_blocks(self) -> CurvatureBlocks {
        match self {
            Document::Blocks(b) => b,
            Document::Riemann(r) => blocks_from_riemann(&r),
        }
    }
}

/// Parses a JSON document, dispatching on its `format` field.
pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CurvError::Format(format!("malformed JSON: {e}")))?;
    let format = value
        .get("format")
        .and_then(|f| f.as_str())
        .ok_or_else(|| CurvError::Format("missing 'format' field".into()))?;
    match format {
        BLOCKS_FORMAT => {
            let file: BlocksFile = serde_json::from_value(value)
                .map_err(|e| CurvError::Format(format!("bad {BLOCKS_FORMAT} document: {e}")))?;
            let blocks = CurvatureBlocks::new(
                sym3_from_rows(&file.a, "A")?,
                Mat3::new(file.b),
                sym3_from_rows(&file.c, "C")?,
            )?;
            Ok(Document::Blocks(blocks))
        }
        RIEMANN_FORMAT => {
            let file: RiemannFile = serde_json::from_value(value)
                .map_err(|e| CurvError::Format(format!("bad {RIEMANN_FORMAT} document: {e}")))?;
            let entries: Vec<([usize; 4], f64)> = file
                .components
                .iter()
                .map(|c| (c.ijkl, c.value))
                .collect();
            Ok(Document::Riemann(RiemannTensor::from_components(&entries)?))
        }
        other => Err(CurvError::Format(format!("unrecognized format '{other}'"))),
    }
}

/// Reads and parses a document from disk.
pub fn load_document(path: &std::path::Path) -> Result<Document> {
    let text = std::fs::read_to_string(path)?;
    parse_document(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn blocks_round_trip() {
        let b = catalog::model("s3xr").unwrap().blocks;
        let json = blocks_to_json(&b);
        assert!(json.contains("curv4.blocks.v1"));
        match parse_document(&json).unwrap() {
            Document::Blocks(parsed) => assert_eq!(parsed, b),
            _ => panic!("expected blocks"),
        }
    }

    #[test]
    fn riemann_document_to_blocks() {
        let text = r#"{
            "format": "curv4.riemann.v1",
            "components": [
                {"ijkl": [1,2,1,2], "value": 1.0},
                {"ijkl": [1,3,1,3], "value": 1.0},
                {"ijkl": [2,3,2,3], "value": 1.0}
            ]
        }"#;
        let blocks = parse_document(text).unwrap().into_blocks();
        let half = Sym3::identity().scale(0.5);
        assert!(blocks.a.sub(&half).norm_sq() < 1e-24);
        assert!(blocks.c.sub(&half).norm_sq() < 1e-24);
    }

    #[test]
    fn riemann_round_trip_through_canonical_components() {
        let b = catalog::model("s2xr2").unwrap().blocks;
        let r = crate::curvature::riemann_from_blocks(&b).unwrap();
        let json = riemann_to_json(&r);
        let back = parse_document(&json).unwrap().into_blocks();
        assert!(back.sub(&b).frobenius() < 1e-12);
    }

    #[test]
    fn malformed_inputs_are_invalid() {
        assert!(parse_document("{ not json").is_err());
        assert!(parse_document(r#"{"format":"curv4.unknown.v9"}"#).is_err());
        assert!(parse_document("{}").is_err());
        // asymmetric A block
        let bad = r#"{
            "format": "curv4.blocks.v1",
            "A": [[1,0.5,0],[0,1,0],[0,0,1]],
            "B": [[0,0,0],[0,0,0],[0,0,0]],
            "C": [[1,0,0],[0,1,0],[0,0,1]]
        }"#;
        assert!(parse_document(bad).is_err());
        // trace mismatch
        let bad = r#"{
            "format": "curv4.blocks.v1",
            "A": [[1,0,0],[0,1,0],[0,0,1]],
            "B": [[0,0,0],[0,0,0],[0,0,0]],
            "C": [[2,0,0],[0,1,0],[0,0,1]]
        }"#;
        assert!(parse_document(bad).is_err());
    }

    #[test]
    fn report_json_uses_null_for_undefined() {
        let rep = crate::pinching::report(&catalog::model("s2xs2").unwrap().blocks);
        let json = report_to_json(&rep);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["format"], "curv4.report.v1");
        assert!(v["wpic_ratio"].is_null());
        assert!(v["E"].is_null());
        assert_eq!(v["pic"], false);
    }
}
