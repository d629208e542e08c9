//! Model-space curvature operators used as ground-truth fixtures: the round
//! sphere, the round cylinder, the two product geometries and the Fubini-Study
//! plane, each in the scaled normalization that makes the blocks integral.
//!
//! All five have vanishing classification quantity, which doubles as the
//! consistency certificate for the sharp-operator conventions.

use crate::curvature::CurvatureBlocks;
use crate::error::{CurvError, Result};
use crate::mat3::{Mat3, Sym3};
use crate::pinching::{report, PinchingReport};

/// Names of all catalog entries, in canonical order.
pub const MODEL_NAMES: [&str; 5] = ["s4", "s3xr", "s2xs2", "s2xr2", "cp2"];

/// One model space: its block operator plus the expected invariants.
#[derive(Clone, Debug)]
pub struct ModelEntry {
    pub name: &'static str,
    pub blocks: CurvatureBlocks,
    pub expected_p: f64,
    pub pic: bool,
    pub notes: &'static str,
}

fn f_mat() -> Mat3 {
    Mat3::from_diag([1.0, 1.0, -1.0])
}

fn e_sym() -> Sym3 {
    Sym3::from_diag([1.0, 0.0, 0.0])
}

/// Looks up a model space by name.
pub fn model(name: &str) -> Result<ModelEntry> {
    let entry = match name {
        "s4" => ModelEntry {
            name: "s4",
            blocks: CurvatureBlocks::from_parts(Sym3::identity(), Mat3::ZERO, Sym3::identity()),
            expected_p: 0.0,
            pic: true,
            notes: "round sphere; reaction is 3R on this ray",
        },
        "s3xr" => ModelEntry {
            name: "s3xr",
            blocks: CurvatureBlocks::from_parts(Sym3::identity(), f_mat(), Sym3::identity()),
            expected_p: 0.0,
            pic: true,
            notes: "round cylinder; saturates the 1/4 ratio bound and the drop term vanishes",
        },
        "s2xs2" => ModelEntry {
            name: "s2xs2",
            blocks: CurvatureBlocks::from_parts(e_sym(), Mat3::ZERO, e_sym()),
            expected_p: 0.0,
            pic: false,
            notes: "product of two spheres; A₁+A₂ = 0 so the pic cone is left",
        },
        "s2xr2" => ModelEntry {
            name: "s2xr2",
            blocks: CurvatureBlocks::from_parts(e_sym(), e_sym().to_mat3(), e_sym()),
            expected_p: 0.0,
            pic: false,
            notes: "sphere times plane; reaction is 2R on this ray",
        },
        "cp2" => ModelEntry {
            name: "cp2",
            blocks: CurvatureBlocks::from_parts(
                Sym3::identity(),
                Mat3::ZERO,
                Sym3::from_diag([3.0, 0.0, 0.0]),
            ),
            expected_p: 0.0,
            pic: false,
            notes: "Fubini-Study plane; C₁+C₂ = 0 so the pic cone is left",
        },
        _ => {
            return Err(CurvError::UnknownModel {
                name: name.to_string(),
                valid: MODEL_NAMES.join(", "),
            })
        }
    };
    Ok(entry)
}

/// A model entry together with its live pinching report.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub model: ModelEntry,
    pub report: PinchingReport,
}

/// All five entries with reports computed live.
pub fn list() -> Vec<CatalogEntry> {
    MODEL_NAMES
        .iter()
        .map(|name| {
            let model = model(name).expect("catalog names are valid");
            let report = report(&model.blocks);
            CatalogEntry { model, report }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::p_direct;

    #[test]
    fn lookup_and_unknown_name() {
        assert_eq!(model("s4").unwrap().name, "s4");
        let err = model("t2xr2").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("s3xr") && msg.contains("cp2"), "{msg}");
    }

    #[test]
    fn list_has_five_invariant_checked_entries() {
        let entries = list();
        assert_eq!(entries.len(), 5);
        for e in &entries {
            assert!(
                p_direct(&e.model.blocks).abs() <= 1e-12,
                "{} has nonzero P",
                e.model.name
            );
            assert_eq!(e.report.pic, e.model.pic, "{}", e.model.name);
            // trace identity holds exactly on the table entries
            assert_eq!(e.model.blocks.a.trace(), e.model.blocks.c.trace());
        }
    }

    #[test]
    fn expected_pic_flags() {
        for (name, pic) in [
            ("s4", true),
            ("s3xr", true),
            ("s2xs2", false),
            ("s2xr2", false),
            ("cp2", false),
        ] {
            assert_eq!(model(name).unwrap().pic, pic, "{name}");
        }
    }

    #[test]
    fn cylinder_report_values() {
        let entries = list();
        let s3xr = entries.iter().find(|e| e.model.name == "s3xr").unwrap();
        assert!((s3xr.report.wpic_ratio.unwrap() - 0.25).abs() < 1e-13);
        assert!(s3xr.report.e.unwrap().abs() < 1e-13);
    }
}
