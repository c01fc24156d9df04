//! Mesh document format: vertices by label, tetrahedra with named edge
//! lengths as decimal strings, optional explicit gluings.
//!
//! ```json
//! {
//!   "vertices": ["a", "b", "c", "d", "e"],
//!   "tets": [
//!     { "verts": ["a", "b", "c", "d"],
//!       "lengths": { "01": "1.0", "02": "1.0", "03": "1.0",
//!                     "12": "1.0", "13": "1.0", "23": "1.0" } }
//!   ]
//! }
//! ```
//!
//! Faces glue by equal label triples (simplicial model). The optional
//! `gluings` array is validated against that pairing; entries naming faces
//! that do not match are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ComplexError, PolyhedralComplex, TetLengths, TET_EDGE_NAMES};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("malformed mesh document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("tet {tet}: unknown vertex label {label:?}")]
    UnknownLabel { tet: usize, label: String },
    #[error("tet {tet}, edge {name}: cannot parse length {value:?}")]
    BadLength {
        tet: usize,
        name: &'static str,
        value: String,
    },
    #[error("gluing {index}: face [{}, {}, {}] does not occur in the triangulation", face[0], face[1], face[2])]
    GluingUnknownFace { index: usize, face: [String; 3] },
    #[error("gluing {index}: the paired faces differ; faces glue by equal label triples")]
    GluingMismatch { index: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshDocument {
    pub vertices: Vec<String>,
    pub tets: Vec<TetDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluings: Option<Vec<GluingDocument>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TetDocument {
    pub verts: [String; 4],
    pub lengths: LengthsDocument,
}

/// Named edge lengths in the fixed order 01, 02, 03, 12, 13, 23, written as
/// decimal strings and parsed to binary floating point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthsDocument {
    #[serde(rename = "01")]
    pub l01: String,
    #[serde(rename = "02")]
    pub l02: String,
    #[serde(rename = "03")]
    pub l03: String,
    #[serde(rename = "12")]
    pub l12: String,
    #[serde(rename = "13")]
    pub l13: String,
    #[serde(rename = "23")]
    pub l23: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingDocument {
    /// Two faces given by vertex labels.
    pub faces: [[String; 3]; 2],
}

impl MeshDocument {
    pub fn from_json_str(s: &str) -> Result<Self, MeshError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("mesh document serializes")
    }

    pub fn to_complex(&self) -> Result<PolyhedralComplex, MeshError> {
        let index: BTreeMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut tets = Vec::with_capacity(self.tets.len());
        for (ti, tet) in self.tets.iter().enumerate() {
            let mut verts = [0usize; 4];
            for (k, label) in tet.verts.iter().enumerate() {
                verts[k] = *index.get(label.as_str()).ok_or_else(|| MeshError::UnknownLabel {
                    tet: ti,
                    label: label.clone(),
                })?;
            }
            let raw = [
                &tet.lengths.l01,
                &tet.lengths.l02,
                &tet.lengths.l03,
                &tet.lengths.l12,
                &tet.lengths.l13,
                &tet.lengths.l23,
            ];
            let mut lengths = [0.0f64; 6];
            for (e, value) in raw.iter().enumerate() {
                lengths[e] = value.trim().parse().map_err(|_| MeshError::BadLength {
                    tet: ti,
                    name: TET_EDGE_NAMES[e],
                    value: (*value).clone(),
                })?;
            }
            tets.push((verts, TetLengths(lengths)));
        }

        if let Some(gluings) = &self.gluings {
            // Collect the label triples that occur as faces.
            let mut faces: BTreeMap<[&str; 3], usize> = BTreeMap::new();
            for tet in &self.tets {
                for omit in 0..4 {
                    let mut f: Vec<&str> = (0..4)
                        .filter(|&k| k != omit)
                        .map(|k| tet.verts[k].as_str())
                        .collect();
                    f.sort_unstable();
                    *faces.entry([f[0], f[1], f[2]]).or_insert(0) += 1;
                }
            }
            for (gi, g) in gluings.iter().enumerate() {
                let mut sides = g.faces.clone();
                for side in &mut sides {
                    side.sort();
                }
                for side in &sides {
                    let key = [side[0].as_str(), side[1].as_str(), side[2].as_str()];
                    if !faces.contains_key(&key) {
                        return Err(MeshError::GluingUnknownFace {
                            index: gi,
                            face: side.clone(),
                        });
                    }
                }
                if sides[0] != sides[1] {
                    return Err(MeshError::GluingMismatch { index: gi });
                }
            }
        }

        Ok(PolyhedralComplex::new(self.vertices.clone(), tets)?)
    }

    pub fn from_complex(complex: &PolyhedralComplex) -> Self {
        let tets = complex
            .tets()
            .iter()
            .map(|t| TetDocument {
                verts: std::array::from_fn(|i| complex.label(t.verts[i]).to_string()),
                lengths: LengthsDocument {
                    l01: format!("{:?}", t.lengths.0[0]),
                    l02: format!("{:?}", t.lengths.0[1]),
                    l03: format!("{:?}", t.lengths.0[2]),
                    l12: format!("{:?}", t.lengths.0[3]),
                    l13: format!("{:?}", t.lengths.0[4]),
                    l23: format!("{:?}", t.lengths.0[5]),
                },
            })
            .collect();
        Self {
            vertices: complex.labels().to_vec(),
            tets,
            gluings: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trip_doubled_cube() {
        let complex = fixtures::doubled_cube();
        let doc = MeshDocument::from_complex(&complex);
        let json = doc.to_json_string();
        let complex2 = MeshDocument::from_json_str(&json).unwrap().to_complex().unwrap();
        assert_eq!(complex.tets().len(), complex2.tets().len());
        // Decimal strings round-trip to identical binary lengths.
        for (a, b) in complex.edges().iter().zip(complex2.edges()) {
            assert_eq!(a.length, b.length);
            assert_eq!(a.theta, b.theta);
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let json = r#"{"vertices": [], "tets": [], "unexpected": 1}"#;
        assert!(MeshDocument::from_json_str(json).is_err());
    }

    #[test]
    fn bad_length_reports_field() {
        let json = r#"{
            "vertices": ["a","b","c","d"],
            "tets": [{"verts": ["a","b","c","d"],
                      "lengths": {"01":"x","02":"1","03":"1","12":"1","13":"1","23":"1"}}]
        }"#;
        let doc = MeshDocument::from_json_str(json).unwrap();
        let err = doc.to_complex().unwrap_err();
        match err {
            MeshError::BadLength { name, .. } => assert_eq!(name, "01"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn truncated_document_is_a_parse_error() {
        let json = r#"{"vertices": ["a"], "tets": [{"verts""#;
        assert!(matches!(
            MeshDocument::from_json_str(json),
            Err(MeshError::Json(_))
        ));
    }

    #[test]
    fn boundary_complex_rejected() {
        // A single tetrahedron has four boundary faces.
        let json = r#"{
            "vertices": ["a","b","c","d"],
            "tets": [{"verts": ["a","b","c","d"],
                      "lengths": {"01":"1","02":"1","03":"1","12":"1","13":"1","23":"1"}}]
        }"#;
        let doc = MeshDocument::from_json_str(json).unwrap();
        match doc.to_complex() {
            Err(MeshError::Complex(ComplexError::BoundaryFace { .. })) => {}
            other => panic!("expected boundary rejection, got {other:?}"),
        }
    }

    #[test]
    fn valid_gluings_accepted_mismatched_rejected() {
        let complex = fixtures::pillow_circle_product(3);
        let mut doc = MeshDocument::from_complex(&complex);
        // A real face of the complex, glued to itself by labels.
        let f = doc.tets[0].verts.clone();
        let face = [f[0].clone(), f[1].clone(), f[2].clone()];
        doc.gluings = Some(vec![GluingDocument {
            faces: [face.clone(), face.clone()],
        }]);
        assert!(doc.to_complex().is_ok());

        let other = [f[0].clone(), f[1].clone(), f[3].clone()];
        doc.gluings = Some(vec![GluingDocument { faces: [face, other] }]);
        assert!(matches!(
            doc.to_complex(),
            Err(MeshError::GluingMismatch { .. })
        ));
    }
}
