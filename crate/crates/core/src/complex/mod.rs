//! Compact 3-dimensional polyhedral manifolds given by a triangulation with
//! Euclidean edge lengths, and the extraction of their singular structure.
//!
//! A complex is a simplicial complex: tetrahedra are 4-tuples of distinct
//! vertex labels, faces are identified by their label triples, and every
//! triangular face must be shared by exactly two tetrahedra (closed manifolds
//! only). Edge lengths glued across tetrahedra must agree exactly.

mod geometry;
mod json;
mod link;
mod strata;
mod subdivide;

pub use geometry::{
    all_dihedral_angles, cayley_menger_det, dihedral_angle, dihedral_from_points,
    embed_tetrahedron, face_angle, DegenerateSimplex, TetLengths, TET_EDGES, TET_EDGE_NAMES,
};
pub use json::{MeshDocument, MeshError};
pub use link::{is_product_vertex, LinkTriangle, ProductDecision, VertexLink};
pub use strata::{
    AnalysisTolerances, EdgeStratum, SingularStratum, StrataAnalysis, VertexStratum,
};

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("complex has no tetrahedra")]
    Empty,
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("vertex {label:?} is not used by any tetrahedron")]
    UnusedVertex { label: String },
    #[error("tet {tet}: vertex index {index} out of range")]
    BadVertexIndex { tet: usize, index: usize },
    #[error("tet {tet}: repeated vertex {label:?}")]
    RepeatedVertex { tet: usize, label: String },
    #[error("tet {tet}: nonpositive edge length {length}")]
    NonpositiveLength { tet: usize, length: f64 },
    #[error("tet {tet}: {source}")]
    Degenerate {
        tet: usize,
        source: DegenerateSimplex,
    },
    #[error("edge {a:?}-{b:?}: conflicting glued lengths {l1} vs {l2}")]
    ConflictingEdgeLength { a: String, b: String, l1: f64, l2: f64 },
    #[error("boundary face [{}, {}, {}]: only one incident tetrahedron (closed manifolds only)", face[0], face[1], face[2])]
    BoundaryFace { face: [String; 3] },
    #[error("face [{}, {}, {}] shared by {count} tetrahedra (a manifold face has exactly 2)", face[0], face[1], face[2])]
    NonManifoldFace { face: [String; 3], count: usize },
    #[error("vertex {label:?}: link is not a 2-sphere (Euler characteristic {chi})")]
    LinkNotSphere { label: String, chi: i64 },
    #[error("vertex {label:?}: link is disconnected")]
    LinkDisconnected { label: String },
}

/// One tetrahedron: vertex indices into the complex plus its edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Tetrahedron {
    pub verts: [usize; 4],
    pub lengths: TetLengths,
}

/// A triangulation edge with its incidences.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    /// Endpoint vertex indices, smaller first.
    pub verts: (usize, usize),
    pub length: f64,
    /// Incident (tetrahedron index, local edge index) pairs.
    pub incidences: Vec<(usize, usize)>,
    /// Total dihedral angle around the edge.
    pub theta: f64,
}

/// A validated closed polyhedral 3-manifold.
///
/// Immutable after construction; all analyses are pure functions and safe to
/// run concurrently.
#[derive(Debug, Clone)]
pub struct PolyhedralComplex {
    labels: Vec<String>,
    tets: Vec<Tetrahedron>,
    tet_angles: Vec<[f64; 6]>,
    edges: Vec<EdgeRecord>,
    edge_index: BTreeMap<(usize, usize), usize>,
    vertex_tets: Vec<Vec<usize>>,
}

impl PolyhedralComplex {
    pub fn new(
        labels: Vec<String>,
        tets: Vec<([usize; 4], TetLengths)>,
    ) -> Result<Self, ComplexError> {
        if tets.is_empty() {
            return Err(ComplexError::Empty);
        }
        {
            let mut seen = std::collections::BTreeSet::new();
            for l in &labels {
                if !seen.insert(l.clone()) {
                    return Err(ComplexError::DuplicateLabel(l.clone()));
                }
            }
        }

        let tets: Vec<Tetrahedron> = tets
            .into_iter()
            .map(|(verts, lengths)| Tetrahedron { verts, lengths })
            .collect();

        for (ti, tet) in tets.iter().enumerate() {
            for &v in &tet.verts {
                if v >= labels.len() {
                    return Err(ComplexError::BadVertexIndex { tet: ti, index: v });
                }
            }
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if tet.verts[i] == tet.verts[j] {
                        return Err(ComplexError::RepeatedVertex {
                            tet: ti,
                            label: labels[tet.verts[i]].clone(),
                        });
                    }
                }
            }
            for &l in &tet.lengths.0 {
                if !(l > 0.0 && l.is_finite()) {
                    return Err(ComplexError::NonpositiveLength { tet: ti, length: l });
                }
            }
        }

        // Dihedral angles per tet; doubles as the nondegeneracy check.
        let mut tet_angles = Vec::with_capacity(tets.len());
        for (ti, tet) in tets.iter().enumerate() {
            match all_dihedral_angles(&tet.lengths) {
                Ok(a) => tet_angles.push(a),
                Err(source) => return Err(ComplexError::Degenerate { tet: ti, source }),
            }
        }

        // Edge table with exact glued-length agreement.
        let mut edge_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges: Vec<EdgeRecord> = Vec::new();
        for (ti, tet) in tets.iter().enumerate() {
            for (le, &(i, j)) in TET_EDGES.iter().enumerate() {
                let (a, b) = ordered(tet.verts[i], tet.verts[j]);
                let length = tet.lengths.0[le];
                match edge_index.get(&(a, b)) {
                    Some(&id) => {
                        if edges[id].length != length {
                            return Err(ComplexError::ConflictingEdgeLength {
                                a: labels[a].clone(),
                                b: labels[b].clone(),
                                l1: edges[id].length,
                                l2: length,
                            });
                        }
                        edges[id].incidences.push((ti, le));
                    }
                    None => {
                        edge_index.insert((a, b), edges.len());
                        edges.push(EdgeRecord {
                            verts: (a, b),
                            length,
                            incidences: vec![(ti, le)],
                            theta: 0.0,
                        });
                    }
                }
            }
        }
        for e in &mut edges {
            e.theta = e
                .incidences
                .iter()
                .map(|&(ti, le)| tet_angles[ti][le])
                .sum();
        }

        // Closed-manifold face check: every sorted label triple in exactly 2 tets.
        let mut faces: BTreeMap<[usize; 3], usize> = BTreeMap::new();
        for tet in &tets {
            for omit in 0..4 {
                let mut f: Vec<usize> = (0..4)
                    .filter(|&k| k != omit)
                    .map(|k| tet.verts[k])
                    .collect();
                f.sort_unstable();
                *faces.entry([f[0], f[1], f[2]]).or_insert(0) += 1;
            }
        }
        for (f, count) in &faces {
            let face = [
                labels[f[0]].clone(),
                labels[f[1]].clone(),
                labels[f[2]].clone(),
            ];
            match count {
                2 => {}
                1 => return Err(ComplexError::BoundaryFace { face }),
                c => return Err(ComplexError::NonManifoldFace { face, count: *c }),
            }
        }

        let mut vertex_tets = vec![Vec::new(); labels.len()];
        for (ti, tet) in tets.iter().enumerate() {
            for &v in &tet.verts {
                vertex_tets[v].push(ti);
            }
        }
        for (v, inc) in vertex_tets.iter().enumerate() {
            if inc.is_empty() {
                return Err(ComplexError::UnusedVertex {
                    label: labels[v].clone(),
                });
            }
        }

        let complex = Self {
            labels,
            tets,
            tet_angles,
            edges,
            edge_index,
            vertex_tets,
        };
        complex.check_links()?;
        Ok(complex)
    }

    /// Links must be triangulated 2-spheres: connected with Euler
    /// characteristic 2.
    fn check_links(&self) -> Result<(), ComplexError> {
        for v in 0..self.labels.len() {
            let incident = &self.vertex_tets[v];
            // Link vertices: neighbors of v. Link edges: faces at v (pairs of
            // neighbors within a tet). Link faces: incident tets.
            let mut link_verts = std::collections::BTreeSet::new();
            let mut link_edges = std::collections::BTreeSet::new();
            for &ti in incident {
                let others: Vec<usize> = self.tets[ti]
                    .verts
                    .iter()
                    .copied()
                    .filter(|&w| w != v)
                    .collect();
                for &w in &others {
                    link_verts.insert(w);
                }
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        link_edges.insert(ordered(others[i], others[j]));
                    }
                }
            }
            let chi =
                link_verts.len() as i64 - link_edges.len() as i64 + incident.len() as i64;
            if chi != 2 {
                return Err(ComplexError::LinkNotSphere {
                    label: self.labels[v].clone(),
                    chi,
                });
            }
            // Connectivity: BFS over incident tets through shared faces at v.
            let mut seen = vec![false; incident.len()];
            let mut queue = vec![0usize];
            seen[0] = true;
            while let Some(i) = queue.pop() {
                let ti = incident[i];
                for (j, seen_j) in seen.iter_mut().enumerate() {
                    if *seen_j {
                        continue;
                    }
                    let tj = incident[j];
                    if shares_face_at(&self.tets[ti], &self.tets[tj], v) {
                        *seen_j = true;
                        queue.push(j);
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(ComplexError::LinkDisconnected {
                    label: self.labels[v].clone(),
                });
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn tets(&self) -> &[Tetrahedron] {
        &self.tets
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&ordered(a, b)).copied()
    }

    pub fn vertex_tets(&self, v: usize) -> &[usize] {
        &self.vertex_tets[v]
    }

    /// Dihedral angle of tet `ti` along its local edge `le`.
    pub fn tet_dihedral(&self, ti: usize, le: usize) -> f64 {
        self.tet_angles[ti][le]
    }

    /// Total cone angle around a triangulation edge (sum of incident
    /// dihedral angles). Every edge of a valid complex is interior.
    pub fn cone_angle(&self, edge: usize) -> f64 {
        self.edges[edge].theta
    }

    /// `true` together with the edge of maximal cone angle; the complex is
    /// nonnegatively curved when no edge exceeds `2 pi + tol_angle`.
    pub fn is_nonnegatively_curved(&self, tol_angle: f64) -> (bool, usize, f64) {
        let (worst, theta) = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (i, e.theta))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("validated complex has edges");
        (theta <= 2.0 * std::f64::consts::PI + tol_angle, worst, theta)
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn shares_face_at(t1: &Tetrahedron, t2: &Tetrahedron, v: usize) -> bool {
    let common = t1
        .verts
        .iter()
        .filter(|&&w| w != v && t2.verts.contains(&w))
        .count();
    common == 2 && t2.verts.contains(&v)
}
