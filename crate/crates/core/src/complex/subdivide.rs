//! Centroid (1-4) subdivision of a single tetrahedron. Used to check that the
//! singular structure is independent of the triangulation.

use super::geometry::{embed_tetrahedron, TetLengths};
use super::{ComplexError, PolyhedralComplex};

impl PolyhedralComplex {
    /// Replace tetrahedron `tet_idx` by the four tetrahedra coned from its
    /// centroid. Shared edges keep their exact lengths, so the rest of the
    /// complex is untouched.
    pub fn subdivide_tet(&self, tet_idx: usize) -> Result<Self, ComplexError> {
        assert!(tet_idx < self.tets().len(), "tet index in range");
        let tet = &self.tets()[tet_idx];
        let pts = embed_tetrahedron(&tet.lengths)
            .map_err(|source| ComplexError::Degenerate { tet: tet_idx, source })?;
        let centroid = (pts[0] + pts[1] + pts[2] + pts[3]) / 4.0;
        let radial: [f64; 4] = std::array::from_fn(|i| (pts[i] - centroid).norm());

        let mut labels = self.labels().to_vec();
        let center = labels.len();
        labels.push(format!("subdiv_{tet_idx}"));

        let mut tets: Vec<([usize; 4], TetLengths)> = self
            .tets()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != tet_idx)
            .map(|(_, t)| (t.verts, t.lengths))
            .collect();

        // One sub-tet per face: replace the omitted corner by the centroid.
        for omit in 0..4 {
            let mut verts = tet.verts;
            verts[omit] = center;
            let mut lengths = [0.0f64; 6];
            for (e, &(i, j)) in super::TET_EDGES.iter().enumerate() {
                lengths[e] = if i == omit {
                    radial[j]
                } else if j == omit {
                    radial[i]
                } else {
                    tet.lengths.between(i, j)
                };
            }
            tets.push((verts, TetLengths(lengths)));
        }

        Self::new(labels, tets)
    }
}

#[cfg(test)]
mod tests {
    use crate::fixtures;

    #[test]
    fn subdivision_is_valid_and_grows_by_three() {
        let complex = fixtures::flat_torus_3();
        let refined = complex.subdivide_tet(0).unwrap();
        assert_eq!(refined.tets().len(), complex.tets().len() + 3);
        assert_eq!(refined.vertex_count(), complex.vertex_count() + 1);
        // New interior edges are flat.
        let analysis = refined.singular_strata(&crate::complex::AnalysisTolerances::default());
        assert!(analysis.strata.is_empty());
    }
}
