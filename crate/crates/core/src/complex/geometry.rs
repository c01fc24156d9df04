//! Tetrahedron geometry from edge lengths: Cayley-Menger nondegeneracy,
//! explicit embedding, and dihedral angles via face normals.

use nalgebra::Vector3;
use thiserror::Error;

/// Local edge order within a tetrahedron: 01, 02, 03, 12, 13, 23.
pub const TET_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Names matching [`TET_EDGES`], used in the mesh document format.
pub const TET_EDGE_NAMES: [&str; 6] = ["01", "02", "03", "12", "13", "23"];

#[derive(Debug, Error, Clone, PartialEq)]
#[error("degenerate Euclidean simplex (Cayley-Menger determinant {det:e})")]
pub struct DegenerateSimplex {
    pub det: f64,
}

/// Six edge lengths of a tetrahedron in the order 01, 02, 03, 12, 13, 23.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetLengths(pub [f64; 6]);

impl TetLengths {
    /// Length of the edge between local vertices `i` and `j`.
    pub fn between(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let idx = TET_EDGES
            .iter()
            .position(|&e| e == (a, b))
            .expect("valid local vertex pair");
        self.0[idx]
    }

    /// Index of the local edge opposite to `(i, j)` (the edge on the other
    /// two vertices).
    pub fn opposite_edge(edge: usize) -> usize {
        // Pairs (01,23), (02,13), (03,12).
        5 - edge
    }
}

/// Cayley-Menger determinant of a tetrahedron; positive exactly for
/// nondegenerate Euclidean simplices (288 V^2 = det).
pub fn cayley_menger_det(l: &TetLengths) -> f64 {
    let mut m = [[0.0f64; 5]; 5];
    for i in 1..5 {
        m[0][i] = 1.0;
        m[i][0] = 1.0;
    }
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                let d = l.between(i, j);
                m[i + 1][j + 1] = d * d;
            }
        }
    }
    det5(&m)
}

fn det5(m: &[[f64; 5]; 5]) -> f64 {
    let mut det = 0.0;
    for j in 0..5 {
        let mut minor = [[0.0f64; 4]; 4];
        for (mi, row) in m.iter().skip(1).enumerate() {
            let mut mj = 0;
            for (k, &val) in row.iter().enumerate() {
                if k != j {
                    minor[mi][mj] = val;
                    mj += 1;
                }
            }
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m[0][j] * det4(&minor);
    }
    det
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut det = 0.0;
    for j in 0..4 {
        let mut minor = [[0.0f64; 3]; 3];
        for (mi, row) in m.iter().skip(1).enumerate() {
            let mut mj = 0;
            for (k, &val) in row.iter().enumerate() {
                if k != j {
                    minor[mi][mj] = val;
                    mj += 1;
                }
            }
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m[0][j] * det3(&minor);
    }
    det
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Embed the tetrahedron in R^3 from its edge lengths: v0 at the origin, v1
/// on the x-axis, v2 in the xy-plane, v3 above it.
pub fn embed_tetrahedron(l: &TetLengths) -> Result<[Vector3<f64>; 4], DegenerateSimplex> {
    let det = cayley_menger_det(l);
    if !(det > 0.0) {
        return Err(DegenerateSimplex { det });
    }
    let l01 = l.between(0, 1);
    let l02 = l.between(0, 2);
    let l03 = l.between(0, 3);
    let l12 = l.between(1, 2);
    let l13 = l.between(1, 3);
    let l23 = l.between(2, 3);

    let v0 = Vector3::zeros();
    let v1 = Vector3::new(l01, 0.0, 0.0);
    let x2 = (l01 * l01 + l02 * l02 - l12 * l12) / (2.0 * l01);
    let y2sq = l02 * l02 - x2 * x2;
    if !(y2sq > 0.0) {
        return Err(DegenerateSimplex { det });
    }
    let v2 = Vector3::new(x2, y2sq.sqrt(), 0.0);
    let x3 = (l01 * l01 + l03 * l03 - l13 * l13) / (2.0 * l01);
    // v2 . v3 from the law of cosines at v0.
    let dot23 = (l02 * l02 + l03 * l03 - l23 * l23) / 2.0;
    let y3 = (dot23 - x2 * x3) / v2.y;
    let z3sq = l03 * l03 - x3 * x3 - y3 * y3;
    if !(z3sq > 0.0) {
        return Err(DegenerateSimplex { det });
    }
    let v3 = Vector3::new(x3, y3, z3sq.sqrt());
    Ok([v0, v1, v2, v3])
}

/// Interior dihedral angle of the tetrahedron along one of its six edges,
/// in `(0, pi)`. Computed from an explicit embedding by the two-face-normal
/// method (here: angle between the edge-orthogonal components of the two
/// off-edge vertices).
pub fn dihedral_angle(l: &TetLengths, edge: usize) -> Result<f64, DegenerateSimplex> {
    assert!(edge < 6, "local edge index must be 0..6");
    let pts = embed_tetrahedron(l)?;
    Ok(dihedral_from_points(&pts, edge))
}

/// Dihedral angle along local edge `edge` of an embedded tetrahedron.
pub fn dihedral_from_points(pts: &[Vector3<f64>; 4], edge: usize) -> f64 {
    let (i, j) = TET_EDGES[edge];
    let (k, m) = TET_EDGES[TetLengths::opposite_edge(edge)];
    let u = (pts[j] - pts[i]).normalize();
    let reject = |p: Vector3<f64>| -> Vector3<f64> {
        let w = p - pts[i];
        w - u * w.dot(&u)
    };
    let a = reject(pts[k]);
    let b = reject(pts[m]);
    // atan2 form stays accurate near 0 and pi.
    a.cross(&b).norm().atan2(a.dot(&b))
}

/// All six dihedral angles of a tetrahedron (one embedding, six angles).
pub fn all_dihedral_angles(l: &TetLengths) -> Result<[f64; 6], DegenerateSimplex> {
    let pts = embed_tetrahedron(l)?;
    let mut out = [0.0; 6];
    for (e, slot) in out.iter_mut().enumerate() {
        *slot = dihedral_from_points(&pts, e);
    }
    Ok(out)
}

/// Planar angle at local vertex `at` between the edges toward `b` and `c`.
/// This is the spherical distance between the two directions in the vertex
/// link.
pub fn face_angle(l: &TetLengths, at: usize, b: usize, c: usize) -> f64 {
    crate::math::triangle_angle(l.between(b, c), l.between(at, b), l.between(at, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn regular() -> TetLengths {
        TetLengths([1.0; 6])
    }

    /// Corner simplex: v0 at the origin, v1/v2/v3 the standard basis points.
    fn corner() -> TetLengths {
        let s = 2.0f64.sqrt();
        TetLengths([1.0, 1.0, 1.0, s, s, s])
    }

    #[test]
    fn regular_tet_dihedral_is_acos_one_third() {
        // Oracle: embed the regular tetrahedron in coordinates and measure the
        // angle between face normals directly.
        let pts = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.5, 3.0f64.sqrt() / 2.0, 0.0),
            Vector3::new(0.5, 1.0 / (2.0 * 3.0f64.sqrt()), (2.0f64 / 3.0).sqrt()),
        ];
        let n1 = (pts[2] - pts[0]).cross(&(pts[1] - pts[0])).normalize();
        let n2 = (pts[1] - pts[0]).cross(&(pts[3] - pts[0])).normalize();
        let oracle = std::f64::consts::PI - n1.dot(&n2).acos();
        assert!((oracle - (1.0f64 / 3.0).acos()).abs() < 1e-12);

        for e in 0..6 {
            let a = dihedral_angle(&regular(), e).unwrap();
            assert!(
                (a - (1.0f64 / 3.0).acos()).abs() < 1e-12,
                "edge {e}: {a} vs {}",
                (1.0f64 / 3.0).acos()
            );
            assert!((a - 1.230_959_4).abs() < 1e-7);
        }
    }

    #[test]
    fn corner_tet_leg_dihedral_is_right_angle() {
        // The two faces incident to a leg lie in orthogonal coordinate planes.
        for leg in 0..3 {
            let a = dihedral_angle(&corner(), leg).unwrap();
            assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-12, "leg {leg}: {a}");
        }
    }

    #[test]
    fn triangle_inequality_violation_is_rejected() {
        let l = TetLengths([1.0, 1.0, 1.0, 5.0, 1.0, 1.0]);
        let err = dihedral_angle(&l, 0).unwrap_err();
        assert!(err.det <= 0.0, "determinant should be reported, got {}", err.det);
    }

    #[test]
    fn cayley_menger_positive_for_regular() {
        // 288 V^2 with V = 1/(6 sqrt 2).
        let det = cayley_menger_det(&regular());
        assert!((det - 288.0 / 72.0).abs() < 1e-12, "det = {det}");
    }

    #[test]
    fn dihedral_matches_point_oracle_on_random_tets() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut tested = 0;
        while tested < 200 {
            let pts: Vec<Vector3<f64>> = (0..4)
                .map(|_| Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let vol = (pts[1] - pts[0])
                .cross(&(pts[2] - pts[0]))
                .dot(&(pts[3] - pts[0]))
                .abs();
            if vol < 0.05 {
                continue;
            }
            tested += 1;
            let mut lengths = [0.0; 6];
            for (e, &(i, j)) in TET_EDGES.iter().enumerate() {
                lengths[e] = (pts[i] - pts[j]).norm();
            }
            let l = TetLengths(lengths);
            let arr: [Vector3<f64>; 4] = [pts[0], pts[1], pts[2], pts[3]];
            for e in 0..6 {
                let from_lengths = dihedral_angle(&l, e).unwrap();
                let from_points = dihedral_from_points(&arr, e);
                assert!(
                    (from_lengths - from_points).abs() < 1e-9,
                    "edge {e}: {from_lengths} vs {from_points}"
                );
            }
        }
    }

    #[test]
    fn dihedral_symmetric_under_relabeling() {
        // Swapping the two off-edge vertices (and relabeling lengths
        // accordingly) must not change the angle along the edge.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let base = TetLengths([
                rng.random_range(0.8..1.2),
                rng.random_range(0.8..1.2),
                rng.random_range(0.8..1.2),
                rng.random_range(0.8..1.2),
                rng.random_range(0.8..1.2),
                rng.random_range(0.8..1.2),
            ]);
            if cayley_menger_det(&base) <= 1e-6 {
                continue;
            }
            // Relabel vertices 2 <-> 3: edge 01 unchanged, lengths permute as
            // 02<->03, 12<->13.
            let swapped = TetLengths([
                base.0[0], base.0[2], base.0[1], base.0[4], base.0[3], base.0[5],
            ]);
            let a = dihedral_angle(&base, 0).unwrap();
            let b = dihedral_angle(&swapped, 0).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn face_angle_equilateral() {
        let a = face_angle(&regular(), 0, 1, 2);
        assert!((a - std::f64::consts::FRAC_PI_3).abs() < 1e-14);
    }
}
