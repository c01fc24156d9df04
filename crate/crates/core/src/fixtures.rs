//! Canonical input corpus: small closed polyhedral 3-manifolds with known
//! singular structure, plus hand-built vertex links.

use nalgebra::Vector3;

use crate::complex::{LinkTriangle, PolyhedralComplex, TetLengths, VertexLink, TET_EDGES};

fn lengths_from_points(pts: &[Vector3<f64>; 4]) -> TetLengths {
    let mut l = [0.0; 6];
    for (e, &(i, j)) in TET_EDGES.iter().enumerate() {
        l[e] = (pts[i] - pts[j]).norm();
    }
    TetLengths(l)
}

/// Two solid unit cubes glued along their boundary: a polyhedral 3-sphere
/// with 12 open essential edges of cone angle `pi` and 8 essential vertices.
///
/// Each copy is triangulated by coning its boundary (six squares split along
/// a diagonal) from an interior center vertex, so the two copies share only
/// boundary vertices.
pub fn doubled_cube() -> PolyhedralComplex {
    let corner = |x: usize, y: usize, z: usize| -> (String, Vector3<f64>) {
        (
            format!("c{x}{y}{z}"),
            Vector3::new(x as f64, y as f64, z as f64),
        )
    };

    let mut labels: Vec<String> = Vec::new();
    let mut coords: Vec<Vector3<f64>> = Vec::new();
    for z in 0..2 {
        for y in 0..2 {
            for x in 0..2 {
                let (l, c) = corner(x, y, z);
                labels.push(l);
                coords.push(c);
            }
        }
    }
    let idx = |x: usize, y: usize, z: usize| -> usize { x + 2 * y + 4 * z };
    let center = Vector3::new(0.5, 0.5, 0.5);
    let center_a = labels.len();
    labels.push("inA".to_string());
    coords.push(center);
    let center_b = labels.len();
    labels.push("inB".to_string());
    coords.push(center);

    // Each boundary square in cyclic order, split along the diagonal from its
    // first corner.
    let quads: [[usize; 4]; 6] = [
        [idx(0, 0, 0), idx(1, 0, 0), idx(1, 1, 0), idx(0, 1, 0)], // z = 0
        [idx(0, 0, 1), idx(1, 0, 1), idx(1, 1, 1), idx(0, 1, 1)], // z = 1
        [idx(0, 0, 0), idx(1, 0, 0), idx(1, 0, 1), idx(0, 0, 1)], // y = 0
        [idx(0, 1, 0), idx(1, 1, 0), idx(1, 1, 1), idx(0, 1, 1)], // y = 1
        [idx(0, 0, 0), idx(0, 1, 0), idx(0, 1, 1), idx(0, 0, 1)], // x = 0
        [idx(1, 0, 0), idx(1, 1, 0), idx(1, 1, 1), idx(1, 0, 1)], // x = 1
    ];

    let mut tets: Vec<([usize; 4], TetLengths)> = Vec::new();
    for q in &quads {
        for tri in [[q[0], q[1], q[2]], [q[0], q[2], q[3]]] {
            for &c in &[center_a, center_b] {
                let verts = [c, tri[0], tri[1], tri[2]];
                let pts = [coords[c], coords[tri[0]], coords[tri[1]], coords[tri[2]]];
                tets.push((verts, lengths_from_points(&pts)));
            }
        }
    }
    PolyhedralComplex::new(labels, tets).expect("doubled cube is a valid complex")
}

/// Flat 3-torus: a 3x3x3 periodic grid of unit cubes, each in the standard
/// 6-tetrahedron (Kuhn) decomposition. Every edge has cone angle `2 pi`.
pub fn flat_torus_3() -> PolyhedralComplex {
    const M: usize = 3;
    let vid = |x: usize, y: usize, z: usize| -> usize { (x % M) + M * (y % M) + M * M * (z % M) };
    let labels: Vec<String> = (0..M * M * M)
        .map(|i| format!("v{}{}{}", i % M, (i / M) % M, i / (M * M)))
        .collect();

    // Kuhn decomposition: one tet per permutation of the axes, walking from
    // corner (0,0,0) to (1,1,1).
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];

    let mut tets: Vec<([usize; 4], TetLengths)> = Vec::new();
    for z in 0..M {
        for y in 0..M {
            for x in 0..M {
                for perm in &perms {
                    let mut d = [0usize; 3];
                    let mut disp: [Vector3<f64>; 4] = [Vector3::zeros(); 4];
                    let mut verts = [0usize; 4];
                    verts[0] = vid(x, y, z);
                    for (step, &axis) in perm.iter().enumerate() {
                        d[axis] = 1;
                        verts[step + 1] = vid(x + d[0], y + d[1], z + d[2]);
                        disp[step + 1] = Vector3::new(d[0] as f64, d[1] as f64, d[2] as f64);
                    }
                    tets.push((verts, lengths_from_points(&disp)));
                }
            }
        }
    }
    PolyhedralComplex::new(labels, tets).expect("flat 3-torus is a valid complex")
}

/// (Doubled unit square) x S^1: a reducible space whose singular set is four
/// closed essential edges of cone angle `pi` (the corner circles), with no
/// essential vertices. The circle is split into `m >= 3` segments of total
/// length 1.
pub fn pillow_circle_product(m: usize) -> PolyhedralComplex {
    assert!(m >= 3, "need at least three segments for distinct labels");
    // Pillow vertices: four corners then the two face centers. Order matters:
    // centers sort last so every prism has a center-only vertical tet.
    let names = ["q00", "q10", "q01", "q11", "pA", "pB"];
    let pos2 = [
        Vector3::new(0.0, 0.0, 0.0),
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(0.0, 1.0, 0.0),
        Vector3::new(1.0, 1.0, 0.0),
        Vector3::new(0.5, 0.5, 0.0),
        Vector3::new(0.5, 0.5, 0.0),
    ];
    // Sides of the square in cyclic order (indices into `names`).
    let sides = [(0usize, 1usize), (1, 3), (3, 2), (2, 0)];
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for &center in &[4usize, 5] {
        for &(a, b) in &sides {
            let mut t = [a, b, center];
            t.sort_unstable();
            triangles.push(t);
        }
    }

    let h = 1.0 / m as f64;
    let labels: Vec<String> = (0..m)
        .flat_map(|j| names.iter().map(move |n| format!("{n}_{j}")))
        .collect();
    let vid = |p: usize, j: usize| -> usize { (j % m) * names.len() + p };
    let dist2 = |a: usize, b: usize| -> f64 { (pos2[a] - pos2[b]).norm() };
    let length = |(pa, ja): (usize, usize), (pb, jb): (usize, usize)| -> f64 {
        let dz = if ja == jb { 0.0 } else { h };
        dist2(pa, pb).hypot(dz)
    };

    let mut tets: Vec<([usize; 4], TetLengths)> = Vec::new();
    for tri in &triangles {
        let [p, q, r] = *tri;
        for j in 0..m {
            let j1 = j + 1;
            // Ordered prism split; quad diagonals run from the smaller vertex
            // on the lower layer, which matches across neighboring prisms.
            let pieces: [[(usize, usize); 4]; 3] = [
                [(p, j), (q, j), (r, j), (r, j1)],
                [(p, j), (q, j), (q, j1), (r, j1)],
                [(p, j), (p, j1), (q, j1), (r, j1)],
            ];
            for piece in &pieces {
                let verts = [
                    vid(piece[0].0, piece[0].1),
                    vid(piece[1].0, piece[1].1),
                    vid(piece[2].0, piece[2].1),
                    vid(piece[3].0, piece[3].1),
                ];
                let mut l = [0.0f64; 6];
                for (e, &(i, k)) in TET_EDGES.iter().enumerate() {
                    l[e] = length(piece[i], piece[k]);
                }
                tets.push((verts, TetLengths(l)));
            }
        }
    }
    PolyhedralComplex::new(labels, tets).expect("pillow product is a valid complex")
}

/// Join of a 3-cycle and a 6-cycle with all edge lengths 1: a triangulated
/// 3-sphere whose three short-cycle edges carry six regular tetrahedra each,
/// hence cone angle `6 arccos(1/3) > 2 pi` (negatively curved edges).
pub fn join_c3_c6() -> PolyhedralComplex {
    let mut labels: Vec<String> = (0..3).map(|i| format!("a{i}")).collect();
    labels.extend((0..6).map(|j| format!("b{j}")));
    let a = |i: usize| i % 3;
    let b = |j: usize| 3 + (j % 6);
    let mut tets = Vec::new();
    for i in 0..3 {
        for j in 0..6 {
            tets.push((
                [a(i), a(i + 1), b(j), b(j + 1)],
                TetLengths([1.0; 6]),
            ));
        }
    }
    PolyhedralComplex::new(labels, tets).expect("join complex is valid")
}

/// Spherical suspension over a circle of length `theta`, triangulated with
/// `k` equator vertices: two cone points of angle `theta` at distance `pi`.
pub fn suspension_link(theta: f64, k: usize) -> VertexLink {
    assert!(k >= 3 && theta > 0.0 && theta <= std::f64::consts::TAU);
    let arc = theta / k as f64;
    let meridian = std::f64::consts::FRAC_PI_2;
    let mut triangles = Vec::new();
    for pole in 0..2usize {
        for i in 0..k {
            let e0 = 2 + i;
            let e1 = 2 + (i + 1) % k;
            triangles.push(LinkTriangle {
                corners: [pole, e0, e1],
                sides: [arc, meridian, meridian],
            });
        }
    }
    VertexLink {
        vertices: (0..k + 2).collect(),
        triangles,
    }
}

/// A suspension-like link with meridians stretched by `stretch`; no longer a
/// suspension (the equator vertices become cone points).
pub fn stretched_suspension_link(theta: f64, k: usize, stretch: f64) -> VertexLink {
    let mut link = suspension_link(theta, k);
    for t in &mut link.triangles {
        t.sides[1] *= stretch;
        t.sides[2] *= stretch;
    }
    link
}

/// Double of the right-angled spherical triangle (all sides `pi/2`): three
/// cone points of angle `pi`. This is the link of a doubled-cube corner.
pub fn doubled_triangle_link() -> VertexLink {
    let s = std::f64::consts::FRAC_PI_2;
    VertexLink {
        vertices: vec![0, 1, 2],
        triangles: vec![
            LinkTriangle { corners: [0, 1, 2], sides: [s, s, s] },
            LinkTriangle { corners: [0, 1, 2], sides: [s, s, s] },
        ],
    }
}
