//! Vertex links as spherical polyhedral 2-spheres, and the suspension test
//! that decides whether the tangent cone at a vertex splits off an R factor.

use std::collections::BTreeMap;

use nalgebra::Vector3;

use crate::math::{dijkstra, spherical_angle, sphere_distance};

use super::{face_angle, AnalysisTolerances, PolyhedralComplex};

/// One spherical triangle of a link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTriangle {
    /// Indices into [`VertexLink::vertices`].
    pub corners: [usize; 3],
    /// Spherical side lengths, `sides[i]` opposite `corners[i]`.
    pub sides: [f64; 3],
}

impl LinkTriangle {
    /// Interior angle at local corner `i` (spherical law of cosines).
    pub fn angle_at(&self, i: usize) -> f64 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        spherical_angle(self.sides[i], self.sides[j], self.sides[k])
    }

    /// Area by spherical angle excess.
    pub fn area(&self) -> f64 {
        self.angle_at(0) + self.angle_at(1) + self.angle_at(2) - std::f64::consts::PI
    }
}

/// The space of unit directions at a point of a polyhedral 3-manifold: a
/// 2-sphere triangulated by spherical triangles. Side lengths are the face
/// angles of the incident tetrahedra at the center vertex.
#[derive(Debug, Clone)]
pub struct VertexLink {
    /// Identifies link vertices; when built from a complex these are the
    /// neighboring vertex indices.
    pub vertices: Vec<usize>,
    pub triangles: Vec<LinkTriangle>,
}

impl VertexLink {
    /// Link of vertex `v` in a complex: one spherical triangle per incident
    /// tetrahedron.
    pub fn of_vertex(complex: &PolyhedralComplex, v: usize) -> Self {
        let mut vertices: Vec<usize> = Vec::new();
        let mut vertex_slot: BTreeMap<usize, usize> = BTreeMap::new();
        let mut triangles = Vec::new();
        for &ti in complex.vertex_tets(v) {
            let tet = &complex.tets()[ti];
            let local_v = tet.verts.iter().position(|&w| w == v).unwrap();
            let others: Vec<usize> = (0..4).filter(|&k| k != local_v).collect();
            let mut corners = [0usize; 3];
            for (slot, &lo) in others.iter().enumerate() {
                let w = tet.verts[lo];
                let idx = *vertex_slot.entry(w).or_insert_with(|| {
                    vertices.push(w);
                    vertices.len() - 1
                });
                corners[slot] = idx;
            }
            // sides[i] is opposite corners[i]: the face angle at v between the
            // other two directions.
            let mut sides = [0.0f64; 3];
            for i in 0..3 {
                let b = others[(i + 1) % 3];
                let c = others[(i + 2) % 3];
                sides[i] = face_angle(&tet.lengths, local_v, b, c);
            }
            triangles.push(LinkTriangle { corners, sides });
        }
        Self { vertices, triangles }
    }

    /// Total angle around a link vertex: sum of incident triangle angles.
    /// Equals the cone angle of the corresponding triangulation edge.
    pub fn cone_angle_at(&self, link_vertex: usize) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| {
                t.corners
                    .iter()
                    .enumerate()
                    .filter(move |&(_, &c)| c == link_vertex)
                    .map(move |(i, _)| t.angle_at(i))
            })
            .sum()
    }

    /// Total area by angle excess (exact up to roundoff).
    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| t.area()).sum()
    }

    /// Link vertices whose total angle differs from `2 pi` by more than
    /// `tol`, with their cone angles.
    pub fn cone_points(&self, tol: f64) -> Vec<(usize, f64)> {
        (0..self.vertices.len())
            .filter_map(|i| {
                let a = self.cone_angle_at(i);
                ((a - std::f64::consts::TAU).abs() > tol).then_some((i, a))
            })
            .collect()
    }

    /// Geodesic distance between two link vertices, approximated by Dijkstra
    /// on the edge graph after `refinement` levels of geodesic subdivision of
    /// every spherical triangle.
    pub fn geodesic_distance(&self, from: usize, to: usize, refinement: u32) -> f64 {
        let n = 1usize << refinement;
        let mut nodes: BTreeMap<NodeKey, usize> = BTreeMap::new();
        let mut adj: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut node_id = |key: NodeKey, adj: &mut Vec<Vec<(usize, f64)>>| -> usize {
            *nodes.entry(key).or_insert_with(|| {
                adj.push(Vec::new());
                adj.len() - 1
            })
        };

        for (ti, tri) in self.triangles.iter().enumerate() {
            // Embed the triangle on the unit sphere: corner 0 at the pole,
            // corner 1 in the xz-plane, corner 2 by its angle at corner 0.
            let c01 = tri.sides[2]; // between corners 0 and 1 (opposite 2)
            let c02 = tri.sides[1];
            let alpha = tri.angle_at(0);
            let p0 = Vector3::new(0.0, 0.0, 1.0);
            let p1 = Vector3::new(c01.sin(), 0.0, c01.cos());
            let p2 = Vector3::new(
                c02.sin() * alpha.cos(),
                c02.sin() * alpha.sin(),
                c02.cos(),
            );
            let corners3d = [p0, p1, p2];

            // Barycentric integer grid (a, b, c), a + b + c = n.
            let pos = |a: usize, b: usize, c: usize| -> Vector3<f64> {
                if a == n {
                    return corners3d[0];
                }
                if b == n {
                    return corners3d[1];
                }
                if c == n {
                    return corners3d[2];
                }
                // Edge nodes use exact geodesic interpolation so shared edges
                // carry identical intrinsic positions in both charts.
                let slerp = |p: &Vector3<f64>, q: &Vector3<f64>, t: f64| -> Vector3<f64> {
                    let ang = sphere_distance(p, q);
                    if ang < 1e-15 {
                        return *p;
                    }
                    (p * ((1.0 - t) * ang).sin() + q * (t * ang).sin()) / ang.sin()
                };
                if a == 0 {
                    return slerp(&corners3d[1], &corners3d[2], c as f64 / n as f64);
                }
                if b == 0 {
                    return slerp(&corners3d[0], &corners3d[2], c as f64 / n as f64);
                }
                if c == 0 {
                    return slerp(&corners3d[0], &corners3d[1], b as f64 / n as f64);
                }
                (corners3d[0] * a as f64 + corners3d[1] * b as f64 + corners3d[2] * c as f64)
                    .normalize()
            };

            let key = |a: usize, b: usize, c: usize| -> NodeKey {
                if a == n {
                    return NodeKey::Corner(tri.corners[0]);
                }
                if b == n {
                    return NodeKey::Corner(tri.corners[1]);
                }
                if c == n {
                    return NodeKey::Corner(tri.corners[2]);
                }
                // Node on an original edge: identify across charts by the
                // sorted endpoint pair and the fraction from the smaller id.
                let edge_key = |u: usize, w: usize, frac_from_u: usize| -> NodeKey {
                    if u < w {
                        NodeKey::Edge(u, w, frac_from_u)
                    } else {
                        NodeKey::Edge(w, u, n - frac_from_u)
                    }
                };
                if a == 0 {
                    return edge_key(tri.corners[1], tri.corners[2], c);
                }
                if b == 0 {
                    return edge_key(tri.corners[0], tri.corners[2], c);
                }
                if c == 0 {
                    return edge_key(tri.corners[0], tri.corners[1], b);
                }
                NodeKey::Interior(ti, a, b)
            };

            // Lattice edges: from (a,b,c) step one unit between coordinates.
            for a in 0..=n {
                for b in 0..=(n - a) {
                    let c = n - a - b;
                    let here = node_id(key(a, b, c), &mut adj);
                    let here_pos = pos(a, b, c);
                    let mut connect = |a2: i64, b2: i64, c2: i64, adj: &mut Vec<Vec<(usize, f64)>>| {
                        if a2 < 0 || b2 < 0 || c2 < 0 {
                            return;
                        }
                        let (a2, b2, c2) = (a2 as usize, b2 as usize, c2 as usize);
                        let there = node_id(key(a2, b2, c2), adj);
                        let w = sphere_distance(&here_pos, &pos(a2, b2, c2));
                        adj[here].push((there, w));
                        adj[there].push((here, w));
                    };
                    let (ai, bi, ci) = (a as i64, b as i64, c as i64);
                    connect(ai - 1, bi + 1, ci, &mut adj);
                    connect(ai - 1, bi, ci + 1, &mut adj);
                    connect(ai, bi - 1, ci + 1, &mut adj);
                }
            }
        }

        let src = nodes[&NodeKey::Corner(from)];
        let dst = nodes[&NodeKey::Corner(to)];
        dijkstra(&adj, src)[dst]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum NodeKey {
    Corner(usize),
    /// (smaller corner id, larger corner id, fraction numerator from smaller)
    Edge(usize, usize, usize),
    Interior(usize, usize, usize),
}

/// Outcome of the suspension test with the margins that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDecision {
    pub is_product: bool,
    pub cone_point_count: usize,
    /// |theta_1 - theta_2| when two cone points exist.
    pub angle_mismatch: Option<f64>,
    /// |area - 2 theta| when applicable.
    pub area_mismatch: Option<f64>,
    /// |distance - pi| when applicable.
    pub distance_mismatch: Option<f64>,
    /// Some check passed or failed within 10x of its tolerance.
    pub near_tolerance: bool,
}

/// Suspension test: the link is a spherical suspension (so the cone splits as
/// `K x R`) iff it has exactly two cone points with equal angles `theta`,
/// area `2 theta`, and the cone points at link distance `pi`.
///
/// This is a sufficient criterion with tolerances; genuinely borderline links
/// are flagged via `near_tolerance`.
pub fn is_product_vertex(link: &VertexLink, tols: &AnalysisTolerances) -> ProductDecision {
    let cone_points = link.cone_points(tols.tol_angle);
    let mut near = false;
    let mut check = |mismatch: f64, tol: f64| -> bool {
        if (mismatch - tol).abs() <= 9.0 * tol {
            near = true;
        }
        mismatch <= tol
    };

    if cone_points.len() != 2 {
        return ProductDecision {
            is_product: false,
            cone_point_count: cone_points.len(),
            angle_mismatch: None,
            area_mismatch: None,
            distance_mismatch: None,
            near_tolerance: false,
        };
    }

    let (v1, t1) = cone_points[0];
    let (v2, t2) = cone_points[1];
    let angle_mismatch = (t1 - t2).abs();
    let angles_ok = check(angle_mismatch, tols.tol_angle);

    let theta = 0.5 * (t1 + t2);
    let area_mismatch = (link.area() - 2.0 * theta).abs();
    let area_ok = check(area_mismatch, tols.tol_area);

    let dist = link.geodesic_distance(v1, v2, tols.link_refinement);
    let distance_mismatch = (dist - std::f64::consts::PI).abs();
    let dist_ok = check(distance_mismatch, tols.tol_dist);

    ProductDecision {
        is_product: angles_ok && area_ok && dist_ok,
        cone_point_count: 2,
        angle_mismatch: Some(angle_mismatch),
        area_mismatch: Some(area_mismatch),
        distance_mismatch: Some(distance_mismatch),
        near_tolerance: near,
    }
}
