//! Extraction of the singular structure: essential edges (closed or open)
//! and essential vertices.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::link::{is_product_vertex, ProductDecision, VertexLink};
use super::PolyhedralComplex;

/// Tolerances controlling singularity detection and the suspension test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisTolerances {
    /// An edge is singular when |theta - 2 pi| exceeds this.
    pub tol_angle: f64,
    /// Allowed |area - 2 theta| in the suspension test.
    pub tol_area: f64,
    /// Allowed |distance - pi| between suspension poles.
    pub tol_dist: f64,
    /// Geodesic subdivision levels for link distances.
    pub link_refinement: u32,
}

impl Default for AnalysisTolerances {
    fn default() -> Self {
        Self {
            tol_angle: 1e-9,
            tol_area: 1e-6,
            tol_dist: 1e-3,
            link_refinement: 3,
        }
    }
}

/// An essential edge: a maximal run of singular triangulation edges through
/// product vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStratum {
    pub closed: bool,
    /// Cone angle along the edge (mean of constituent angles).
    pub theta: f64,
    /// Curvature `2 pi - theta`.
    pub omega: f64,
    /// Total length.
    pub length: f64,
    /// Constituent triangulation edge ids.
    pub tri_edges: Vec<usize>,
    /// Endpoint vertices for open edges (possibly equal).
    pub endpoints: Option<(usize, usize)>,
    /// Max pairwise disagreement of constituent cone angles.
    pub theta_spread: f64,
}

/// An essential vertex: the tangent cone does not split as `K x R`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexStratum {
    pub vertex: usize,
    /// Incident singular triangulation edges.
    pub incident_tri_edges: Vec<usize>,
    pub link_area: f64,
    /// Cone angles of the link's cone points.
    pub link_cone_angles: Vec<f64>,
    pub decision: ProductDecision,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SingularStratum {
    Edge(EdgeStratum),
    Vertex(VertexStratum),
}

/// Full singular-structure report for a complex.
#[derive(Debug, Clone)]
pub struct StrataAnalysis {
    pub strata: Vec<SingularStratum>,
    /// Product-test outcomes for every vertex incident to a singular edge.
    pub vertex_decisions: Vec<(usize, ProductDecision)>,
    /// Edge of maximal cone angle and that angle.
    pub worst_edge: (usize, f64),
    /// No edge exceeds `2 pi + tol_angle`.
    pub nonneg: bool,
}

impl StrataAnalysis {
    pub fn edge_strata(&self) -> impl Iterator<Item = &EdgeStratum> {
        self.strata.iter().filter_map(|s| match s {
            SingularStratum::Edge(e) => Some(e),
            _ => None,
        })
    }

    pub fn vertex_strata(&self) -> impl Iterator<Item = &VertexStratum> {
        self.strata.iter().filter_map(|s| match s {
            SingularStratum::Vertex(v) => Some(v),
            _ => None,
        })
    }

    /// Any suspension decision within 10x of a tolerance.
    pub fn has_near_tolerance_decisions(&self) -> bool {
        self.vertex_decisions.iter().any(|(_, d)| d.near_tolerance)
    }
}

impl PolyhedralComplex {
    /// Classify the singular set: singular triangulation edges are grouped
    /// into closed/open essential edges, and their endpoint vertices are
    /// tested for the product (suspension) property.
    pub fn singular_strata(&self, tols: &AnalysisTolerances) -> StrataAnalysis {
        let tau = std::f64::consts::TAU;
        let singular: Vec<usize> = (0..self.edges().len())
            .filter(|&e| (self.edges()[e].theta - tau).abs() > tols.tol_angle)
            .collect();
        let singular_set: BTreeSet<usize> = singular.iter().copied().collect();

        // Vertex -> incident singular edges.
        let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &e in &singular {
            let (a, b) = self.edges()[e].verts;
            incident.entry(a).or_default().push(e);
            incident.entry(b).or_default().push(e);
        }

        // Product test on every vertex touching the singular set.
        let mut vertex_decisions: Vec<(usize, ProductDecision)> = Vec::new();
        let mut essential: BTreeSet<usize> = BTreeSet::new();
        for (&v, _) in &incident {
            let link = VertexLink::of_vertex(self, v);
            let decision = is_product_vertex(&link, tols);
            if !decision.is_product {
                essential.insert(v);
            }
            vertex_decisions.push((v, decision));
        }

        let mut strata: Vec<SingularStratum> = Vec::new();
        let mut visited: BTreeSet<usize> = BTreeSet::new();

        // Open essential edges: walk from each essential vertex through
        // product vertices (which have exactly two singular directions).
        for &start in &essential {
            for &first in &incident[&start] {
                if visited.contains(&first) {
                    continue;
                }
                let mut run = vec![first];
                visited.insert(first);
                let mut prev = start;
                let mut cur = other_end(self, first, start);
                while !essential.contains(&cur) {
                    let next_edge = incident[&cur]
                        .iter()
                        .copied()
                        .find(|&e| !visited.contains(&e) && e != *run.last().unwrap())
                        .expect("product vertex has exactly two singular edges");
                    visited.insert(next_edge);
                    let nxt = other_end(self, next_edge, cur);
                    run.push(next_edge);
                    prev = cur;
                    cur = nxt;
                }
                let _ = prev;
                strata.push(SingularStratum::Edge(self.edge_stratum(
                    run,
                    false,
                    Some((start, cur)),
                )));
            }
        }

        // Remaining singular edges form cycles of product vertices.
        for &e in &singular {
            if visited.contains(&e) {
                continue;
            }
            let start_vertex = self.edges()[e].verts.0;
            let mut run = vec![e];
            visited.insert(e);
            let mut cur = other_end(self, e, start_vertex);
            while cur != start_vertex {
                let next_edge = incident[&cur]
                    .iter()
                    .copied()
                    .find(|&x| !visited.contains(&x))
                    .expect("closed singular run continues through product vertices");
                visited.insert(next_edge);
                cur = other_end(self, next_edge, cur);
                run.push(next_edge);
            }
            strata.push(SingularStratum::Edge(self.edge_stratum(run, true, None)));
        }

        // Essential vertices last, in vertex order.
        for &v in &essential {
            let link = VertexLink::of_vertex(self, v);
            let cone_angles = link.cone_points(tols.tol_angle).iter().map(|&(_, a)| a).collect();
            let decision = vertex_decisions
                .iter()
                .find(|(w, _)| *w == v)
                .map(|(_, d)| d.clone())
                .unwrap();
            strata.push(SingularStratum::Vertex(VertexStratum {
                vertex: v,
                incident_tri_edges: incident[&v].clone(),
                link_area: link.area(),
                link_cone_angles: cone_angles,
                decision,
            }));
        }

        let (nonneg, worst, theta) = self.is_nonnegatively_curved(tols.tol_angle);
        debug_assert!(visited == singular_set);
        StrataAnalysis {
            strata,
            vertex_decisions,
            worst_edge: (worst, theta),
            nonneg,
        }
    }

    fn edge_stratum(
        &self,
        tri_edges: Vec<usize>,
        closed: bool,
        endpoints: Option<(usize, usize)>,
    ) -> EdgeStratum {
        let thetas: Vec<f64> = tri_edges.iter().map(|&e| self.edges()[e].theta).collect();
        let theta = thetas.iter().sum::<f64>() / thetas.len() as f64;
        let spread = thetas.iter().fold(f64::MIN, |a, &x| a.max(x))
            - thetas.iter().fold(f64::MAX, |a, &x| a.min(x));
        let length = tri_edges.iter().map(|&e| self.edges()[e].length).sum();
        EdgeStratum {
            closed,
            theta,
            omega: std::f64::consts::TAU - theta,
            length,
            tri_edges,
            endpoints,
            theta_spread: spread,
        }
    }
}

fn other_end(complex: &PolyhedralComplex, edge: usize, from: usize) -> usize {
    let (a, b) = complex.edges()[edge].verts;
    if a == from {
        b
    } else {
        a
    }
}
