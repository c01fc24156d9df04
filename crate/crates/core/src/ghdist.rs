//! Gromov-Hausdorff proximity: exact distance on tiny finite metric spaces
//! by pruned correspondence enumeration, first-order lower bounds, and
//! certified upper bounds for the localized smoothing perturbation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GhError {
    #[error("distance matrix must be square (row {row} has length {len}, expected {n})")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("distance matrix not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("diagonal entry {i} must be zero, got {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("negative distance at ({i}, {j})")]
    Negative { i: usize, j: usize },
    #[error("triangle inequality violated at ({i}, {j}, {k}) by {excess:e}")]
    TriangleViolation { i: usize, j: usize, k: usize, excess: f64 },
    #[error("exact enumeration caps at 7 points per space, got {n}; use the bounds instead")]
    TooLarge { n: usize },
    #[error("spaces must be nonempty")]
    Empty,
}

/// A finite metric space as a validated distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    d: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    pub fn new(d: Vec<Vec<f64>>) -> Result<Self, GhError> {
        let n = d.len();
        if n == 0 {
            return Err(GhError::Empty);
        }
        for (row, r) in d.iter().enumerate() {
            if r.len() != n {
                return Err(GhError::NotSquare { row, len: r.len(), n });
            }
        }
        for i in 0..n {
            if d[i][i] != 0.0 {
                return Err(GhError::NonzeroDiagonal { i, value: d[i][i] });
            }
            for j in 0..n {
                if d[i][j] < 0.0 {
                    return Err(GhError::Negative { i, j });
                }
                if (d[i][j] - d[j][i]).abs() > 0.0 {
                    return Err(GhError::NotSymmetric { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let excess = d[i][j] - d[i][k] - d[k][j];
                    if excess > 1e-12 {
                        return Err(GhError::TriangleViolation { i, j, k, excess });
                    }
                }
            }
        }
        Ok(Self { d })
    }

    /// Points on the real line with the induced metric.
    pub fn from_line_points(xs: &[f64]) -> Self {
        let d = xs
            .iter()
            .map(|&a| xs.iter().map(|&b| (a - b).abs()).collect())
            .collect();
        Self::new(d).expect("line metrics are valid")
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    pub fn matrix(&self) -> &Vec<Vec<f64>> {
        &self.d
    }

    pub fn diameter(&self) -> f64 {
        self.d
            .iter()
            .flat_map(|r| r.iter().copied())
            .fold(0.0, f64::max)
    }

    /// Eccentricity of each point: max distance to the others.
    pub fn eccentricities(&self) -> Vec<f64> {
        self.d
            .iter()
            .map(|r| r.iter().copied().fold(0.0, f64::max))
            .collect()
    }

    /// All pairwise distance values including the diagonal zero. The zero
    /// matters for the lower bound: a correspondence may match a genuine pair
    /// of X against a repeated point of Y.
    fn all_distances(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2 + 1);
        out.push(0.0);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.d[i][j]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    Exact,
    Upper,
    Lower,
}

/// What certifies a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    None,
    /// Minimizing correspondence as (x, y) index pairs.
    Correspondence(Vec<(usize, usize)>),
    /// The radial collar correspondence behind the smoothing bound: identity
    /// outside the collar, radial nearest matching inside.
    RadialCollar { slope: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhBound {
    pub value: f64,
    pub kind: BoundKind,
    pub witness: Witness,
}

/// Exact Gromov-Hausdorff distance between spaces of at most 7 points:
/// half the minimal max-distortion over surjective correspondences.
///
/// Every correspondence contains one of the form `graph(f) ∪ graph(g)` with
/// `f : X -> Y`, `g` defined on the y-points missed by `f`; restriction can
/// only shrink distortion, so searching those suffices. Depth-first with
/// monotone distortion pruning, parallel over the first row's choice.
pub fn gh_exact_small(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<GhBound, GhError> {
    let (m, n) = (x.len(), y.len());
    if m > 7 || n > 7 {
        return Err(GhError::TooLarge { n: m.max(n) });
    }

    let best = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut pairs = vec![(0usize, first)];
            let mut best = (f64::INFINITY, Vec::new());
            search_x(x, y, 1, 0.0, &mut pairs, &mut best);
            best
        })
        .reduce(
            || (f64::INFINITY, Vec::new()),
            |a, b| if a.0 <= b.0 { a } else { b },
        );

    Ok(GhBound {
        value: 0.5 * best.0,
        kind: BoundKind::Exact,
        witness: Witness::Correspondence(best.1),
    })
}

fn pair_distortion(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    pairs: &[(usize, usize)],
    new: (usize, usize),
) -> f64 {
    pairs
        .iter()
        .map(|&(xi, yi)| (x.distance(xi, new.0) - y.distance(yi, new.1)).abs())
        .fold(0.0, f64::max)
}

fn search_x(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    next: usize,
    current: f64,
    pairs: &mut Vec<(usize, usize)>,
    best: &mut (f64, Vec<(usize, usize)>),
) {
    if current >= best.0 {
        return;
    }
    if next == x.len() {
        let uncovered: Vec<usize> = (0..y.len())
            .filter(|&j| !pairs.iter().any(|&(_, yj)| yj == j))
            .collect();
        search_y(x, y, &uncovered, 0, current, pairs, best);
        return;
    }
    for j in 0..y.len() {
        let inc = pair_distortion(x, y, pairs, (next, j));
        let cand = current.max(inc);
        if cand < best.0 {
            pairs.push((next, j));
            search_x(x, y, next + 1, cand, pairs, best);
            pairs.pop();
        }
    }
}

fn search_y(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    uncovered: &[usize],
    next: usize,
    current: f64,
    pairs: &mut Vec<(usize, usize)>,
    best: &mut (f64, Vec<(usize, usize)>),
) {
    if current >= best.0 {
        return;
    }
    if next == uncovered.len() {
        if current < best.0 {
            *best = (current, pairs.clone());
        }
        return;
    }
    let yj = uncovered[next];
    for i in 0..x.len() {
        let inc = pair_distortion(x, y, pairs, (i, yj));
        let cand = current.max(inc);
        if cand < best.0 {
            pairs.push((i, yj));
            search_y(x, y, uncovered, next + 1, cand, pairs, best);
            pairs.pop();
        }
    }
}

/// Hausdorff distance between two finite sets of reals.
fn hausdorff_1d(a: &[f64], b: &[f64]) -> f64 {
    let one_way = |p: &[f64], q: &[f64]| -> f64 {
        p.iter()
            .map(|&x| q.iter().map(|&y| (x - y).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// First-order lower bound: the larger of the diameter gap and the
/// distance-distribution gaps (Hausdorff distance between eccentricity sets
/// and between pairwise-distance sets), each divided by two. All three are
/// valid lower bounds for any surjective correspondence.
pub fn gh_lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> GhBound {
    let diam = (x.diameter() - y.diameter()).abs();
    let ecc = hausdorff_1d(&x.eccentricities(), &y.eccentricities());
    let dist = hausdorff_1d(&x.all_distances(), &y.all_distances());
    GhBound {
        value: 0.5 * diam.max(ecc).max(dist),
        kind: BoundKind::Lower,
        witness: Witness::None,
    }
}

/// The conservative constant in the edge-smoothing bound `C(k) * eps`:
/// `4 sqrt(1 + k^2)` covers the meridian-length change
/// (`<= eps (sqrt(1+k^2) - 1)`) and collar-crossing path rerouting
/// (`<= 2 eps sqrt(1+k^2)`) of the radial correspondence that is the
/// identity outside the collar.
pub fn edge_bound_constant(slope: f64) -> f64 {
    4.0 * (1.0 + slope * slope).sqrt()
}

/// Certified upper bound for smoothing one edge stratum at collar scale
/// `eps`.
pub fn smoothing_edge_bound(slope: f64, eps: f64) -> GhBound {
    GhBound {
        value: edge_bound_constant(slope) * eps,
        kind: BoundKind::Upper,
        witness: Witness::RadialCollar { slope, scale: eps },
    }
}

/// The vertex analogue: the patch differs from the cone only where
/// `F <= 2 delta`, a region of extrinsic radius `2 delta / min_slope` and
/// meridian scale `sqrt(1 + max_slope^2)` on each sheet.
pub fn vertex_bound_constant(min_slope: f64, max_slope: f64) -> f64 {
    8.0 * (1.0 + max_slope * max_slope).sqrt() / min_slope
}

pub fn smoothing_vertex_bound(min_slope: f64, max_slope: f64, delta: f64) -> GhBound {
    GhBound {
        value: vertex_bound_constant(min_slope, max_slope) * delta,
        kind: BoundKind::Upper,
        witness: Witness::RadialCollar {
            slope: max_slope,
            scale: delta,
        },
    }
}

/// Geometry of one stratum as the planner sees it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StratumGhInput {
    /// Graph slope of the cone (edge strata) or the max slope of the vertex
    /// cone evaluator.
    pub slope: f64,
    /// Min slope; equals `slope` for rotational cones and edges.
    pub min_slope: f64,
    /// Distance to the nearest other stratum along the triangulation.
    pub separation: f64,
    /// Vertex strata take the delta-based constant.
    pub is_vertex: bool,
}

/// Largest collar scale per stratum keeping every certified bound below
/// `target` and all collars inside a quarter of their separation. Bounds
/// combine by maximum, so each stratum may use the full target.
pub fn choose_eps_for_target(strata: &[StratumGhInput], target: f64) -> Vec<f64> {
    assert!(target > 0.0);
    strata
        .iter()
        .map(|s| {
            if s.is_vertex {
                let c = vertex_bound_constant(s.min_slope, s.slope);
                // Collar radius 2 delta / min_slope stays within separation/4.
                let sep_cap = s.separation * s.min_slope / 8.0;
                (target / c).min(sep_cap)
            } else {
                let c = edge_bound_constant(s.slope);
                // Collar meridian radius eps sqrt(1+k^2) within separation/4.
                let sep_cap = s.separation / (4.0 * (1.0 + s.slope * s.slope).sqrt());
                (target / c).min(sep_cap)
            }
        })
        .collect()
}
