//! The three smoothing patches as explicit embedded graphs, with first and
//! second fundamental forms and principal curvatures:
//!
//! * closed-edge: the surface of revolution `z = k phi_eps(sqrt(x^2+y^2))`,
//! * open-edge: the hypersurface `z = k phi_{eps f(t)}(sqrt(x^2+y^2))` in
//!   `(x, y, t, z)`-space,
//! * vertex: the graph `w = psi_delta(F(x))` of the plateau-composed convex
//!   cone function.
//!
//! Everything reduces to the graph formulas: metric `I + grad grad^T`, second
//! fundamental form `Hess / sqrt(1 + |grad|^2)`, shape operator eigenvalues
//! by generalized symmetric eigensolves.

mod closed_edge;
mod open_edge;
mod plan;
mod vertex;

pub use closed_edge::ClosedEdgePatch;
pub use open_edge::{fd_principal_curvatures, OpenEdgePatch, SweepStats};
pub use plan::{
    edge_gh_inputs, edge_separation, plan_smoothing, vertex_separation, EdgePlanEntry, PlanError,
    PlanOptions, SmoothingPlan, VertexPlanEntry,
};
pub use vertex::{fd_vertex_curvatures, ConvexGraph, RotationalCone, SmoothedMaxCone, VertexPatch};

use thiserror::Error;

use crate::profiles::ProfileError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatchError {
    #[error("cone angle must be positive, got {0}")]
    BadConeAngle(f64),
    #[error("cone angle {0} exceeds 2 pi: no rotational convex graph exists")]
    Hyperbolic(f64),
    #[error("cone angle is 2 pi: the cone is flat, nothing to smooth")]
    Flat,
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("t = {t} outside the open interval (0, {len}): the edge ends have conic neighborhoods and are excluded")]
    EndpointExcluded { t: f64, len: f64 },
    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(f64),
    #[error("convexity violation: sampled principal curvature {min_k} at |x| = {radius} (bad graph input)")]
    ConvexityViolation { min_k: f64, radius: f64 },
    #[error("graph evaluator must have positive minimal slope, got {0}")]
    DegenerateGraph(f64),
}

/// Rotational cone data: total angle and the slope of the graph embedding
/// `z = k sqrt(x^2 + y^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeData {
    theta: f64,
    k: f64,
}

impl ConeData {
    /// Slope from the total angle: `k = sqrt((2 pi / theta)^2 - 1)`, so the
    /// graph has total cone angle `theta = 2 pi / sqrt(1 + k^2)`.
    pub fn from_angle(theta: f64) -> Result<Self, PatchError> {
        if !(theta > 0.0) {
            return Err(PatchError::BadConeAngle(theta));
        }
        if theta > std::f64::consts::TAU {
            return Err(PatchError::Hyperbolic(theta));
        }
        let ratio = std::f64::consts::TAU / theta;
        Ok(Self {
            theta,
            k: (ratio * ratio - 1.0).max(0.0).sqrt(),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn slope(&self) -> f64 {
        self.k
    }

    /// Curvature `omega = 2 pi - theta` carried by the cone tip.
    pub fn omega(&self) -> f64 {
        std::f64::consts::TAU - self.theta
    }
}

/// Convenience wrapper for the slope formula.
pub fn cone_slope(theta: f64) -> Result<f64, PatchError> {
    ConeData::from_angle(theta).map(|c| c.slope())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchKind {
    ClosedEdge,
    OpenEdge,
    Vertex,
}

/// Principal curvature data of a sample: a pair for 2-dimensional surface
/// patches, a sorted triple for hypersurfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curvatures {
    Surface { k_m: f64, k_p: f64 },
    Hypersurface([f64; 3]),
}

/// One sampled point of a smoothing patch.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchSample {
    pub kind: PatchKind,
    /// Patch parameters: `(r, 0, 0)` for closed edges, `(r, t, 0)` for open
    /// edges, the base point `x` for vertex patches.
    pub params: [f64; 3],
    /// Embedding point, 3 or 4 coordinates.
    pub point: Vec<f64>,
    /// Unit normal in the ambient space.
    pub normal: Vec<f64>,
    pub curvatures: Curvatures,
}

impl PatchSample {
    /// The sorted principal triple of the associated 3-dimensional geometry;
    /// surface patches are products with a flat factor.
    pub fn principal_triple(&self) -> [f64; 3] {
        match self.curvatures {
            Curvatures::Surface { k_m, k_p } => {
                let mut v = [0.0, k_m, k_p];
                v.sort_by(f64::total_cmp);
                v
            }
            Curvatures::Hypersurface(k) => k,
        }
    }

    /// Convert to a pinching-verification sample.
    pub fn pinch_sample(&self, patch: &str) -> crate::curvature::PinchSample {
        crate::curvature::PinchSample {
            curvatures: self.principal_triple(),
            patch: patch.to_string(),
            coords: [self.params[0], self.params[1]],
        }
    }
}
