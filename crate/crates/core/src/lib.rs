//! Analysis of singularities of 3-dimensional polyhedral manifolds, the
//! edge/vertex smoothing patch constructions, and numerical certification of
//! their curvature and Gromov-Hausdorff proximity properties.
//!
//! Modules:
//! * [`complex`] — triangulated closed polyhedral 3-manifolds and their
//!   singular structure (essential edges and vertices).
//! * [`profiles`] — the collar, cap and plateau functions the smoothings are
//!   built from.
//! * [`patches`] — closed-edge, open-edge and vertex smoothing patches with
//!   principal curvatures, plus the smoothing planner.
//! * [`curvature`] — 3-dimensional curvature operators: sectional/scalar
//!   curvature, pinching margins, the Gauss equation, cosectional
//!   decompositions.
//! * [`ghdist`] — exact Gromov-Hausdorff distance on tiny spaces and
//!   certified bounds for the smoothing perturbation.
//! * [`flow2d`] — rotationally symmetric Ricci flow on sphere-type surfaces
//!   (the doubled smoothed cap).
//! * [`fixtures`] — the canonical input corpus.

pub mod complex;
pub mod curvature;
pub mod fixtures;
pub mod flow2d;
pub mod ghdist;
pub mod math;
pub mod patches;
pub mod profiles;

pub use complex::{AnalysisTolerances, PolyhedralComplex, SingularStratum};
pub use curvature::{gauss_tensor, CurvatureTensor3};
pub use flow2d::ConformalSphereMetric;
pub use ghdist::{FiniteMetricSpace, GhBound};
pub use patches::{plan_smoothing, PatchSample, SmoothingPlan};
pub use profiles::{CapFunction, CollarFamily, CollarProfile, PlateauFunction};
