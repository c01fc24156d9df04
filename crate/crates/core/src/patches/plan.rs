//! The smoothing planner: per-stratum collar scales chosen so that collars
//! stay disjoint, the certified Gromov-Hausdorff bound meets the `1/(2n)`
//! target, and the pinching sweep passes at `eps_pinch = 1/n`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{EdgeStratum, PolyhedralComplex, StrataAnalysis};
use crate::curvature::{verify_patch_pinching, PinchSample};
use crate::ghdist::{
    choose_eps_for_target, edge_bound_constant, vertex_bound_constant, StratumGhInput,
};
use crate::profiles::CollarFamily;

use super::{ClosedEdgePatch, OpenEdgePatch, PatchError, RotationalCone, VertexPatch};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("complex is negatively curved (edge {edge} has cone angle {theta}); smoothing needs nonnegative curvature")]
    NegativelyCurved { edge: usize, theta: f64 },
    #[error(transparent)]
    Patch(#[from] PatchError),
    #[error("pinching sweep still fails after {halvings} halvings on stratum {stratum}")]
    PinchingUnreachable { stratum: usize, halvings: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    pub family: CollarFamily,
    /// Verification grid for open-edge sweeps.
    pub grid: (usize, usize),
    pub tol_curv: f64,
    /// Radial samples on closed-edge patches.
    pub closed_edge_samples: usize,
    /// Sphere samples per radius shell on vertex patches.
    pub vertex_samples: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            family: CollarFamily::Quartic,
            grid: (200, 200),
            tol_curv: 1e-8,
            closed_edge_samples: 200,
            vertex_samples: 64,
        }
    }
}

// serde support for CollarFamily lives here to keep profiles free of serde.
impl Serialize for CollarFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for CollarFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePlanEntry {
    /// Index into the analysis' strata list.
    pub stratum: usize,
    pub closed: bool,
    pub theta: f64,
    pub slope: f64,
    pub length: f64,
    pub separation: f64,
    pub eps: f64,
    pub gh_bound: f64,
    /// Halvings forced by the pinching sweep beyond the GH/separation scale.
    pub pinching_halvings: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexPlanEntry {
    pub stratum: usize,
    pub vertex_label: String,
    pub link_area: f64,
    /// Slope of the rotational stand-in cone matched to the link area.
    pub slope: f64,
    pub separation: f64,
    pub delta: f64,
    pub gh_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingPlan {
    pub n: u32,
    /// Pinching parameter `1/n` the verification ran at.
    pub eps_pinch: f64,
    pub family: CollarFamily,
    pub edges: Vec<EdgePlanEntry>,
    pub vertices: Vec<VertexPlanEntry>,
    /// Certified combined GH bound (maximum over strata, `< 1/(2n)`).
    pub gh_bound: f64,
    /// Measured uniform lower sectional-curvature bound over the sweep.
    pub kappa: f64,
    pub min_margin: f64,
    pub pinched: bool,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

/// Distance from an edge stratum to the rest of the complex, measured as the
/// shortest incident triangulation edge that is not part of the stratum.
pub fn edge_separation(complex: &PolyhedralComplex, stratum: &EdgeStratum) -> f64 {
    let own: BTreeSet<usize> = stratum.tri_edges.iter().copied().collect();
    let verts: BTreeSet<usize> = stratum
        .tri_edges
        .iter()
        .flat_map(|&e| {
            let (a, b) = complex.edges()[e].verts;
            [a, b]
        })
        .collect();
    complex
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, e)| !own.contains(i) && (verts.contains(&e.verts.0) || verts.contains(&e.verts.1)))
        .map(|(_, e)| e.length)
        .fold(f64::INFINITY, f64::min)
}

/// Size of the conic neighborhood at a vertex: its shortest incident edge.
pub fn vertex_separation(complex: &PolyhedralComplex, v: usize) -> f64 {
    complex
        .edges()
        .iter()
        .filter(|e| e.verts.0 == v || e.verts.1 == v)
        .map(|e| e.length)
        .fold(f64::INFINITY, f64::min)
}

/// Planner-facing geometry of the edge strata, in strata order.
pub fn edge_gh_inputs(
    complex: &PolyhedralComplex,
    analysis: &StrataAnalysis,
) -> Vec<StratumGhInput> {
    analysis
        .edge_strata()
        .map(|s| {
            let k = super::cone_slope(s.theta).expect("nonneg curvature gives theta in (0, 2pi]");
            StratumGhInput {
                slope: k,
                min_slope: k,
                separation: edge_separation(complex, s),
                is_vertex: false,
            }
        })
        .collect()
}

/// Choose per-stratum scales, build the patches, run the pinching sweep at
/// `eps_pinch = 1/n`, and certify the combined GH bound.
///
/// The `1/(2n)` proximity budget is split equally between the edge pass and
/// the vertex pass. Essential-vertex cones are represented by rotational
/// stand-ins matched to the link area (the Alexandrov embedding of the true
/// cone is not computed); this is recorded in the plan notes.
pub fn plan_smoothing(
    complex: &PolyhedralComplex,
    analysis: &StrataAnalysis,
    n: u32,
    opts: &PlanOptions,
) -> Result<SmoothingPlan, PlanError> {
    assert!(n >= 1);
    if !analysis.nonneg {
        let (edge, theta) = analysis.worst_edge;
        return Err(PlanError::NegativelyCurved { edge, theta });
    }
    let eps_pinch = 1.0 / n as f64;
    let total_budget = 0.5 * eps_pinch; // 1/(2n)
    let edge_budget = 0.5 * total_budget;
    let vertex_budget = 0.5 * total_budget;

    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    for (v, d) in &analysis.vertex_decisions {
        if d.near_tolerance {
            warnings.push(format!(
                "vertex {}: suspension test within 10x of tolerance",
                complex.label(*v)
            ));
        }
    }

    // --- Edge strata ---
    let edge_inputs = edge_gh_inputs(complex, analysis);
    let base_eps = choose_eps_for_target(&edge_inputs, edge_budget);
    let ratio_target = eps_pinch / 3.0;

    let mut edges = Vec::new();
    let mut samples: Vec<PinchSample> = Vec::new();
    let mut sweep_memo: BTreeMap<(u64, u64, u64), super::SweepStats> = BTreeMap::new();

    let edge_strata: Vec<(usize, &EdgeStratum)> = analysis
        .strata
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match s {
            crate::complex::SingularStratum::Edge(e) => Some((i, e)),
            _ => None,
        })
        .collect();

    for (pos, &(stratum_idx, stratum)) in edge_strata.iter().enumerate() {
        let input = edge_inputs[pos];
        let mut eps = base_eps[pos];
        let mut halvings = 0u32;
        if input.separation <= 0.0 || !eps.is_finite() || eps <= 0.0 {
            // Separated strata are guaranteed for valid manifolds; anything
            // else is an input-geometry defect.
            return Err(PlanError::PinchingUnreachable { stratum: stratum_idx, halvings: 0 });
        }

        if !stratum.closed {
            // Refine eps until the sweep meets the margin-sufficient ratio
            // sup |k1| / k2 <= eps_pinch / 3 with the sign pattern intact.
            loop {
                let key = (stratum.theta.to_bits(), eps.to_bits(), stratum.length.to_bits());
                let stats = *sweep_memo.entry(key).or_insert_with(|| {
                    OpenEdgePatch::with_default_collar(
                        stratum.theta,
                        eps,
                        stratum.length,
                        opts.family,
                    )
                    .expect("stratum parameters are valid")
                    .sweep(opts.grid.0, opts.grid.1, opts.tol_curv)
                });
                if stats.sign_pattern_ok(opts.tol_curv) && stats.sup_ratio <= ratio_target {
                    break;
                }
                eps *= 0.5;
                halvings += 1;
                if halvings > 60 {
                    return Err(PlanError::PinchingUnreachable {
                        stratum: stratum_idx,
                        halvings,
                    });
                }
            }
        }

        let gh = edge_bound_constant(input.slope) * eps;
        if (eps - input.separation / (4.0 * (1.0 + input.slope * input.slope).sqrt())).abs()
            < f64::EPSILON * eps.abs().max(1.0)
        {
            notes.push(format!(
                "stratum {stratum_idx}: collar capped by separation/4 heuristic (separation {})",
                input.separation
            ));
        }

        // Verification samples at the final scale.
        if stratum.closed {
            let patch = ClosedEdgePatch::new(stratum.theta, eps, opts.family)?;
            for r in patch.sample_radii(opts.closed_edge_samples, 2.0 * eps) {
                samples.push(patch.sample(r)?.pinch_sample(&format!("closed-edge-{stratum_idx}")));
            }
        } else {
            let patch = OpenEdgePatch::with_default_collar(
                stratum.theta,
                eps,
                stratum.length,
                opts.family,
            )?;
            for s in patch.grid_samples(opts.grid.0, opts.grid.1) {
                samples.push(s.pinch_sample(&format!("open-edge-{stratum_idx}")));
            }
        }

        edges.push(EdgePlanEntry {
            stratum: stratum_idx,
            closed: stratum.closed,
            theta: stratum.theta,
            slope: input.slope,
            length: stratum.length,
            separation: input.separation,
            eps,
            gh_bound: gh,
            pinching_halvings: halvings,
        });
    }

    // --- Vertex strata ---
    let mut vertices = Vec::new();
    let vertex_strata: Vec<(usize, &crate::complex::VertexStratum)> = analysis
        .strata
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match s {
            crate::complex::SingularStratum::Vertex(v) => Some((i, v)),
            _ => None,
        })
        .collect();

    let mut vertex_memo: BTreeMap<(u64, u64), Vec<PinchSample>> = BTreeMap::new();
    for &(stratum_idx, vs) in &vertex_strata {
        let cone = RotationalCone::from_link_area(vs.link_area)?;
        let k = cone.k;
        notes.push(format!(
            "vertex {}: rotational stand-in slope {k:.6} from link area {:.6} (Alexandrov embedding not computed)",
            complex.label(vs.vertex),
            vs.link_area
        ));
        let separation = vertex_separation(complex, vs.vertex);
        let input = StratumGhInput {
            slope: k,
            min_slope: k,
            separation,
            is_vertex: true,
        };
        let delta = choose_eps_for_target(&[input], vertex_budget)[0];
        let gh = vertex_bound_constant(k, k) * delta;

        let key = (k.to_bits(), delta.to_bits());
        let shell_samples = match vertex_memo.get(&key) {
            Some(s) => s.clone(),
            None => {
                let patch = VertexPatch::new(Box::new(cone), delta)?;
                let r_exact = patch.exact_cone_radius();
                let mut out = Vec::new();
                out.push(
                    patch
                        .sample(&nalgebra::Vector3::zeros())?
                        .pinch_sample("vertex"),
                );
                for frac in [0.25, 0.5, 0.75, 1.0, 1.25] {
                    for s in patch.sphere_samples(frac * r_exact, opts.vertex_samples)? {
                        out.push(s.pinch_sample("vertex"));
                    }
                }
                vertex_memo.insert(key, out.clone());
                out
            }
        };
        for mut s in shell_samples {
            s.patch = format!("vertex-{stratum_idx}");
            samples.push(s);
        }

        vertices.push(VertexPlanEntry {
            stratum: stratum_idx,
            vertex_label: complex.label(vs.vertex).to_string(),
            link_area: vs.link_area,
            slope: k,
            separation,
            delta,
            gh_bound: gh,
        });
    }

    // --- Combined verdicts ---
    let report = verify_patch_pinching(samples, eps_pinch, None);
    let gh_bound = edges
        .iter()
        .map(|e| e.gh_bound)
        .chain(vertices.iter().map(|v| v.gh_bound))
        .fold(0.0, f64::max);
    let (kappa, min_margin) = if report.samples == 0 {
        (0.0, 0.0)
    } else {
        (report.min_sec, report.min_margin)
    };

    Ok(SmoothingPlan {
        n,
        eps_pinch,
        family: opts.family,
        edges,
        vertices,
        gh_bound,
        kappa,
        min_margin,
        pinched: min_margin >= 0.0,
        notes,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::AnalysisTolerances;
    use crate::fixtures;

    fn quick_opts() -> PlanOptions {
        PlanOptions {
            grid: (60, 60),
            closed_edge_samples: 60,
            vertex_samples: 32,
            ..PlanOptions::default()
        }
    }

    #[test]
    fn doubled_cube_plan() {
        let complex = fixtures::doubled_cube();
        let analysis = complex.singular_strata(&AnalysisTolerances::default());
        let plan = plan_smoothing(&complex, &analysis, 10, &quick_opts()).unwrap();
        assert_eq!(plan.edges.len(), 12);
        assert_eq!(plan.vertices.len(), 8);
        assert!(plan.gh_bound < 0.05, "bound {}", plan.gh_bound);
        assert!(plan.pinched, "min margin {}", plan.min_margin);
        assert!(plan.kappa < 0.0, "blend region carries negative directions");
        for v in &plan.vertices {
            assert!((v.slope - 3.0f64.sqrt()).abs() < 1e-9, "corner stand-in slope");
        }
    }

    #[test]
    fn doubling_n_halves_scales_and_bound() {
        let complex = fixtures::doubled_cube();
        let analysis = complex.singular_strata(&AnalysisTolerances::default());
        let p10 = plan_smoothing(&complex, &analysis, 10, &quick_opts()).unwrap();
        let p20 = plan_smoothing(&complex, &analysis, 20, &quick_opts()).unwrap();
        for (a, b) in p10.edges.iter().zip(&p20.edges) {
            assert!(b.eps <= a.eps / 2.0 + 1e-15, "{} vs {}", b.eps, a.eps);
        }
        assert!(p20.gh_bound <= p10.gh_bound / 2.0 + 1e-15);
        // kappa is the eps-independent constant of property (2).
        assert!(
            (p20.kappa - p10.kappa).abs() <= 0.1 * p10.kappa.abs(),
            "kappa moved: {} vs {}",
            p10.kappa,
            p20.kappa
        );
    }

    #[test]
    fn flat_torus_empty_plan() {
        let complex = fixtures::flat_torus_3();
        let analysis = complex.singular_strata(&AnalysisTolerances::default());
        let plan = plan_smoothing(&complex, &analysis, 7, &quick_opts()).unwrap();
        assert!(plan.edges.is_empty() && plan.vertices.is_empty());
        assert_eq!(plan.gh_bound, 0.0);
        assert!(plan.pinched);
    }

    #[test]
    fn negatively_curved_input_refused() {
        let complex = fixtures::join_c3_c6();
        let analysis = complex.singular_strata(&AnalysisTolerances::default());
        match plan_smoothing(&complex, &analysis, 5, &quick_opts()) {
            Err(PlanError::NegativelyCurved { theta, .. }) => {
                assert!(theta > std::f64::consts::TAU);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn closed_edge_plan_pillow() {
        let complex = fixtures::pillow_circle_product(3);
        let analysis = complex.singular_strata(&AnalysisTolerances::default());
        let plan = plan_smoothing(&complex, &analysis, 10, &quick_opts()).unwrap();
        assert_eq!(plan.edges.len(), 4);
        assert!(plan.edges.iter().all(|e| e.closed));
        assert!(plan.vertices.is_empty());
        // Products are pinched for every eps with min Sec = 0.
        assert!(plan.pinched);
        assert!(plan.kappa.abs() < 1e-12);
    }
}
