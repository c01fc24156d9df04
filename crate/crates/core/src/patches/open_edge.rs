//! Open-edge smoothing: the one-parameter family of cone smoothings
//! `K'_{eps f(t)} x {t}`, a hypersurface graph `z = G(r, t) =
//! k phi_{eps f(t)}(r)` over `(x, y, t)`-space in flat 4-space.
//!
//! Rotational symmetry reduces everything to the meridian half-plane: at a
//! point `(r, 0, t)` the `y`-direction decouples from the `(x, t)`-block of
//! the shape operator, so the three principal curvatures come from one scalar
//! quotient and one 2x2 generalized eigenproblem.

use nalgebra::Matrix2;
use rayon::prelude::*;

use crate::math::generalized_eig2;
use crate::profiles::{CapFunction, CollarFamily, CollarProfile};

use super::closed_edge::snap_grid;
use super::{ConeData, Curvatures, PatchError, PatchKind, PatchSample};

/// All second-order data of the graph at a meridian point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphJet {
    pub g: f64,
    pub g_r: f64,
    pub g_t: f64,
    pub g_rr: f64,
    pub g_rt: f64,
    pub g_tt: f64,
    /// Hessian entry in the rotational direction, `k phi'(u) / r` with its
    /// axis limit.
    pub g_yy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenEdgePatch {
    cone: ConeData,
    eps: f64,
    cap: CapFunction,
    base: CollarProfile,
}

impl OpenEdgePatch {
    pub fn new(
        theta: f64,
        eps: f64,
        len: f64,
        collar: f64,
        family: CollarFamily,
    ) -> Result<Self, PatchError> {
        let cone = ConeData::from_angle(theta)?;
        if cone.slope() == 0.0 {
            return Err(PatchError::Flat);
        }
        if !(eps > 0.0) {
            return Err(PatchError::Profile(
                crate::profiles::ProfileError::NonpositiveScale(eps),
            ));
        }
        Ok(Self {
            cone,
            eps,
            cap: CapFunction::new(len, collar)?,
            base: CollarProfile::base(family),
        })
    }

    pub fn with_default_collar(
        theta: f64,
        eps: f64,
        len: f64,
        family: CollarFamily,
    ) -> Result<Self, PatchError> {
        Self::new(theta, eps, len, len / 5.0, family)
    }

    pub fn cone(&self) -> &ConeData {
        &self.cone
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn cap(&self) -> &CapFunction {
        &self.cap
    }

    pub fn len(&self) -> f64 {
        self.cap.len()
    }

    /// Collar scale along the edge, `s(t) = eps f(t)`.
    pub fn scale(&self, t: f64) -> f64 {
        self.eps * self.cap.jet(t).expect("t validated by caller").v
    }

    fn check_t(&self, t: f64) -> Result<(), PatchError> {
        if !(t > 0.0 && t < self.cap.len()) {
            return Err(PatchError::EndpointExcluded { t, len: self.cap.len() });
        }
        Ok(())
    }

    /// Height only; the finite-difference oracle consumes this.
    pub fn height(&self, r: f64, t: f64) -> f64 {
        let s = self.eps * self.cap.jet(t).expect("domain checked").v;
        self.cone.slope() * s * self.base.base_jet(r / s).v
    }

    /// Analytic gradient and Hessian of the graph at `(r, t)`.
    pub fn graph_jet(&self, r: f64, t: f64) -> Result<GraphJet, PatchError> {
        self.check_t(t)?;
        if r < 0.0 {
            return Err(PatchError::NegativeRadius(r));
        }
        let k = self.cone.slope();
        let fj = self.cap.jet(t)?;
        let s = self.eps * fj.v;
        let s1 = self.eps * fj.d1;
        let s2 = self.eps * fj.d2;
        let u = r / s;
        let pj = self.base.base_jet(u);
        let mu = pj.v - u * pj.d1;

        let g_yy = if u < 1e-9 {
            k * self.base.base_jet(0.0).d2 / s
        } else {
            k * pj.d1 / r
        };

        Ok(GraphJet {
            g: k * s * pj.v,
            g_r: k * pj.d1,
            g_t: k * mu * s1,
            g_rr: k * pj.d2 / s,
            g_rt: -k * pj.d2 * u * s1 / s,
            g_tt: k * (u * u * pj.d2 * s1 * s1 / s + mu * s2),
            g_yy,
        })
    }

    /// Principal curvatures `k1 <= k2 <= k3` of the hypersurface at `(r, t)`.
    pub fn principal_curvatures(&self, r: f64, t: f64) -> Result<[f64; 3], PatchError> {
        Ok(curvatures_from_jet(&self.graph_jet(r, t)?))
    }

    pub fn sample(&self, r: f64, t: f64) -> Result<PatchSample, PatchError> {
        let j = self.graph_jet(r, t)?;
        let w = (1.0 + j.g_r * j.g_r + j.g_t * j.g_t).sqrt();
        Ok(PatchSample {
            kind: PatchKind::OpenEdge,
            params: [r, t, 0.0],
            point: vec![r, 0.0, t, j.g],
            normal: vec![-j.g_r / w, 0.0, -j.g_t / w, 1.0 / w],
            curvatures: Curvatures::Hypersurface(curvatures_from_jet(&j)),
        })
    }

    /// The verification grid: `nr x nt` nodes over
    /// `[0, r_max] x [collar/2, len - collar/2]`, with `t`-nodes snapped to
    /// the cap junctions and each row's `r`-nodes snapped to the local collar
    /// boundary `s(t)`.
    pub fn verification_grid(&self, nr: usize, nt: usize, r_max: f64) -> Vec<(f64, f64)> {
        let a = self.cap.collar();
        let len = self.cap.len();
        let t_grid = snap_grid(0.5 * a, len - 0.5 * a, nt, &self.cap.junctions());
        let mut nodes = Vec::with_capacity(nr * nt);
        for &t in &t_grid {
            let s = self.scale(t);
            for &r in &snap_grid(0.0, r_max, nr, &[s]) {
                nodes.push((r, t));
            }
        }
        nodes
    }

    /// Curvature statistics over the verification grid.
    pub fn sweep(&self, nr: usize, nt: usize, tol_curv: f64) -> SweepStats {
        let grid = self.verification_grid(nr, nt, 2.0 * self.eps);
        let stats = grid
            .par_iter()
            .map(|&(r, t)| {
                let [k1, k2, k3] = self.principal_curvatures(r, t).expect("grid in domain");
                let ratio = if k1.abs() > tol_curv { k1.abs() / k2 } else { 0.0 };
                SweepStats {
                    eps: self.eps,
                    samples: 1,
                    max_k1: k1,
                    min_k2: k2,
                    max_k2_minus_k3: k2 - k3,
                    min_k1k3: k1 * k3,
                    sup_ratio: ratio,
                }
            })
            .reduce(SweepStats::empty, SweepStats::merge);
        SweepStats { eps: self.eps, ..stats }
    }

    /// Samples over the verification grid, for pinching verification and CSV
    /// export.
    pub fn grid_samples(&self, nr: usize, nt: usize) -> Vec<PatchSample> {
        self.verification_grid(nr, nt, 2.0 * self.eps)
            .iter()
            .map(|&(r, t)| self.sample(r, t).expect("grid in domain"))
            .collect()
    }
}

/// Shape-operator eigenvalues from the graph data: the rotational direction
/// contributes `g_yy / W`; the meridian block is a 2x2 generalized
/// eigenproblem with metric `I + grad grad^T`.
pub fn curvatures_from_jet(j: &GraphJet) -> [f64; 3] {
    let w = (1.0 + j.g_r * j.g_r + j.g_t * j.g_t).sqrt();
    let kappa_y = j.g_yy / w;
    let a = Matrix2::new(j.g_rr, j.g_rt, j.g_rt, j.g_tt) / w;
    let b = Matrix2::new(
        1.0 + j.g_r * j.g_r,
        j.g_r * j.g_t,
        j.g_r * j.g_t,
        1.0 + j.g_t * j.g_t,
    );
    let [lo, hi] = generalized_eig2(&a, &b);
    let mut out = [lo, hi, kappa_y];
    out.sort_by(f64::total_cmp);
    out
}

/// Reductions of a curvature sweep; merged values are exact (min/max only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStats {
    pub eps: f64,
    pub samples: usize,
    /// max over the grid of k1 (property (1): <= tol).
    pub max_k1: f64,
    /// min over the grid of k2 (property (1): >= -tol).
    pub min_k2: f64,
    /// max over the grid of k2 - k3 (property (1): <= tol).
    pub max_k2_minus_k3: f64,
    /// min over the grid of k1 k3 (property (2): bounded below by kappa
    /// independently of eps).
    pub min_k1k3: f64,
    /// sup over the grid of |k1| / k2 where |k1| > tol (property (3): tends
    /// to 0 as eps does).
    pub sup_ratio: f64,
}

impl SweepStats {
    fn empty() -> Self {
        Self {
            eps: 0.0,
            samples: 0,
            max_k1: f64::NEG_INFINITY,
            min_k2: f64::INFINITY,
            max_k2_minus_k3: f64::NEG_INFINITY,
            min_k1k3: f64::INFINITY,
            sup_ratio: 0.0,
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            eps: self.eps.max(other.eps),
            samples: self.samples + other.samples,
            max_k1: self.max_k1.max(other.max_k1),
            min_k2: self.min_k2.min(other.min_k2),
            max_k2_minus_k3: self.max_k2_minus_k3.max(other.max_k2_minus_k3),
            min_k1k3: self.min_k1k3.min(other.min_k1k3),
            sup_ratio: self.sup_ratio.max(other.sup_ratio),
        }
    }

    /// Property (1) sign pattern at tolerance `tol`.
    pub fn sign_pattern_ok(&self, tol: f64) -> bool {
        self.max_k1 <= tol && self.min_k2 >= -tol && self.max_k2_minus_k3 <= tol
    }
}

/// Independent finite-difference shape operator from the raw embedding
/// heights; validates the analytic path.
pub fn fd_principal_curvatures(patch: &OpenEdgePatch, r: f64, t: f64, h: f64) -> [f64; 3] {
    let f = |r: f64, t: f64| patch.height(r, t);
    let g = f(r, t);
    // The graph is even in r across the axis.
    let fr = |x: f64| if x < 0.0 { f(-x, t) } else { f(x, t) };
    let g_r = (fr(r + h) - fr(r - h)) / (2.0 * h);
    let g_t = (f(r, t + h) - f(r, t - h)) / (2.0 * h);
    let g_rr = (fr(r + h) - 2.0 * g + fr(r - h)) / (h * h);
    let g_tt = (f(r, t + h) - 2.0 * g + f(r, t - h)) / (h * h);
    let g_rt = if r >= h {
        (f(r + h, t + h) - f(r + h, t - h) - f(r - h, t + h) + f(r - h, t - h)) / (4.0 * h * h)
    } else {
        // Odd reflection in r keeps the mixed stencil on the chart.
        let fv = |x: f64, tt: f64| if x < 0.0 { f(-x, tt) } else { f(x, tt) };
        (fv(r + h, t + h) - fv(r + h, t - h) - fv(r - h, t + h) + fv(r - h, t - h))
            / (4.0 * h * h)
    };
    // Rotational direction: sample the embedding off the meridian so the
    // oracle stays independent of the analytic reduction.
    let fy = |y: f64| {
        let rho = (r * r + y * y).sqrt();
        f(rho, t)
    };
    let g_yy = (fy(h) - 2.0 * g + fy(-h)) / (h * h);
    curvatures_from_jet(&GraphJet { g, g_r, g_t, g_rr, g_rt, g_tt, g_yy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn patch(theta: f64, eps: f64) -> OpenEdgePatch {
        OpenEdgePatch::with_default_collar(theta, eps, 1.0, CollarFamily::Quartic).unwrap()
    }

    #[test]
    fn cone_region_is_ruled() {
        // r >= eps f(t): the surface is the exact cone x R; two principal
        // curvatures vanish and the third is k / (r sqrt(1 + k^2)).
        let p = patch(PI, 0.1);
        let k = p.cone().slope();
        let (r, t) = (0.15, 0.5);
        assert!(r >= p.scale(t));
        let [k1, k2, k3] = p.principal_curvatures(r, t).unwrap();
        assert_eq!(k1, 0.0);
        assert_eq!(k2, 0.0);
        assert!((k3 - k / (r * (1.0 + k * k).sqrt())).abs() < 1e-14);
        // And the graph height is t-independent there.
        assert_eq!(p.height(r, 0.4), p.height(r, 0.6));
    }

    #[test]
    fn plateau_region_is_cylinder_over_smoothed_cone() {
        // f locally constant near len/2: the patch is K'_{eps m} x R; the
        // curvature triple is (0, kappa_m, kappa_p) of the 2D patch at scale
        // eps * m.
        let p = patch(PI, 0.1);
        let m = p.cap().plateau_height();
        let closed =
            super::super::ClosedEdgePatch::new(PI, 0.1 * m, CollarFamily::Quartic).unwrap();
        let t = 0.5;
        assert_eq!(p.scale(t), 0.1 * m);
        for r in [0.0, 0.02, 0.05, 0.08] {
            let [k1, k2, k3] = p.principal_curvatures(r, t).unwrap();
            let mut expect = [0.0, closed.meridian_curvature(r), closed.parallel_curvature(r)];
            expect.sort_by(f64::total_cmp);
            assert!((k1 - expect[0]).abs() < 1e-12, "r={r}");
            assert!((k2 - expect[1]).abs() < 1e-11, "r={r}: {k2} vs {}", expect[1]);
            assert!((k3 - expect[2]).abs() < 1e-11, "r={r}");
        }
    }

    #[test]
    fn endpoints_excluded() {
        let p = patch(PI, 0.1);
        assert!(matches!(
            p.sample(0.1, 0.0),
            Err(PatchError::EndpointExcluded { .. })
        ));
        assert!(matches!(
            p.sample(0.1, 1.0),
            Err(PatchError::EndpointExcluded { .. })
        ));
        assert!(p.sample(0.1, 0.5).is_ok());
    }

    #[test]
    fn sign_pattern_on_grid() {
        // Property (1): k1 <= 0 <= k2 <= k3 across the verification grid.
        for eps in [0.1, 0.05] {
            let p = patch(PI, eps);
            let stats = p.sweep(60, 60, 1e-8);
            assert!(stats.sign_pattern_ok(1e-8), "eps {eps}: {stats:?}");
            assert!(stats.min_k1k3 < 0.0, "genuinely negative directions exist");
        }
    }

    #[test]
    fn fd_oracle_matches_analytic() {
        use rand::prelude::*;
        let p = patch(PI, 0.1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let h = 1e-5;
        let mut checked = 0;
        while checked < 300 {
            let r: f64 = rng.random_range(0.0..0.2);
            let t: f64 = rng.random_range(0.15..0.85);
            // The central stencils need C^4; keep clear of the spline
            // junctions where the graph is only C^2.
            let s = p.scale(t);
            if (r - s).abs() < 200.0 * h || r < 2.0 * h {
                continue;
            }
            let near_cap_junction = p
                .cap()
                .junctions()
                .iter()
                .any(|&j| (t - j).abs() < 200.0 * h);
            if near_cap_junction {
                continue;
            }
            checked += 1;
            let analytic = p.principal_curvatures(r, t).unwrap();
            let fd = fd_principal_curvatures(&p, r, t, h);
            let scale = analytic[2].abs().max(1.0);
            for i in 0..3 {
                assert!(
                    (analytic[i] - fd[i]).abs() <= 1e-5 * scale,
                    "({r}, {t}) component {i}: analytic {} vs fd {}",
                    analytic[i],
                    fd[i]
                );
            }
        }
    }

    #[test]
    fn ratio_decreases_with_eps() {
        // Property (3): sup |k1| / k2 strictly decreases along the halving
        // schedule.
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.05, 0.025] {
            let stats = patch(PI, eps).sweep(80, 80, 1e-8);
            assert!(
                stats.sup_ratio < prev,
                "eps {eps}: ratio {} vs previous {prev}",
                stats.sup_ratio
            );
            prev = stats.sup_ratio;
        }
    }

    #[test]
    fn k1k3_stable_across_eps() {
        // Property (2): min k1 k3 is bounded below by an eps-independent
        // constant.
        let stats: Vec<SweepStats> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&e| patch(PI, e).sweep(80, 80, 1e-8))
            .collect();
        let min = stats.iter().map(|s| s.min_k1k3).fold(f64::INFINITY, f64::min);
        let max = stats.iter().map(|s| s.min_k1k3).fold(f64::NEG_INFINITY, f64::max);
        assert!(min < 0.0, "kappa is a negative constant");
        assert!(
            (max - min).abs() <= 0.2 * min.abs(),
            "variation too large: [{min}, {max}]"
        );
    }
}
