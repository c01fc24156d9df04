//! Closed-edge smoothing: the surface of revolution `z = k phi_eps(r)` that
//! replaces the cone `z = k r` inside the collar `r <= eps`.

use crate::math::integrate_adaptive;
use crate::profiles::{CollarFamily, CollarProfile};

use super::{ConeData, Curvatures, PatchError, PatchKind, PatchSample};

/// The smoothed cone `K'_eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedEdgePatch {
    cone: ConeData,
    profile: CollarProfile,
}

impl ClosedEdgePatch {
    pub fn new(theta: f64, eps: f64, family: CollarFamily) -> Result<Self, PatchError> {
        let cone = ConeData::from_angle(theta)?;
        if cone.slope() == 0.0 {
            return Err(PatchError::Flat);
        }
        Ok(Self {
            cone,
            profile: CollarProfile::new(family, eps)?,
        })
    }

    pub fn cone(&self) -> &ConeData {
        &self.cone
    }

    pub fn eps(&self) -> f64 {
        self.profile.eps()
    }

    /// Graph height `g(r) = k phi_eps(r)` with two derivatives.
    pub fn height_jet(&self, r: f64) -> (f64, f64, f64) {
        let j = self.profile.jet(r);
        let k = self.cone.slope();
        (k * j.v, k * j.d1, k * j.d2)
    }

    /// Meridian principal curvature `g'' / (1 + g'^2)^{3/2}`.
    pub fn meridian_curvature(&self, r: f64) -> f64 {
        let (_, g1, g2) = self.height_jet(r);
        g2 / (1.0 + g1 * g1).powf(1.5)
    }

    /// Parallel principal curvature `g' / (r sqrt(1 + g'^2))`, with the
    /// limit `g''(0) / (1 + g'(0)^2)^{3/2}` at the axis.
    pub fn parallel_curvature(&self, r: f64) -> f64 {
        if r == 0.0 {
            return self.meridian_curvature(0.0);
        }
        let (_, g1, _) = self.height_jet(r);
        g1 / (r * (1.0 + g1 * g1).sqrt())
    }

    /// Gauss curvature `kappa_m kappa_p`.
    pub fn gauss_curvature(&self, r: f64) -> f64 {
        self.meridian_curvature(r) * self.parallel_curvature(r)
    }

    pub fn sample(&self, r: f64) -> Result<PatchSample, PatchError> {
        if r < 0.0 {
            return Err(PatchError::NegativeRadius(r));
        }
        let (g, g1, _) = self.height_jet(r);
        let w = (1.0 + g1 * g1).sqrt();
        Ok(PatchSample {
            kind: PatchKind::ClosedEdge,
            params: [r, 0.0, 0.0],
            point: vec![r, 0.0, g],
            normal: vec![-g1 / w, 0.0, 1.0 / w],
            curvatures: Curvatures::Surface {
                k_m: self.meridian_curvature(r),
                k_p: self.parallel_curvature(r),
            },
        })
    }

    /// Total curvature of the cap by adaptive quadrature of `K dA`; equals
    /// the angle deficit `2 pi - theta` (Gauss-Bonnet).
    pub fn cap_total_curvature(&self, tol: f64) -> f64 {
        let eps = self.eps();
        // Area element of the surface of revolution: sqrt(1 + g'^2) r dr dphi.
        let integrand = |r: f64| -> f64 {
            let (_, g1, _) = self.height_jet(r);
            self.gauss_curvature(r) * (1.0 + g1 * g1).sqrt() * r
        };
        let breaks: Vec<f64> = self.profile.junctions();
        std::f64::consts::TAU * integrate_adaptive(&integrand, 0.0, eps, &breaks, tol)
    }

    /// Intrinsic meridian arclength from the axis: `int_0^r sqrt(1 + g'^2)`.
    pub fn meridian_arclength(&self, r: f64, tol: f64) -> f64 {
        let integrand = |x: f64| -> f64 {
            let (_, g1, _) = self.height_jet(x);
            (1.0 + g1 * g1).sqrt()
        };
        let breaks: Vec<f64> = self.profile.junctions();
        integrate_adaptive(&integrand, 0.0, r, &breaks, tol)
    }

    /// Uniform radial samples on `[0, r_max]` with a node snapped onto the
    /// collar junction.
    pub fn sample_radii(&self, n: usize, r_max: f64) -> Vec<f64> {
        snap_grid(0.0, r_max, n, &[self.eps()])
    }
}

/// Uniform grid on `[lo, hi]` with the node nearest to each breakpoint
/// replaced by it.
pub(super) fn snap_grid(lo: f64, hi: f64, n: usize, breaks: &[f64]) -> Vec<f64> {
    assert!(n >= 2);
    let mut grid: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    for &b in breaks {
        if b <= lo || b >= hi {
            continue;
        }
        let pos = (b - lo) / (hi - lo) * (n - 1) as f64;
        let idx = (pos.round() as usize).clamp(1, n - 2);
        grid[idx] = b;
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn exact_cone_outside_collar() {
        let p = ClosedEdgePatch::new(PI, 0.25, CollarFamily::Quartic).unwrap();
        let k = p.cone().slope();
        let s = p.sample(0.5).unwrap();
        // r = 2 eps: the point lies on the exact cone, flat meridian.
        assert_eq!(s.point, vec![0.5, 0.0, k * 0.5]);
        match s.curvatures {
            Curvatures::Surface { k_m, k_p } => {
                assert_eq!(k_m, 0.0);
                assert!(k_p > 0.0);
                assert_eq!(p.gauss_curvature(0.5), 0.0);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn tip_curvature_default_spline() {
        // kappa_m(0) = kappa_p(0) = k phi''(0) / eps = 3 k / (2 eps), so
        // K(0) = (3 k / (2 eps))^2.
        let eps = 0.2;
        let p = ClosedEdgePatch::new(PI, eps, CollarFamily::Quartic).unwrap();
        let k = p.cone().slope();
        let expect = 1.5 * k / eps;
        assert!((p.meridian_curvature(0.0) - expect).abs() < 1e-12);
        assert!((p.parallel_curvature(0.0) - expect).abs() < 1e-12);
        assert!((p.gauss_curvature(0.0) - expect * expect).abs() < 1e-10);
    }

    #[test]
    fn gauss_bonnet_cap() {
        // Total cap curvature equals the angle deficit for every profile and
        // scale (quadrature oracle for the paper's construction).
        for family in [CollarFamily::Quartic, CollarFamily::Mollified] {
            for theta in [PI / 2.0, PI, 1.5 * PI] {
                for eps in [0.05, 0.1, 0.2] {
                    let p = ClosedEdgePatch::new(theta, eps, family).unwrap();
                    let total = p.cap_total_curvature(1e-9);
                    assert!(
                        (total - (TAU - theta)).abs() < 1e-6,
                        "{family:?} theta={theta} eps={eps}: {total} vs {}",
                        TAU - theta
                    );
                }
            }
        }
    }

    #[test]
    fn meridian_arclength_matches_cone_outside() {
        let p = ClosedEdgePatch::new(PI, 0.1, CollarFamily::Quartic).unwrap();
        let k = p.cone().slope();
        // Beyond the collar the meridian grows at the cone rate; the collar
        // shortens it relative to the unsmoothed cone.
        let a1 = p.meridian_arclength(0.4, 1e-10);
        let a2 = p.meridian_arclength(0.5, 1e-10);
        let slant = (1.0 + k * k).sqrt();
        assert!((a2 - a1 - 0.1 * slant).abs() < 1e-8);
        assert!(a1 < 0.4 * slant);
    }

    #[test]
    fn negative_radius_rejected() {
        let p = ClosedEdgePatch::new(PI, 0.1, CollarFamily::Quartic).unwrap();
        assert!(matches!(p.sample(-0.1), Err(PatchError::NegativeRadius(_))));
        assert!(matches!(
            ClosedEdgePatch::new(TAU, 0.1, CollarFamily::Quartic),
            Err(PatchError::Flat)
        ));
    }

    #[test]
    fn snap_grid_places_breakpoints() {
        let g = snap_grid(0.0, 1.0, 11, &[0.33]);
        assert!(g.contains(&0.33));
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 1.0);
    }
}
