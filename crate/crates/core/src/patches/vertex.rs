//! Vertex smoothing: the graph `w = psi_delta(F(x))` over 3-space, where `F`
//! is a nonnegative convex positively-1-homogeneous function whose graph is
//! the cone at the vertex. The plateau flattens the tip; beyond `F = 2 delta`
//! the graph is the exact cone.
//!
//! The cone embedding itself is supplied by the caller (existence is known
//! but non-constructive); rotational cones and smoothed maxima of linear
//! functionals are provided as built-ins.

use nalgebra::{Matrix3, Vector3};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::math::generalized_eig3;
use crate::profiles::PlateauFunction;

use super::{Curvatures, PatchError, PatchKind, PatchSample};

/// A nonnegative convex positively-1-homogeneous graph function on 3-space,
/// smooth away from the origin, with `F(0) = 0`.
///
/// Convexity and homogeneity are the caller's responsibility; patch sampling
/// verifies convexity pointwise and reports violations.
pub trait ConvexGraph: Send + Sync {
    fn value(&self, x: &Vector3<f64>) -> f64;
    /// Gradient at `x != 0`.
    fn gradient(&self, x: &Vector3<f64>) -> Vector3<f64>;
    /// Hessian at `x != 0`.
    fn hessian(&self, x: &Vector3<f64>) -> Matrix3<f64>;
    /// (min, max) slope over unit directions; both must be positive.
    fn slope_range(&self) -> (f64, f64);
    fn name(&self) -> String;
}

/// The round cone `F(x) = k |x|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationalCone {
    pub k: f64,
}

impl RotationalCone {
    pub fn new(k: f64) -> Result<Self, PatchError> {
        if !(k > 0.0) {
            return Err(PatchError::DegenerateGraph(k));
        }
        Ok(Self { k })
    }

    /// The cone whose link (a round sphere scaled by `1 / sqrt(1 + k^2)`)
    /// has the given area: `k = sqrt(4 pi / area - 1)`.
    pub fn from_link_area(area: f64) -> Result<Self, PatchError> {
        if !(area > 0.0 && area < 4.0 * std::f64::consts::PI) {
            return Err(PatchError::DegenerateGraph(area));
        }
        Self::new((4.0 * std::f64::consts::PI / area - 1.0).sqrt())
    }
}

impl ConvexGraph for RotationalCone {
    fn value(&self, x: &Vector3<f64>) -> f64 {
        self.k * x.norm()
    }

    fn gradient(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.k * x / x.norm()
    }

    fn hessian(&self, x: &Vector3<f64>) -> Matrix3<f64> {
        let r = x.norm();
        let u = x / r;
        (Matrix3::identity() - u * u.transpose()) * (self.k / r)
    }

    fn slope_range(&self) -> (f64, f64) {
        (self.k, self.k)
    }

    fn name(&self) -> String {
        format!("rotational(k={})", self.k)
    }
}

/// Homogeneous smoothing of `max_i <a_i, x>`: the 4-norm of the positive
/// parts, `F(x) = (sum_i <a_i, x>_+^4)^{1/4}`. Convex, positively
/// 1-homogeneous, and C^2 away from 0 provided the `a_i` positively span.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedMaxCone {
    normals: Vec<Vector3<f64>>,
    slope_range: (f64, f64),
}

impl SmoothedMaxCone {
    pub fn new(normals: Vec<Vector3<f64>>) -> Result<Self, PatchError> {
        let mut cone = Self { normals, slope_range: (0.0, 0.0) };
        let (lo, hi) = cone.sample_slopes();
        if !(lo > 1e-9) {
            return Err(PatchError::DegenerateGraph(lo));
        }
        cone.slope_range = (lo, hi);
        Ok(cone)
    }

    /// Seeded random instance: four tetrahedral base functionals (which
    /// positively span) plus `extra` random ones.
    pub fn random(seed: u64, extra: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = 1.0 / 3.0f64.sqrt();
        let mut normals = vec![
            Vector3::new(s, s, s),
            Vector3::new(s, -s, -s),
            Vector3::new(-s, s, -s),
            Vector3::new(-s, -s, s),
        ];
        for n in &mut normals {
            *n *= rng.random_range(0.5..1.5);
        }
        for _ in 0..extra {
            let v = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if v.norm() > 1e-3 {
                normals.push(v.normalize() * rng.random_range(0.3..1.2));
            }
        }
        Self::new(normals).expect("tetrahedral base guarantees positive slopes")
    }

    fn sample_slopes(&self) -> (f64, f64) {
        // Fibonacci sphere sweep; the slope extremes over directions.
        let n = 4000;
        let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            let dir = Vector3::new(rho * phi.cos(), rho * phi.sin(), z);
            let v = self.value(&dir);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

impl ConvexGraph for SmoothedMaxCone {
    fn value(&self, x: &Vector3<f64>) -> f64 {
        let h: f64 = self
            .normals
            .iter()
            .map(|a| a.dot(x).max(0.0).powi(4))
            .sum();
        h.powf(0.25)
    }

    fn gradient(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let h: f64 = self
            .normals
            .iter()
            .map(|a| a.dot(x).max(0.0).powi(4))
            .sum();
        let dh: Vector3<f64> = self
            .normals
            .iter()
            .map(|a| a * (4.0 * a.dot(x).max(0.0).powi(3)))
            .sum();
        0.25 * h.powf(-0.75) * dh
    }

    fn hessian(&self, x: &Vector3<f64>) -> Matrix3<f64> {
        let h: f64 = self
            .normals
            .iter()
            .map(|a| a.dot(x).max(0.0).powi(4))
            .sum();
        let dh: Vector3<f64> = self
            .normals
            .iter()
            .map(|a| a * (4.0 * a.dot(x).max(0.0).powi(3)))
            .sum();
        let d2h: Matrix3<f64> = self
            .normals
            .iter()
            .map(|a| a * a.transpose() * (12.0 * a.dot(x).max(0.0).powi(2)))
            .sum();
        // F = h^{1/4}: Hess F = 1/4 h^{-3/4} Hess h - 3/16 h^{-7/4} dh dh^T.
        0.25 * h.powf(-0.75) * d2h - 0.1875 * h.powf(-1.75) * dh * dh.transpose()
    }

    fn slope_range(&self) -> (f64, f64) {
        self.slope_range
    }

    fn name(&self) -> String {
        format!("smoothed_max({} functionals)", self.normals.len())
    }
}

/// The smoothed vertex cone `w = psi_delta(F(x))`.
pub struct VertexPatch {
    graph: Box<dyn ConvexGraph>,
    plateau: PlateauFunction,
    tol_curv: f64,
}

impl VertexPatch {
    pub fn new(graph: Box<dyn ConvexGraph>, delta: f64) -> Result<Self, PatchError> {
        let (lo, _) = graph.slope_range();
        if !(lo > 0.0) {
            return Err(PatchError::DegenerateGraph(lo));
        }
        Ok(Self {
            graph,
            plateau: PlateauFunction::new(delta)?,
            tol_curv: 1e-8,
        })
    }

    pub fn delta(&self) -> f64 {
        self.plateau.delta()
    }

    pub fn graph(&self) -> &dyn ConvexGraph {
        self.graph.as_ref()
    }

    /// Height only, for the finite-difference oracle.
    pub fn height(&self, x: &Vector3<f64>) -> f64 {
        self.plateau.jet(self.graph.value(x)).expect("F >= 0").v
    }

    /// Radius beyond which the patch coincides with the exact cone:
    /// `F >= 2 delta` holds outside `|x| = 2 delta / min_slope`.
    pub fn exact_cone_radius(&self) -> f64 {
        2.0 * self.plateau.delta() / self.graph.slope_range().0
    }

    pub fn sample(&self, x: &Vector3<f64>) -> Result<PatchSample, PatchError> {
        let s = self.graph.value(x);
        let pj = self.plateau.jet(s)?;
        let (grad, hess) = if pj.d1 == 0.0 && pj.d2 == 0.0 {
            // Plateau region (including the tip, where F is not
            // differentiable): the graph is exactly flat.
            (Vector3::zeros(), Matrix3::zeros())
        } else {
            let df = self.graph.gradient(x);
            let d2f = self.graph.hessian(x);
            (
                pj.d1 * df,
                pj.d2 * df * df.transpose() + pj.d1 * d2f,
            )
        };
        let w = (1.0 + grad.norm_squared()).sqrt();
        let metric = Matrix3::identity() + grad * grad.transpose();
        let second = hess / w;
        let k = generalized_eig3(&second, &metric);
        if k[0] < -self.tol_curv {
            return Err(PatchError::ConvexityViolation {
                min_k: k[0],
                radius: x.norm(),
            });
        }
        Ok(PatchSample {
            kind: PatchKind::Vertex,
            params: [x.x, x.y, x.z],
            point: vec![x.x, x.y, x.z, pj.v],
            normal: vec![-grad.x / w, -grad.y / w, -grad.z / w, 1.0 / w],
            curvatures: Curvatures::Hypersurface(k),
        })
    }

    /// Samples on the sphere `|x| = radius` (Fibonacci distribution).
    pub fn sphere_samples(&self, radius: f64, n: usize) -> Result<Vec<PatchSample>, PatchError> {
        let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
        (0..n)
            .map(|i| {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                let x = Vector3::new(rho * phi.cos(), rho * phi.sin(), z) * radius;
                self.sample(&x)
            })
            .collect()
    }
}

/// Finite-difference principal curvatures from heights only.
pub fn fd_vertex_curvatures(patch: &VertexPatch, x: &Vector3<f64>, h: f64) -> [f64; 3] {
    let f = |p: Vector3<f64>| patch.height(&p);
    let mut grad = Vector3::zeros();
    let mut hess = Matrix3::zeros();
    let e = [Vector3::x(), Vector3::y(), Vector3::z()];
    let f0 = f(*x);
    for i in 0..3 {
        grad[i] = (f(x + h * e[i]) - f(x - h * e[i])) / (2.0 * h);
        hess[(i, i)] = (f(x + h * e[i]) - 2.0 * f0 + f(x - h * e[i])) / (h * h);
        for j in (i + 1)..3 {
            let v = (f(x + h * e[i] + h * e[j]) - f(x + h * e[i] - h * e[j])
                - f(x - h * e[i] + h * e[j])
                + f(x - h * e[i] - h * e[j]))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let w = (1.0 + grad.norm_squared()).sqrt();
    let metric = Matrix3::identity() + grad * grad.transpose();
    generalized_eig3(&(hess / w), &metric)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_region_is_flat() {
        let patch = VertexPatch::new(Box::new(RotationalCone::new(1.5).unwrap()), 0.1).unwrap();
        let s = patch.sample(&Vector3::zeros()).unwrap();
        assert_eq!(s.curvatures, Curvatures::Hypersurface([0.0, 0.0, 0.0]));
        assert_eq!(s.point[3], 1.5 * 0.1); // plateau value 3 delta / 2
        // Still flat just inside F = delta.
        let x = Vector3::new(0.05, 0.02, -0.01);
        assert!(patch.graph().value(&x) < 0.1);
        let s2 = patch.sample(&x).unwrap();
        assert_eq!(s2.curvatures, Curvatures::Hypersurface([0.0, 0.0, 0.0]));
    }

    #[test]
    fn exact_cone_outside_two_delta() {
        let k = 1.5;
        let delta = 0.1;
        let patch = VertexPatch::new(Box::new(RotationalCone::new(k).unwrap()), delta).unwrap();
        let r = patch.exact_cone_radius() * 1.5;
        let x = Vector3::new(r, 0.0, 0.0);
        let s = patch.sample(&x).unwrap();
        // Height is the exact cone.
        assert_eq!(s.point[3], k * r);
        // Curvatures (0, c, c) with c = k / (r sqrt(1 + k^2)).
        let c = k / (r * (1.0 + k * k).sqrt());
        let Curvatures::Hypersurface([k1, k2, k3]) = s.curvatures else {
            unreachable!()
        };
        assert!(k1.abs() < 1e-14);
        assert!((k2 - c).abs() < 1e-12);
        assert!((k3 - c).abs() < 1e-12);
    }

    #[test]
    fn rotational_cone_from_link_area() {
        // Doubled-cube corner: link area pi gives the stand-in slope sqrt 3.
        let c = RotationalCone::from_link_area(std::f64::consts::PI).unwrap();
        assert!((c.k - 3.0f64.sqrt()).abs() < 1e-12);
        assert!(RotationalCone::from_link_area(4.0 * std::f64::consts::PI).is_err());
    }

    #[test]
    fn smoothed_max_is_convex_on_sphere_samples() {
        // Finite-difference oracle: min principal curvature >= -1e-8 on a
        // sphere of radius 3 delta.
        let delta = 0.05;
        for seed in [1u64, 2, 3] {
            let cone = SmoothedMaxCone::random(seed, 3);
            let patch = VertexPatch::new(Box::new(cone), delta).unwrap();
            let samples = patch.sphere_samples(3.0 * delta, 200).unwrap();
            for s in &samples {
                let Curvatures::Hypersurface([k1, _, _]) = s.curvatures else {
                    unreachable!()
                };
                assert!(k1 >= -1e-8, "seed {seed}: k1 = {k1}");
            }
            // Cross-check a handful against finite differences.
            for s in samples.iter().step_by(40) {
                let x = Vector3::new(s.params[0], s.params[1], s.params[2]);
                let fd = fd_vertex_curvatures(&patch, &x, 1e-5);
                assert!(fd[0] >= -1e-6, "fd min curvature {}", fd[0]);
            }
        }
    }

    #[test]
    fn smoothed_max_gradient_hessian_match_fd() {
        use rand::prelude::*;
        let cone = SmoothedMaxCone::random(7, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = 1e-6;
        for _ in 0..100 {
            let x = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if x.norm() < 0.3 {
                continue;
            }
            let g = cone.gradient(&x);
            for i in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let fd = (cone.value(&xp) - cone.value(&xm)) / (2.0 * h);
                assert!((g[i] - fd).abs() < 1e-7, "grad[{i}]: {} vs {fd}", g[i]);
            }
            let hess = cone.hessian(&x);
            for i in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let fd_row = (cone.gradient(&xp) - cone.gradient(&xm)) / (2.0 * h);
                for j in 0..3 {
                    assert!(
                        (hess[(i, j)] - fd_row[j]).abs() < 2e-5,
                        "hess[({i},{j})]: {} vs {}",
                        hess[(i, j)],
                        fd_row[j]
                    );
                }
            }
        }
    }

    #[test]
    fn homogeneity_of_smoothed_max() {
        let cone = SmoothedMaxCone::random(11, 5);
        let x = Vector3::new(0.3, -0.7, 0.2);
        for lambda in [0.5, 2.0, 7.3] {
            let lhs = cone.value(&(lambda * x));
            let rhs = lambda * cone.value(&x);
            assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn concave_graph_reports_violation() {
        // A "cone" that is secretly concave in one direction: F = k|x| minus
        // a quadratic-in-direction bump is not homogeneous, so emulate a bad
        // evaluator directly.
        struct Saddle;
        impl ConvexGraph for Saddle {
            fn value(&self, x: &Vector3<f64>) -> f64 {
                // 1-homogeneous but not convex: |x| times an angular wiggle.
                let r = x.norm();
                if r == 0.0 {
                    return 0.0;
                }
                r * (1.0 + 0.3 * (3.0 * (x.y / r).asin()).sin())
            }
            fn gradient(&self, x: &Vector3<f64>) -> Vector3<f64> {
                // Finite differences are fine for a test double.
                let h = 1e-6;
                let mut g = Vector3::zeros();
                for i in 0..3 {
                    let mut xp = *x;
                    let mut xm = *x;
                    xp[i] += h;
                    xm[i] -= h;
                    g[i] = (self.value(&xp) - self.value(&xm)) / (2.0 * h);
                }
                g
            }
            fn hessian(&self, x: &Vector3<f64>) -> Matrix3<f64> {
                let h = 1e-4;
                let mut m = Matrix3::zeros();
                for i in 0..3 {
                    let mut xp = *x;
                    let mut xm = *x;
                    xp[i] += h;
                    xm[i] -= h;
                    let row = (self.gradient(&xp) - self.gradient(&xm)) / (2.0 * h);
                    for j in 0..3 {
                        m[(i, j)] = row[j];
                    }
                }
                (m + m.transpose()) * 0.5
            }
            fn slope_range(&self) -> (f64, f64) {
                (0.7, 1.3)
            }
            fn name(&self) -> String {
                "saddle".into()
            }
        }

        let patch = VertexPatch::new(Box::new(Saddle), 0.05).unwrap();
        match patch.sphere_samples(0.5, 100) {
            Err(PatchError::ConvexityViolation { min_k, .. }) => {
                assert!(min_k < -1e-8);
            }
            other => panic!("nonconvex input must be reported, got {other:?}"),
        }
    }
}
