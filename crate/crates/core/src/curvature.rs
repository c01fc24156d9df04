//! 3-dimensional curvature algebra: the curvature operator on bivectors,
//! sectional and scalar curvature, the pinching margin, the Gauss equation
//! for hypersurfaces in flat 4-space, and cosectional decompositions.
//!
//! In three dimensions every nonzero bivector is simple, so the curvature
//! operator is a full symmetric 3x3 matrix in the basis `e2^e3, e3^e1,
//! e1^e2`, every bivector is a valid sectional direction, and the minimum of
//! sectional curvature equals the smallest eigenvalue.

use nalgebra::{Matrix3, Vector3};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::math::{sym3_eigen_jacobi, sym3_eigenvalues_trig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error("curvature operator must be symmetric within 1e-12 (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("sectional direction must be a nonzero bivector")]
    ZeroBivector,
    #[error("pinching parameter must be nonnegative, got {0}")]
    NegativeEpsilon(f64),
}

/// Curvature operator of a 3-dimensional tangent space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureTensor3 {
    m: Matrix3<f64>,
}

impl CurvatureTensor3 {
    pub fn new(m: Matrix3<f64>) -> Result<Self, CurvatureError> {
        let asym = (m - m.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(CurvatureError::NotSymmetric(asym));
        }
        Ok(Self { m: (m + m.transpose()) * 0.5 })
    }

    pub fn from_diagonal(d: [f64; 3]) -> Self {
        Self {
            m: Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2])),
        }
    }

    pub fn zero() -> Self {
        Self { m: Matrix3::zeros() }
    }

    pub fn identity() -> Self {
        Self { m: Matrix3::identity() }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    /// Sectional curvature in the direction of the (automatically simple)
    /// bivector `sigma`: the Rayleigh quotient of the operator.
    pub fn sectional(&self, sigma: &Vector3<f64>) -> Result<f64, CurvatureError> {
        let n2 = sigma.norm_squared();
        if n2 == 0.0 {
            return Err(CurvatureError::ZeroBivector);
        }
        Ok(sigma.dot(&(self.m * sigma)) / n2)
    }

    /// Scalar curvature: twice the trace of the operator.
    pub fn scalar(&self) -> f64 {
        2.0 * self.m.trace()
    }

    /// Smallest eigenvalue, i.e. the minimum of sectional curvature over all
    /// directions. Closed-form trigonometric solve; `lambda_min_jacobi` is
    /// the independent cross-check path.
    pub fn lambda_min(&self) -> f64 {
        sym3_eigenvalues_trig(&self.m)[0]
    }

    /// Smallest eigenvalue by cyclic Jacobi iteration.
    pub fn lambda_min_jacobi(&self) -> f64 {
        sym3_eigen_jacobi(&self.m).0[0]
    }

    /// Pinching margin `lambda_min + (eps / 2) * scalar`; the operator is
    /// `K[eps]`-pinched exactly when this is nonnegative.
    pub fn pinching_margin(&self, eps: f64) -> Result<f64, CurvatureError> {
        if eps < 0.0 {
            return Err(CurvatureError::NegativeEpsilon(eps));
        }
        Ok(self.lambda_min() + 0.5 * eps * self.scalar())
    }

    /// Decompose as a nonnegative combination of squared simple bivectors
    /// (possible iff the operator is positive semidefinite within `1e-12`),
    /// or report the offending eigenvalue.
    pub fn cosectional_decomposition(&self) -> Decomposition {
        let (vals, vecs) = sym3_eigen_jacobi(&self.m);
        if vals[0] < -1e-12 {
            return Decomposition::Indefinite { lambda_min: vals[0] };
        }
        let scale = vals.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        let terms = (0..3)
            .filter(|&i| vals[i] > 1e-13 * scale)
            .map(|i| (vals[i].max(0.0), vecs.column(i).into_owned()))
            .collect();
        Decomposition::Nonnegative(terms)
    }
}

/// Result of [`CurvatureTensor3::cosectional_decomposition`]; failure is a
/// value, not an error.
#[derive(Debug, Clone, PartialEq)]
pub enum Decomposition {
    /// Terms `(lambda_i >= 0, unit bivector sigma_i)` with
    /// `R = sum lambda_i sigma_i sigma_i^T`.
    Nonnegative(Vec<(f64, Vector3<f64>)>),
    Indefinite { lambda_min: f64 },
}

impl Decomposition {
    pub fn is_nonnegative(&self) -> bool {
        matches!(self, Decomposition::Nonnegative(_))
    }

    /// Frobenius reconstruction error against `r`; infinite for failures.
    pub fn reconstruction_error(&self, r: &CurvatureTensor3) -> f64 {
        match self {
            Decomposition::Indefinite { .. } => f64::INFINITY,
            Decomposition::Nonnegative(terms) => {
                let mut sum = Matrix3::zeros();
                for (lambda, sigma) in terms {
                    sum += sigma * sigma.transpose() * *lambda;
                }
                (sum - r.m).norm()
            }
        }
    }
}

/// Gauss equation for a hypersurface in flat 4-space: principal curvatures
/// `k1 <= k2 <= k3` give the curvature operator `diag(k2 k3, k1 k3, k1 k2)`
/// in the principal basis (`Sec(e_i ^ e_j) = k_i k_j`).
pub fn gauss_tensor(k1: f64, k2: f64, k3: f64) -> CurvatureTensor3 {
    CurvatureTensor3::from_diagonal([k2 * k3, k1 * k3, k1 * k2])
}

/// Unit bivectors drawn uniformly on the sphere of `Lambda^2`, seeded for
/// reproducibility.
pub fn random_bivectors(seed: u64, n: usize) -> Vec<Vector3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr_standard_normal;
    (0..n)
        .map(|_| {
            loop {
                let v = Vector3::new(normal(&mut rng), normal(&mut rng), normal(&mut rng));
                let n = v.norm();
                if n > 1e-6 {
                    return v / n;
                }
            }
        })
        .collect()
}

/// Standard normal via Box-Muller; avoids pulling in rand_distr for one
/// distribution.
fn rand_distr_standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}

/// One verification sample: a principal-curvature triple plus where on which
/// patch it was measured.
#[derive(Debug, Clone, PartialEq)]
pub struct PinchSample {
    /// Sorted ascending; surface (2D) samples pass `[0, k_m, k_p]` sorted.
    pub curvatures: [f64; 3],
    /// Identifies the originating patch in reports.
    pub patch: String,
    /// Parameter coordinates on the patch, e.g. `(r, t)`.
    pub coords: [f64; 2],
}

/// Pinching verdict over a sample sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PinchReport {
    pub eps: f64,
    pub samples: usize,
    pub min_margin: f64,
    pub argmin_margin: Option<PinchSample>,
    pub min_sec: f64,
    pub argmin_sec: Option<PinchSample>,
    /// `min_sec >= kappa_target`, when a target was supplied.
    pub sec_target_met: Option<bool>,
}

impl PinchReport {
    pub fn pinched(&self) -> bool {
        self.min_margin >= 0.0
    }
}

/// Apply the Gauss equation and the pinching margin at every sample; report
/// the global minima and their locations.
pub fn verify_patch_pinching<I>(samples: I, eps: f64, kappa_target: Option<f64>) -> PinchReport
where
    I: IntoIterator<Item = PinchSample>,
{
    let mut min_margin = f64::INFINITY;
    let mut min_sec = f64::INFINITY;
    let mut argmin_margin = None;
    let mut argmin_sec = None;
    let mut count = 0usize;
    for s in samples {
        count += 1;
        let [k1, k2, k3] = s.curvatures;
        let r = gauss_tensor(k1, k2, k3);
        // For a diagonal Gauss tensor lambda_min is the least pairwise
        // product; the general eigensolve keeps the path uniform.
        let sec_min = r.lambda_min();
        let margin = sec_min + 0.5 * eps * r.scalar();
        if margin < min_margin {
            min_margin = margin;
            argmin_margin = Some(s.clone());
        }
        if sec_min < min_sec {
            min_sec = sec_min;
            argmin_sec = Some(s);
        }
    }
    PinchReport {
        eps,
        samples: count,
        min_margin,
        argmin_margin,
        min_sec,
        argmin_sec,
        sec_target_met: kappa_target.map(|k| min_sec >= k),
    }
}
