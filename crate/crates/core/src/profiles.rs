//! The three one-dimensional functions the smoothing constructions are built
//! from, each with two derivatives.
//!
//! * [`CollarProfile`] — even convex `phi` with `phi(t) = |t|` exactly outside
//!   the collar, plus the rescaled family `phi_eps(t) = eps * phi(t / eps)`.
//! * [`CapFunction`] — concave `f` on `[0, len]` with exact identity collars
//!   `f(t) = t` and `f(len - t) = t` near the ends and a flat plateau around
//!   the midpoint.
//! * [`PlateauFunction`] — convex nondecreasing `psi`, constant within
//!   `delta` of zero and exactly the identity beyond `2 * delta`.
//!
//! All pieces are C^2; the quartic collar spline is the default and a
//! mollified C-infinity collar is available behind [`CollarFamily`] for
//! sensitivity studies. Junction points are exposed so samplers can place
//! grid nodes on them.

use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::math::{gauss_legendre, smoothstep};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("collar scale must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("cap parameters need 0 < collar < len/2, got collar={collar}, len={len}")]
    BadCapParams { collar: f64, len: f64 },
    #[error("plateau width must be positive, got {0}")]
    NonpositiveDelta(f64),
    #[error("evaluation point {t} outside domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },
    #[error("unknown collar family {0:?} (expected \"quartic\" or \"mollified\")")]
    UnknownFamily(String),
}

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn order(&self, order: u8) -> f64 {
        match order {
            0 => self.v,
            1 => self.d1,
            _ => self.d2,
        }
    }
}

/// Which collar spline backs `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CollarFamily {
    /// C^2 even convex quartic `3/8 + (3/4) t^2 - (1/8) t^4` on `[-1, 1]`.
    #[default]
    Quartic,
    /// C-infinity mollified `|t|`: convolution with a bump supported on
    /// `[-1, 1]`, evaluated by fixed-order Gauss-Legendre quadrature.
    Mollified,
}

impl FromStr for CollarFamily {
    type Err = ProfileError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quartic" => Ok(Self::Quartic),
            "mollified" => Ok(Self::Mollified),
            other => Err(ProfileError::UnknownFamily(other.to_string())),
        }
    }
}

impl CollarFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Quartic => "quartic",
            Self::Mollified => "mollified",
        }
    }
}

const GL_ORDER: usize = 48;

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Integrate a smooth integrand over `[a, b]` with the fixed-order rule.
fn gl_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// The bump `exp(-1 / (1 - s^2))` on `(-1, 1)`, unnormalized.
fn bump_raw(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

fn bump_normalizer() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| 1.0 / gl_integrate(bump_raw, -1.0, 1.0))
}

fn mollifier(s: f64) -> f64 {
    bump_normalizer() * bump_raw(s)
}

/// Unscaled base collar jet at `u >= 0`. Exactness outside the collar is
/// enforced structurally: `u >= 1` short-circuits to `(u, 1, 0)`.
fn collar_base_half(family: CollarFamily, u: f64) -> Jet {
    debug_assert!(u >= 0.0);
    if u >= 1.0 {
        return Jet { v: u, d1: 1.0, d2: 0.0 };
    }
    match family {
        CollarFamily::Quartic => Jet {
            v: 0.375 + 0.75 * u * u - 0.125 * u * u * u * u,
            d1: 1.5 * u - 0.5 * u * u * u,
            d2: 1.5 - 1.5 * u * u,
        },
        CollarFamily::Mollified => {
            // phi(u) = int |u - s| rho(s) ds. Since rho is even with unit
            // mass, phi(u) - u = 2 int_u^1 (s - u) rho(s) ds, a nonnegative
            // integrand: the bounds phi >= |t| and phi' <= 1 hold by
            // construction rather than by cancellation.
            let tail = gl_integrate(|s| (s - u) * mollifier(s), u, 1.0);
            let tail_mass = gl_integrate(mollifier, u, 1.0);
            Jet {
                v: u + 2.0 * tail,
                d1: 1.0 - 2.0 * tail_mass,
                d2: 2.0 * mollifier(u),
            }
        }
    }
}

/// The even convex collar function and its rescalings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollarProfile {
    family: CollarFamily,
    eps: f64,
}

impl CollarProfile {
    pub fn new(family: CollarFamily, eps: f64) -> Result<Self, ProfileError> {
        if !(eps > 0.0) {
            return Err(ProfileError::NonpositiveScale(eps));
        }
        Ok(Self { family, eps })
    }

    /// The unscaled profile (`eps = 1`).
    pub fn base(family: CollarFamily) -> Self {
        Self { family, eps: 1.0 }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn family(&self) -> CollarFamily {
        self.family
    }

    /// `phi(t)` of the unscaled base profile. Evaluates on `|t|` so evenness
    /// is exact in floating point.
    pub fn base_jet(&self, t: f64) -> Jet {
        let half = collar_base_half(self.family, t.abs());
        let sign = if t < 0.0 { -1.0 } else { 1.0 };
        Jet {
            v: half.v,
            d1: sign * half.d1,
            d2: half.d2,
        }
    }

    /// `phi_eps(t) = eps * phi(t / eps)` with the derivative scalings
    /// `phi_eps'(t) = phi'(t / eps)` and `phi_eps''(t) = phi''(t / eps) / eps`.
    pub fn jet(&self, t: f64) -> Jet {
        let u = t / self.eps;
        if u.abs() >= 1.0 {
            // Outside the collar the rescaled profile is |t| exactly.
            return Jet {
                v: t.abs(),
                d1: if t < 0.0 { -1.0 } else { 1.0 },
                d2: 0.0,
            };
        }
        let base = self.base_jet(u);
        Jet {
            v: self.eps * base.v,
            d1: base.d1,
            d2: base.d2 / self.eps,
        }
    }

    pub fn eval(&self, t: f64, order: u8) -> f64 {
        self.jet(t).order(order)
    }

    /// `mu(u) = phi(u) - u * phi'(u)` on the unscaled profile. Vanishes
    /// identically outside the collar; this is the quantity that carries the
    /// `t`-dependence of the rescaled family.
    pub fn mu(&self, u: f64) -> f64 {
        let j = self.base_jet(u);
        j.v - u * j.d1
    }

    /// `phi(0)` of the base profile.
    pub fn value_at_zero(&self) -> f64 {
        self.base_jet(0.0).v
    }

    /// Junction points of the rescaled profile on the positive axis.
    pub fn junctions(&self) -> Vec<f64> {
        vec![0.0, self.eps]
    }
}

/// The concave cap `f : [0, len] -> R`.
///
/// Piecewise: exact identity on `[0, collar]`, a concave quartic blend
/// (integrated cubic smoothstep) on `[collar, blend_end]`, a flat plateau of
/// height `plateau_height` around the midpoint, then the mirror image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapFunction {
    len: f64,
    collar: f64,
    blend_end: f64,
}

impl CapFunction {
    pub fn new(len: f64, collar: f64) -> Result<Self, ProfileError> {
        if !(len > 0.0 && collar > 0.0 && collar < 0.5 * len) {
            return Err(ProfileError::BadCapParams { collar, len });
        }
        // Keep a genuine plateau: the blend stops one fifth of the way short
        // of the midpoint so f is locally constant around len/2.
        let blend_end = 0.5 * len - 0.2 * (0.5 * len - collar);
        Ok(Self { len, collar, blend_end })
    }

    /// Cap with the default collar `len / 5`.
    pub fn with_default_collar(len: f64) -> Result<Self, ProfileError> {
        Self::new(len, len / 5.0)
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn collar(&self) -> f64 {
        self.collar
    }

    /// Height of the flat plateau, `collar + blend_width / 2`.
    pub fn plateau_height(&self) -> f64 {
        self.collar + 0.5 * (self.blend_end - self.collar)
    }

    /// The plateau interval `[blend_end, len - blend_end]`.
    pub fn plateau(&self) -> (f64, f64) {
        (self.blend_end, self.len - self.blend_end)
    }

    pub fn jet(&self, t: f64) -> Result<Jet, ProfileError> {
        if !(0.0..=self.len).contains(&t) {
            return Err(ProfileError::OutOfDomain { t, lo: 0.0, hi: self.len });
        }
        if t > 0.5 * self.len {
            let j = self.half_jet(self.len - t);
            return Ok(Jet { v: j.v, d1: -j.d1, d2: j.d2 });
        }
        Ok(self.half_jet(t))
    }

    fn half_jet(&self, t: f64) -> Jet {
        debug_assert!(t <= 0.5 * self.len);
        if t <= self.collar {
            return Jet { v: t, d1: 1.0, d2: 0.0 };
        }
        if t >= self.blend_end {
            return Jet { v: self.plateau_height(), d1: 0.0, d2: 0.0 };
        }
        let w = self.blend_end - self.collar;
        let u = (t - self.collar) / w;
        Jet {
            v: self.collar + w * (u - smoothstep::integral(u)),
            d1: 1.0 - smoothstep::value(u),
            d2: -smoothstep::deriv(u) / w,
        }
    }

    pub fn eval(&self, t: f64, order: u8) -> Result<f64, ProfileError> {
        Ok(self.jet(t)?.order(order))
    }

    /// Junction points including the domain endpoints.
    pub fn junctions(&self) -> Vec<f64> {
        vec![
            0.0,
            self.collar,
            self.blend_end,
            self.len - self.blend_end,
            self.len - self.collar,
            self.len,
        ]
    }
}

/// The convex plateau function `psi : [0, inf) -> R` used by vertex
/// smoothing: constant on `[0, delta]`, identity beyond `2 * delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauFunction {
    delta: f64,
}

impl PlateauFunction {
    pub fn new(delta: f64) -> Result<Self, ProfileError> {
        if !(delta > 0.0) {
            return Err(ProfileError::NonpositiveDelta(delta));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Constant value on the plateau, `3 * delta / 2`.
    pub fn plateau_value(&self) -> f64 {
        1.5 * self.delta
    }

    pub fn jet(&self, s: f64) -> Result<Jet, ProfileError> {
        if s < 0.0 {
            return Err(ProfileError::OutOfDomain { t: s, lo: 0.0, hi: f64::INFINITY });
        }
        let d = self.delta;
        if s <= d {
            return Ok(Jet { v: 1.5 * d, d1: 0.0, d2: 0.0 });
        }
        if s >= 2.0 * d {
            return Ok(Jet { v: s, d1: 1.0, d2: 0.0 });
        }
        let u = (s - d) / d;
        Ok(Jet {
            v: 1.5 * d + d * smoothstep::integral(u),
            d1: smoothstep::value(u),
            d2: smoothstep::deriv(u) / d,
        })
    }

    pub fn eval(&self, s: f64, order: u8) -> Result<f64, ProfileError> {
        Ok(self.jet(s)?.order(order))
    }

    pub fn junctions(&self) -> Vec<f64> {
        vec![self.delta, 2.0 * self.delta]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle for the quartic coefficients: solve the 3x3 linear
    /// system for `a + b t^2 + c t^4` from the C^2 matching conditions
    /// phi(1) = 1, phi'(1) = 1, phi''(1) = 0.
    fn quartic_coeffs_from_matching() -> (f64, f64, f64) {
        // [1 1 1][a]   [1]
        // [0 2 4][b] = [1]
        // [0 2 12][c]  [0]
        let c = -1.0 / 8.0;
        let b = -6.0 * c;
        let a = 1.0 - b - c;
        (a, b, c)
    }

    #[test]
    fn quartic_matches_derived_coefficients() {
        let (a, b, c) = quartic_coeffs_from_matching();
        assert_eq!((a, b, c), (0.375, 0.75, -0.125));
        let phi = CollarProfile::base(CollarFamily::Quartic);
        assert_eq!(phi.base_jet(0.0).v, a);
        assert_eq!(phi.base_jet(0.0).d2, 2.0 * b);
        assert!((phi.base_jet(0.0).d2 - 1.5).abs() == 0.0);
    }

    #[test]
    fn collar_is_abs_outside() {
        // phi(t) = |t| for |t| > 1.
        for family in [CollarFamily::Quartic, CollarFamily::Mollified] {
            let phi = CollarProfile::base(family);
            assert_eq!(phi.base_jet(2.0).v, 2.0);
            assert_eq!(phi.base_jet(-3.5).v, 3.5);
            assert_eq!(phi.base_jet(2.0).d1, 1.0);
        }
        // Rescaled: phi_{0.5}(2) = 2 with unit slope.
        let phi = CollarProfile::new(CollarFamily::Quartic, 0.5).unwrap();
        assert_eq!(phi.jet(2.0).v, 2.0);
        assert_eq!(phi.jet(2.0).d1, 1.0);
    }

    #[test]
    fn collar_rejects_bad_scale() {
        assert!(CollarProfile::new(CollarFamily::Quartic, 0.0).is_err());
        assert!(CollarProfile::new(CollarFamily::Quartic, -1.0).is_err());
    }

    #[test]
    fn collar_evenness_is_exact() {
        for family in [CollarFamily::Quartic, CollarFamily::Mollified] {
            let phi = CollarProfile::base(family);
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..200 {
                let t: f64 = rng.random_range(-2.0..2.0);
                assert_eq!(phi.base_jet(t).v - phi.base_jet(-t).v, 0.0);
            }
        }
    }

    #[test]
    fn collar_scaling_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let eps: f64 = rng.random_range(0.01..3.0);
            let t: f64 = rng.random_range(-4.0..4.0);
            let phi = CollarProfile::new(CollarFamily::Quartic, eps).unwrap();
            let base = CollarProfile::base(CollarFamily::Quartic);
            let lhs = phi.jet(t).v;
            let rhs = eps * base.base_jet(t / eps).v;
            assert!(
                (lhs - rhs).abs() <= 1e-15 * (1.0 + lhs.abs()),
                "eps={eps} t={t}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn collar_bounds_and_convexity() {
        for family in [CollarFamily::Quartic, CollarFamily::Mollified] {
            let phi = CollarProfile::base(family);
            for i in 0..=10_000 {
                let t = -2.0 + 4.0 * i as f64 / 10_000.0;
                let j = phi.base_jet(t);
                assert!(j.d2 >= -1e-12, "{family:?}: phi'' at {t} = {}", j.d2);
                assert!(j.d1.abs() <= 1.0 + 1e-12);
                assert!(j.v >= t.abs() - 1e-12);
            }
        }
    }

    #[test]
    fn cap_collar_values() {
        let f = CapFunction::with_default_collar(1.0).unwrap();
        let a = f.collar();
        // f(t) = t on the collar.
        assert_eq!(f.jet(a / 2.0).unwrap().v, a / 2.0);
        assert_eq!(f.jet(a / 2.0).unwrap().d1, 1.0);
        // Mirrored collar: f(t) = len - t exactly on the far collar (the
        // comparison with a/2 carries the one-ulp rounding of len - t).
        let t = 1.0 - a / 2.0;
        assert_eq!(f.jet(t).unwrap().v, 1.0 - t);
        assert!((f.jet(t).unwrap().v - a / 2.0).abs() < 1e-15);
        assert_eq!(f.jet(t).unwrap().d1, -1.0);
        // Midpoint: flat, a < m <= len/2.
        let mid = f.jet(0.5).unwrap();
        assert_eq!(mid.v, f.plateau_height());
        assert_eq!(mid.d1, 0.0);
        assert!(a < f.plateau_height() && f.plateau_height() <= 0.5);
    }

    #[test]
    fn cap_concave_positive_symmetric() {
        let f = CapFunction::with_default_collar(2.0).unwrap();
        for i in 1..10_000 {
            let t = 2.0 * i as f64 / 10_000.0;
            let j = f.jet(t).unwrap();
            assert!(j.d2 <= 1e-12, "f'' at {t} = {}", j.d2);
            assert!(j.v > 0.0);
            let tm = 2.0 - t;
            assert!((j.v - f.jet(tm).unwrap().v).abs() <= 1e-15);
        }
    }

    #[test]
    fn cap_rejects_out_of_domain() {
        let f = CapFunction::with_default_collar(1.0).unwrap();
        assert!(f.jet(-0.1).is_err());
        assert!(f.jet(1.1).is_err());
        assert!(CapFunction::new(1.0, 0.6).is_err());
    }

    #[test]
    fn plateau_junction_values() {
        let psi = PlateauFunction::new(0.3).unwrap();
        let d = 0.3;
        // Identity beyond 2 delta.
        assert_eq!(psi.jet(3.0 * d).unwrap().v, 3.0 * d);
        // Constant region.
        assert_eq!(psi.jet(d / 2.0).unwrap().d1, 0.0);
        // C^2 junction at 2 delta.
        let j = psi.jet(2.0 * d).unwrap();
        assert_eq!(j.v, 2.0 * d);
        assert_eq!(j.d1, 1.0);
        assert_eq!(j.d2, 0.0);
        // Blend side approaches the same jet.
        let jb = psi.jet(2.0 * d - 1e-9).unwrap();
        assert!((jb.v - j.v).abs() < 1e-8);
        assert!((jb.d1 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn plateau_convex_nondecreasing() {
        let psi = PlateauFunction::new(0.17).unwrap();
        for i in 0..=10_000 {
            let s = 0.6 * i as f64 / 10_000.0;
            let j = psi.jet(s).unwrap();
            assert!(j.d1 >= 0.0);
            assert!(j.d2 >= -1e-12);
        }
    }

    /// Finite-difference consistency across all three profiles: order 0 vs 1
    /// and 1 vs 2 at 1000 seeded random points each.
    #[test]
    fn finite_difference_consistency() {
        let h = 1e-6;
        let tol = |v: f64| 1e-6 * (1.0 + v.abs());

        let check = |eval: &dyn Fn(f64) -> Jet, lo: f64, hi: f64, seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..1000 {
                let t: f64 = rng.random_range(lo + 2.0 * h..hi - 2.0 * h);
                let j = eval(t);
                let d1_fd = (eval(t + h).v - eval(t - h).v) / (2.0 * h);
                assert!(
                    (d1_fd - j.d1).abs() <= tol(j.d1),
                    "d1 mismatch at {t}: fd={d1_fd} analytic={}",
                    j.d1
                );
                let d2_fd = (eval(t + h).d1 - eval(t - h).d1) / (2.0 * h);
                assert!(
                    (d2_fd - j.d2).abs() <= tol(j.d2),
                    "d2 mismatch at {t}: fd={d2_fd} analytic={}",
                    j.d2
                );
            }
        };

        for (family, seed) in [(CollarFamily::Quartic, 1u64), (CollarFamily::Mollified, 2)] {
            let phi = CollarProfile::new(family, 0.7).unwrap();
            check(&|t| phi.jet(t), -2.0, 2.0, seed);
        }
        let f = CapFunction::with_default_collar(1.0).unwrap();
        check(&|t| f.jet(t).unwrap(), 0.0, 1.0, 3);
        let psi = PlateauFunction::new(0.25).unwrap();
        check(&|s| psi.jet(s).unwrap(), 0.0, 1.0, 4);
    }

    #[test]
    fn mu_vanishes_outside_collar() {
        let phi = CollarProfile::base(CollarFamily::Quartic);
        assert_eq!(phi.mu(1.0), 0.0);
        assert_eq!(phi.mu(2.5), 0.0);
        assert!(phi.mu(0.0) == 0.375);
        // mu is nonincreasing on [0, 1] and nonnegative.
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let u = i as f64 / 100.0;
            let m = phi.mu(u);
            assert!(m >= -1e-15);
            assert!(m <= prev + 1e-15);
            prev = m;
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("quartic".parse::<CollarFamily>().unwrap(), CollarFamily::Quartic);
        assert_eq!("mollified".parse::<CollarFamily>().unwrap(), CollarFamily::Mollified);
        assert!("cubic".parse::<CollarFamily>().is_err());
    }
}
