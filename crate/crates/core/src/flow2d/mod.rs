//! Rotationally symmetric 2-dimensional Ricci flow on sphere-type surfaces,
//! in conformal gauge over the round sphere: the metric is
//! `e^{2u} g_round` with `u` a function of the polar angle only, and the flow
//! is the scalar parabolic equation `du/dt = -K = -e^{-2u} (1 - Lap u)`.
//!
//! The gauge reduces the flow to one dimension with no mesh motion; the
//! state is the conformal factor on a uniform polar grid.

mod init;
mod run;

pub use init::init_from_cap;
pub use run::{run, FlowRun, RunOptions, Stepper};

use thiserror::Error;

use super::patches::PatchError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("cone angle {theta} is within 0.1 rad of 2 pi: the doubled cap degenerates (curvature concentrates at the equatorial seam)")]
    NearFlat { theta: f64 },
    #[error(transparent)]
    Patch(#[from] PatchError),
    #[error("initial metric failed validation: {0}")]
    BadInit(String),
    #[error("quadrature failure on meridian interval [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },
    #[error("step size collapsed after {halvings} halvings at t = {t}")]
    StepCollapse { halvings: u32, t: f64 },
    #[error("grid needs an even cell count of at least 16, got {0}")]
    BadGrid(usize),
}

/// Axisymmetric metric `e^{2u} g_round` on the 2-sphere, sampled on the
/// uniform polar grid `phi_i = i pi / n`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalSphereMetric {
    /// Conformal factor at the nodes.
    pub u: Vec<f64>,
    /// Number of cells (nodes minus one); even.
    n: usize,
    /// Mollification applied to the equatorial seam at construction, if any:
    /// `(tau, passes)` of the implicit smoothing `(I - tau Lap) u_new = u`.
    pub seam_smoothing: Option<(f64, u32)>,
}

impl ConformalSphereMetric {
    pub fn new(u: Vec<f64>) -> Result<Self, FlowError> {
        let n = u.len().saturating_sub(1);
        if n < 16 || n % 2 != 0 {
            return Err(FlowError::BadGrid(n));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(FlowError::BadInit("nonfinite conformal factor".into()));
        }
        Ok(Self { u, n, seam_smoothing: None })
    }

    /// The round sphere of the given radius: `u = ln radius`.
    pub fn round_sphere(radius: f64, n: usize) -> Result<Self, FlowError> {
        Self::new(vec![radius.ln(); n + 1])
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        std::f64::consts::PI / self.n as f64
    }

    pub fn angle(&self, i: usize) -> f64 {
        std::f64::consts::PI * i as f64 / self.n as f64
    }

    /// Axisymmetric round-sphere Laplacian `u'' + cot(phi) u'` with the
    /// L'Hopital pole limit `2 u''`.
    pub fn laplacian(&self) -> Vec<f64> {
        laplacian_of(&self.u, self.n)
    }

    /// Gauss curvature `K = e^{-2u} (1 - Lap u)` at the nodes.
    pub fn gauss_curvature(&self) -> Vec<f64> {
        let lap = self.laplacian();
        self.u
            .iter()
            .zip(&lap)
            .map(|(&u, &l)| (-2.0 * u).exp() * (1.0 - l))
            .collect()
    }

    /// Total area `2 pi int e^{2u} sin(phi) dphi`.
    ///
    /// Trapezoid quadrature: the metric is only C^{1,1} across the doubled
    /// cap's seam, and the trapezoid rule integrates the grid's concentrated
    /// curvature spikes with the exact delta mass (Simpson would not).
    pub fn area(&self) -> f64 {
        std::f64::consts::TAU
            * trapezoid(self.n, self.spacing(), |i| {
                (2.0 * self.u[i]).exp() * self.angle(i).sin()
            })
    }

    /// Total curvature `int K dA`; Gauss-Bonnet demands `4 pi`.
    ///
    /// `int (1 - Lap u) dA_round` splits as `4 pi` (exact) minus the
    /// Laplacian part, which is quadratured; only the latter carries
    /// discretization error.
    pub fn total_curvature(&self) -> f64 {
        let lap = self.laplacian();
        4.0 * std::f64::consts::PI
            - std::f64::consts::TAU
                * trapezoid(self.n, self.spacing(), |i| lap[i] * self.angle(i).sin())
    }

    /// Meridian distance between polar angles at node indices `i <= j`:
    /// `int e^u dphi` along the common meridian.
    pub fn meridian_distance(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let h = self.spacing();
        // Trapezoid on the node range.
        let mut sum = 0.0;
        for k in i..j {
            sum += 0.5 * h * (self.u[k].exp() + self.u[k + 1].exp());
        }
        sum
    }

    /// Nearest node to a polar angle.
    pub fn node_at(&self, phi: f64) -> usize {
        ((phi / self.spacing()).round() as usize).min(self.n)
    }
}

pub(crate) fn laplacian_of(u: &[f64], n: usize) -> Vec<f64> {
    let h = std::f64::consts::PI / n as f64;
    let h2 = h * h;
    let mut out = vec![0.0; n + 1];
    out[0] = 4.0 * (u[1] - u[0]) / h2;
    out[n] = 4.0 * (u[n - 1] - u[n]) / h2;
    for i in 1..n {
        let phi = h * i as f64;
        let upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
        let up = (u[i + 1] - u[i - 1]) / (2.0 * h);
        out[i] = upp + phi.tan().recip() * up;
    }
    out
}

pub(crate) fn trapezoid(n: usize, h: f64, f: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.5 * (f(0) + f(n));
    for i in 1..n {
        sum += f(i);
    }
    sum * h
}

/// `K[eps]`-pinching of the product metric `(surface) x R`: the sectional
/// values are `{K, 0, 0}` and the scalar curvature is `2K`, so the margin is
/// `min(K, 0) + eps K` and the product is pinched exactly when `K >= 0`.
pub fn product_pinching(k_gauss: f64, eps: f64) -> bool {
    assert!(eps >= 0.0, "pinching parameter must be nonnegative");
    k_gauss.min(0.0) + eps * k_gauss >= 0.0
}
