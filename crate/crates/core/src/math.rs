//! Small numerical kernels shared across the crate: symmetric eigensolvers,
//! quadrature, and a plain Dijkstra for link graphs.

use nalgebra::{Matrix2, Matrix3, Vector3};

/// Eigenvalues of a symmetric 3x3 matrix by the closed-form trigonometric
/// method, returned in ascending order.
///
/// This is the primary path for `lambda_min`; [`sym3_eigen_jacobi`] is the
/// independent cross-check. Diagonal input is returned exactly. For matrices
/// with a nearly repeated eigenvalue the characteristic-polynomial route
/// cannot do better than ~sqrt(eps) * scale absolute error; callers needing
/// full accuracy on degenerate spectra use the Jacobi path.
pub fn sym3_eigenvalues_trig(m: &Matrix3<f64>) -> [f64; 3] {
    let p1 = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
    if p1 == 0.0 {
        let mut d = [m[(0, 0)], m[(1, 1)], m[(2, 2)]];
        d.sort_by(f64::total_cmp);
        return d;
    }
    let q = m.trace() / 3.0;
    let p2 = (m[(0, 0)] - q).powi(2) + (m[(1, 1)] - q).powi(2) + (m[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = (m - Matrix3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let mid = 3.0 * q - hi - lo;
    [lo, mid, hi]
}

/// Eigendecomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order with matching unit eigenvectors as
/// columns. Converges to off-diagonal norm below `1e-14 * scale`.
pub fn sym3_eigen_jacobi(m: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
    let mut a = *m;
    let mut v = Matrix3::identity();
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1e-300);

    for _ in 0..64 {
        let off = (a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2)).sqrt();
        if off <= 1e-14 * scale {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq.abs() <= 1e-300 {
                continue;
            }
            // Classic Jacobi rotation annihilating a[(p,q)].
            let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                -1.0 / (-tau + (1.0 + tau * tau).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            let rot = |mat: &mut Matrix3<f64>| {
                for k in 0..3 {
                    let mkp = mat[(k, p)];
                    let mkq = mat[(k, q)];
                    mat[(k, p)] = c * mkp - s * mkq;
                    mat[(k, q)] = s * mkp + c * mkq;
                }
            };
            // A <- J^T A J, V <- V J.
            let mut at = a.transpose();
            rot(&mut at);
            a = at.transpose();
            rot(&mut a);
            rot(&mut v);
        }
    }

    let mut order = [0usize, 1, 2];
    let diag = [a[(0, 0)], a[(1, 1)], a[(2, 2)]];
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let vals = [diag[order[0]], diag[order[1]], diag[order[2]]];
    let vecs = Matrix3::from_columns(&[
        v.column(order[0]).into_owned(),
        v.column(order[1]).into_owned(),
        v.column(order[2]).into_owned(),
    ]);
    (vals, vecs)
}

/// Both eigenvalues (ascending) of the generalized symmetric problem
/// `det(A - lambda B) = 0` for 2x2 matrices with B positive definite.
pub fn generalized_eig2(a: &Matrix2<f64>, b: &Matrix2<f64>) -> [f64; 2] {
    let ca = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
    let cb = -(a[(0, 0)] * b[(1, 1)] + a[(1, 1)] * b[(0, 0)] - 2.0 * a[(0, 1)] * b[(0, 1)]);
    let cc = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    if cb == 0.0 && cc == 0.0 {
        // A vanishes (or is singular in a way that forces a double root at 0):
        // keep the zeros exact so flat regions report exactly zero curvature.
        return [0.0, 0.0];
    }
    let disc = (cb * cb - 4.0 * ca * cc).max(0.0).sqrt();
    // Citardauq pairing avoids cancellation in the small root.
    let q = -0.5 * (cb + cb.signum() * disc);
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / ca, cc / q)
    };
    if r1 <= r2 {
        [r1, r2]
    } else {
        [r2, r1]
    }
}

/// Solve `A x = lambda B x` for symmetric 3x3 `A` and SPD 3x3 `B` by reducing
/// to a standard symmetric problem with the Cholesky factor of `B`.
/// Eigenvalues ascending.
///
/// Shape operators routinely have a doubly degenerate eigenvalue (flat and
/// ruled regions), where the trigonometric solve loses half its digits, so
/// this path runs Jacobi. Eigenvalues within `1e-14 * scale` of zero are
/// snapped to exactly zero: they are indistinguishable from roundoff and the
/// flat regions of the patches are exactly flat.
pub fn generalized_eig3(a: &Matrix3<f64>, b: &Matrix3<f64>) -> [f64; 3] {
    let chol = b
        .cholesky()
        .expect("metric tensor of a graph is positive definite");
    let l_inv = chol
        .l()
        .try_inverse()
        .expect("Cholesky factor is invertible");
    let c = l_inv * a * l_inv.transpose();
    // Symmetrize against roundoff before the eigensolve.
    let c = (c + c.transpose()) * 0.5;
    let (mut vals, _) = sym3_eigen_jacobi(&c);
    let scale = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for v in &mut vals {
        if v.abs() <= 1e-14 * scale {
            *v = 0.0;
        }
    }
    vals
}

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// `breaks` lists known non-smooth points (profile junctions); the interval is
/// split there first so the adaptive recursion only ever sees smooth pieces.
pub fn integrate_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut cuts: Vec<f64> = vec![a, b];
    for &x in breaks {
        if x > a && x < b {
            cuts.push(x);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_simpson(f, w[0], w[1], tol * (w[1] - w[0]) / (b - a));
    }
    total
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cubic smoothstep `3u^2 - 2u^3` with first derivative and antiderivative.
/// Profile blends are built from these.
pub mod smoothstep {
    pub fn value(u: f64) -> f64 {
        u * u * (3.0 - 2.0 * u)
    }
    pub fn deriv(u: f64) -> f64 {
        6.0 * u * (1.0 - u)
    }
    /// Antiderivative with the integration constant fixed by `integral(0) = 0`.
    pub fn integral(u: f64) -> f64 {
        u * u * u - 0.5 * u * u * u * u
    }
}

/// Dijkstra over an adjacency list with nonnegative edge weights. Returns the
/// distance from `source` to every node (`f64::INFINITY` when unreachable).
pub fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
        }
    }

    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse(Entry(0.0, source)));
    while let Some(Reverse(Entry(d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse(Entry(nd, v)));
            }
        }
    }
    dist
}

/// Angle at the apex of a planar triangle with side `a` opposite the apex and
/// adjacent sides `b`, `c` (law of cosines, clamped).
pub fn triangle_angle(a: f64, b: f64, c: f64) -> f64 {
    (((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0)).acos()
}

/// Angle of a spherical triangle (unit sphere) at the vertex opposite side
/// `a`, with adjacent sides `b` and `c` (spherical law of cosines).
pub fn spherical_angle(a: f64, b: f64, c: f64) -> f64 {
    let cos_a = ((a.cos() - b.cos() * c.cos()) / (b.sin() * c.sin())).clamp(-1.0, 1.0);
    cos_a.acos()
}

/// Normalized midpoint of two points on the unit sphere (geodesic midpoint).
pub fn sphere_midpoint(p: &Vector3<f64>, q: &Vector3<f64>) -> Vector3<f64> {
    (p + q).normalize()
}

/// Geodesic distance between two unit vectors.
pub fn sphere_distance(p: &Vector3<f64>, q: &Vector3<f64>) -> f64 {
    // atan2 form is accurate for both tiny and near-pi separations.
    p.cross(q).norm().atan2(p.dot(q))
}
