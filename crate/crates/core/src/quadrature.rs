//! One-dimensional quadrature rules.

use crate::error::{Error, Result};
use crate::linalg::tridiagonal_ql;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Nodes and weights of the `n`-point Gauss-Hermite rule for the weight
/// `e^{-t^2}` on the real line.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub-Welsch: eigenvalues of the Jacobi matrix are the nodes, squared
    /// first eigenvector components times `sqrt(pi)` the weights.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Gauss-Hermite order must be positive".into()));
        }
        let d = vec![0.0; n];
        let e: Vec<f64> = (1..=n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        let (nodes, vectors) = tridiagonal_ql(d, e, true)?;
        let vectors = vectors.expect("vectors requested");
        let root_pi = std::f64::consts::PI.sqrt();
        // column-major: the first component of eigenvector j sits at j * n
        let weights = (0..n).map(|j| root_pi * vectors[j * n].powi(2)).collect();
        Ok(Self { nodes, weights })
    }

    /// `sum_i w_i h(t_i)`, approximating `int h(t) e^{-t^2} dt`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, h: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * h(t)).sum()
    }
}

pub fn gauss_hermite(n: usize) -> Result<GaussHermite> { GaussHermite::new(n) }
