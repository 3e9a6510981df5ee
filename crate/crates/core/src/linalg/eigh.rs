//! Hermitian eigensolver.
//!
//! The matrix is reduced to a real symmetric tridiagonal form with complex
//! Householder reflections (the complex subdiagonal phases are absorbed into a
//! diagonal unitary), after which the implicit QL algorithm with Wilkinson-type
//! shifts finds the spectrum. Eigenvectors are back-transformed through both
//! stages.

use num_complex::Complex64 as C64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 64;

/// Eigenvalues in ascending order, with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// `V diag(f(lambda)) V^dag`.
    pub fn reconstruct_with<F>(&self, f: F) -> CMatrix
    where F: Fn(f64) -> f64
    {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for (j, z) in scaled.row_mut(i).iter_mut().enumerate() {
                *z *= fv[j];
            }
        }
        let mut out = scaled.matmul(&self.vectors.adjoint());
        // the product is Hermitian up to rounding; make it exact
        for i in 0..n {
            out[(i, i)] = C64::new(out[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix { self.reconstruct_with(|x| x) }

    pub fn dim(&self) -> usize { self.values.len() }
}

/// Eigen-decomposition of a matrix assumed Hermitian; only the lower triangle
/// is read.
pub(crate) fn eigh_lower(m: &CMatrix) -> Result<EigenDecomposition> {
    let (values, vectors) = decompose(m, true)?;
    Ok(EigenDecomposition { values, vectors: vectors.expect("vectors requested") })
}

/// Eigenvalues only (ascending).
pub(crate) fn eigvalsh_lower(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(decompose(m, false)?.0)
}

fn decompose(m: &CMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    m.ensure_square()?;
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(|| CMatrix::zeros(0, 0))));
    }
    if n == 1 {
        return Ok((vec![m[(0, 0)].re], want_vectors.then(|| CMatrix::identity(1))));
    }

    // symmetrize from the lower triangle into a working copy
    let mut a = CMatrix::from_fn(n, n, |i, j| {
        if i > j {
            m[(i, j)]
        } else if i == j {
            C64::new(m[(i, i)].re, 0.0)
        } else {
            m[(j, i)].conj()
        }
    });
    let mut q = want_vectors.then(|| CMatrix::identity(n));
    let mut offdiag = vec![C64::new(0.0, 0.0); n - 1];

    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut p = vec![C64::new(0.0, 0.0); n];
    for k in 0..n - 1 {
        let len = n - k - 1;
        let x0 = a[(k + 1, k)];
        let tail: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            offdiag[k] = x0;
            continue;
        }
        let xnorm = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;

        let v = &mut v[..len];
        for (t, vi) in v.iter_mut().enumerate() {
            *vi = a[(k + 1 + t, k)];
        }
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }

        // trailing block B <- H B H with H = I - 2 v v^dag
        let p = &mut p[..len];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &a.row(k + 1 + r)[k + 1..];
            *pr = row.iter().zip(v.iter()).map(|(&b, &vv)| b * vv).sum();
        }
        let kappa: f64 = v.iter().zip(p.iter()).map(|(vv, pp)| (vv.conj() * pp).re).sum();
        for (pr, &vr) in p.iter_mut().zip(v.iter()) {
            *pr -= vr * kappa;
        }
        for r in 0..len {
            let (vr, wr) = (v[r], p[r]);
            let row = &mut a.row_mut(k + 1 + r)[k + 1..];
            for (c, b) in row.iter_mut().enumerate() {
                *b -= (vr * p[c].conj() + wr * v[c].conj()) * 2.0;
            }
        }
        for t in 0..len {
            let val = if t == 0 { alpha } else { C64::new(0.0, 0.0) };
            a[(k + 1 + t, k)] = val;
            a[(k, k + 1 + t)] = val.conj();
        }
        offdiag[k] = alpha;

        if let Some(q) = q.as_mut() {
            // Q <- Q H on columns k+1..n
            for r in 0..n {
                let row = &mut q.row_mut(r)[k + 1..];
                let dot: C64 = row.iter().zip(v.iter()).map(|(&qq, &vv)| qq * vv).sum();
                for (qq, &vv) in row.iter_mut().zip(v.iter()) {
                    *qq -= dot * vv.conj() * 2.0;
                }
            }
        }
    }

    // absorb subdiagonal phases: T = D T_real D^dag
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut sub: Vec<f64> = offdiag.iter().map(|z| z.norm()).collect();
    let mut phases = vec![C64::new(1.0, 0.0); n];
    for k in 0..n - 1 {
        let ph = if sub[k] > 0.0 { offdiag[k] / sub[k] } else { C64::new(1.0, 0.0) };
        phases[k + 1] = phases[k] * ph;
    }
    sub.push(0.0);

    let (values, z) = tridiagonal_ql(diag, sub, want_vectors)?;
    let vectors = match (q, z) {
        (Some(q), Some(z)) => {
            // V = Q D Z, with Z column-major real
            let mut qd = q;
            for r in 0..n {
                for (c, x) in qd.row_mut(r).iter_mut().enumerate() {
                    *x *= phases[c];
                }
            }
            let mut out = CMatrix::zeros(n, n);
            for r in 0..n {
                let qrow = qd.row(r);
                let orow = out.row_mut(r);
                for (j, o) in orow.iter_mut().enumerate() {
                    let zcol = &z[j * n..(j + 1) * n];
                    let mut acc = C64::new(0.0, 0.0);
                    for (qq, &zz) in qrow.iter().zip(zcol) {
                        acc += qq * zz;
                    }
                    *o = acc;
                }
            }
            Some(out)
        }
        _ => None,
    };
    Ok((values, vectors))
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix with diagonal
/// `d` and subdiagonal `e` (`e[i]` couples `i` and `i + 1`; the final entry is
/// ignored). Returns ascending eigenvalues and, optionally, the eigenvectors as
/// a column-major `n x n` array.
pub fn tridiagonal_ql(
    mut d: Vec<f64>,
    mut e: Vec<f64>,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)>
{
    let n = d.len();
    if e.len() < n {
        e.resize(n, 0.0);
    }
    e[n - 1] = 0.0;
    let mut z = want_vectors.then(|| {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    });

    let eps = f64::EPSILON;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence);
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let col_i = &mut lo[i * n..];
                        let col_i1 = &mut hi[..n];
                        for (zi, zi1) in col_i.iter_mut().zip(col_i1.iter_mut()) {
                            let hh = *zi1;
                            *zi1 = s * *zi + c * hh;
                            *zi = c * *zi - s * hh;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // ascending order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| {
        let mut sorted = vec![0.0; n * n];
        for (new, &old) in order.iter().enumerate() {
            sorted[new * n..(new + 1) * n].copy_from_slice(&z[old * n..(old + 1) * n]);
        }
        sorted
    });
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_two_by_two() {
        // [[2, 1], [1, 2]] -> 1, 3
        let (vals, vecs) = tridiagonal_ql(vec![2.0, 2.0], vec![1.0, 0.0], true).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        let v = vecs.unwrap();
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((v[0] + v[1]).abs() < 1e-14);
    }

    #[test]
    fn already_diagonal_input_is_sorted() {
        let m = CMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let eig = eigh_lower(&m).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
        // columns are permuted unit vectors
        assert!((eig.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((eig.vectors[(2, 1)].norm() - 1.0).abs() < 1e-15);
        assert!((eig.vectors[(0, 2)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complex_tridiagonal_phases() {
        // Hermitian with a purely imaginary coupling, like S_y
        let mut m = CMatrix::zeros(3, 3);
        m[(1, 0)] = C64::new(0.0, 1.0);
        m[(0, 1)] = C64::new(0.0, -1.0);
        m[(2, 1)] = C64::new(0.0, 1.0);
        m[(1, 2)] = C64::new(0.0, -1.0);
        let eig = eigh_lower(&m).unwrap();
        let s2 = 2f64.sqrt();
        for (got, want) in eig.values.iter().zip([-s2, 0.0, s2]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(eig.reconstruct().max_abs_diff(&m) < 1e-14);
    }
}
