//! Dense complex Hermitian linear algebra.

mod eigh;
mod matrix;

use std::ops::Deref;

use num_complex::Complex64 as C64;

pub use self::eigh::{tridiagonal_ql, EigenDecomposition};
pub use self::matrix::{inner, kron_vec, vec_norm, CMatrix};
use crate::error::{Error, Result};
use crate::tolerances::TOLERANCES;

/// A square complex matrix that is Hermitian within
/// [`Tolerances::hermiticity`][crate::tolerances::Tolerances].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity; the stored matrix is exactly symmetrized.
    pub fn new(m: CMatrix) -> Result<Self> {
        m.ensure_square()?;
        if m.rows() == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let defect = m.hermiticity_defect();
        if defect > TOLERANCES.hermiticity {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Symmetrizes without checking. For matrices Hermitian by construction
    /// that may carry rounding noise larger than the strict tolerance.
    pub fn symmetrized(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        Self(m.hermitian_part())
    }

    pub fn from_real_diag(diag: &[f64]) -> Self { Self(CMatrix::from_real_diag(diag)) }

    pub fn matrix(&self) -> &CMatrix { &self.0 }

    pub fn into_inner(self) -> CMatrix { self.0 }

    pub fn eigh(&self) -> Result<EigenDecomposition> { eigh::eigh_lower(&self.0) }

    pub fn eigvalsh(&self) -> Result<Vec<f64>> { eigh::eigvalsh_lower(&self.0) }
}

impl Deref for HermitianMatrix {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix { &self.0 }
}

/// Eigen-decomposition with ascending eigenvalues.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenDecomposition> { h.eigh() }

/// Eigen-decomposition of a raw matrix, rejecting non-Hermitian input.
pub fn eigh_checked(m: &CMatrix) -> Result<EigenDecomposition> {
    m.ensure_square()?;
    let defect = m.hermiticity_defect();
    if defect > TOLERANCES.hermiticity {
        return Err(Error::NotHermitian(defect));
    }
    eigh::eigh_lower(m)
}

fn rank_floor(values: &[f64]) -> f64 {
    let top = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    TOLERANCES.psd_rank_floor * values.len() as f64 * f64::EPSILON * top
}

/// Clamp eigenvalue noise of a PSD spectrum; `Err` if something is genuinely
/// negative.
fn clamp_psd(values: &[f64]) -> Result<Vec<f64>> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -TOLERANCES.psd_clamp {
        return Err(Error::NotPsd(min));
    }
    let floor = rank_floor(values);
    Ok(values.iter().map(|&x| if x <= floor { 0.0 } else { x }).collect())
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-8, 0)` are treated as zero, as are positive values
/// below the numerical rank floor.
pub fn sqrt_psd(rho: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = rho.eigh()?;
    let clamped = clamp_psd(&eig.values)?;
    let eig = EigenDecomposition { values: clamped, vectors: eig.vectors };
    Ok(HermitianMatrix(eig.reconstruct_with(f64::sqrt)))
}

/// `Tr sqrt(X)` for a PSD matrix.
pub fn trace_sqrt_psd(x: &HermitianMatrix) -> Result<f64> {
    let vals = clamp_psd(&x.eigvalsh()?)?;
    Ok(vals.iter().map(|v| v.sqrt()).sum())
}

/// Trace norm (sum of singular values) of an arbitrary square matrix.
///
/// Computed from the spectrum of the Hermitian dilation `[[0, M], [M^dag, 0]]`,
/// whose eigenvalues are `+-s_i`. This is the `M^dag M` route without
/// squaring, so singular values near zero keep full absolute accuracy.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    m.ensure_square()?;
    let n = m.rows();
    if n == 0 {
        return Ok(0.0);
    }
    if m.is_diagonal() {
        return Ok(m.diag().iter().map(|z| z.norm()).sum());
    }
    let mut dil = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // only the lower triangle is read by the solver
            dil[(n + j, i)] = m[(i, j)].conj();
        }
    }
    let vals = eigh::eigvalsh_lower(&dil)?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Trace norm of a rectangular block (singular values of `B`).
pub fn trace_norm_rect(b: &CMatrix) -> Result<f64> {
    let (r, c) = (b.rows(), b.cols());
    if r == 0 || c == 0 {
        return Ok(0.0);
    }
    if r == 1 || c == 1 {
        return Ok(b.frobenius_norm());
    }
    let n = r + c;
    let mut dil = CMatrix::zeros(n, n);
    for i in 0..r {
        for j in 0..c {
            dil[(r + j, i)] = b[(i, j)].conj();
        }
    }
    let vals = eigh::eigvalsh_lower(&dil)?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Partial trace over the second factor of a `d1 * d2` bipartite operator.
pub fn partial_trace_second(m: &CMatrix, d1: usize, d2: usize) -> Result<CMatrix> {
    m.ensure_square()?;
    if m.rows() != d1 * d2 {
        return Err(Error::DimensionMismatch { expected: d1 * d2, got: m.rows() });
    }
    Ok(CMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum::<C64>()))
}

/// Partial trace over the first factor of a `d1 * d2` bipartite operator.
pub fn partial_trace_first(m: &CMatrix, d1: usize, d2: usize) -> Result<CMatrix> {
    m.ensure_square()?;
    if m.rows() != d1 * d2 {
        return Err(Error::DimensionMismatch { expected: d1 * d2, got: m.rows() });
    }
    Ok(CMatrix::from_fn(d2, d2, |i, j| (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum::<C64>()))
}

/// `exp(-i t H)` from an eigen-decomposition of `H`.
pub fn unitary_from_eig(eig: &EigenDecomposition, t: f64) -> CMatrix {
    let n = eig.dim();
    let mut scaled = eig.vectors.clone();
    for i in 0..n {
        for (j, z) in scaled.row_mut(i).iter_mut().enumerate() {
            *z *= C64::from_polar(1.0, -t * eig.values[j]);
        }
    }
    scaled.matmul(&eig.vectors.adjoint())
}
