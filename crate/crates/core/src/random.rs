//! Seeded random states, observables and unitaries for sampling-based checks.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vec_norm, CMatrix, HermitianMatrix};
use crate::states::{Observable, QuantumState};

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng { ChaCha8Rng::seed_from_u64(seed) }

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::symmetrized(random_matrix(dim, dim, rng))
}

/// Haar-random pure state vector.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
    let n = vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Density matrix `G G^dag / Tr(G G^dag)` with `G` a `dim x rank` Ginibre
/// matrix.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> HermitianMatrix {
    let g = random_matrix(dim, rank.max(1), rng);
    let mut m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m = m.scale_real(1.0 / tr);
    HermitianMatrix::symmetrized(m)
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    random_isometry(dim, dim, rng)
}

/// `rows x cols` matrix with orthonormal columns (`cols <= rows`).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gaussian_c64(rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &columns {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let n = vec_norm(&v);
        if n < 1e-8 {
            continue;
        }
        columns.push(v.into_iter().map(|z| z / n).collect());
    }
    CMatrix::from_columns(&columns).expect("consistent column lengths")
}

/// A random pure or mixed state of the given dimension (roughly one in three
/// is pure; mixed ranks vary).
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> QuantumState {
    if rng.random_range(0..3) == 0 {
        QuantumState::pure(random_vector(dim, rng)).expect("normalized vector")
    } else {
        let rank = rng.random_range(1..=dim);
        QuantumState::from_density(random_density(dim, rank, rng)).expect("valid density")
    }
}

/// Strictly mixed random state (full-rank Ginibre).
pub fn random_mixed_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> QuantumState {
    QuantumState::from_density(random_density(dim, dim, rng)).expect("valid density")
}

/// Random observable. With `degenerate`, eigenvalues are small integers so
/// both degenerate sectors and repeated spacings occur; otherwise they are
/// continuous.
pub fn random_observable<R: Rng + ?Sized>(dim: usize, degenerate: bool, rng: &mut R) -> Observable {
    let values: Vec<f64> = if degenerate {
        (0..dim).map(|_| rng.random_range(-2..=2) as f64).collect()
    } else {
        (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()
    };
    let u = random_unitary(dim, rng);
    let m = CMatrix::from_real_diag(&values).conjugate_by(&u);
    Observable::new(HermitianMatrix::symmetrized(m)).expect("Hermitian by construction")
}

/// Random observable that is diagonal in the computational basis.
pub fn random_diagonal_observable<R: Rng + ?Sized>(
    dim: usize,
    degenerate: bool,
    rng: &mut R,
) -> Observable
{
    let values: Vec<f64> = if degenerate {
        (0..dim).map(|_| rng.random_range(-2..=2) as f64).collect()
    } else {
        (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()
    };
    Observable::new(HermitianMatrix::from_real_diag(&values)).expect("diagonal")
}

/// Random probability vector (flat Dirichlet).
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}
