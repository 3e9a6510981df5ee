//! Basis-dependent coherence: the affinity-based measure and the l1 norm.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix};
use crate::overlap::affinity;
use crate::states::{Observable, QuantumState};
use crate::tolerances::TOLERANCES;

/// An orthonormal basis, stored as the columns of a unitary matrix.
#[derive(Clone, Debug)]
pub struct Basis {
    label: String,
    vectors: Option<CMatrix>,
    dim: usize,
}

impl Basis {
    pub fn computational(dim: usize) -> Self {
        Self { label: "computational".into(), vectors: None, dim }
    }

    /// Columns of `vectors` form the basis.
    pub fn new(vectors: CMatrix, label: impl Into<String>) -> Result<Self> {
        vectors.ensure_square()?;
        let defect = vectors.unitarity_defect();
        if defect > TOLERANCES.orthonormality {
            return Err(Error::BasisNotOrthonormal(defect));
        }
        let dim = vectors.rows();
        Ok(Self { label: label.into(), vectors: Some(vectors), dim })
    }

    /// The eigenbasis of an observable.
    pub fn eigenbasis(obs: &Observable) -> Self {
        let vectors = if obs.is_computational_basis() && obs.eigen().vectors.is_diagonal() {
            None
        } else {
            Some(obs.eigen().vectors.clone())
        };
        Self { label: "observable eigenbasis".into(), vectors, dim: obs.dim() }
    }

    pub fn label(&self) -> &str { &self.label }

    pub fn dim(&self) -> usize { self.dim }

    /// `U^dag M U`.
    pub fn express(&self, m: &CMatrix) -> CMatrix {
        match &self.vectors {
            None => m.clone(),
            Some(u) => m.conjugate_by_adjoint(u),
        }
    }

    /// `U M U^dag`.
    pub fn embed(&self, m: &CMatrix) -> CMatrix {
        match &self.vectors {
            None => m.clone(),
            Some(u) => m.conjugate_by(u),
        }
    }

    fn check(&self, state: &QuantumState) -> Result<()> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: state.dim() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CoherenceResult {
    /// `sum_{i != j} |(sqrt rho)_ij|^2`.
    pub value: f64,
    /// `1 - A(rho, delta*)^2`, with the affinity evaluated independently.
    pub geometric: f64,
    /// `p_i = (sqrt rho)_ii^2 / sum_j (sqrt rho)_jj^2`.
    pub closest_incoherent: Vec<f64>,
    pub basis_label: String,
}

impl CoherenceResult {
    pub fn discrepancy(&self) -> f64 { (self.value - self.geometric).abs() }
}

/// Affinity-based coherence in `basis`, by the entrywise formula and by
/// affinity maximization over incoherent states.
pub fn c_a(rho: &QuantumState, basis: &Basis) -> Result<CoherenceResult> {
    basis.check(rho)?;
    let root = rho.sqrt()?;
    let root = basis.express(&root);
    let n = root.rows();
    let mut off = 0.0;
    let mut diag_sq = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                diag_sq.push(root[(i, i)].re.powi(2));
            } else {
                off += root[(i, j)].norm_sqr();
            }
        }
    }
    let total: f64 = diag_sq.iter().sum();
    assert!(total > 0.0, "a unit-trace state has a nonzero sqrt diagonal");
    let p: Vec<f64> = diag_sq.iter().map(|d| d / total).collect();
    let delta = basis.embed(&CMatrix::from_real_diag(&p));
    let delta = QuantumState::from_density(HermitianMatrix::symmetrized(delta))?;
    let a = affinity(rho, &delta)?;
    Ok(CoherenceResult {
        value: off,
        geometric: 1.0 - a * a,
        closest_incoherent: p,
        basis_label: basis.label.clone(),
    })
}

/// `sum_{i != j} |rho_ij|` in `basis`.
pub fn c_l1(rho: &QuantumState, basis: &Basis) -> Result<f64> {
    basis.check(rho)?;
    let m = basis.express(rho.matrix());
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for (j, z) in m.row(i).iter().enumerate() {
            if i != j {
                acc += z.norm();
            }
        }
    }
    Ok(acc)
}

/// Incoherent state `sum_i p_i |i><i|` in `basis`.
pub fn incoherent_state(p: &[f64], basis: &Basis) -> Result<QuantumState> {
    if p.len() != basis.dim {
        return Err(Error::DimensionMismatch { expected: basis.dim, got: p.len() });
    }
    let m = basis.embed(&CMatrix::from_diag(&p.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>()));
    QuantumState::from_density(HermitianMatrix::symmetrized(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_unitary, rng_from_seed};

    fn qutrit_fixture() -> QuantumState {
        let s = 1.0 / 3f64.sqrt();
        QuantumState::pure(vec![C64::new(s, 0.0); 3]).unwrap()
    }

    #[test]
    fn diagonal_state_is_incoherent() {
        let rho = QuantumState::from_density(HermitianMatrix::from_real_diag(&[0.2, 0.3, 0.5])).unwrap();
        let basis = Basis::computational(3);
        let r = c_a(&rho, &basis).unwrap();
        assert!(r.value.abs() < 1e-15);
        assert!(r.geometric.abs() < 1e-12);
        assert_eq!(c_l1(&rho, &basis).unwrap(), 0.0);
    }

    #[test]
    fn plus_state() {
        let s = 0.5f64.sqrt();
        let plus = QuantumState::pure(vec![C64::new(s, 0.0); 2]).unwrap();
        let basis = Basis::computational(2);
        let r = c_a(&plus, &basis).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert!((r.geometric - 0.5).abs() < 1e-12);
        assert!((c_l1(&plus, &basis).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qutrit_values() {
        let rho = qutrit_fixture();
        let basis = Basis::computational(3);
        assert!((c_a(&rho, &basis).unwrap().value - 2.0 / 3.0).abs() < 1e-15);
        assert!((c_l1(&rho, &basis).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rotated_basis_of_plus_is_incoherent() {
        let s = 0.5f64.sqrt();
        let h = CMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]).unwrap();
        let basis = Basis::new(h, "hadamard").unwrap();
        let plus = QuantumState::pure(vec![C64::new(s, 0.0); 2]).unwrap();
        assert!(c_a(&plus, &basis).unwrap().value < 1e-15);
    }

    #[test]
    fn rejects_non_orthonormal_basis() {
        let m = CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(Basis::new(m, "bad"), Err(Error::BasisNotOrthonormal(_))));
    }

    #[test]
    fn basis_change_is_consistent() {
        let mut rng = rng_from_seed(4);
        let u = random_unitary(3, &mut rng);
        let basis = Basis::new(u.clone(), "random").unwrap();
        let rho = crate::random::random_mixed_state(3, &mut rng);
        // rho expressed in the basis, then measured computationally
        let moved = QuantumState::from_density(HermitianMatrix::symmetrized(rho.matrix().conjugate_by_adjoint(&u)))
            .unwrap();
        let a = c_a(&rho, &basis).unwrap().value;
        let b = c_a(&moved, &Basis::computational(3)).unwrap().value;
        assert!((a - b).abs() < 1e-10);
    }
}
