//! Overlap functionals between density matrices.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{inner, trace_sqrt_psd, HermitianMatrix};
use crate::states::QuantumState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlapKind {
    /// `A = Tr sqrt(rho) sqrt(tau)`.
    Affinity,
    /// `F = (Tr sqrt(sqrt(rho) tau sqrt(rho)))^2`.
    Fidelity,
    /// `D_H = 1 - A`.
    Hellinger,
    /// `D_B = 2 - 2 sqrt(F)`.
    Bures,
}

pub fn state_overlap(rho: &QuantumState, tau: &QuantumState, kind: OverlapKind) -> Result<f64> {
    match kind {
        OverlapKind::Affinity => affinity(rho, tau),
        OverlapKind::Fidelity => fidelity(rho, tau),
        OverlapKind::Hellinger => Ok(1.0 - affinity(rho, tau)?),
        OverlapKind::Bures => Ok(2.0 - 2.0 * fidelity(rho, tau)?.sqrt()),
    }
}

fn check_dims(rho: &QuantumState, tau: &QuantumState) -> Result<()> {
    if rho.dim() != tau.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: tau.dim() });
    }
    Ok(())
}

fn expectation(m: &HermitianMatrix, v: &[C64]) -> f64 { inner(v, &m.matvec(v)).re }

/// `Tr sqrt(rho) sqrt(tau)`, clamped to `[0, 1]`.
pub fn affinity(rho: &QuantumState, tau: &QuantumState) -> Result<f64> {
    check_dims(rho, tau)?;
    let a = match (rho.vector(), tau.vector()) {
        (Some(u), Some(v)) => inner(u, v).norm_sqr(),
        (Some(u), None) => expectation(&tau.sqrt()?, u),
        (None, Some(v)) => expectation(&rho.sqrt()?, v),
        (None, None) => {
            let (a, b) = (rho.sqrt()?, tau.sqrt()?);
            a.trace_of_product(&b).re
        }
    };
    Ok(a.clamp(0.0, 1.0))
}

/// Uhlmann fidelity (squared convention), clamped to `[0, 1]`.
pub fn fidelity(rho: &QuantumState, tau: &QuantumState) -> Result<f64> {
    check_dims(rho, tau)?;
    let f = match (rho.vector(), tau.vector()) {
        (Some(u), Some(v)) => inner(u, v).norm_sqr(),
        (Some(u), None) => expectation(tau.matrix(), u),
        (None, Some(v)) => expectation(rho.matrix(), v),
        (None, None) => {
            let s = rho.sqrt()?;
            let inner = HermitianMatrix::symmetrized(tau.matrix().conjugate_by(&s));
            let t = trace_sqrt_psd(&inner)?;
            t * t
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

pub fn hellinger_distance(rho: &QuantumState, tau: &QuantumState) -> Result<f64> {
    state_overlap(rho, tau, OverlapKind::Hellinger)
}

pub fn bures_distance(rho: &QuantumState, tau: &QuantumState) -> Result<f64> {
    state_overlap(rho, tau, OverlapKind::Bures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, rng_from_seed};

    #[test]
    fn identical_and_orthogonal() {
        let mut rng = rng_from_seed(1);
        let rho = random_state(4, &mut rng);
        assert!((affinity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        assert!(hellinger_distance(&rho, &rho).unwrap().abs() < 1e-9);
        assert!(bures_distance(&rho, &rho).unwrap().abs() < 1e-9);

        let a = QuantumState::pure(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let b = QuantumState::pure(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert_eq!(affinity(&a, &b).unwrap(), 0.0);
        assert_eq!(bures_distance(&a, &b).unwrap(), 2.0);
    }

    #[test]
    fn dimension_mismatch() {
        let mut rng = rng_from_seed(2);
        let a = random_state(2, &mut rng);
        let b = random_state(3, &mut rng);
        assert!(matches!(affinity(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pure_paths_match_dense() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let p = loop {
                let s = random_state(3, &mut rng);
                if s.vector().is_some() {
                    break s;
                }
            };
            let dense = QuantumState::from_density(p.matrix().clone()).unwrap();
            let m = crate::random::random_mixed_state(3, &mut rng);
            assert!((affinity(&p, &m).unwrap() - affinity(&dense, &m).unwrap()).abs() < 1e-9);
            assert!((fidelity(&p, &m).unwrap() - fidelity(&dense, &m).unwrap()).abs() < 1e-9);
            assert!((fidelity(&m, &p).unwrap() - fidelity(&m, &dense).unwrap()).abs() < 1e-9);
        }
    }
}
