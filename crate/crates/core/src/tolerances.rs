//! Numerical tolerances shared by the library and its test suites.

use std::fmt;

/// Every tolerance the library uses, in one place.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance on `|H_ij - conj(H_ji)|`.
    pub hermiticity: f64,
    /// Eigenvalues at or above `-psd_clamp` are clamped to zero in PSD
    /// operations; anything lower is an error.
    pub psd_clamp: f64,
    /// Relative floor (times `dim * eps * lambda_max`) below which an
    /// eigenvalue is treated as an exact zero before taking square roots.
    pub psd_rank_floor: f64,
    /// Allowed deviation of a state's trace from one.
    pub trace: f64,
    /// Allowed deviation from orthonormality for bases.
    pub orthonormality: f64,
    /// Allowed deviation of `sum K^dag K` from the identity.
    pub completeness: f64,
    /// Degenerate eigenvalues are grouped if closer than
    /// `degeneracy_rel * (lambda_max - lambda_min + 1)`.
    pub degeneracy_rel: f64,
    /// Threshold on the covariance violation below which a channel counts as
    /// covariant.
    pub covariance: f64,
    /// Maximum trace drift allowed per integration step.
    pub trace_drift_per_step: f64,
    /// Absolute tolerance for the adaptive quadrature of weight functions.
    pub weight_quadrature: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    hermiticity: 1e-12,
    psd_clamp: 1e-8,
    psd_rank_floor: 32.0,
    trace: 1e-10,
    orthonormality: 1e-10,
    completeness: 1e-10,
    degeneracy_rel: 1e-9,
    covariance: 1e-8,
    trace_drift_per_step: 1e-9,
    weight_quadrature: 1e-8,
};

impl Tolerances {
    pub fn entries(&self) -> [(&'static str, f64); 10] {
        [
            ("hermiticity", self.hermiticity),
            ("psd_clamp", self.psd_clamp),
            ("psd_rank_floor", self.psd_rank_floor),
            ("trace", self.trace),
            ("orthonormality", self.orthonormality),
            ("completeness", self.completeness),
            ("degeneracy_rel", self.degeneracy_rel),
            ("covariance", self.covariance),
            ("trace_drift_per_step", self.trace_drift_per_step),
            ("weight_quadrature", self.weight_quadrature),
        ]
    }
}

impl fmt::Display for Tolerances {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, value) in self.entries() {
            writeln!(f, "{name:>22} = {value:e}")?;
        }
        Ok(())
    }
}
