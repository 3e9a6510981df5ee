//! Coherence, asymmetry and macroscopicity measures built on the
//! Wigner-Yanase skew-information family, for spin systems and arbitrary
//! finite-dimensional observables.

pub mod asymmetry;
pub mod coherence;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod macroscopicity;
pub mod oracles;
pub mod overlap;
pub mod quadrature;
pub mod random;
pub mod states;
pub mod tolerances;

pub use error::{Error, Result};
