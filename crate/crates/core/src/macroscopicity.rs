//! Weighted macroscopicity measures: sums of per-mode coherences with a
//! weight growing in the mode size.
//!
//! Convention: a weight `f` is applied over the positive modes only,
//! `M = sum_{omega > 0} f(omega) A(omega)`. With `f = omega^2` and the HS norm
//! this is the skew information for pure states. The scaled measure, usually
//! written as a sum over all modes with `1 - e^{-omega^2/(8 sigma^2)}`, has
//! positive-mode weight `2 (1 - e^{-omega^2/(8 sigma^2)})`, which is exactly what
//! the `g`-construction produces for the Gaussian density.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::asymmetry::{mode_profile, translate_matrix, ModeProfile};
use crate::dynamics::fuzzy_channel;
use crate::error::{Error, Result};
use crate::linalg::inner;
use crate::overlap::bures_distance;
use crate::quadrature::{adaptive_simpson, gauss_hermite};
use crate::states::{Observable, QuantumState};
use crate::tolerances::TOLERANCES;

/// Concave, increasing `f(x) >= 0` with `f(0) = 0`, used as
/// `f(omega^2 / sigma^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcaveFn {
    /// `1 - e^{-x/8}`; gives the scaled measure.
    ExpCutoff,
    Sqrt,
    Log1p,
    /// `x / (1 + x)`.
    Saturating,
}

impl ConcaveFn {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            ConcaveFn::ExpCutoff => -(-x / 8.0).exp_m1(),
            ConcaveFn::Sqrt => x.sqrt(),
            ConcaveFn::Log1p => x.ln_1p(),
            ConcaveFn::Saturating => x / (1.0 + x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConcaveFn::ExpCutoff => "exp-cutoff",
            ConcaveFn::Sqrt => "sqrt",
            ConcaveFn::Log1p => "log1p",
            ConcaveFn::Saturating => "saturating",
        }
    }
}

/// The density `g(x) >= 0` in `f(omega) = omega^2 int sinc^2(omega x / 2) g(x) dx`.
#[derive(Clone, Debug, PartialEq)]
pub enum GSpec {
    /// `g = delta(x)`, giving `f = omega^2`.
    Delta,
    /// Samples of `g`, linearly interpolated and zero outside the grid.
    Grid { x: Vec<f64>, g: Vec<f64> },
    /// `g(x) = x^2 (sqrt(pi) tau)^{-1} e^{-x^2/tau^2}` with `tau = 1/(sqrt(2) sigma)`.
    Gaussian { sigma: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightFamily {
    /// `|omega|^p`.
    Power(f64),
    /// The scaled measure with cutoff `sigma`.
    Scaled(f64),
    FromG(GSpec),
    /// `2 f(omega^2 / sigma^2)`.
    ConcaveScaled { sigma: f64, f: ConcaveFn },
}

/// A validated weight. [`WeightFunction::evaluate`] is the positive-mode
/// weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction {
    family: WeightFamily,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::NonPositiveSigma(sigma));
    }
    Ok(())
}

pub fn make_weight(family: WeightFamily) -> Result<WeightFunction> {
    match &family {
        WeightFamily::Power(p) => {
            if !(*p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidWeight(format!("power exponent must be positive, got {p}")));
            }
        }
        WeightFamily::Scaled(sigma) | WeightFamily::ConcaveScaled { sigma, .. } => check_sigma(*sigma)?,
        WeightFamily::FromG(GSpec::Delta) => {}
        WeightFamily::FromG(GSpec::Gaussian { sigma }) => check_sigma(*sigma)?,
        WeightFamily::FromG(GSpec::Grid { x, g }) => {
            if x.len() != g.len() || x.len() < 2 {
                return Err(Error::InvalidWeight("g grid needs at least two matching x and g samples".into()));
            }
            if x.iter().chain(g).any(|v| !v.is_finite()) {
                return Err(Error::InvalidWeight("g grid contains a non-finite value".into()));
            }
            if x.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidWeight("g grid abscissae must be strictly increasing".into()));
            }
            if let Some(i) = g.iter().position(|&v| v < 0.0) {
                return Err(Error::NegativeG(x[i]));
            }
        }
    }
    Ok(WeightFunction { family })
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `omega^2 int_a^b sinc^2(omega x / 2) g(x) dx`, split into `pieces` panels
/// so the adaptive rule cannot be fooled by an unlucky first sampling.
fn sinc_integral<G: Fn(f64) -> f64>(omega: f64, g: G, a: f64, b: f64, pieces: usize) -> f64 {
    let h = (b - a) / pieces as f64;
    let tol = TOLERANCES.weight_quadrature / pieces as f64;
    let integrand = |x: f64| sinc(omega * x / 2.0).powi(2) * g(x);
    let mut acc = 0.0;
    for i in 0..pieces {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == pieces { b } else { lo + h };
        acc += adaptive_simpson(integrand, lo, hi, tol / (omega * omega).max(1.0));
    }
    omega * omega * acc
}

impl WeightFunction {
    pub fn family(&self) -> &WeightFamily { &self.family }

    /// The weight applied to `A(omega)` for `omega > 0`. Symmetric in `omega`
    /// and zero at `omega = 0`.
    pub fn evaluate(&self, omega: f64) -> f64 {
        let w = omega.abs();
        if w == 0.0 {
            return 0.0;
        }
        match &self.family {
            WeightFamily::Power(p) => w.powf(*p),
            WeightFamily::Scaled(sigma) => 2.0 * ConcaveFn::ExpCutoff.eval(w * w / (sigma * sigma)),
            WeightFamily::ConcaveScaled { sigma, f } => 2.0 * f.eval(w * w / (sigma * sigma)),
            WeightFamily::FromG(GSpec::Delta) => w * w,
            WeightFamily::FromG(GSpec::Gaussian { sigma }) => {
                let tau = 1.0 / (2f64.sqrt() * sigma);
                let norm = 1.0 / (PI.sqrt() * tau);
                let g = |x: f64| x * x * norm * (-(x * x) / (tau * tau)).exp();
                let reach = 12.0 * tau;
                let pieces = 16 + (w * reach / PI).ceil() as usize;
                sinc_integral(w, g, -reach, reach, pieces)
            }
            WeightFamily::FromG(GSpec::Grid { x, g }) => {
                let mut acc = 0.0;
                for i in 0..x.len() - 1 {
                    let (x0, x1, g0, g1) = (x[i], x[i + 1], g[i], g[i + 1]);
                    if g0 == 0.0 && g1 == 0.0 {
                        continue;
                    }
                    let lin = move |t: f64| g0 + (g1 - g0) * (t - x0) / (x1 - x0);
                    let pieces = 1 + (w * (x1 - x0) / PI).ceil() as usize;
                    acc += sinc_integral(w, lin, x0, x1, pieces);
                }
                acc
            }
        }
    }

    /// The weight on each of `A(omega)` and `A(-omega)` when summing over all
    /// modes: half the positive-mode weight.
    pub fn symmetric_weight(&self, omega: f64) -> f64 { 0.5 * self.evaluate(omega) }

    /// Whether the weight belongs to the family for which the HS measure is
    /// monotone under covariant operations. Powers up to 2 and every
    /// `g`-constructed, scaled, or concave-scaled weight qualify.
    pub fn valid_for_hs(&self) -> bool {
        match &self.family {
            WeightFamily::Power(p) => *p <= 2.0,
            _ => true,
        }
    }

    pub fn label(&self) -> String {
        match &self.family {
            WeightFamily::Power(p) => format!("power({p})"),
            WeightFamily::Scaled(s) => format!("scaled({s})"),
            WeightFamily::ConcaveScaled { sigma, f } => format!("concave-scaled({},{sigma})", f.name()),
            WeightFamily::FromG(GSpec::Delta) => "g-delta".into(),
            WeightFamily::FromG(GSpec::Gaussian { sigma }) => format!("g-gaussian({sigma})"),
            WeightFamily::FromG(GSpec::Grid { x, .. }) => format!("g-grid({} points)", x.len()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// `A_tr(omega) = ||rho^(omega)||_1`.
    TraceNorm,
    /// `A_HS(omega) = ||sqrt(rho)^(omega)||_HS^2`.
    HilbertSchmidt,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeContribution {
    pub omega: f64,
    pub weight: f64,
    pub coherence: f64,
    pub contribution: f64,
}

#[derive(Clone, Debug)]
pub struct MacroscopicityReport {
    pub value: f64,
    /// One entry per positive mode, in increasing `omega`.
    pub per_mode: Vec<ModeContribution>,
    pub norm_kind: NormKind,
    /// False if the weight decreases somewhere along the positive modes.
    pub monotone_weight: bool,
}

/// `sum_{omega > 0} f(omega) A(omega)` from a precomputed mode profile.
pub fn measure_from_profile(profile: &ModeProfile, weight: &WeightFunction, norm: NormKind) -> Result<MacroscopicityReport> {
    if norm == NormKind::HilbertSchmidt && !weight.valid_for_hs() {
        return Err(Error::InvalidWeight(format!("{} is not admissible for the HS measure", weight.label())));
    }
    let omegas = profile.omegas();
    let per_mode: Vec<ModeContribution> = profile
        .spectrum
        .positive_indices()
        .map(|k| {
            let omega = omegas[k];
            let weight = weight.evaluate(omega);
            let coherence = match norm {
                NormKind::TraceNorm => profile.a_tr[k],
                NormKind::HilbertSchmidt => profile.a_hs[k],
            };
            ModeContribution { omega, weight, coherence, contribution: weight * coherence }
        })
        .collect();
    let value = per_mode.iter().map(|c| c.contribution).sum();
    let monotone_weight = per_mode.windows(2).all(|p| p[1].weight >= p[0].weight * (1.0 - 1e-12));
    Ok(MacroscopicityReport { value, per_mode, norm_kind: norm, monotone_weight })
}

pub fn weighted_measure(
    state: &QuantumState,
    obs: &Observable,
    weight: &WeightFunction,
    norm: NormKind,
) -> Result<MacroscopicityReport> {
    if norm == NormKind::HilbertSchmidt && !weight.valid_for_hs() {
        return Err(Error::InvalidWeight(format!("{} is not admissible for the HS measure", weight.label())));
    }
    measure_from_profile(&mode_profile(state, obs)?, weight, norm)
}

/// `M_sigma(rho) = sum_omega [1 - e^{-omega^2/(8 sigma^2)}] A_HS(omega)`.
pub fn scaled_measure(state: &QuantumState, obs: &Observable, sigma: f64) -> Result<MacroscopicityReport> {
    let weight = make_weight(WeightFamily::Scaled(sigma))?;
    weighted_measure(state, obs, &weight, NormKind::HilbertSchmidt)
}

/// The skew information by its two independent routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewInformation {
    /// `-1/2 Tr [sqrt(rho), L]^2`, or the variance of `L` for pure states.
    pub commutator: f64,
    /// `sum_omega (omega^2 / 2) A_HS(omega)`.
    pub mode_sum: f64,
}

impl SkewInformation {
    pub fn discrepancy(&self) -> f64 { (self.commutator - self.mode_sum).abs() }
}

fn skew_commutator(state: &QuantumState, obs: &Observable) -> Result<f64> {
    if state.dim() != obs.dim() {
        return Err(Error::DimensionMismatch { expected: obs.dim(), got: state.dim() });
    }
    let l = obs.matrix();
    Ok(match state.vector() {
        Some(v) => {
            let lv = l.matvec(v);
            let mean = inner(v, &lv);
            (inner(&lv, &lv).re - mean.norm_sqr()).max(0.0)
        }
        None => {
            let root = state.sqrt()?;
            let c = &root.matmul(l) - &l.matmul(&root);
            0.5 * c.hs_norm_sqr()
        }
    })
}

/// `I_W(rho, L) = -1/2 Tr [sqrt(rho), L]^2`.
pub fn skew_information(state: &QuantumState, obs: &Observable) -> Result<f64> { skew_commutator(state, obs) }

pub fn skew_information_paths(state: &QuantumState, obs: &Observable) -> Result<SkewInformation> {
    let commutator = skew_commutator(state, obs)?;
    let profile = mode_profile(state, obs)?;
    let mode_sum = profile.omegas().iter().zip(&profile.a_hs).map(|(w, a)| 0.5 * w * w * a).sum();
    Ok(SkewInformation { commutator, mode_sum })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichReport {
    /// `1/2 D_B(rho, Phi_sigma(rho))`.
    pub lower: f64,
    pub value: f64,
    /// `1 - e^{-I_W / (4 sigma^2)}`.
    pub upper: f64,
    pub holds: bool,
}

pub fn sandwich_bounds(state: &QuantumState, obs: &Observable, sigma: f64) -> Result<SandwichReport> {
    let value = scaled_measure(state, obs, sigma)?.value;
    let smeared = fuzzy_channel(state, obs, sigma)?;
    let lower = 0.5 * bures_distance(state, &smeared)?;
    let iw = skew_information(state, obs)?;
    let upper = -(-iw / (4.0 * sigma * sigma)).exp_m1();
    let slack = 1e-9;
    let holds = lower - slack <= value && value <= upper + slack;
    Ok(SandwichReport { lower, value, upper, holds })
}

/// Largest value the measure `sum_omega f(omega^2/sigma^2) A_HS(omega)` can
/// take on a separable state of `n` parties whose local observables have
/// spectral width at most `l_max`: `f(n l_max^2 / (2 sigma^2))`.
pub fn separability_ceiling(n: usize, l_max: f64, sigma: f64, f: ConcaveFn) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    check_sigma(sigma)?;
    if !(l_max > 0.0 && l_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("l_max must be positive, got {l_max}")));
    }
    Ok(f.eval(n as f64 * l_max * l_max / (2.0 * sigma * sigma)))
}

/// `1 - Tr sqrt(rho) U_x sqrt(rho) U_x^dag` evaluated directly.
fn hellinger_translated(root: &crate::linalg::CMatrix, obs: &Observable, x: f64) -> f64 {
    let moved = translate_matrix(root, obs, x);
    1.0 - root.trace_of_product(&moved).re
}

/// `int D_H(rho, U_x rho U_x^dag) (sqrt(pi) tau)^{-1} e^{-x^2/tau^2} dx` with
/// `tau = 1/(sqrt(2) sigma)`, by `order`-point Gauss-Hermite quadrature.
pub fn hellinger_average(state: &QuantumState, obs: &Observable, sigma: f64, order: usize) -> Result<f64> {
    check_sigma(sigma)?;
    if state.dim() != obs.dim() {
        return Err(Error::DimensionMismatch { expected: obs.dim(), got: state.dim() });
    }
    let root = state.sqrt()?.into_inner();
    let tau = 1.0 / (2f64.sqrt() * sigma);
    let gh = gauss_hermite(order)?;
    Ok(gh.integrate(|t| hellinger_translated(&root, obs, tau * t)) / PI.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HellingerExpansion {
    pub direct: f64,
    /// `Re sum_omega (1 - e^{-i omega x}) A_HS(omega)`.
    pub expansion: f64,
    /// Imaginary part of the expansion; zero up to rounding.
    pub expansion_imag: f64,
}

pub fn hellinger_mode_expansion(state: &QuantumState, obs: &Observable, x: f64) -> Result<HellingerExpansion> {
    let profile = mode_profile(state, obs)?;
    let root = state.sqrt()?.into_inner();
    let direct = hellinger_translated(&root, obs, x);
    let sum: C64 = profile
        .omegas()
        .iter()
        .zip(&profile.a_hs)
        .map(|(&w, &a)| (C64::new(1.0, 0.0) - C64::from_polar(1.0, -w * x)) * a)
        .sum();
    Ok(HellingerExpansion { direct, expansion: sum.re, expansion_imag: sum.im })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymmetry::total_asymmetry;
    use crate::linalg::HermitianMatrix;
    use crate::states::{collective_spin, ghz, spin_coherent, SpinAxis, SpinRepr};

    fn qutrit() -> (QuantumState, Observable) {
        let s = 1.0 / 3f64.sqrt();
        let rho = QuantumState::pure(vec![C64::new(s, 0.0); 3]).unwrap();
        let obs = Observable::new(HermitianMatrix::from_real_diag(&[-1.0, 0.0, 1.0])).unwrap();
        (rho, obs)
    }

    #[test]
    fn weights_vanish_at_zero() {
        for fam in [
            WeightFamily::Power(2.0),
            WeightFamily::Scaled(1.0),
            WeightFamily::FromG(GSpec::Delta),
            WeightFamily::FromG(GSpec::Gaussian { sigma: 1.0 }),
            WeightFamily::ConcaveScaled { sigma: 1.0, f: ConcaveFn::Sqrt },
        ] {
            let w = make_weight(fam).unwrap();
            assert_eq!(w.evaluate(0.0), 0.0);
            assert_eq!(w.evaluate(1.3), w.evaluate(-1.3));
        }
    }

    #[test]
    fn weight_errors() {
        assert!(matches!(make_weight(WeightFamily::Scaled(0.0)), Err(Error::NonPositiveSigma(_))));
        assert!(matches!(make_weight(WeightFamily::Scaled(-1.0)), Err(Error::NonPositiveSigma(_))));
        let grid = GSpec::Grid { x: vec![0.0, 1.0, 2.0], g: vec![0.0, -0.1, 0.0] };
        assert_eq!(make_weight(WeightFamily::FromG(grid)), Err(Error::NegativeG(1.0)));
        let w = make_weight(WeightFamily::Power(3.0)).unwrap();
        let (rho, obs) = qutrit();
        assert!(matches!(weighted_measure(&rho, &obs, &w, NormKind::HilbertSchmidt), Err(Error::InvalidWeight(_))));
        assert!(weighted_measure(&rho, &obs, &w, NormKind::TraceNorm).is_ok());
    }

    #[test]
    fn delta_is_omega_squared() {
        let w = make_weight(WeightFamily::FromG(GSpec::Delta)).unwrap();
        assert_eq!(w.evaluate(3.0), 9.0);
    }

    #[test]
    fn gaussian_g_reproduces_scaled_weight() {
        for sigma in [0.5, 2.0] {
            let g = make_weight(WeightFamily::FromG(GSpec::Gaussian { sigma })).unwrap();
            let s = make_weight(WeightFamily::Scaled(sigma)).unwrap();
            for omega in [0.1, 1.0, 10.0] {
                let target = 1.0 - (-omega * omega / (8.0 * sigma * sigma)).exp();
                assert!((g.symmetric_weight(omega) - target).abs() < 1e-6, "{sigma} {omega}");
                assert!((s.symmetric_weight(omega) - target).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ghz_closed_forms() {
        let (n, theta) = (6, 0.7);
        let obs = collective_spin(n, SpinAxis::Z, SpinRepr::Dicke).unwrap();
        let psi = ghz(n, theta, 0.3, SpinRepr::Dicke).unwrap();
        let w2 = make_weight(WeightFamily::Power(2.0)).unwrap();
        let nn = (n * n) as f64;
        let hs = weighted_measure(&psi, &obs, &w2, NormKind::HilbertSchmidt).unwrap();
        assert!((hs.value - nn * theta.sin().powi(2) / 4.0).abs() < 1e-12);
        let tr = weighted_measure(&psi, &obs, &w2, NormKind::TraceNorm).unwrap();
        assert!((tr.value - nn * theta.sin() / 2.0).abs() < 1e-12);
        let sigma = 1.7;
        let ms = scaled_measure(&psi, &obs, sigma).unwrap().value;
        let expect = 0.5 * theta.sin().powi(2) * (1.0 - (-nn / (8.0 * sigma * sigma)).exp());
        assert!((ms - expect).abs() < 1e-12);
        let total: f64 = hs.per_mode.iter().map(|c| c.contribution).sum();
        assert!((total - hs.value).abs() < 1e-12);
        assert!(hs.monotone_weight);
    }

    #[test]
    fn scaled_measure_small_sigma_limit() {
        let (rho, obs) = qutrit();
        let m = scaled_measure(&rho, &obs, 1e-6).unwrap().value;
        assert!((m - 2.0 / 3.0).abs() < 1e-6);
        assert!((m - total_asymmetry(&rho, &obs).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_weight_is_flagged() {
        let grid = GSpec::Grid { x: vec![-1.0, 0.0, 1.0], g: vec![1.0, 1.0, 1.0] };
        let w = make_weight(WeightFamily::FromG(grid)).unwrap();
        // omega^2 int sinc^2 over a finite window oscillates for large omega
        let obs = collective_spin(12, SpinAxis::Z, SpinRepr::Dicke).unwrap();
        let psi = spin_coherent(12, 1.0, 0.0, SpinRepr::Dicke).unwrap();
        let r = weighted_measure(&psi, &obs, &w, NormKind::TraceNorm).unwrap();
        let weights: Vec<f64> = r.per_mode.iter().map(|c| c.weight).collect();
        let monotone = weights.windows(2).all(|p| p[1] >= p[0] * (1.0 - 1e-12));
        assert_eq!(r.monotone_weight, monotone);
    }

    #[test]
    fn coherent_skew_information() {
        let (n, theta) = (10, 1.1);
        let obs = collective_spin(n, SpinAxis::Z, SpinRepr::Dicke).unwrap();
        let psi = spin_coherent(n, theta, 0.4, SpinRepr::Dicke).unwrap();
        let s = skew_information_paths(&psi, &obs).unwrap();
        let expect = n as f64 * theta.sin().powi(2) / 4.0;
        assert!((s.commutator - expect).abs() < 1e-12);
        assert!((s.mode_sum - expect).abs() < 1e-12);
    }

    #[test]
    fn diagonal_states_have_nothing() {
        let rho = QuantumState::from_density(HermitianMatrix::from_real_diag(&[0.5, 0.25, 0.25])).unwrap();
        let (_, obs) = qutrit();
        assert!(skew_information(&rho, &obs).unwrap().abs() < 1e-15);
        let b = sandwich_bounds(&rho, &obs, 1.0).unwrap();
        assert!(b.lower.abs() < 1e-12 && b.value.abs() < 1e-15 && b.upper.abs() < 1e-15 && b.holds);
    }

    #[test]
    fn ceiling_values() {
        let c = separability_ceiling(4, 1.0, 2.0, ConcaveFn::ExpCutoff).unwrap();
        assert!((c - (1.0 - (-1.0f64 / 16.0).exp())).abs() < 1e-15);
        let big = 100_000usize;
        let sigma = (big as f64 * (big as f64).ln()).sqrt();
        assert!(separability_ceiling(big, 1.0, sigma, ConcaveFn::ExpCutoff).unwrap() < 0.01);
        assert!(separability_ceiling(0, 1.0, 1.0, ConcaveFn::Sqrt).is_err());
    }

    #[test]
    fn hellinger_identities_on_qutrit() {
        let (rho, obs) = qutrit();
        for x in [0.0, 0.3, 1.7, -2.2] {
            let e = hellinger_mode_expansion(&rho, &obs, x).unwrap();
            assert!((e.direct - e.expansion).abs() < 1e-12);
            assert!(e.expansion_imag.abs() < 1e-12);
        }
        let sigma = 0.8;
        let avg = hellinger_average(&rho, &obs, sigma, 60).unwrap();
        let m = scaled_measure(&rho, &obs, sigma).unwrap().value;
        assert!((avg - m).abs() < 1e-10);
    }
}
