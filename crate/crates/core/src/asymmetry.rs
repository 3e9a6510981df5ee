//! Modes of asymmetry relative to an observable `L`, the per-mode and total
//! asymmetry measures, translations `e^{-ixL}`, and sampling-based
//! covariance checks.
//!
//! Everything is computed in the eigenbasis of `L`, where sectors are
//! contiguous index ranges. Mode components are defined sector-pairwise, so
//! results do not depend on the basis chosen inside a degenerate sector.

use num_complex::Complex64 as C64;

use crate::dynamics::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{trace_norm_rect, CMatrix, HermitianMatrix};
use crate::random::{random_mixed_state, random_state, rng_from_seed};
use crate::states::{Observable, QuantumState};
use crate::tolerances::TOLERANCES;

/// The set of eigenvalue spacings of an observable, with the map from
/// sector pairs to modes.
#[derive(Clone, Debug)]
pub struct ModeSpectrum {
    omegas: Vec<f64>,
    zero: usize,
    pair_mode: Vec<u32>,
    n_sectors: usize,
    tolerance: f64,
}

impl ModeSpectrum {
    pub fn new(obs: &Observable) -> Self {
        let values: Vec<f64> = obs.sectors().iter().map(|s| s.value).collect();
        let s = values.len();
        let tolerance = 2.0 * obs.tolerance();
        let mut diffs: Vec<f64> = Vec::with_capacity(s * (s - 1) / 2);
        for m in 0..s {
            for n in 0..m {
                diffs.push(values[m] - values[n]);
            }
        }
        diffs.sort_by(f64::total_cmp);
        // chain-group the positive spacings
        let mut positive: Vec<(f64, usize)> = Vec::new();
        for (i, &d) in diffs.iter().enumerate() {
            match positive.last_mut() {
                Some((sum, count)) if d - diffs[i - 1] <= tolerance => {
                    *sum += d;
                    *count += 1;
                }
                _ => positive.push((d, 1)),
            }
        }
        let positive: Vec<f64> = positive.iter().map(|&(sum, c)| sum / c as f64).collect();
        let mut omegas: Vec<f64> = positive.iter().rev().map(|w| -w).collect();
        let zero = omegas.len();
        omegas.push(0.0);
        omegas.extend(&positive);

        let mut spectrum = Self { omegas, zero, pair_mode: vec![0; s * s], n_sectors: s, tolerance };
        for m in 0..s {
            for n in 0..s {
                let idx = if m == n {
                    zero
                } else {
                    spectrum.nearest(values[m] - values[n])
                };
                spectrum.pair_mode[m * s + n] = idx as u32;
            }
        }
        spectrum
    }

    fn nearest(&self, w: f64) -> usize {
        let p = self.omegas.partition_point(|&x| x < w);
        let mut best = p.min(self.omegas.len() - 1);
        if p > 0 && (self.omegas[p - 1] - w).abs() < (self.omegas[best] - w).abs() {
            best = p - 1;
        }
        best
    }

    /// All modes, ascending; symmetric under negation and containing zero.
    pub fn omegas(&self) -> &[f64] { &self.omegas }

    pub fn len(&self) -> usize { self.omegas.len() }

    pub fn is_empty(&self) -> bool { false }

    /// Index of the zero mode.
    pub fn zero_index(&self) -> usize { self.zero }

    /// Indices of the strictly positive modes.
    pub fn positive_indices(&self) -> std::ops::Range<usize> { self.zero + 1..self.omegas.len() }

    /// Index of the mode `-omega`.
    pub fn mirror(&self, idx: usize) -> usize { self.omegas.len() - 1 - idx }

    pub fn tolerance(&self) -> f64 { self.tolerance }

    /// Index of `omega`, or [`Error::UnknownMode`].
    pub fn index_of(&self, omega: f64) -> Result<usize> {
        let i = self.nearest(omega);
        if (self.omegas[i] - omega).abs() <= self.tolerance.max(1e-12 * omega.abs()) {
            Ok(i)
        } else {
            Err(Error::UnknownMode(omega))
        }
    }

    /// Mode index of the sector pair `(m, n)` (`omega = lambda_m - lambda_n`).
    pub fn mode_of_pair(&self, m: usize, n: usize) -> usize {
        self.pair_mode[m * self.n_sectors + n] as usize
    }

    /// Sector pairs `(m, n)` with `lambda_m - lambda_n = omegas[idx]`.
    pub fn pairs(&self, idx: usize) -> Vec<(usize, usize)> {
        let s = self.n_sectors;
        (0..s * s).filter(|&k| self.pair_mode[k] as usize == idx).map(|k| (k / s, k % s)).collect()
    }
}

pub fn mode_spectrum(obs: &Observable) -> ModeSpectrum { ModeSpectrum::new(obs) }

/// `rho^(omega)`: the part of an operator connecting sectors separated by
/// `omega`, in the original basis.
#[derive(Clone, Debug)]
pub struct ModeComponent {
    pub omega: f64,
    pub block: CMatrix,
}

fn check_dim(dim: usize, obs: &Observable) -> Result<()> {
    if dim != obs.dim() {
        return Err(Error::DimensionMismatch { expected: obs.dim(), got: dim });
    }
    Ok(())
}

/// Keeps only the eigenbasis entries of `m_eig` whose sector pair maps to
/// `keep(mode index)`.
fn mask_modes<F: Fn(usize) -> bool>(m_eig: &CMatrix, obs: &Observable, spec: &ModeSpectrum, keep: F) -> CMatrix {
    let sof = obs.sector_of();
    m_eig.map(|a, b, z| if keep(spec.mode_of_pair(sof[a], sof[b])) { z } else { C64::new(0.0, 0.0) })
}

/// Mode component of an arbitrary operator (`rho`, `sqrt(rho)`, ...).
pub fn mode_component(m: &CMatrix, obs: &Observable, omega: f64) -> Result<ModeComponent> {
    check_dim(m.rows(), obs)?;
    let spec = ModeSpectrum::new(obs);
    let idx = spec.index_of(omega)?;
    mode_component_with(m, obs, &spec, idx)
}

pub fn mode_component_with(m: &CMatrix, obs: &Observable, spec: &ModeSpectrum, idx: usize) -> Result<ModeComponent> {
    let masked = mask_modes(&obs.to_eigenbasis(m), obs, spec, |k| k == idx);
    Ok(ModeComponent { omega: spec.omegas()[idx], block: obs.from_eigenbasis(&masked) })
}

/// Every mode component of `m`; they sum to `m`.
pub fn mode_decomposition(m: &CMatrix, obs: &Observable) -> Result<Vec<ModeComponent>> {
    check_dim(m.rows(), obs)?;
    let spec = ModeSpectrum::new(obs);
    let eig = obs.to_eigenbasis(m);
    Ok((0..spec.len())
        .map(|idx| ModeComponent {
            omega: spec.omegas()[idx],
            block: obs.from_eigenbasis(&mask_modes(&eig, obs, &spec, |k| k == idx)),
        })
        .collect())
}

/// A state in the eigenbasis of `L`, with its square root.
pub(crate) enum EigenFrame {
    Pure(Vec<C64>),
    Mixed { rho: CMatrix, root: CMatrix },
}

impl EigenFrame {
    pub(crate) fn new(state: &QuantumState, obs: &Observable) -> Result<Self> {
        check_dim(state.dim(), obs)?;
        Ok(match state.vector() {
            Some(v) => Self::Pure(obs.vector_to_eigenbasis(v)),
            None => {
                let rho = obs.to_eigenbasis(state.matrix());
                let root = crate::linalg::sqrt_psd(&HermitianMatrix::symmetrized(rho.clone()))?.into_inner();
                Self::Mixed { rho, root }
            }
        })
    }
}

/// Per-mode coherences of one state.
#[derive(Clone, Debug)]
pub struct ModeProfile {
    pub spectrum: ModeSpectrum,
    /// `||rho^(omega)||_1`, indexed like `spectrum.omegas()`.
    pub a_tr: Vec<f64>,
    /// `||sqrt(rho)^(omega)||_HS^2`.
    pub a_hs: Vec<f64>,
}

impl ModeProfile {
    pub fn omegas(&self) -> &[f64] { self.spectrum.omegas() }

    pub fn get(&self, omega: f64) -> Result<ModeAsymmetry> {
        let i = self.spectrum.index_of(omega)?;
        Ok(ModeAsymmetry { omega: self.spectrum.omegas()[i], a_tr: self.a_tr[i], a_hs: self.a_hs[i] })
    }

    /// `sum_{omega != 0} a_hs`.
    pub fn total_hs(&self) -> f64 {
        self.a_hs.iter().enumerate().filter(|&(i, _)| i != self.spectrum.zero_index()).map(|(_, a)| a).sum()
    }

    /// `sum_{omega != 0} a_tr`.
    pub fn total_tr(&self) -> f64 {
        self.a_tr.iter().enumerate().filter(|&(i, _)| i != self.spectrum.zero_index()).map(|(_, a)| a).sum()
    }
}

/// Both per-mode measures for every mode.
///
/// For a fixed `omega` each row sector and each column sector occurs in at
/// most one block, so the singular values of `rho^(omega)` are those of its
/// blocks and the trace norm is a sum of block trace norms.
pub fn mode_profile(state: &QuantumState, obs: &Observable) -> Result<ModeProfile> {
    let spectrum = ModeSpectrum::new(obs);
    profile_with(state, obs, spectrum)
}

/// [`mode_profile`] with a spectrum built once for `obs` and reused across
/// states.
pub fn mode_profile_with(state: &QuantumState, obs: &Observable, spectrum: &ModeSpectrum) -> Result<ModeProfile> {
    if spectrum.n_sectors != obs.sectors().len() {
        return Err(Error::DimensionMismatch { expected: obs.sectors().len(), got: spectrum.n_sectors });
    }
    profile_with(state, obs, spectrum.clone())
}

pub(crate) fn profile_with(state: &QuantumState, obs: &Observable, spectrum: ModeSpectrum) -> Result<ModeProfile> {
    let frame = EigenFrame::new(state, obs)?;
    let sectors = obs.sectors();
    let s = sectors.len();
    let mut a_tr = vec![0.0; spectrum.len()];
    let mut a_hs = vec![0.0; spectrum.len()];
    match &frame {
        EigenFrame::Pure(v) => {
            let weights: Vec<f64> =
                sectors.iter().map(|sec| v[sec.indices()].iter().map(|z| z.norm_sqr()).sum()).collect();
            for m in 0..s {
                for n in 0..s {
                    let k = spectrum.mode_of_pair(m, n);
                    a_hs[k] += weights[m] * weights[n];
                    a_tr[k] += (weights[m] * weights[n]).sqrt();
                }
            }
        }
        EigenFrame::Mixed { rho, root } => {
            for m in 0..s {
                let rows: Vec<usize> = sectors[m].indices().collect();
                for n in 0..s {
                    let k = spectrum.mode_of_pair(m, n);
                    let cols = sectors[n].indices();
                    let mut hs = 0.0;
                    for &a in &rows {
                        hs += root.row(a)[cols.clone()].iter().map(|z| z.norm_sqr()).sum::<f64>();
                    }
                    a_hs[k] += hs;
                    a_tr[k] += if rows.len() == 1 && sectors[n].len == 1 {
                        rho[(rows[0], sectors[n].start)].norm()
                    } else {
                        trace_norm_rect(&rho.submatrix(&rows, &cols.collect::<Vec<_>>()))?
                    };
                }
            }
        }
    }
    // exact +-omega symmetry
    for k in spectrum.positive_indices() {
        let j = spectrum.mirror(k);
        let hs = 0.5 * (a_hs[k] + a_hs[j]);
        let tr = 0.5 * (a_tr[k] + a_tr[j]);
        a_hs[k] = hs;
        a_hs[j] = hs;
        a_tr[k] = tr;
        a_tr[j] = tr;
    }
    Ok(ModeProfile { spectrum, a_tr, a_hs })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeAsymmetry {
    pub omega: f64,
    pub a_tr: f64,
    pub a_hs: f64,
}

/// `(||rho^(omega)||_1, ||sqrt(rho)^(omega)||_HS^2)` for one mode.
pub fn mode_asymmetry(state: &QuantumState, obs: &Observable, omega: f64) -> Result<ModeAsymmetry> {
    let spectrum = ModeSpectrum::new(obs);
    spectrum.index_of(omega)?;
    profile_with(state, obs, spectrum)?.get(omega)
}

/// `A_a(rho) = sum_{lambda_i != lambda_j} |(sqrt rho)_ij|^2`, i.e. one minus the
/// weight of `sqrt(rho)` inside the diagonal sector blocks.
pub fn total_asymmetry(state: &QuantumState, obs: &Observable) -> Result<f64> {
    let frame = EigenFrame::new(state, obs)?;
    let inside: f64 = match &frame {
        EigenFrame::Pure(v) => obs
            .sectors()
            .iter()
            .map(|sec| v[sec.indices()].iter().map(|z| z.norm_sqr()).sum::<f64>().powi(2))
            .sum(),
        EigenFrame::Mixed { root, .. } => obs
            .sectors()
            .iter()
            .map(|sec| {
                sec.indices().map(|a| root.row(a)[sec.indices()].iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>()
            })
            .sum(),
    };
    Ok((1.0 - inside).max(0.0))
}

/// The free (sector-block-diagonal) state maximizing the affinity with
/// `rho`: `sigma* = sum_m (P_m sqrt(rho) P_m)^2 / Z`. Returns `sigma*` and
/// `A(rho, sigma*)^2 = Z`.
pub fn closest_free_state(state: &QuantumState, obs: &Observable) -> Result<(QuantumState, f64)> {
    check_dim(state.dim(), obs)?;
    let root = state.sqrt()?;
    let root = obs.to_eigenbasis(&root);
    let sof = obs.sector_of();
    let diag_blocks = root.map(|a, b, z| if sof[a] == sof[b] { z } else { C64::new(0.0, 0.0) });
    let sq = diag_blocks.matmul(&diag_blocks);
    let z = sq.trace().re;
    let sigma = obs.from_eigenbasis(&sq.scale_real(1.0 / z));
    let st = QuantumState::from_parts(HermitianMatrix::symmetrized(sigma), state.repr());
    Ok((st, z))
}

/// `U_x rho U_x^dag` with `U_x = e^{-ixL}`, as phases `e^{-i omega x}` on the
/// mode components.
pub fn translate(state: &QuantumState, obs: &Observable, x: f64) -> Result<QuantumState> {
    check_dim(state.dim(), obs)?;
    let sof = obs.sector_of();
    let values: Vec<f64> = obs.sectors().iter().map(|s| s.value).collect();
    match state.vector() {
        Some(v) => {
            let mut w = obs.vector_to_eigenbasis(v);
            for (a, z) in w.iter_mut().enumerate() {
                *z *= C64::from_polar(1.0, -x * values[sof[a]]);
            }
            QuantumState::pure_normalized(obs.vector_from_eigenbasis(&w), state.repr())
        }
        None => {
            let m = translate_matrix(state.matrix(), obs, x);
            Ok(QuantumState::from_parts(HermitianMatrix::symmetrized(m), state.repr()))
        }
    }
}

/// `e^{-ixL} M e^{ixL}` for an arbitrary operator.
pub fn translate_matrix(m: &CMatrix, obs: &Observable, x: f64) -> CMatrix {
    let sof = obs.sector_of();
    let phases: Vec<C64> = obs.sectors().iter().map(|s| C64::from_polar(1.0, -x * s.value)).collect();
    let eig = obs.to_eigenbasis(m).map(|a, b, z| z * phases[sof[a]] * phases[sof[b]].conj());
    obs.from_eigenbasis(&eig)
}

/// The unitary `e^{-ixL}`.
pub fn translation_unitary(obs: &Observable, x: f64) -> CMatrix {
    let sof = obs.sector_of();
    let d: Vec<C64> = (0..obs.dim()).map(|a| C64::from_polar(1.0, -x * obs.sectors()[sof[a]].value)).collect();
    obs.from_eigenbasis(&CMatrix::from_diag(&d))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceReport {
    pub max_violation: f64,
    pub is_covariant: bool,
}

/// Samples random pure and mixed states and measures the largest
/// `||E(rho^(omega)) - E(rho)^(omega)||_HS` over all modes.
pub fn covariance_check(channel: &KrausChannel, obs: &Observable, samples: usize, seed: u64) -> Result<CovarianceReport> {
    check_dim(channel.dim(), obs)?;
    let defect = channel.completeness_defect();
    if defect > TOLERANCES.completeness {
        return Err(Error::NotTracePreserving(defect));
    }
    let spec = ModeSpectrum::new(obs);
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0f64;
    for i in 0..samples {
        let rho = if i % 2 == 0 { random_state(obs.dim(), &mut rng) } else { random_mixed_state(obs.dim(), &mut rng) };
        let rho = rho.matrix().matrix().clone();
        let out_eig = obs.to_eigenbasis(&channel.apply_matrix(&rho));
        let in_eig = obs.to_eigenbasis(&rho);
        for idx in 0..spec.len() {
            let component = obs.from_eigenbasis(&mask_modes(&in_eig, obs, &spec, |k| k == idx));
            let lhs = obs.to_eigenbasis(&channel.apply_matrix(&component));
            let rhs = mask_modes(&out_eig, obs, &spec, |k| k == idx);
            worst = worst.max(lhs.frobenius_distance(&rhs));
        }
    }
    Ok(CovarianceReport { max_violation: worst, is_covariant: worst < TOLERANCES.covariance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{c_a, Basis};
    use crate::states::{collective_spin, SpinAxis, SpinRepr};

    fn qutrit() -> (QuantumState, Observable) {
        let s = 1.0 / 3f64.sqrt();
        let rho = QuantumState::pure(vec![C64::new(s, 0.0); 3]).unwrap();
        (rho, Observable::new(HermitianMatrix::from_real_diag(&[0.0, 1.0, 2.0])).unwrap())
    }

    #[test]
    fn spectra() {
        let sz = collective_spin(3, SpinAxis::Z, SpinRepr::FullTensor).unwrap();
        assert_eq!(mode_spectrum(&sz).omegas(), &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let (_, l) = qutrit();
        assert_eq!(mode_spectrum(&l).omegas(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let doublet = Observable::new(HermitianMatrix::from_real_diag(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(mode_spectrum(&doublet).omegas(), &[-1.0, 0.0, 1.0]);
        let spec = mode_spectrum(&l);
        assert_eq!(spec.pairs(spec.index_of(2.0).unwrap()), vec![(2, 0)]);
        assert!(matches!(spec.index_of(0.5), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn qutrit_components() {
        let (rho, l) = qutrit();
        let c = mode_component(rho.matrix(), &l, 1.0).unwrap();
        // omega = lambda_i - lambda_j = 1: entries (1,0) and (2,1)
        let third = 1.0 / 3.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j + 1 { third } else { 0.0 };
                assert!((c.block[(i, j)].re - want).abs() < 1e-15);
            }
        }
        let m1 = mode_component(rho.matrix(), &l, -1.0).unwrap();
        assert!((m1.block[(0, 1)].re - third).abs() < 1e-15);
        assert!((m1.block[(1, 2)].re - third).abs() < 1e-15);
        assert!(matches!(mode_component(rho.matrix(), &l, 3.0), Err(Error::UnknownMode(_))));

        let parts = mode_decomposition(rho.matrix(), &l).unwrap();
        let mut sum = CMatrix::zeros(3, 3);
        for p in &parts {
            sum += &p.block;
        }
        assert!(sum.max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn qutrit_measures() {
        let (rho, l) = qutrit();
        let p = mode_profile(&rho, &l).unwrap();
        for (w, hs) in [(1.0, 2.0 / 9.0), (-1.0, 2.0 / 9.0), (2.0, 1.0 / 9.0), (-2.0, 1.0 / 9.0)] {
            assert!((p.get(w).unwrap().a_hs - hs).abs() < 1e-15);
        }
        assert!((total_asymmetry(&rho, &l).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let dense = QuantumState::from_density(rho.matrix().clone()).unwrap();
        let q = mode_profile(&dense, &l).unwrap();
        for i in 0..5 {
            assert!((p.a_hs[i] - q.a_hs[i]).abs() < 1e-12);
            assert!((p.a_tr[i] - q.a_tr[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn product_plus_total_below_coherence() {
        let plus = QuantumState::pure(vec![C64::new(0.5, 0.0); 4]).unwrap();
        let sz = collective_spin(2, SpinAxis::Z, SpinRepr::FullTensor).unwrap();
        assert!((total_asymmetry(&plus, &sz).unwrap() - 5.0 / 8.0).abs() < 1e-15);
        let ca = c_a(&plus, &Basis::computational(4)).unwrap().value;
        assert!((ca - 0.75).abs() < 1e-15);
    }

    #[test]
    fn closest_free_state_attains_dual_value() {
        let (rho, l) = qutrit();
        let (sigma, z) = closest_free_state(&rho, &l).unwrap();
        assert!((1.0 - z - 2.0 / 3.0).abs() < 1e-12);
        assert!(total_asymmetry(&sigma, &l).unwrap() < 1e-12);
        let a = crate::overlap::affinity(&rho, &sigma).unwrap();
        assert!((a * a - z).abs() < 1e-10);
    }

    #[test]
    fn translation_examples() {
        let (rho, l) = qutrit();
        let same = translate(&rho, &l, 0.0).unwrap();
        assert!(same.matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let s = 0.5f64.sqrt();
        let sz = Observable::new(HermitianMatrix::from_real_diag(&[0.5, -0.5])).unwrap();
        let plus = QuantumState::pure(vec![C64::new(s, 0.0); 2]).unwrap();
        let minus = QuantumState::from_density(HermitianMatrix::symmetrized(CMatrix::outer(
            &[C64::new(s, 0.0), C64::new(-s, 0.0)],
            &[C64::new(s, 0.0), C64::new(-s, 0.0)],
        )))
        .unwrap();
        let moved = translate(&plus, &sz, std::f64::consts::PI).unwrap();
        assert!(moved.matrix().max_abs_diff(minus.matrix()) < 1e-15);

        let u = translation_unitary(&sz, 0.7);
        let direct = plus.matrix().conjugate_by(&u);
        assert!(translate_matrix(plus.matrix(), &sz, 0.7).max_abs_diff(&direct) < 1e-15);
    }
}
