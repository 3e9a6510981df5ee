//! Kraus channels, covariant and incoherent channel generators, and
//! Lindblad evolution.

use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::asymmetry::ModeSpectrum;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix};
use crate::random::{random_isometry, random_unitary, random_matrix, rng_from_seed, SimRng};
use crate::states::{Observable, QuantumState, Representation};
use crate::tolerances::TOLERANCES;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    Incoherent,
    Covariant,
    Generic,
}

/// A completely positive trace-preserving map `rho -> sum_n K_n rho K_n^dag`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
    kind: ChannelKind,
}

impl KrausChannel {
    /// Validates shapes and completeness `sum K^dag K = I`.
    pub fn new(ops: Vec<CMatrix>, kind: ChannelKind) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::InvalidArgument("no Kraus operators".into()))?;
        let d = first.rows();
        for k in &ops {
            k.ensure_square()?;
            if k.rows() != d {
                return Err(Error::DimensionMismatch { expected: d, got: k.rows() });
            }
        }
        let ch = Self { ops, kind };
        let defect = ch.completeness_defect();
        if defect > TOLERANCES.completeness {
            return Err(Error::NotTracePreserving(defect));
        }
        Ok(ch)
    }

    /// Skips the completeness check; [`crate::asymmetry::covariance_check`]
    /// and [`KrausChannel::completeness_defect`] still report it.
    pub fn new_unchecked(ops: Vec<CMatrix>, kind: ChannelKind) -> Self { Self { ops, kind } }

    pub fn identity(dim: usize) -> Self { Self { ops: vec![CMatrix::identity(dim)], kind: ChannelKind::Covariant } }

    pub fn unitary(u: CMatrix, kind: ChannelKind) -> Result<Self> { Self::new(vec![u], kind) }

    pub fn operators(&self) -> &[CMatrix] { &self.ops }

    pub fn kind(&self) -> ChannelKind { self.kind }

    pub fn dim(&self) -> usize { self.ops[0].rows() }

    /// Max-abs deviation of `sum K^dag K` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.dim();
        let mut acc = CMatrix::zeros(d, d);
        for k in &self.ops {
            acc += &k.adjoint_matmul(k);
        }
        acc.max_abs_diff(&CMatrix::identity(d))
    }

    /// Applies the map to an arbitrary operator (linear extension).
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for k in &self.ops {
            out += &m.conjugate_by(k);
        }
        out
    }

    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: state.dim() });
        }
        let out = match state.vector() {
            Some(v) => {
                let mut acc = CMatrix::zeros(v.len(), v.len());
                for k in &self.ops {
                    let w = k.matvec(v);
                    acc += &CMatrix::outer(&w, &w);
                }
                acc
            }
            None => self.apply_matrix(state.matrix()),
        };
        Ok(QuantumState::from_parts(HermitianMatrix::symmetrized(out), state.repr()))
    }

    /// Post-measurement branches `(p_n, K_n rho K_n^dag / p_n)`; branches with
    /// `p_n` below `1e-14` are dropped.
    pub fn branches(&self, state: &QuantumState) -> Result<Vec<(f64, QuantumState)>> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: state.dim() });
        }
        let mut out = Vec::new();
        for k in &self.ops {
            let m = state.matrix().conjugate_by(k);
            let p = m.trace().re;
            if p > 1e-14 {
                let st = QuantumState::from_parts(HermitianMatrix::symmetrized(m.scale_real(1.0 / p)), state.repr());
                out.push((p, st));
            }
        }
        Ok(out)
    }

    /// `E_2 o E_1`.
    pub fn then(&self, next: &KrausChannel) -> Result<Self> {
        if self.dim() != next.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: next.dim() });
        }
        let kind = if self.kind == next.kind { self.kind } else { ChannelKind::Generic };
        let ops = next.ops.iter().flat_map(|b| self.ops.iter().map(move |a| b.matmul(a))).collect();
        Ok(Self { ops, kind })
    }

    /// Convex combination `sum_i p_i E_i`.
    pub fn mixture(channels: &[KrausChannel], weights: &[f64]) -> Result<Self> {
        if channels.is_empty() || channels.len() != weights.len() {
            return Err(Error::InvalidArgument("mixture needs one weight per channel".into()));
        }
        let total: f64 = weights.iter().sum();
        let kind = channels[0].kind;
        let kind = if channels.iter().all(|c| c.kind == kind) { kind } else { ChannelKind::Generic };
        let mut ops = Vec::new();
        for (c, &w) in channels.iter().zip(weights) {
            if w < 0.0 {
                return Err(Error::InvalidArgument("negative mixture weight".into()));
            }
            if w == 0.0 {
                continue;
            }
            ops.extend(c.ops.iter().map(|k| k.scale_real((w / total).sqrt())));
        }
        Self::new(ops, kind)
    }
}

/// Sector-level damping matrix `D_mn = d(lambda_m - lambda_n)`.
fn sector_damping<F: Fn(f64) -> f64>(obs: &Observable, damping: F) -> CMatrix {
    let values: Vec<f64> = obs.sectors().iter().map(|s| s.value).collect();
    let s = values.len();
    CMatrix::from_fn(s, s, |m, n| C64::new(if m == n { 1.0 } else { damping(values[m] - values[n]) }, 0.0))
}

/// Applies a Schur (entrywise) multiplier defined on sector pairs, in the
/// eigenbasis of `obs`, to an arbitrary operator.
pub fn schur_map<F: Fn(f64) -> f64>(m: &CMatrix, obs: &Observable, damping: F) -> CMatrix {
    let d = sector_damping(obs, damping);
    let sof = obs.sector_of();
    let eig = obs.to_eigenbasis(m).map(|a, b, z| z * d[(sof[a], sof[b])]);
    obs.from_eigenbasis(&eig)
}

/// Kraus form of a sector Schur multiplier. The multiplier is completely
/// positive iff the sector-level matrix `D` is positive semidefinite; its
/// eigenvectors give Kraus operators `sqrt(mu_k) sum_m u_k[m] P_m`.
pub fn schur_channel<F: Fn(f64) -> f64>(obs: &Observable, damping: F) -> Result<KrausChannel> {
    let d = HermitianMatrix::symmetrized(sector_damping(obs, damping));
    let eig = d.eigh()?;
    let top = eig.values.last().copied().unwrap_or(1.0).abs().max(1.0);
    let min = eig.values[0];
    if min < -1e-12 * top * d.dim() as f64 {
        return Err(Error::NotCompletelyPositive(min));
    }
    let sof = obs.sector_of();
    let mut ops = Vec::new();
    for (k, &mu) in eig.values.iter().enumerate() {
        if mu <= 1e-14 * top {
            continue;
        }
        let amp: Vec<C64> = (0..obs.dim()).map(|a| eig.vectors[(sof[a], k)] * mu.sqrt()).collect();
        ops.push(obs.from_eigenbasis(&CMatrix::from_diag(&amp)));
    }
    KrausChannel::new(ops, ChannelKind::Covariant)
}

fn validate_modes(obs: &Observable, modes: &[f64]) -> Result<(ModeSpectrum, Vec<bool>)> {
    let spec = ModeSpectrum::new(obs);
    let mut selected = vec![false; spec.len()];
    for &w in modes {
        selected[spec.index_of(w)?] = true;
    }
    for (i, &on) in selected.iter().enumerate() {
        if on && !selected[spec.mirror(i)] {
            return Err(Error::ModesNotSymmetric(spec.omegas()[i]));
        }
    }
    Ok((spec, selected))
}

/// Multiplies the listed mode components by `factor` and leaves the rest.
/// `factor = 0` is partial dephasing.
pub fn partial_damping(obs: &Observable, modes: &[f64], factor: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&factor) {
        return Err(Error::InvalidArgument(format!("damping factor {factor} outside [0, 1]")));
    }
    let (spec, selected) = validate_modes(obs, modes)?;
    if !selected.iter().any(|&s| s) {
        return Ok(KrausChannel::identity(obs.dim()));
    }
    schur_channel(obs, |w| {
        let idx = spec.index_of(w).expect("spacing of this observable");
        if selected[idx] {
            factor
        } else {
            1.0
        }
    })
}

/// The map zeroing the listed mode components. It is a channel only when
/// the resulting sector-level mask is positive semidefinite; otherwise
/// [`Error::NotCompletelyPositive`] is returned.
pub fn partial_dephasing(obs: &Observable, kill_modes: &[f64]) -> Result<KrausChannel> {
    partial_damping(obs, kill_modes, 0.0)
}

/// The fuzzy measurement channel: sector block `(m, n)` of `rho` times
/// `exp(-(lambda_m - lambda_n)^2 / (8 sigma^2))`.
pub fn fuzzy_channel(state: &QuantumState, obs: &Observable, sigma: f64) -> Result<QuantumState> {
    if !(sigma > 0.0) {
        return Err(Error::NonPositiveSigma(sigma));
    }
    if state.dim() != obs.dim() {
        return Err(Error::DimensionMismatch { expected: obs.dim(), got: state.dim() });
    }
    let m = schur_map(state.matrix(), obs, |w| (-w * w / (8.0 * sigma * sigma)).exp());
    Ok(QuantumState::from_parts(HermitianMatrix::symmetrized(m), state.repr()))
}

/// Kraus form of the fuzzy measurement channel.
pub fn fuzzy_kraus(obs: &Observable, sigma: f64) -> Result<KrausChannel> {
    if !(sigma > 0.0) {
        return Err(Error::NonPositiveSigma(sigma));
    }
    schur_channel(obs, |w| (-w * w / (8.0 * sigma * sigma)).exp())
}

/// Random incoherent channel with exactly `n_kraus` operators, each with one
/// nonzero entry per column.
///
/// A random map `f` sends basis state `j` to `f(j)` with at most `n_kraus`
/// preimages per target. Each preimage set gets a random isometry from its
/// span into `C^{n_kraus}`, whose rows become the entries of the operators;
/// completeness holds by construction. Each operator is then row-permuted.
pub fn random_incoherent_channel(dim: usize, n_kraus: usize, seed: u64) -> Result<KrausChannel> {
    let mut rng = rng_from_seed(seed);
    random_incoherent_with(dim, n_kraus, &mut rng)
}

pub fn random_incoherent_with(dim: usize, n_kraus: usize, rng: &mut SimRng) -> Result<KrausChannel> {
    if dim < 2 || n_kraus < 1 {
        return Err(Error::InvalidArgument("need dim >= 2 and n_kraus >= 1".into()));
    }
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for j in 0..dim {
        let open: Vec<usize> = (0..dim).filter(|&i| fibers[i].len() < n_kraus).collect();
        let i = open[rng.random_range(0..open.len())];
        fibers[i].push(j);
    }
    let mut ops = vec![CMatrix::zeros(dim, dim); n_kraus];
    for (i, fiber) in fibers.iter().enumerate() {
        if fiber.is_empty() {
            continue;
        }
        let w = random_isometry(n_kraus, fiber.len(), rng);
        for (c, &j) in fiber.iter().enumerate() {
            for (k, op) in ops.iter_mut().enumerate() {
                op[(i, j)] = w[(k, c)];
            }
        }
    }
    for op in ops.iter_mut() {
        let mut perm: Vec<usize> = (0..dim).collect();
        perm.shuffle(rng);
        *op = CMatrix::from_fn(dim, dim, |r, c| op[(perm[r], c)]);
    }
    KrausChannel::new(ops, ChannelKind::Incoherent)
}

/// `S^{-1/2}` for a positive definite `S`.
fn inverse_sqrt(s: &CMatrix) -> Result<CMatrix> {
    let eig = HermitianMatrix::symmetrized(s.clone()).eigh()?;
    if eig.values[0] <= 0.0 {
        return Err(Error::NotPsd(eig.values[0]));
    }
    Ok(eig.reconstruct_with(|x| 1.0 / x.sqrt()))
}

/// Kraus operators that each shift `L` by a fixed spacing: for every mode
/// `Delta`, a random matrix supported on the sector blocks `(m, n)` with
/// `lambda_m - lambda_n = Delta`, normalized jointly by `S^{-1/2}` where
/// `S = sum G^dag G` is sector-block diagonal.
fn random_shift_channel(obs: &Observable, spec: &ModeSpectrum, rng: &mut SimRng) -> Result<KrausChannel> {
    let d = obs.dim();
    let sof = obs.sector_of();
    let mut gens = Vec::new();
    for idx in 0..spec.len() {
        // keep the zero shift so that S is invertible; sample the others
        if idx != spec.zero_index() && rng.random_range(0..3) == 0 {
            continue;
        }
        let scale = if idx == spec.zero_index() { 1.0 } else { rng.random_range(0.1..1.0) };
        let g = random_matrix(d, d, rng)
            .map(|a, b, z| if spec.mode_of_pair(sof[a], sof[b]) == idx { z * scale } else { C64::new(0.0, 0.0) });
        gens.push(g);
    }
    // generators live in the eigenbasis of L
    let mut s = CMatrix::zeros(d, d);
    for g in &gens {
        s += &g.adjoint_matmul(g);
    }
    let norm = inverse_sqrt(&s)?;
    let ops = gens.iter().map(|g| obs.from_eigenbasis(&g.matmul(&norm))).collect();
    KrausChannel::new(ops, ChannelKind::Covariant)
}

/// Unitary acting as an independent random unitary inside each sector.
fn random_sector_unitary(obs: &Observable, rng: &mut SimRng) -> Result<KrausChannel> {
    let mut u = CMatrix::zeros(obs.dim(), obs.dim());
    for sec in obs.sectors() {
        let block = random_unitary(sec.len, rng);
        for (i, a) in sec.indices().enumerate() {
            for (j, b) in sec.indices().enumerate() {
                u[(a, b)] = block[(i, j)];
            }
        }
    }
    KrausChannel::unitary(obs.from_eigenbasis(&u), ChannelKind::Covariant)
}

/// Random covariant primitive, chosen uniformly among: a translation, a
/// partial damping of a random negation-closed mode set, a Gaussian
/// dephasing, a sector-block unitary, and a spacing-shift channel.
fn random_covariant_primitive(obs: &Observable, spec: &ModeSpectrum, rng: &mut SimRng) -> Result<KrausChannel> {
    loop {
        match rng.random_range(0..5) {
            0 => {
                let x = rng.random_range(-10.0..10.0);
                return KrausChannel::unitary(crate::asymmetry::translation_unitary(obs, x), ChannelKind::Covariant);
            }
            1 => {
                let modes: Vec<f64> = spec
                    .positive_indices()
                    .filter(|_| rng.random_bool(0.5))
                    .flat_map(|i| [spec.omegas()[i], -spec.omegas()[i]])
                    .collect();
                let factor = rng.random_range(0.0..1.0);
                match partial_damping(obs, &modes, factor) {
                    Ok(ch) => return Ok(ch),
                    // not every mode mask is completely positive; draw again
                    Err(Error::NotCompletelyPositive(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            2 => {
                let span = obs.spectral_span().max(1.0);
                let sigma = span * rng.random_range(0.05..2.0);
                return fuzzy_kraus(obs, sigma);
            }
            3 => return random_sector_unitary(obs, rng),
            _ => return random_shift_channel(obs, spec, rng),
        }
    }
}

/// Random translation-covariant channel: a convex mixture of one to three
/// covariant primitives, optionally composed with another primitive.
pub fn random_covariant_channel(obs: &Observable, seed: u64) -> Result<KrausChannel> {
    let mut rng = rng_from_seed(seed);
    random_covariant_with(obs, &mut rng)
}

pub fn random_covariant_with(obs: &Observable, rng: &mut SimRng) -> Result<KrausChannel> {
    let spec = ModeSpectrum::new(obs);
    let count = rng.random_range(1..=3);
    let parts: Vec<KrausChannel> =
        (0..count).map(|_| random_covariant_primitive(obs, &spec, rng)).collect::<Result<_>>()?;
    let weights = crate::random::random_simplex(count, rng);
    let mixed = KrausChannel::mixture(&parts, &weights)?;
    if rng.random_bool(0.3) {
        mixed.then(&random_covariant_primitive(obs, &spec, rng)?)
    } else {
        Ok(mixed)
    }
}

/// Sparse complex matrix as `(row, col, value)` triplets.
#[derive(Clone, Debug)]
struct Sparse {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for (j, &z) in m.row(i).iter().enumerate() {
                if z != C64::new(0.0, 0.0) {
                    entries.push((i, j, z));
                }
            }
        }
        Self { dim: m.rows(), entries }
    }

    /// `self * m`.
    fn left_mul(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, m.cols());
        for &(i, k, a) in &self.entries {
            let src = m.row(k).to_vec();
            for (o, b) in out.row_mut(i).iter_mut().zip(src) {
                *o += a * b;
            }
        }
        out
    }

    /// `m * self^dag`.
    fn right_mul_adjoint(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.rows(), self.dim);
        for &(j, k, a) in &self.entries {
            // (m A^dag)_{ij} = sum_k m_{ik} conj(A_{jk})
            let ac = a.conj();
            for i in 0..m.rows() {
                out[(i, j)] += m[(i, k)] * ac;
            }
        }
        out
    }

    fn adjoint_times_self(&self, dense: &CMatrix) -> Self { Self::from_dense(&dense.adjoint_matmul(dense)) }

    /// Power-iteration estimate of the largest eigenvalue of `A^dag A`.
    fn op_norm_sqr(dense: &CMatrix) -> f64 {
        let ata = dense.adjoint_matmul(dense);
        let n = ata.rows();
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.37 * i as f64 / n as f64, 0.1)).collect();
        let mut estimate = 0.0;
        for _ in 0..200 {
            let w = ata.matvec(&v);
            let norm = crate::linalg::vec_norm(&w);
            let vn = crate::linalg::vec_norm(&v);
            if norm == 0.0 {
                return 0.0;
            }
            estimate = norm / vn;
            v = w.into_iter().map(|z| z / norm).collect();
        }
        estimate
    }
}

/// `d rho / dt = A rho A^dag - (A^dag A rho + rho A^dag A) / 2`.
#[derive(Clone, Debug)]
pub struct LindbladSpec {
    pub jump_operator: CMatrix,
    pub dt: f64,
    pub steps: usize,
    /// Keep every `record_every`-th state (the initial state is always kept).
    pub record_every: usize,
}

impl LindbladSpec {
    pub fn new(jump_operator: CMatrix, dt: f64, steps: usize) -> Self {
        Self { jump_operator, dt, steps, record_every: 1 }
    }

    /// Default step `min(1e-3, 0.01 / ||A||_op^2)`.
    pub fn auto_dt(jump_operator: &CMatrix) -> f64 {
        let norm = Sparse::op_norm_sqr(jump_operator);
        if norm == 0.0 {
            1e-3
        } else {
            (0.01 / norm).min(1e-3)
        }
    }

    /// Integrates to `t_max`, recording `points` equally spaced states
    /// (including `t = 0`). The step is the largest divisor of the recording
    /// interval not exceeding [`LindbladSpec::auto_dt`].
    pub fn for_grid(jump_operator: CMatrix, t_max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(t_max > 0.0) {
            return Err(Error::InvalidArgument("need at least two grid points and t_max > 0".into()));
        }
        let interval = t_max / (points - 1) as f64;
        let max_dt = Self::auto_dt(&jump_operator);
        let per = (interval / max_dt).ceil().max(1.0) as usize;
        Ok(Self { dt: interval / per as f64, steps: per * (points - 1), record_every: per, jump_operator })
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    /// Largest trace deviation seen before renormalization in any step.
    pub max_trace_drift: f64,
    pub dt: f64,
}

/// Fixed-step RK4 integration of the Lindblad equation.
///
/// Each step is re-symmetrized and renormalized; a step whose trace drift
/// exceeds the per-step tolerance, or a step size beyond the stability
/// estimate `dt ||A||^2 <= 1`, yields [`Error::StepTooLarge`].
pub fn lindblad_evolve(rho0: &QuantumState, spec: &LindbladSpec) -> Result<Trajectory> {
    let a = &spec.jump_operator;
    a.ensure_square()?;
    if a.rows() != rho0.dim() {
        return Err(Error::DimensionMismatch { expected: rho0.dim(), got: a.rows() });
    }
    if !(spec.dt > 0.0) || spec.record_every == 0 {
        return Err(Error::InvalidArgument("dt must be positive and record_every nonzero".into()));
    }
    let norm = Sparse::op_norm_sqr(a);
    if spec.dt * norm > 1.0 {
        return Err(Error::StepTooLarge(format!("dt * ||A||^2 = {}", spec.dt * norm)));
    }
    let sa = Sparse::from_dense(a);
    let sata = sa.adjoint_times_self(a);
    let rhs = |rho: &CMatrix| -> CMatrix {
        let jump = sa.right_mul_adjoint(&sa.left_mul(rho));
        let left = sata.left_mul(rho);
        let mut out = jump;
        let d = rho.rows();
        for i in 0..d {
            for j in 0..d {
                // rho A^dag A = (A^dag A rho)^dag for Hermitian rho
                out[(i, j)] -= (left[(i, j)] + left[(j, i)].conj()) * 0.5;
            }
        }
        out
    };
    let repr: Representation = rho0.repr();
    let mut rho = rho0.matrix().matrix().clone();
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut max_drift = 0.0f64;
    let h = spec.dt;
    for step in 1..=spec.steps {
        let k1 = rhs(&rho);
        let k2 = rhs(&(&rho + &k1.scale_real(h / 2.0)));
        let k3 = rhs(&(&rho + &k2.scale_real(h / 2.0)));
        let k4 = rhs(&(&rho + &k3.scale_real(h)));
        let mut incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        incr = incr.scale_real(h / 6.0);
        let before = rho.trace().re;
        rho += &incr;
        rho = rho.hermitian_part();
        let tr = rho.trace().re;
        if !tr.is_finite() {
            return Err(Error::StepTooLarge(format!("non-finite state at step {step}")));
        }
        let drift = (tr - before).abs();
        max_drift = max_drift.max(drift);
        if drift > TOLERANCES.trace_drift_per_step {
            return Err(Error::StepTooLarge(format!("trace drift {drift:e} at step {step}")));
        }
        rho = rho.scale_real(1.0 / tr);
        if step % spec.record_every == 0 || step == spec.steps {
            times.push(step as f64 * h);
            states.push(QuantumState::from_parts(HermitianMatrix::symmetrized(rho.clone()), repr));
        }
    }
    Ok(Trajectory { times, states, max_trace_drift: max_drift, dt: h })
}

/// Exact dephased GHZ state in the Dicke basis: populations `cos^2(theta/2)`
/// and `sin^2(theta/2)` at `k = 0, N`, coherence damped by `e^{-N^2 tau/2}`.
pub fn dephased_ghz(n: usize, theta: f64, phi: f64, tau: f64) -> Result<QuantumState> {
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!("tau = {tau} must be nonnegative")));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut m = CMatrix::zeros(n + 1, n + 1);
    let decay = (-(n as f64).powi(2) * tau / 2.0).exp();
    m[(0, 0)] = C64::new(c * c, 0.0);
    m[(n, n)] = C64::new(s * s, 0.0);
    m[(0, n)] = C64::from_polar(c * s * decay, -phi);
    m[(n, 0)] = m[(0, n)].conj();
    Ok(QuantumState::from_parts(HermitianMatrix::symmetrized(m), Representation::Dicke(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymmetry::{mode_profile, total_asymmetry};
    use crate::states::{collective_spin, ghz, lowering_operator, SpinAxis, SpinRepr};

    fn qutrit() -> (QuantumState, Observable) {
        let s = 1.0 / 3f64.sqrt();
        let rho = QuantumState::pure(vec![C64::new(s, 0.0); 3]).unwrap();
        (rho, Observable::new(HermitianMatrix::from_real_diag(&[0.0, 1.0, 2.0])).unwrap())
    }

    #[test]
    fn qutrit_partial_dephasing() {
        let (rho, l) = qutrit();
        let ch = partial_dephasing(&l, &[1.0, -1.0]).unwrap();
        let out = ch.apply(&rho).unwrap();
        let third = 1.0 / 3.0;
        let want = [[third, 0.0, third], [0.0, third, 0.0], [third, 0.0, third]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((out.matrix()[(i, j)] - C64::new(want[i][j], 0.0)).norm() < 1e-15);
            }
        }
        let p = mode_profile(&out, &l).unwrap();
        assert!(p.get(1.0).unwrap().a_hs.abs() < 1e-15);
        assert!((p.get(2.0).unwrap().a_hs - 1.0 / 6.0).abs() < 1e-12);
        assert!((total_asymmetry(&out, &l).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dephasing_edge_cases() {
        let (rho, l) = qutrit();
        let id = partial_dephasing(&l, &[]).unwrap();
        assert!(id.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let all = partial_dephasing(&l, &[1.0, -1.0, 2.0, -2.0]).unwrap();
        assert!(total_asymmetry(&all.apply(&rho).unwrap(), &l).unwrap() < 1e-15);
        assert!(matches!(partial_dephasing(&l, &[1.0]), Err(Error::ModesNotSymmetric(_))));
        assert!(matches!(partial_dephasing(&l, &[0.5, -0.5]), Err(Error::UnknownMode(_))));
        // killing only +-2 leaves the mask [[1,1,0],[1,1,1],[0,1,1]], not PSD
        assert!(matches!(partial_dephasing(&l, &[2.0, -2.0]), Err(Error::NotCompletelyPositive(_))));
    }

    #[test]
    fn fuzzy_factors() {
        let (rho, l) = qutrit();
        let out = fuzzy_channel(&rho, &l, 1.0).unwrap();
        let third = 1.0 / 3.0;
        assert!((out.matrix()[(0, 1)].re - third * (-1.0f64 / 8.0).exp()).abs() < 1e-15);
        assert!((out.matrix()[(0, 2)].re - third * (-0.5f64).exp()).abs() < 1e-15);
        let kraus = fuzzy_kraus(&l, 1.0).unwrap();
        assert!(kraus.apply(&rho).unwrap().matrix().max_abs_diff(out.matrix()) < 1e-12);
        assert!(matches!(fuzzy_channel(&rho, &l, 0.0), Err(Error::NonPositiveSigma(_))));
    }

    #[test]
    fn incoherent_channel_structure() {
        for seed in 0..20 {
            let ch = random_incoherent_channel(5, 1 + seed as usize % 4, seed).unwrap();
            assert_eq!(ch.operators().len(), 1 + seed as usize % 4);
            assert!(ch.completeness_defect() < 1e-10);
            for k in ch.operators() {
                for j in 0..5 {
                    assert!(k.column(j).iter().filter(|z| z.norm() > 0.0).count() <= 1);
                }
            }
        }
    }

    #[test]
    fn covariant_channels_are_covariant() {
        let mut rng = rng_from_seed(8);
        let l = crate::random::random_observable(4, true, &mut rng);
        for seed in 0..10 {
            let ch = random_covariant_channel(&l, seed).unwrap();
            let r = crate::asymmetry::covariance_check(&ch, &l, 4, seed).unwrap();
            assert!(r.is_covariant, "seed {seed}: {}", r.max_violation);
        }
    }

    #[test]
    fn not_trace_preserving_rejected() {
        let half = CMatrix::identity(2).scale_real(0.5);
        assert!(matches!(KrausChannel::new(vec![half], ChannelKind::Generic), Err(Error::NotTracePreserving(_))));
    }

    #[test]
    fn dephasing_ghz_decay_short() {
        let n = 6;
        let rho0 = ghz(n, std::f64::consts::FRAC_PI_2, 0.0, SpinRepr::Dicke).unwrap();
        let sz = collective_spin(n, SpinAxis::Z, SpinRepr::Dicke).unwrap();
        let spec = LindbladSpec::for_grid(sz.matrix().matrix().clone(), 0.05, 6).unwrap();
        let traj = lindblad_evolve(&rho0, &spec).unwrap();
        for (t, st) in traj.times.iter().zip(&traj.states) {
            let exact = dephased_ghz(n, std::f64::consts::FRAC_PI_2, 0.0, *t).unwrap();
            assert!(st.matrix().max_abs_diff(exact.matrix()) < 1e-9);
        }
        assert!(traj.max_trace_drift < 1e-9);
    }

    #[test]
    fn stationary_states() {
        let n = 3;
        let up = ghz(n, 0.0, 0.0, SpinRepr::Dicke).unwrap();
        let sz = collective_spin(n, SpinAxis::Z, SpinRepr::Dicke).unwrap();
        let traj = lindblad_evolve(&up, &LindbladSpec::new(sz.matrix().matrix().clone(), 1e-3, 50)).unwrap();
        assert!(traj.states.last().unwrap().matrix().max_abs_diff(up.matrix()) < 1e-14);

        let down = ghz(n, std::f64::consts::PI, 0.0, SpinRepr::Dicke).unwrap();
        let lower = lowering_operator(n, SpinRepr::Dicke).unwrap();
        let traj = lindblad_evolve(&down, &LindbladSpec::new(lower, 1e-3, 50)).unwrap();
        assert!(traj.states.last().unwrap().matrix().max_abs_diff(down.matrix()) < 1e-14);
    }

    #[test]
    fn step_too_large() {
        let sz = collective_spin(10, SpinAxis::Z, SpinRepr::Dicke).unwrap();
        let rho0 = ghz(10, 1.0, 0.0, SpinRepr::Dicke).unwrap();
        let spec = LindbladSpec::new(sz.matrix().matrix().clone(), 0.5, 3);
        assert!(matches!(lindblad_evolve(&rho0, &spec), Err(Error::StepTooLarge(_))));
    }
}
