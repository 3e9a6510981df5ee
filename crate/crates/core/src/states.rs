//! Quantum states and observables in the full 2^N tensor space and in the
//! (N+1)-dimensional Dicke (symmetric) subspace.
//!
//! Conventions: `|0>` is the `s_z = +1/2` eigenstate, the Dicke index `k`
//! counts spins in `|1>`, and `S_-` lowers `m = N/2 - k`. In the full tensor
//! space qubit 0 is the most significant bit of the basis index.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, vec_norm, CMatrix, EigenDecomposition, HermitianMatrix};
use crate::tolerances::TOLERANCES;

/// Largest particle count accepted by the full tensor representation.
pub const MAX_FULL_TENSOR: usize = 12;

/// Which Hilbert space a state or operator lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// `N` qubits, dimension `2^N`.
    FullTensor(usize),
    /// Symmetric subspace of `N` qubits, dimension `N + 1`.
    Dicke(usize),
    /// Anything else.
    Generic(usize),
}

impl Representation {
    pub fn dim(&self) -> usize {
        match *self {
            Self::FullTensor(n) => 1 << n,
            Self::Dicke(n) => n + 1,
            Self::Generic(d) => d,
        }
    }
}

/// Representation choice for the spin-system constructors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinRepr {
    FullTensor,
    Dicke,
}

impl SpinRepr {
    fn tag(self, n: usize) -> Representation {
        match self {
            Self::FullTensor => Representation::FullTensor(n),
            Self::Dicke => Representation::Dicke(n),
        }
    }
}

/// A density matrix with unit trace, optionally backed by a state vector.
///
/// Pure states keep their vector and build the density matrix lazily, which
/// keeps the full-tensor path usable at N = 12.
#[derive(Clone, Debug)]
pub struct QuantumState {
    repr: Representation,
    vector: Option<Vec<C64>>,
    matrix: OnceLock<HermitianMatrix>,
}

impl QuantumState {
    /// Pure state from a normalized vector.
    pub fn pure(vector: Vec<C64>) -> Result<Self> {
        let dim = vector.len();
        Self::pure_with_repr(vector, Representation::Generic(dim))
    }

    pub fn pure_with_repr(vector: Vec<C64>, repr: Representation) -> Result<Self> {
        if vector.len() != repr.dim() {
            return Err(Error::DimensionMismatch { expected: repr.dim(), got: vector.len() });
        }
        if vector.is_empty() {
            return Err(Error::InvalidState("empty vector".into()));
        }
        let norm = vec_norm(&vector);
        if (norm * norm - 1.0).abs() > TOLERANCES.trace {
            return Err(Error::InvalidState(format!("vector norm^2 = {}", norm * norm)));
        }
        Ok(Self { repr, vector: Some(vector), matrix: OnceLock::new() })
    }

    /// Pure state from an arbitrary nonzero vector, normalizing it.
    pub fn pure_normalized(vector: Vec<C64>, repr: Representation) -> Result<Self> {
        let norm = vec_norm(&vector);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Self::pure_with_repr(vector.into_iter().map(|z| z / norm).collect(), repr)
    }

    /// Validated density matrix (unit trace, PSD within the clamp floor).
    pub fn from_density(matrix: HermitianMatrix) -> Result<Self> {
        let dim = matrix.dim();
        Self::from_density_with_repr(matrix, Representation::Generic(dim))
    }

    pub fn from_density_with_repr(matrix: HermitianMatrix, repr: Representation) -> Result<Self> {
        if matrix.dim() != repr.dim() {
            return Err(Error::DimensionMismatch { expected: repr.dim(), got: matrix.dim() });
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TOLERANCES.trace {
            return Err(Error::InvalidState(format!("trace = {tr}")));
        }
        let min = matrix.eigvalsh()?[0];
        if min < -TOLERANCES.psd_clamp {
            return Err(Error::NotPsd(min));
        }
        Ok(Self::from_parts(matrix, repr))
    }

    /// Skips validation; for outputs of trace-preserving maps on valid input.
    pub(crate) fn from_parts(matrix: HermitianMatrix, repr: Representation) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(matrix);
        Self { repr, vector: None, matrix: cell }
    }

    pub fn repr(&self) -> Representation { self.repr }

    pub fn dim(&self) -> usize { self.repr.dim() }

    pub fn with_repr(mut self, repr: Representation) -> Result<Self> {
        if repr.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: repr.dim() });
        }
        self.repr = repr;
        Ok(self)
    }

    /// The state vector, for states built as pure.
    pub fn vector(&self) -> Option<&[C64]> { self.vector.as_deref() }

    pub fn is_pure_hint(&self) -> bool { self.vector.is_some() }

    pub fn matrix(&self) -> &HermitianMatrix {
        self.matrix.get_or_init(|| {
            let v = self.vector.as_ref().expect("state has either a vector or a matrix");
            HermitianMatrix::symmetrized(CMatrix::outer(v, v))
        })
    }

    /// `sqrt(rho)`; exact for pure states since a projector is its own root.
    pub fn sqrt(&self) -> Result<HermitianMatrix> {
        if self.vector.is_some() {
            return Ok(self.matrix().clone());
        }
        crate::linalg::sqrt_psd(self.matrix())
    }

    pub fn trace(&self) -> f64 {
        match &self.vector {
            Some(v) => v.iter().map(|z| z.norm_sqr()).sum(),
            None => self.matrix().trace().re,
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.vector {
            Some(_) => 1.0,
            None => self.matrix().hs_norm_sqr(),
        }
    }

    /// Convex combination of states with the given weights.
    pub fn mixture(states: &[QuantumState], weights: &[f64]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        if states.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: states.len(), got: weights.len() });
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidArgument("negative mixture weight".into()));
        }
        let total: f64 = weights.iter().sum();
        let mut acc = CMatrix::zeros(first.dim(), first.dim());
        for (s, &w) in states.iter().zip(weights) {
            if s.dim() != first.dim() {
                return Err(Error::DimensionMismatch { expected: first.dim(), got: s.dim() });
            }
            acc += &s.matrix().scale_real(w / total);
        }
        Ok(Self::from_parts(HermitianMatrix::symmetrized(acc), first.repr))
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &QuantumState) -> Self {
        let repr = match (self.repr, other.repr) {
            (Representation::FullTensor(a), Representation::FullTensor(b)) => {
                Representation::FullTensor(a + b)
            }
            _ => Representation::Generic(self.dim() * other.dim()),
        };
        match (&self.vector, &other.vector) {
            (Some(u), Some(v)) => {
                Self { repr, vector: Some(kron_vec(u, v)), matrix: OnceLock::new() }
            }
            _ => Self::from_parts(
                HermitianMatrix::symmetrized(self.matrix().kron(other.matrix())),
                repr,
            ),
        }
    }
}

/// One group of (numerically) equal eigenvalues of an observable.
#[derive(Clone, Debug)]
pub struct Sector {
    pub value: f64,
    /// Columns of the sorted eigenvector matrix spanning this sector.
    pub start: usize,
    pub len: usize,
}

impl Sector {
    pub fn indices(&self) -> std::ops::Range<usize> { self.start..self.start + self.len }
}

#[derive(Clone, Debug)]
enum EigenBasis {
    /// Eigenvector `a` is the unit vector `e_{perm[a]}`.
    Permutation(Vec<usize>),
    Dense,
}

/// A Hermitian observable with its eigen-decomposition and degenerate
/// sectors.
#[derive(Clone, Debug)]
pub struct Observable {
    matrix: HermitianMatrix,
    eig: EigenDecomposition,
    sectors: Vec<Sector>,
    sector_of: Vec<usize>,
    basis: EigenBasis,
    tolerance: f64,
}

impl Observable {
    /// Diagonalizes `matrix`; diagonal input skips the eigensolver.
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        if matrix.is_diagonal() {
            let diag: Vec<f64> = matrix.diag().iter().map(|z| z.re).collect();
            let mut perm: Vec<usize> = (0..diag.len()).collect();
            perm.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
            let values: Vec<f64> = perm.iter().map(|&i| diag[i]).collect();
            let mut vectors = CMatrix::zeros(diag.len(), diag.len());
            for (a, &i) in perm.iter().enumerate() {
                vectors[(i, a)] = C64::new(1.0, 0.0);
            }
            let eig = EigenDecomposition { values, vectors };
            return Ok(Self::assemble(matrix, eig, EigenBasis::Permutation(perm)));
        }
        let eig = matrix.eigh()?;
        Ok(Self::assemble(matrix, eig, EigenBasis::Dense))
    }

    /// Builds an observable from a known spectrum and orthonormal
    /// eigenvectors (columns); the matrix is reconstructed from them.
    pub fn from_eigensystem(values: Vec<f64>, vectors: CMatrix) -> Result<Self> {
        vectors.ensure_square()?;
        if values.len() != vectors.rows() {
            return Err(Error::DimensionMismatch { expected: vectors.rows(), got: values.len() });
        }
        let defect = vectors.unitarity_defect();
        if defect > TOLERANCES.orthonormality {
            return Err(Error::BasisNotOrthonormal(defect));
        }
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let sorted_vectors = CMatrix::from_fn(n, n, |i, a| vectors[(i, order[a])]);
        let eig = EigenDecomposition { values: sorted_values, vectors: sorted_vectors };
        let matrix = HermitianMatrix::symmetrized(eig.reconstruct());
        Ok(Self::assemble(matrix, eig, EigenBasis::Dense))
    }

    fn assemble(matrix: HermitianMatrix, eig: EigenDecomposition, basis: EigenBasis) -> Self {
        let values = &eig.values;
        let span = values.last().unwrap() - values.first().unwrap();
        let tolerance = TOLERANCES.degeneracy_rel * (span + 1.0);
        let mut sectors: Vec<Sector> = Vec::new();
        let mut sector_of = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            match sectors.last_mut() {
                Some(s) if v - values[i - 1] <= tolerance => s.len += 1,
                _ => sectors.push(Sector { value: v, start: i, len: 1 }),
            }
            sector_of.push(sectors.len() - 1);
        }
        for s in sectors.iter_mut() {
            s.value = values[s.indices()].iter().sum::<f64>() / s.len as f64;
        }
        Self { matrix, eig, sectors, sector_of, basis, tolerance }
    }

    pub fn matrix(&self) -> &HermitianMatrix { &self.matrix }

    pub fn dim(&self) -> usize { self.eig.values.len() }

    pub fn eigen(&self) -> &EigenDecomposition { &self.eig }

    pub fn sectors(&self) -> &[Sector] { &self.sectors }

    /// Sector index of each sorted eigenvector.
    pub fn sector_of(&self) -> &[usize] { &self.sector_of }

    /// Eigenvalue grouping tolerance.
    pub fn tolerance(&self) -> f64 { self.tolerance }

    /// True when the eigenbasis is a permutation of the computational basis.
    pub fn is_computational_basis(&self) -> bool {
        matches!(self.basis, EigenBasis::Permutation(_))
    }

    /// Largest minus smallest eigenvalue.
    pub fn spectral_span(&self) -> f64 {
        self.eig.values.last().unwrap() - self.eig.values.first().unwrap()
    }

    /// Projector onto sector `m`, in the original basis.
    pub fn projector(&self, m: usize) -> CMatrix {
        let s = &self.sectors[m];
        let v = self.eig.vectors.submatrix(&(0..self.dim()).collect::<Vec<_>>(), &s.indices().collect::<Vec<_>>());
        v.matmul(&v.adjoint())
    }

    /// `V^dag M V`.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        match &self.basis {
            EigenBasis::Permutation(p) => CMatrix::from_fn(p.len(), p.len(), |a, b| m[(p[a], p[b])]),
            EigenBasis::Dense => m.conjugate_by_adjoint(&self.eig.vectors),
        }
    }

    /// `V M V^dag`.
    pub fn from_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        match &self.basis {
            EigenBasis::Permutation(p) => {
                let mut out = CMatrix::zeros(p.len(), p.len());
                for (a, &i) in p.iter().enumerate() {
                    for (b, &j) in p.iter().enumerate() {
                        out[(i, j)] = m[(a, b)];
                    }
                }
                out
            }
            EigenBasis::Dense => m.conjugate_by(&self.eig.vectors),
        }
    }

    /// `V^dag v`.
    pub fn vector_to_eigenbasis(&self, v: &[C64]) -> Vec<C64> {
        match &self.basis {
            EigenBasis::Permutation(p) => p.iter().map(|&i| v[i]).collect(),
            EigenBasis::Dense => self.eig.vectors.adjoint_matvec(v),
        }
    }

    /// `V v`.
    pub fn vector_from_eigenbasis(&self, v: &[C64]) -> Vec<C64> {
        match &self.basis {
            EigenBasis::Permutation(p) => {
                let mut out = vec![C64::new(0.0, 0.0); p.len()];
                for (a, &i) in p.iter().enumerate() {
                    out[i] = v[a];
                }
                out
            }
            EigenBasis::Dense => self.eig.vectors.matvec(v),
        }
    }
}

/// Measurement axis `n = (sin t cos p, sin t sin p, cos t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinAxis {
    pub theta: f64,
    pub phi: f64,
}

impl SpinAxis {
    pub const Z: SpinAxis = SpinAxis { theta: 0.0, phi: 0.0 };

    pub fn new(theta: f64, phi: f64) -> Self { Self { theta, phi } }

    pub fn unit_vector(&self) -> [f64; 3] {
        [self.theta.sin() * self.phi.cos(), self.theta.sin() * self.phi.sin(), self.theta.cos()]
    }

    pub fn is_z(&self) -> bool { self.theta == 0.0 }
}

/// `ln C(n, k)`: log-gamma for `n > 30`, exact products otherwise.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    if n > 30 {
        libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
    } else {
        binomial_exact(n, k).ln()
    }
}

/// `C(n, k)` by multiplicative products; exact in `f64` for `n <= 30`.
pub fn binomial_exact(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

fn check_n(n: usize, repr: SpinRepr) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    if repr == SpinRepr::FullTensor && n > MAX_FULL_TENSOR {
        return Err(Error::TooLarge { n, max: MAX_FULL_TENSOR });
    }
    Ok(())
}

fn qubit(theta: f64, phi: f64) -> [C64; 2] {
    [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)]
}

/// Dicke amplitudes of `(cos(t/2)|0> + e^{ip} sin(t/2)|1>)^N`.
pub fn spin_coherent_amplitudes(n: usize, theta: f64, phi: f64) -> Vec<C64> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let (lc, ls) = (c.abs().ln(), s.abs().ln());
    (0..=n)
        .map(|k| {
            let modulus = if n <= 30 {
                binomial_exact(n, k).sqrt() * c.abs().powi((n - k) as i32) * s.abs().powi(k as i32)
            } else {
                let mut ln = 0.5 * ln_binomial(n, k);
                if n - k > 0 {
                    ln += (n - k) as f64 * lc;
                }
                if k > 0 {
                    ln += k as f64 * ls;
                }
                ln.exp()
            };
            let negative = ((n - k) % 2 == 1 && c < 0.0) ^ (k % 2 == 1 && s < 0.0);
            let sign = if negative { -1.0 } else { 1.0 };
            C64::from_polar(sign * modulus, k as f64 * phi)
        })
        .collect()
}

/// Spin-coherent state `|theta, phi>`.
pub fn spin_coherent(n: usize, theta: f64, phi: f64, repr: SpinRepr) -> Result<QuantumState> {
    check_n(n, repr)?;
    let v = match repr {
        SpinRepr::Dicke => spin_coherent_amplitudes(n, theta, phi),
        SpinRepr::FullTensor => {
            let q = qubit(theta, phi);
            (1..n).fold(q.to_vec(), |acc, _| kron_vec(&acc, &q))
        }
    };
    QuantumState::pure_with_repr(v, repr.tag(n))
}

/// Generalized GHZ state `cos(t/2)|0>^N + e^{ip} sin(t/2)|1>^N`.
pub fn ghz(n: usize, theta: f64, phi: f64, repr: SpinRepr) -> Result<QuantumState> {
    check_n(n, repr)?;
    let dim = repr.tag(n).dim();
    let mut v = vec![C64::new(0.0, 0.0); dim];
    let q = qubit(theta, phi);
    v[0] = q[0];
    v[dim - 1] += q[1];
    QuantumState::pure_with_repr(v, repr.tag(n))
}

/// Product state `(x)_i (cos(t_i/2)|0> + e^{ip_i} sin(t_i/2)|1>)` (full
/// tensor only).
pub fn product_state(site_angles: &[(f64, f64)]) -> Result<QuantumState> {
    let n = site_angles.len();
    check_n(n, SpinRepr::FullTensor)?;
    let v = site_angles
        .iter()
        .fold(vec![C64::new(1.0, 0.0)], |acc, &(t, p)| kron_vec(&acc, &qubit(t, p)));
    QuantumState::pure_with_repr(v, Representation::FullTensor(n))
}

/// Dicke-basis `S_-` with `<k+1|S_-|k> = sqrt(j(j+1) - m(m-1))`, `m = j - k`.
pub fn dicke_lowering(n: usize) -> CMatrix {
    let j = n as f64 / 2.0;
    let mut m = CMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        let mm = j - k as f64;
        m[(k + 1, k)] = C64::new((j * (j + 1.0) - mm * (mm - 1.0)).sqrt(), 0.0);
    }
    m
}

/// Collective lowering operator `S_- = sum_n s_-^{(n)}`.
pub fn lowering_operator(n: usize, repr: SpinRepr) -> Result<CMatrix> {
    check_n(n, repr)?;
    Ok(match repr {
        SpinRepr::Dicke => dicke_lowering(n),
        SpinRepr::FullTensor => {
            let dim = 1usize << n;
            let mut m = CMatrix::zeros(dim, dim);
            for site in 0..n {
                let mask = 1usize << (n - 1 - site);
                for b in 0..dim {
                    if b & mask == 0 {
                        m[(b | mask, b)] += C64::new(1.0, 0.0);
                    }
                }
            }
            m
        }
    })
}

/// `(S_x, S_y, S_z)` as matrices.
pub fn spin_matrices(n: usize, repr: SpinRepr) -> Result<[CMatrix; 3]> {
    check_n(n, repr)?;
    let lower = lowering_operator(n, repr)?;
    let raise = lower.adjoint();
    let sx = (&raise + &lower).scale_real(0.5);
    let sy = (&raise - &lower).scale(C64::new(0.0, -0.5));
    let sz = CMatrix::from_real_diag(&sz_diagonal(n, repr));
    Ok([sx, sy, sz])
}

fn sz_diagonal(n: usize, repr: SpinRepr) -> Vec<f64> {
    match repr {
        SpinRepr::Dicke => (0..=n).map(|k| n as f64 / 2.0 - k as f64).collect(),
        SpinRepr::FullTensor => {
            (0..1usize << n).map(|b| n as f64 / 2.0 - b.count_ones() as f64).collect()
        }
    }
}

/// `S_n = n . S` built directly from the spin matrices (no diagonalization
/// shortcut). Used as the reference for [`collective_spin`].
pub fn collective_spin_matrix(n: usize, axis: SpinAxis, repr: SpinRepr) -> Result<HermitianMatrix> {
    let [sx, sy, sz] = spin_matrices(n, repr)?;
    let [ux, uy, uz] = axis.unit_vector();
    let m = &(&sx.scale_real(ux) + &sy.scale_real(uy)) + &sz.scale_real(uz);
    Ok(HermitianMatrix::symmetrized(m))
}

/// Collective spin observable `S_n = n . S`.
///
/// Along `z` the observable is diagonal. For tilted axes the eigenvectors are
/// the rotated `S_z` eigenbasis `R e_k` with `R = e^{-i p S_z} e^{-i t S_y}`;
/// in the full tensor space `R` is a tensor power of a 2x2 rotation, in the
/// Dicke space it comes from the spectrum of `S_y`.
pub fn collective_spin(n: usize, axis: SpinAxis, repr: SpinRepr) -> Result<Observable> {
    check_n(n, repr)?;
    let sz = sz_diagonal(n, repr);
    if axis.is_z() {
        return Observable::new(HermitianMatrix::from_real_diag(&sz));
    }
    let rotation = match repr {
        SpinRepr::Dicke => SpinFrame::new(n)?.rotation(axis),
        SpinRepr::FullTensor => {
            let r = single_qubit_rotation(axis);
            (1..n).fold(r.clone(), |acc, _| acc.kron(&r))
        }
    };
    Observable::from_eigensystem(sz, rotation)
}

fn single_qubit_rotation(axis: SpinAxis) -> CMatrix {
    let (c, s) = ((axis.theta / 2.0).cos(), (axis.theta / 2.0).sin());
    let ry = CMatrix::from_real_rows(&[vec![c, -s], vec![s, c]]).unwrap();
    let rz = CMatrix::from_diag(&[
        C64::from_polar(1.0, -axis.phi / 2.0),
        C64::from_polar(1.0, axis.phi / 2.0),
    ]);
    rz.matmul(&ry)
}

/// Cached spectrum of the Dicke `S_y`, for building rotations
/// `R = e^{-i p S_z} e^{-i t S_y}` and moving states into a rotated frame.
#[derive(Clone, Debug)]
pub struct SpinFrame {
    n: usize,
    sy: EigenDecomposition,
}

impl SpinFrame {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n, SpinRepr::Dicke)?;
        let [_, sy, _] = spin_matrices(n, SpinRepr::Dicke)?;
        let sy = HermitianMatrix::symmetrized(sy).eigh()?;
        Ok(Self { n, sy })
    }

    pub fn n(&self) -> usize { self.n }

    fn z_phases(&self, phi: f64, sign: f64) -> Vec<C64> {
        (0..=self.n)
            .map(|k| C64::from_polar(1.0, -sign * phi * (self.n as f64 / 2.0 - k as f64)))
            .collect()
    }

    /// Rotation `R` with `R S_z R^dag = S_n`.
    pub fn rotation(&self, axis: SpinAxis) -> CMatrix {
        let ry = crate::linalg::unitary_from_eig(&self.sy, axis.theta);
        let phases = self.z_phases(axis.phi, 1.0);
        CMatrix::from_fn(self.n + 1, self.n + 1, |i, j| phases[i] * ry[(i, j)])
    }

    /// `R^dag v`: the amplitudes of `v` in the eigenbasis of `S_n`, ordered
    /// like the `S_z` Dicke basis. O(N^2).
    pub fn vector_into_frame(&self, v: &[C64], axis: SpinAxis) -> Vec<C64> {
        let phases = self.z_phases(axis.phi, -1.0);
        let w: Vec<C64> = v.iter().zip(&phases).map(|(a, b)| a * b).collect();
        // e^{+i t S_y} w = V e^{+i t L} V^dag w
        let mut y = self.sy.vectors.adjoint_matvec(&w);
        for (yk, &l) in y.iter_mut().zip(&self.sy.values) {
            *yk *= C64::from_polar(1.0, axis.theta * l);
        }
        self.sy.vectors.matvec(&y)
    }

    /// `R^dag rho R` as a state in the Dicke representation.
    pub fn state_into_frame(&self, state: &QuantumState, axis: SpinAxis) -> Result<QuantumState> {
        if state.dim() != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: state.dim() });
        }
        match state.vector() {
            Some(v) => QuantumState::pure_with_repr(
                self.vector_into_frame(v, axis),
                Representation::Dicke(self.n),
            )
            .or_else(|_| {
                QuantumState::pure_normalized(self.vector_into_frame(v, axis), Representation::Dicke(self.n))
            }),
            None => {
                let r = self.rotation(axis);
                let m = state.matrix().conjugate_by_adjoint(&r);
                Ok(QuantumState::from_parts(HermitianMatrix::symmetrized(m), Representation::Dicke(self.n)))
            }
        }
    }
}

/// `R^dag v` in the full tensor space, where `R` is the tensor power of the
/// single-qubit rotation taking `z` to `axis`. O(N 2^N).
pub fn tensor_vector_into_frame(v: &[C64], n: usize, axis: SpinAxis) -> Result<Vec<C64>> {
    check_n(n, SpinRepr::FullTensor)?;
    if v.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, got: v.len() });
    }
    let u = single_qubit_rotation(axis).adjoint();
    let mut out = v.to_vec();
    for q in 0..n {
        let bit = 1usize << q;
        for b in (0..out.len()).filter(|b| b & bit == 0) {
            let (a0, a1) = (out[b], out[b | bit]);
            out[b] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
            out[b | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
        }
    }
    Ok(out)
}

/// Isometry `W` (`2^N x (N+1)`) whose columns are the normalized symmetric
/// Dicke vectors.
pub fn dicke_isometry(n: usize) -> Result<CMatrix> {
    check_n(n, SpinRepr::FullTensor)?;
    let dim = 1usize << n;
    let norms: Vec<f64> = (0..=n).map(|k| 1.0 / binomial_exact(n, k).sqrt()).collect();
    let mut w = CMatrix::zeros(dim, n + 1);
    for b in 0..dim {
        let k = b.count_ones() as usize;
        w[(b, k)] = C64::new(norms[k], 0.0);
    }
    Ok(w)
}

/// Direction of a Dicke/full-tensor conversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbedDirection {
    DickeToFull,
    FullToDicke,
}

/// Result of converting a state between representations.
#[derive(Clone, Debug)]
pub struct Embedded {
    pub state: QuantumState,
    /// Weight retained in the target space (`1` for an embedding).
    pub retained: f64,
    /// `1 - retained`.
    pub leakage: f64,
}

/// Converts a state between the Dicke and full tensor representations.
///
/// Projection onto the symmetric subspace renormalizes the result and fails
/// with [`Error::AsymmetricInput`] when the discarded weight exceeds
/// `leakage_threshold`.
pub fn dicke_embed_state(
    state: &QuantumState,
    direction: EmbedDirection,
    leakage_threshold: f64,
) -> Result<Embedded>
{
    match (direction, state.repr()) {
        (EmbedDirection::DickeToFull, Representation::Dicke(n)) => {
            let w = dicke_isometry(n)?;
            let out = match state.vector() {
                Some(v) => QuantumState::pure_with_repr(w.matvec(v), Representation::FullTensor(n))?,
                None => QuantumState::from_parts(
                    HermitianMatrix::symmetrized(state.matrix().conjugate_by(&w)),
                    Representation::FullTensor(n),
                ),
            };
            Ok(Embedded { state: out, retained: 1.0, leakage: 0.0 })
        }
        (EmbedDirection::FullToDicke, Representation::FullTensor(n)) => {
            let w = dicke_isometry(n)?;
            let (out, retained) = match state.vector() {
                Some(v) => {
                    let p = w.adjoint_matvec(v);
                    let kept: f64 = p.iter().map(|z| z.norm_sqr()).sum();
                    let st = if kept > 0.0 {
                        QuantumState::pure_normalized(p, Representation::Dicke(n))
                    } else {
                        Err(Error::AsymmetricInput { leakage: 1.0, threshold: leakage_threshold })
                    };
                    (st, kept)
                }
                None => {
                    let p = state.matrix().conjugate_by_adjoint(&w);
                    let kept = p.trace().re;
                    let st = if kept > 0.0 {
                        Ok(QuantumState::from_parts(
                            HermitianMatrix::symmetrized(p.scale_real(1.0 / kept)),
                            Representation::Dicke(n),
                        ))
                    } else {
                        Err(Error::AsymmetricInput { leakage: 1.0, threshold: leakage_threshold })
                    };
                    (st, kept)
                }
            };
            let leakage = (1.0 - retained).max(0.0);
            if leakage > leakage_threshold {
                return Err(Error::AsymmetricInput { leakage, threshold: leakage_threshold });
            }
            Ok(Embedded { state: out?, retained, leakage })
        }
        (_, repr) => Err(Error::InvalidArgument(format!("cannot apply {direction:?} to a {repr:?} state"))),
    }
}

/// Converts an operator between representations. For `FullToDicke` the
/// second value is the Frobenius norm of the part of the operator outside the
/// symmetric block `P M P`.
pub fn dicke_embed_operator(m: &CMatrix, n: usize, direction: EmbedDirection) -> Result<(CMatrix, f64)> {
    let w = dicke_isometry(n)?;
    match direction {
        EmbedDirection::DickeToFull => {
            if m.rows() != n + 1 || !m.is_square() {
                return Err(Error::DimensionMismatch { expected: n + 1, got: m.rows() });
            }
            Ok((m.conjugate_by(&w), 0.0))
        }
        EmbedDirection::FullToDicke => {
            if m.rows() != w.rows() || !m.is_square() {
                return Err(Error::DimensionMismatch { expected: w.rows(), got: m.rows() });
            }
            let small = m.conjugate_by_adjoint(&w);
            let back = small.conjugate_by(&w);
            Ok((small, m.frobenius_distance(&back)))
        }
    }
}

/// Angle between the Bloch vector of `(t, p)` and the axis.
pub fn bloch_angle(theta: f64, phi: f64, axis: SpinAxis) -> f64 {
    let m = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let a = axis.unit_vector();
    let dot = (m[0] * a[0] + m[1] * a[1] + m[2] * a[2]).clamp(-1.0, 1.0);
    dot.acos()
}

/// Polar angle grid helper: `count` points spanning `[0, pi]`.
pub fn polar_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| PI * i as f64 / (count - 1) as f64).collect(),
    }
}
