//! Pure states, density matrices and the Bloch ball of a two-dimensional range.
//!
//! Basis index `k` of a register encodes the qubit values with the first
//! party (qubit A) as the most significant bit. For two qubits the amplitude
//! order is `(00, 01, 10, 11)`, for three qubits `(000, 001, ..., 111)`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register handled by the dense routines.
pub const MAX_QUBITS: usize = 5;

/// Relative eigenvalue cutoff used to decide the rank of a density matrix.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

const NORMALIZATION_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;
const SUPPORT_TOL: f64 = 1e-10;

fn check_register(n_qubits: usize, len: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Validation(format!(
            "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    if len != 1 << n_qubits {
        return Err(Error::Validation(format!(
            "{n_qubits} qubits need {} amplitudes, got {len}",
            1 << n_qubits
        )));
    }
    Ok(())
}

/// Amplitude vector of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps raw amplitudes without normalizing them.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_register(n_qubits, amplitudes.len())?;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps amplitudes and rescales them to unit norm.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(n_qubits, amplitudes)?.normalize()
    }

    /// Builds a state from real amplitudes, normalizing them.
    pub fn from_real(n_qubits: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(
            n_qubits,
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Validation(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(n_qubits, amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Validation("cannot normalize a zero vector".into()));
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: Complex64) -> PureState {
        PureState {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// `a·self + b·other` without normalization.
    pub fn combine(&self, a: Complex64, other: &PureState, b: Complex64) -> PureState {
        PureState {
            n_qubits: self.n_qubits,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    /// Tensor product `self ⊗ other`, with `self` as the more significant party.
    pub fn kron(&self, other: &PureState) -> Result<PureState> {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        PureState::new(self.n_qubits + other.n_qubits, amplitudes)
    }

    /// Applies one 2×2 operator per qubit, `ops[0]` acting on qubit A.
    pub fn apply_local(&self, ops: &[Matrix2<Complex64>]) -> Result<PureState> {
        if ops.len() != self.n_qubits {
            return Err(Error::Validation(format!(
                "expected {} local operators, got {}",
                self.n_qubits,
                ops.len()
            )));
        }
        let mut amplitudes = self.amplitudes.clone();
        for (qubit, op) in ops.iter().enumerate() {
            let bit = 1usize << (self.n_qubits - 1 - qubit);
            for k in 0..amplitudes.len() {
                if k & bit != 0 {
                    continue;
                }
                let (a0, a1) = (amplitudes[k], amplitudes[k | bit]);
                amplitudes[k] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
                amplitudes[k | bit] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
            }
        }
        PureState::new(self.n_qubits, amplitudes)
    }

    /// `|ψ⟩⟨ψ|` as a raw matrix.
    pub fn outer(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }

    /// Projector onto the normalized state.
    pub fn projector(&self) -> Result<DensityMatrix> {
        let state = self.clone().normalize()?;
        DensityMatrix::new(self.n_qubits, state.outer())
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Validation("density matrix must be square".into()));
        }
        check_register(n_qubits, matrix.nrows())?;
        let d = matrix.nrows();
        let mut hermitian_dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                hermitian_dev = hermitian_dev.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if hermitian_dev > HERMITIAN_TOL {
            return Err(Error::Validation(format!(
                "matrix is not Hermitian (max deviation {hermitian_dev:e})"
            )));
        }
        let trace: f64 = (0..d).map(|i| matrix[(i, i)].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::Validation(format!("trace must be 1, got {trace}")));
        }
        let rho = Self { n_qubits, matrix };
        let min_eig = rho.hermitian_eigen().0.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::Validation(format!(
                "matrix is not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(rho)
    }

    /// `Σ wᵢ |ψᵢ⟩⟨ψᵢ|` over normalized versions of the given states.
    pub fn from_mixture(terms: &[(f64, &PureState)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Validation("empty mixture".into()))?;
        let n = first.1.n_qubits();
        let d = first.1.dim();
        let mut m = DMatrix::zeros(d, d);
        for (w, state) in terms {
            if state.n_qubits() != n {
                return Err(Error::Validation("mixture of different registers".into()));
            }
            if *w < 0.0 {
                return Err(Error::Validation(format!("negative mixture weight {w}")));
            }
            let s = (*state).clone().normalize()?;
            m += s.outer() * Complex64::new(*w, 0.0);
        }
        Self::new(n, m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DMatrix<Complex64>) -> f64 {
        max_abs_diff(&self.matrix, other)
    }

    fn hermitian_eigen(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let eig = self.matrix.clone().symmetric_eigen();
        (eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors)
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Spectral decomposition `ρ = Σ pⱼ |ψⱼ⟩⟨ψⱼ|` with descending weights.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenstates: Vec<PureState>,
    pub rank: usize,
}

impl EigenDecomposition {
    /// Builds a decomposition from known orthonormal eigenpairs, sorting them
    /// by descending weight. Used when the spectral data is known exactly.
    pub fn from_pairs(pairs: Vec<(f64, PureState)>, rank_tolerance: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Validation("no eigenpairs".into()));
        }
        let mut pairs = pairs;
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (i, (_, a)) in pairs.iter().enumerate() {
            if (a.norm_sqr() - 1.0).abs() > 1e-10 {
                return Err(Error::Normalization {
                    norm_sqr: a.norm_sqr(),
                });
            }
            for (_, b) in &pairs[i + 1..] {
                let ov = a.inner(b).norm();
                if ov > 1e-10 {
                    return Err(Error::Validation(format!(
                        "eigenstates are not orthogonal (overlap {ov:e})"
                    )));
                }
            }
        }
        let max = pairs[0].0.max(0.0);
        let rank = pairs.iter().filter(|(p, _)| *p > rank_tolerance * max).count();
        let (eigenvalues, eigenstates) = pairs.into_iter().unzip();
        Ok(Self {
            eigenvalues,
            eigenstates,
            rank,
        })
    }

    /// The `rank` leading eigenpairs.
    pub fn support(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.eigenvalues
            .iter()
            .cloned()
            .zip(&self.eigenstates)
            .take(self.rank)
    }

    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let d = self.eigenstates[0].dim();
        let mut m = DMatrix::zeros(d, d);
        for (p, s) in self.eigenvalues.iter().zip(&self.eigenstates) {
            m += s.outer() * Complex64::new(*p, 0.0);
        }
        m
    }
}

/// Rotates `v` so that its largest-modulus entry is real and positive. Ties
/// within 1e-12 go to the lowest index.
fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|a| a.norm() >= max - 1e-12) {
        let phase = pivot.conj() / pivot.norm();
        for a in v.iter_mut() {
            *a *= phase;
        }
    }
}

/// Dense Hermitian eigendecomposition with descending eigenvalues and the
/// largest-amplitude-real-positive phase convention.
pub fn eigendecompose(rho: &DensityMatrix, rank_tolerance: f64) -> EigenDecomposition {
    let (values, vectors) = rho.hermitian_eigen();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let max = values[order[0]].max(0.0);
    let mut eigenvalues = Vec::with_capacity(order.len());
    let mut eigenstates = Vec::with_capacity(order.len());
    for &k in &order {
        let mut v: Vec<Complex64> = vectors.column(k).iter().cloned().collect();
        fix_phase(&mut v);
        eigenvalues.push(values[k]);
        eigenstates.push(PureState {
            n_qubits: rho.n_qubits,
            amplitudes: v,
        });
    }
    let rank = eigenvalues.iter().filter(|&&p| p > rank_tolerance * max).count();
    EigenDecomposition {
        eigenvalues,
        eigenstates,
        rank,
    }
}

/// Point of the Bloch ball of a two-dimensional range, in the frame where
/// `ψ₀` sits at the north pole and `(ψ₀+ψ₁)/√2` on the positive x axis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &BlochPoint) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// `½(1 + xσx + yσy + zσz)` lifted into the full register.
    pub fn to_matrix(&self, basis: (&PureState, &PureState)) -> DMatrix<Complex64> {
        let m00 = Complex64::new((1.0 + self.z) / 2.0, 0.0);
        let m11 = Complex64::new((1.0 - self.z) / 2.0, 0.0);
        let m10 = Complex64::new(self.x / 2.0, self.y / 2.0);
        lift(basis, [[m00, m10.conj()], [m10, m11]])
    }
}

/// Anything whose restriction to a two-dimensional range has Bloch coordinates.
pub trait RangeOperand {
    /// 2×2 matrix `⟨ψᵢ|·|ψⱼ⟩` together with the support leaking outside the span.
    fn restrict(&self, basis: (&PureState, &PureState)) -> ([[Complex64; 2]; 2], f64);
}

fn lift(basis: (&PureState, &PureState), m: [[Complex64; 2]; 2]) -> DMatrix<Complex64> {
    let (a, b) = basis;
    let vs = [a.amplitudes(), b.amplitudes()];
    let d = a.dim();
    DMatrix::from_fn(d, d, |r, c| {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                s += m[i][j] * vs[i][r] * vs[j][c].conj();
            }
        }
        s
    })
}

impl RangeOperand for PureState {
    fn restrict(&self, basis: (&PureState, &PureState)) -> ([[Complex64; 2]; 2], f64) {
        let a = basis.0.inner(self);
        let b = basis.1.inner(self);
        let residual = self.combine(
            Complex64::new(1.0, 0.0),
            &basis.0.combine(a, basis.1, b),
            Complex64::new(-1.0, 0.0),
        );
        let leak = residual.norm_sqr().sqrt();
        let t = a.norm_sqr() + b.norm_sqr();
        let m = [
            [a * a.conj() / t, a * b.conj() / t],
            [b * a.conj() / t, b * b.conj() / t],
        ];
        (m, leak)
    }
}

impl RangeOperand for DensityMatrix {
    fn restrict(&self, basis: (&PureState, &PureState)) -> ([[Complex64; 2]; 2], f64) {
        let vs = [basis.0, basis.1];
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let av = vs[j].amplitudes();
                let bra = vs[i].amplitudes();
                let mut s = Complex64::new(0.0, 0.0);
                for (r, b) in bra.iter().enumerate() {
                    let row: Complex64 = (0..self.dim()).map(|c| self.matrix[(r, c)] * av[c]).sum();
                    s += b.conj() * row;
                }
                m[i][j] = s;
            }
        }
        let leak = max_abs_diff(&self.matrix, &lift(basis, m));
        (m, leak)
    }
}

/// Bloch coordinates of an operator supported on `span(ψ₀, ψ₁)`.
pub fn bloch_coordinates<T: RangeOperand + ?Sized>(
    operand: &T,
    basis: (&PureState, &PureState),
) -> Result<BlochPoint> {
    let (m, leak) = operand.restrict(basis);
    if leak > SUPPORT_TOL {
        return Err(Error::Range { leak });
    }
    Ok(BlochPoint {
        x: 2.0 * m[1][0].re,
        y: 2.0 * m[1][0].im,
        z: (m[0][0] - m[1][1]).re,
    })
}
