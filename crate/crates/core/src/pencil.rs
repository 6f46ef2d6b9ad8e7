//! The pencil `ψ₀ + zψ₁` of pure states in the range of a rank-2 density
//! matrix, and the restriction of a tangle polynomial to it.
//!
//! Two coordinate systems are used for the same ray: the projective
//! coordinate `z ∈ ℂ ∪ {∞}` and the weight/phase pair `(q, φ)` of the
//! normalized superposition `√q ψ₀ + √(1−q) e^{iφ} ψ₁`. They are related by
//! `z = √((1−q)/q) e^{iφ}`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::roots;
use crate::states::{eigendecompose, DensityMatrix, PureState, DEFAULT_RANK_TOLERANCE};
use crate::tangles::TangleDescriptor;

/// Leading coefficients below this fraction of the largest one count as
/// roots at infinity.
pub const DEFLATION_THRESHOLD: f64 = 1e-10;

const ORTHONORMAL_TOL: f64 = 1e-10;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectivePoint {
    Finite(Complex64),
    Infinity,
}

impl ProjectivePoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ProjectivePoint::Infinity)
    }
}

/// `z = √((1−q)/q)·e^{iφ}`, with `q = 0` mapped to infinity.
pub fn z_of(q: f64, phi: f64) -> Result<ProjectivePoint> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("weight q = {q} outside [0, 1]")));
    }
    if q == 0.0 {
        return Ok(ProjectivePoint::Infinity);
    }
    Ok(ProjectivePoint::Finite(Complex64::from_polar(
        ((1.0 - q) / q).sqrt(),
        phi,
    )))
}

/// Inverse of [`z_of`]: `q = 1/(1+|z|²)` and `φ = arg z ∈ [0, 2π)`.
pub fn q_phi_of(z: ProjectivePoint) -> (f64, f64) {
    match z {
        ProjectivePoint::Infinity => (0.0, 0.0),
        ProjectivePoint::Finite(z) => {
            let q = 1.0 / (1.0 + z.norm_sqr());
            let phi = if z.norm() == 0.0 { 0.0 } else { z.arg().rem_euclid(TAU) };
            (q, if phi >= TAU { 0.0 } else { phi })
        }
    }
}

/// An orthonormal pair `(ψ₀, ψ₁)` spanning the range of
/// `ρ = p·π_{ψ₀} + (1−p)·π_{ψ₁}`.
#[derive(Debug, Clone)]
pub struct RankTwoPencil {
    psi0: PureState,
    psi1: PureState,
    weight: f64,
}

impl RankTwoPencil {
    pub fn new(psi0: PureState, psi1: PureState, weight: f64) -> Result<Self> {
        if psi0.n_qubits() != psi1.n_qubits() {
            return Err(Error::Validation("pencil states live on different registers".into()));
        }
        for s in [&psi0, &psi1] {
            if (s.norm_sqr() - 1.0).abs() > ORTHONORMAL_TOL {
                return Err(Error::Normalization {
                    norm_sqr: s.norm_sqr(),
                });
            }
        }
        let overlap = psi0.inner(&psi1).norm();
        if overlap > ORTHONORMAL_TOL {
            return Err(Error::Validation(format!(
                "pencil states are not orthogonal (overlap {overlap:e})"
            )));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::Domain(format!("mixing weight {weight} outside [0, 1]")));
        }
        Ok(Self { psi0, psi1, weight })
    }

    /// Pencil spanned by the two eigenstates of a rank-2 density matrix,
    /// `ψ₀` being the one with the larger eigenvalue.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let eig = eigendecompose(rho, DEFAULT_RANK_TOLERANCE);
        if eig.rank != 2 {
            return Err(Error::UnsupportedRank(eig.rank));
        }
        let weight = eig.eigenvalues[0] / (eig.eigenvalues[0] + eig.eigenvalues[1]);
        Self::new(eig.eigenstates[0].clone(), eig.eigenstates[1].clone(), weight)
    }

    pub fn psi0(&self) -> &PureState {
        &self.psi0
    }

    pub fn psi1(&self) -> &PureState {
        &self.psi1
    }

    /// Weight of `ψ₀` in the source density matrix.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn with_weight(&self, weight: f64) -> Result<Self> {
        Self::new(self.psi0.clone(), self.psi1.clone(), weight)
    }

    pub fn n_qubits(&self) -> usize {
        self.psi0.n_qubits()
    }

    pub fn basis(&self) -> (&PureState, &PureState) {
        (&self.psi0, &self.psi1)
    }

    /// `√q ψ₀ + √(1−q) e^{iφ} ψ₁`.
    pub fn state_at(&self, q: f64, phi: f64) -> Result<PureState> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("weight q = {q} outside [0, 1]")));
        }
        Ok(self.superposition(q, phi))
    }

    pub(crate) fn superposition(&self, q: f64, phi: f64) -> PureState {
        self.psi0.combine(
            Complex64::new(q.sqrt(), 0.0),
            &self.psi1,
            Complex64::from_polar((1.0 - q).sqrt(), phi),
        )
    }

    /// Unnormalized `ψ₀ + zψ₁`, or `ψ₁` at infinity.
    pub fn ray(&self, z: ProjectivePoint) -> PureState {
        match z {
            ProjectivePoint::Infinity => self.psi1.clone(),
            ProjectivePoint::Finite(z) => {
                self.psi0.combine(Complex64::new(1.0, 0.0), &self.psi1, z)
            }
        }
    }

    /// Normalized state on the ray through `z`.
    pub fn state_at_z(&self, z: ProjectivePoint) -> PureState {
        let (q, phi) = q_phi_of(z);
        self.superposition(q, phi)
    }

    /// `p·π_{ψ₀} + (1−p)·π_{ψ₁}` as a raw matrix.
    pub fn mixture_matrix(&self, p: f64) -> DMatrix<Complex64> {
        self.psi0.outer() * Complex64::new(p, 0.0) + self.psi1.outer() * Complex64::new(1.0 - p, 0.0)
    }

    /// `p·π_{ψ₀} + (1−p)·π_{ψ₁}`.
    pub fn density(&self, p: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("family parameter {p} outside [0, 1]")));
        }
        DensityMatrix::new(self.n_qubits(), self.mixture_matrix(p))
    }

    /// The source density matrix `ρ = p·π_{ψ₀} + (1−p)·π_{ψ₁}` at the stored weight.
    pub fn source_density(&self) -> Result<DensityMatrix> {
        self.density(self.weight)
    }
}

/// The restriction `P(z) = pre_modulus(ψ₀ + zψ₁) = Σ cₖ zᵏ`.
#[derive(Debug, Clone)]
pub struct PencilPolynomial {
    pub coefficients: Vec<Complex64>,
    pub degree: usize,
    pub infinity_multiplicity: usize,
}

/// Result of restricting a tangle to a pencil.
#[derive(Debug, Clone)]
pub enum PencilOutcome {
    Polynomial(PencilPolynomial),
    /// The tangle vanishes on every state of the pencil.
    Vanishing,
}

impl PencilOutcome {
    pub fn polynomial(&self) -> Option<&PencilPolynomial> {
        match self {
            PencilOutcome::Polynomial(p) => Some(p),
            PencilOutcome::Vanishing => None,
        }
    }
}

impl PencilPolynomial {
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        roots::horner(&self.coefficients, z)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficients with the deflated leading terms removed.
    pub fn finite_part(&self) -> &[Complex64] {
        &self.coefficients[..=self.degree - self.infinity_multiplicity]
    }

    /// The `degree − infinity_multiplicity` finite zeros.
    pub fn finite_roots(&self) -> Result<Vec<Complex64>> {
        roots::polynomial_roots(self.finite_part())
    }
}

/// Recovers the coefficients of `P(z)` by sampling at the `(h+1)`-th roots
/// of unity and applying the inverse discrete Fourier transform.
pub fn extract_polynomial(pencil: &RankTwoPencil, desc: &TangleDescriptor) -> Result<PencilOutcome> {
    if desc.n_qubits() != pencil.n_qubits() {
        return Err(Error::DescriptorMismatch {
            name: desc.name().to_string(),
            expected: desc.n_qubits(),
            got: pencil.n_qubits(),
        });
    }
    let h = desc.degree();
    let nodes = h + 1;
    let samples: Vec<Complex64> = (0..nodes)
        .map(|k| {
            let omega = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
            desc.evaluate(pencil.ray(ProjectivePoint::Finite(omega)).amplitudes())
        })
        .collect();
    let coefficients: Vec<Complex64> = (0..nodes)
        .map(|j| {
            samples
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    s * Complex64::from_polar(1.0, -2.0 * PI * ((j * k) % nodes) as f64 / nodes as f64)
                })
                .sum::<Complex64>()
                / nodes as f64
        })
        .collect();

    // Scale reference: the polynomial is bounded by ~2^{h/2} max|P(ω)| on the
    // unit circle, so an all-tiny sample set means the tangle vanishes.
    let max = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max < 1e-13 {
        return Ok(PencilOutcome::Vanishing);
    }
    let infinity_multiplicity = coefficients
        .iter()
        .rev()
        .take_while(|c| c.norm() < DEFLATION_THRESHOLD * max)
        .count();
    Ok(PencilOutcome::Polynomial(PencilPolynomial {
        coefficients,
        degree: h,
        infinity_multiplicity,
    }))
}
