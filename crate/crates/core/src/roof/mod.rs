//! Pure-state decompositions of density matrices and convex-roof bounds.
//!
//! Every decomposition of `ρ = Σ pⱼ |ψⱼ⟩⟨ψⱼ|` of length `m ≥ r` is
//! `|χₗ⟩ = Σⱼ Uₗⱼ √pⱼ |ψⱼ⟩` for an `m×r` isometry `U`. Its average tangle is
//! an upper bound on the roof; the convex characteristic curve gives the
//! matching lower bound, and the two meeting certifies the roof value.

mod search;
mod wootters;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::charcurve::{characteristic_curve, convex_hull_curve, refine_tangency, ConvexCurve, Side};
use crate::error::{Error, Result};
use crate::named;
use crate::states::{DensityMatrix, EigenDecomposition, PureState};
use crate::tangles::TangleDescriptor;
use crate::zeropoly::{zero_polytope, PolytopeOutcome};

pub use search::{isometry_value, upper_bound_search, SearchOutcome};
pub use wootters::{concurrence_zeros, signed_concurrence, wootters_concurrence, wootters_lambdas};

/// Weights must sum to one within this.
const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Rows of a mixing isometry lighter than this are dropped.
const ZERO_WEIGHT: f64 = 1e-14;
/// Reconstruction error a certified decomposition may have.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Largest lower/upper gap reported as certified.
pub const CERTIFICATE_TOL: f64 = 1e-8;

/// `ρ = Σ p̃ₗ |χₗ⟩⟨χₗ|` with normalized `χₗ`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if weights.len() != states.len() || weights.is_empty() {
            return Err(Error::Validation(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if let Some(w) = weights.iter().find(|&&w| w < 0.0) {
            return Err(Error::Validation(format!("negative weight {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Validation(format!("weights sum to {sum}")));
        }
        if let Some(s) = states.iter().find(|s| (s.norm_sqr() - 1.0).abs() > 1e-10) {
            return Err(Error::Normalization {
                norm_sqr: s.norm_sqr(),
            });
        }
        Ok(Self { weights, states })
    }

    /// Normalizes unnormalized vectors `χₗ` into weights `‖χₗ‖²`.
    pub fn from_vectors(vectors: Vec<PureState>) -> Result<Self> {
        let (weights, states): (Vec<f64>, Vec<PureState>) = vectors
            .into_iter()
            .filter(|v| v.norm_sqr() > ZERO_WEIGHT)
            .map(|v| {
                let w = v.norm_sqr();
                (w, v.normalize().expect("nonzero"))
            })
            .unzip();
        Self::new(weights, states)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let d = self.states[0].dim();
        let mut m = DMatrix::zeros(d, d);
        for (w, s) in self.weights.iter().zip(&self.states) {
            m += s.outer() * Complex64::new(*w, 0.0);
        }
        m
    }

    pub fn reconstruction_error(&self, target: &DensityMatrix) -> f64 {
        target.max_abs_diff(&self.reconstruct())
    }
}

/// An `m×r` matrix with orthonormal columns.
#[derive(Debug, Clone)]
pub struct MixingIsometry(DMatrix<Complex64>);

impl MixingIsometry {
    pub fn new(u: DMatrix<Complex64>) -> Result<Self> {
        let gram = u.adjoint() * &u;
        for j in 0..gram.nrows() {
            for k in 0..gram.ncols() {
                let target = if j == k { 1.0 } else { 0.0 };
                let dev = (gram[(j, k)] - target).norm();
                if dev > 1e-10 {
                    return Err(Error::NonIsometric(j, k, dev));
                }
            }
        }
        Ok(Self(u))
    }

    /// The first `r` columns of the `m×m` identity.
    pub fn identity(m: usize, r: usize) -> Self {
        Self(DMatrix::from_fn(m, r, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        }))
    }

    /// Haar-random isometry from Gram–Schmidt on a complex Gaussian matrix.
    pub fn random<R: Rng + ?Sized>(m: usize, r: usize, rng: &mut R) -> Self {
        let mut u = DMatrix::from_fn(m, r, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        for j in 0..r {
            for k in 0..j {
                let proj = u.column(k).dotc(&u.column(j));
                let col_k = u.column(k).clone_owned();
                u.column_mut(j).axpy(-proj, &col_k, Complex64::new(1.0, 0.0));
            }
            let norm = u.column(j).norm();
            u.column_mut(j).unscale_mut(norm);
        }
        Self(u)
    }

    /// `m` rows `(1, −e^{2πil/m}) / √m`: the equal-weight star decomposition of
    /// a rank-2 state.
    pub fn star(m: usize) -> Self {
        let s = 1.0 / (m as f64).sqrt();
        Self(DMatrix::from_fn(m, 2, |l, j| {
            if j == 0 {
                Complex64::new(s, 0.0)
            } else {
                -Complex64::from_polar(s, 2.0 * PI * l as f64 / m as f64)
            }
        }))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// Multiplies row `l` by `phases[l]`.
    pub fn with_row_phases(&self, phases: &[f64]) -> Self {
        let mut u = self.0.clone();
        for (l, &phi) in phases.iter().enumerate() {
            let factor = Complex64::from_polar(1.0, phi);
            for x in u.row_mut(l).iter_mut() {
                *x *= factor;
            }
        }
        Self(u)
    }
}

/// `|χₗ⟩ = Σⱼ Uₗⱼ √pⱼ |ψⱼ⟩` over the `r` supporting eigenpairs.
pub fn mix(eig: &EigenDecomposition, u: &MixingIsometry) -> Result<Decomposition> {
    let u = u.matrix();
    if u.ncols() != eig.rank {
        return Err(Error::Validation(format!(
            "isometry has {} columns but the rank is {}",
            u.ncols(),
            eig.rank
        )));
    }
    MixingIsometry::new(u.clone())?;
    let support: Vec<(f64, &PureState)> = eig.support().collect();
    let n = support[0].1.n_qubits();
    let d = support[0].1.dim();
    let vectors = (0..u.nrows())
        .map(|l| {
            let mut amps = vec![Complex64::new(0.0, 0.0); d];
            for (j, (p, psi)) in support.iter().enumerate() {
                let c = u[(l, j)] * p.max(0.0).sqrt();
                for (a, b) in amps.iter_mut().zip(psi.amplitudes()) {
                    *a += c * b;
                }
            }
            PureState::new(n, amps)
        })
        .collect::<Result<Vec<_>>>()?;
    // Eigenvalues of a valid density matrix may sum to 1 only up to rounding.
    let mut dec = Decomposition::from_vectors(vectors)
        .map_err(|_| Error::Validation("mixing produced an invalid decomposition".into()))?;
    let sum: f64 = dec.weights.iter().sum();
    dec.weights.iter_mut().for_each(|w| *w /= sum);
    Ok(dec)
}

/// `Σ p̃ₗ τ(χₗ)`.
pub fn average_tangle(dec: &Decomposition, desc: &TangleDescriptor) -> Result<f64> {
    dec.weights
        .iter()
        .zip(&dec.states)
        .map(|(w, s)| Ok(w * desc.tangle(s)?))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Certified,
    Bounded,
}

/// Lower bound, explicit upper bound and the decomposition attaining it.
#[derive(Debug, Clone)]
pub struct RoofCertificate {
    pub p: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub status: CertificateStatus,
    pub reconstruction_error: f64,
    pub decomposition: Decomposition,
}

/// Pairs a lower bound with an explicit decomposition of `target`. The roof
/// is certified only if the decomposition reconstructs `target` and meets
/// the bound.
pub fn certify(
    p: f64,
    lower: f64,
    decomposition: Decomposition,
    target: &DensityMatrix,
    desc: &TangleDescriptor,
) -> Result<RoofCertificate> {
    let upper = average_tangle(&decomposition, desc)?;
    let reconstruction_error = decomposition.reconstruction_error(target);
    let gap = upper - lower;
    let status = if reconstruction_error <= RECONSTRUCTION_TOL && gap.abs() < CERTIFICATE_TOL {
        CertificateStatus::Certified
    } else {
        CertificateStatus::Bounded
    };
    Ok(RoofCertificate {
        p,
        lower,
        upper,
        gap,
        status,
        reconstruction_error,
        decomposition,
    })
}

/// Exact 3-tangle roof of `ρ(p) = p·π_GHZ + (1−p)·π_W`.
///
/// The corner weight `p₀` comes from the zero-polytope and the tangency `p₁`
/// from the convex characteristic curve; the decompositions are the
/// corner simplex below `p₀`, the equal-weight star `𝒵(p)` on `[p₀, p₁]`, and
/// `𝒵(p₁)` mixed with GHZ above `p₁`.
#[derive(Debug, Clone)]
pub struct GhzWRoof {
    pub p0: f64,
    pub p1: f64,
    pub hull: ConvexCurve,
    desc: TangleDescriptor,
}

impl GhzWRoof {
    pub fn new(grid_n: usize, phase_grid: usize) -> Result<Self> {
        Self::with_descriptor(TangleDescriptor::three_tangle(), grid_n, phase_grid)
    }

    pub fn with_descriptor(desc: TangleDescriptor, grid_n: usize, phase_grid: usize) -> Result<Self> {
        let pencil = named::ghz_w_pencil(0.5);
        let polytope = match zero_polytope(&pencil, &desc)? {
            PolytopeOutcome::Polytope(p) => p,
            PolytopeOutcome::WholePencilZero => {
                return Err(Error::Numerical("tangle vanishes on the GHZ/W pencil".into()))
            }
        };
        let finite: Vec<f64> = polytope
            .corners
            .iter()
            .filter(|c| !c.root.is_infinite())
            .map(|c| c.weight)
            .collect();
        if finite.is_empty() {
            return Err(Error::Numerical("no finite zero-polytope corner".into()));
        }
        let p0 = finite.iter().sum::<f64>() / finite.len() as f64;
        let curve = characteristic_curve(&pencil, &desc, grid_n, phase_grid)?;
        let p1 = refine_tangency(&curve, Side::Right)?;
        let hull = convex_hull_curve(&curve);
        Ok(Self { p0, p1, hull, desc })
    }

    fn star(p: f64) -> Vec<PureState> {
        (0..3)
            .map(|j| named::ghz_w_superposition(p, 2.0 * PI * j as f64 / 3.0))
            .collect()
    }

    pub fn decomposition(&self, p: f64) -> Result<Decomposition> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
        }
        let (mut weights, mut states) = (Vec::new(), Vec::new());
        let mut push = |w: f64, s: PureState| {
            if w > ZERO_WEIGHT {
                weights.push(w);
                states.push(s);
            }
        };
        if p <= self.p0 {
            let f = p / self.p0;
            for s in Self::star(self.p0) {
                push(f / 3.0, s);
            }
            push(1.0 - f, named::w());
        } else if p <= self.p1 {
            for s in Self::star(p) {
                push(1.0 / 3.0, s);
            }
        } else {
            let f = (1.0 - p) / (1.0 - self.p1);
            for s in Self::star(self.p1) {
                push(f / 3.0, s);
            }
            push(1.0 - f, named::ghz());
        }
        let sum: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= sum);
        Decomposition::new(weights, states)
    }

    pub fn certificate(&self, p: f64) -> Result<RoofCertificate> {
        let dec = self.decomposition(p)?;
        let target = named::ghz_w_pencil(p).density(p)?;
        certify(p, self.hull.evaluate(p), dec, &target, &self.desc)
    }
}

/// Certified roof of the GHZ/W mixture at `p` with default grids.
pub fn ghz_w_roof(p: f64) -> Result<RoofCertificate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    GhzWRoof::new(
        crate::charcurve::DEFAULT_GRID_N,
        crate::charcurve::DEFAULT_PHASE_GRID,
    )?
    .certificate(p)
}
