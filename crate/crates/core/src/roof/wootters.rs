//! Closed-form two-qubit concurrence of mixed states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::golden::golden_section_minimize;
use crate::states::{eigendecompose, DensityMatrix, DEFAULT_RANK_TOLERANCE};

/// `vᵀ (σ_y ⊗ σ_y) w`.
fn spin_flip_form(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    -v[0] * w[3] + v[1] * w[2] + v[2] * w[1] - v[3] * w[0]
}

/// Square roots of the eigenvalues of `ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y)` in descending
/// order, padded with zeros to four entries.
///
/// They are the singular values of the complex-symmetric matrix
/// `Tⱼₖ = vⱼᵀ(σ_y⊗σ_y)vₖ` with `vⱼ = √pⱼ ψⱼ` over the support of `ρ`, which
/// avoids taking square roots of nearly-zero eigenvalues.
pub fn wootters_lambdas(rho: &DensityMatrix) -> Result<Vec<f64>> {
    if rho.n_qubits() != 2 {
        return Err(Error::NotApplicable("closed-form concurrence needs two qubits"));
    }
    let eig = eigendecompose(rho, DEFAULT_RANK_TOLERANCE);
    let vectors: Vec<Vec<Complex64>> = eig
        .support()
        .map(|(p, psi)| {
            let s = p.max(0.0).sqrt();
            psi.amplitudes().iter().map(|a| a * s).collect()
        })
        .collect();
    let r = vectors.len();
    let t = DMatrix::from_fn(r, r, |j, k| spin_flip_form(&vectors[j], &vectors[k]));
    let mut lambdas: Vec<f64> = t.singular_values().iter().cloned().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    lambdas.resize(4, 0.0);
    Ok(lambdas)
}

/// `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    Ok(signed_concurrence(rho)?.max(0.0))
}

/// `λ₁ − λ₂ − λ₃ − λ₄` without the clamp; changes sign where the concurrence
/// becomes zero.
pub fn signed_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok(l[0] - l[1..].iter().sum::<f64>())
}

/// Zeros of `p ↦ C(ρ(p))` on `[0, 1]`: local minima of a `grid`-point scan
/// refined by golden-section search, kept if the refined value is below
/// `1e-10`. A separable stretch shows up as several nearby zeros.
pub fn concurrence_zeros<F>(family: F, grid: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    if grid < 3 {
        return Err(Error::Validation(format!("grid must be ≥ 3, got {grid}")));
    }
    let last = (grid - 1) as f64;
    let values = (0..grid)
        .map(|k| wootters_concurrence(&family(k as f64 / last)?))
        .collect::<Result<Vec<f64>>>()?;
    let c = |p: f64| family(p).and_then(|rho| wootters_concurrence(&rho)).unwrap_or(f64::INFINITY);
    let mut zeros: Vec<f64> = Vec::new();
    for k in 0..grid {
        let left = k == 0 || values[k] <= values[k - 1];
        let right = k + 1 == grid || values[k] < values[k + 1];
        if !(left && right) {
            continue;
        }
        let a = k.saturating_sub(1) as f64 / last;
        let b = (k + 1).min(grid - 1) as f64 / last;
        let (p, value) = golden_section_minimize(c, a, b, 1e-13);
        let (p, value) = [(a, c(a)), (b, c(b))]
            .into_iter()
            .fold((p, value), |best, x| if x.1 < best.1 { x } else { best });
        if value < 1e-10 && zeros.last().is_none_or(|z| (p - z).abs() > 1e-8) {
            zeros.push(p);
        }
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;

    #[test]
    fn pure_states() {
        let bell = named::bell().projector().unwrap();
        assert!((wootters_concurrence(&bell).unwrap() - 1.0).abs() < 1e-14);
        let one = named::state_one().projector().unwrap();
        assert!((wootters_concurrence(&one).unwrap() - 0.8).abs() < 1e-14);
    }

    #[test]
    fn equal_bell_mixture_is_separable() {
        let rho = DensityMatrix::from_mixture(&[(0.5, &named::bell()), (0.5, &named::bell_minus())]).unwrap();
        assert!(wootters_concurrence(&rho).unwrap() < 1e-14);
        let rho = DensityMatrix::from_mixture(&[(0.8, &named::bell()), (0.2, &named::bell_minus())]).unwrap();
        assert!((wootters_concurrence(&rho).unwrap() - 0.6).abs() < 1e-14);
    }

    #[test]
    fn two_qubit_family_has_one_zero() {
        let pencil = named::two_qubit_pencil(0.5);
        let zeros = concurrence_zeros(|p| pencil.density(p), 201).unwrap();
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0] - 5.0 / 11.0).abs() < 1e-9, "{}", zeros[0]);
    }

    #[test]
    fn three_qubits_rejected() {
        let rho = named::ghz().projector().unwrap();
        assert!(matches!(wootters_concurrence(&rho), Err(Error::NotApplicable(_))));
    }
}
