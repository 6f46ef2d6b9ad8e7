//! Numerical upper bounds on the roof by descent over mixing isometries.
//!
//! The vectors `χₗ = Σⱼ Uₗⱼ √pⱼ ψⱼ` are kept directly; a unitary acting on
//! the rows of `U` acts on them the same way. Each step applies a complex
//! Givens rotation to one pair of rows and keeps it only if it lowers
//! `Σₗ |P(χₗ)| / ‖χₗ‖^{h−2}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{average_tangle, mix, Decomposition, MixingIsometry};
use crate::error::{Error, Result};
use crate::golden::golden_section_minimize;
use crate::states::{EigenDecomposition, PureState};
use crate::tangles::TangleDescriptor;

const MAX_SWEEPS: usize = 400;
const SWEEP_TOL: f64 = 1e-13;
const THETA_GRID: usize = 12;
const ALPHA_GRID: usize = 8;
const SMOOTHING: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 0.0];

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub value: f64,
    pub decomposition: Decomposition,
    /// Restart index that produced the best value.
    pub restart: usize,
}

/// `‖χ‖² · τ(χ/‖χ‖)`, with `|P|` replaced by `√(|P|² + ε²‖χ‖^{2h}) − ε‖χ‖^h`
/// so that the objective is smooth at zeros when `ε > 0`.
fn term(desc: &TangleDescriptor, chi: &[Complex64], eps: f64) -> f64 {
    let n2: f64 = chi.iter().map(|a| a.norm_sqr()).sum();
    if n2 < 1e-300 {
        return 0.0;
    }
    let h = desc.degree() as i32 / 2;
    let pre = desc.evaluate(chi).norm();
    let modulus = if eps > 0.0 {
        let scale = eps * n2.powi(h);
        pre.hypot(scale) - scale
    } else {
        pre
    };
    modulus / n2.powi(h - 1)
}

fn rotate(a: &[Complex64], b: &[Complex64], theta: f64, alpha: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(s, alpha);
    let ra = a.iter().zip(b).map(|(x, y)| c * x - e * y).collect();
    let rb = a.iter().zip(b).map(|(x, y)| e.conj() * x + c * y).collect();
    (ra, rb)
}

fn pair_value(desc: &TangleDescriptor, a: &[Complex64], b: &[Complex64], eps: f64, theta: f64, alpha: f64) -> f64 {
    let (ra, rb) = rotate(a, b, theta, alpha);
    term(desc, &ra, eps) + term(desc, &rb, eps)
}

/// Best rotation of one pair. `θ ∈ [0, π/2]` and `α ∈ [0, 2π)` cover every
/// rotation up to row phases, which leave the objective unchanged.
fn optimize_pair(desc: &TangleDescriptor, a: &[Complex64], b: &[Complex64], eps: f64) -> (f64, f64, f64) {
    let mut best = (0.0, 0.0, term(desc, a, eps) + term(desc, b, eps));
    for i in 0..=THETA_GRID {
        let theta = 0.5 * PI * i as f64 / THETA_GRID as f64;
        for k in 0..ALPHA_GRID {
            let alpha = 2.0 * PI * k as f64 / ALPHA_GRID as f64;
            let v = pair_value(desc, a, b, eps, theta, alpha);
            if v < best.2 {
                best = (theta, alpha, v);
            }
        }
    }
    let (mut theta, mut alpha, mut value) = best;
    let (mut dt, mut da) = (0.5 * PI / THETA_GRID as f64, PI / ALPHA_GRID as f64);
    for _ in 0..6 {
        let (t, v) = golden_section_minimize(|t| pair_value(desc, a, b, eps, t, alpha), theta - dt, theta + dt, 1e-10);
        if v < value {
            theta = t;
            value = v;
        }
        let (al, v) = golden_section_minimize(|al| pair_value(desc, a, b, eps, theta, al), alpha - da, alpha + da, 1e-10);
        if v < value {
            alpha = al;
            value = v;
        }
        dt *= 0.5;
        da *= 0.5;
    }
    (theta, alpha, value)
}

fn sweeps(desc: &TangleDescriptor, chi: &mut [Vec<Complex64>], eps: f64) {
    let m = chi.len();
    let mut total: f64 = chi.iter().map(|c| term(desc, c, eps)).sum();
    for _ in 0..MAX_SWEEPS {
        let start = total;
        for i in 0..m {
            for j in i + 1..m {
                let before = term(desc, &chi[i], eps) + term(desc, &chi[j], eps);
                let (theta, alpha, after) = optimize_pair(desc, &chi[i], &chi[j], eps);
                if after < before {
                    let (a, b) = rotate(&chi[i], &chi[j], theta, alpha);
                    chi[i] = a;
                    chi[j] = b;
                    total += after - before;
                }
            }
        }
        if start - total < SWEEP_TOL {
            break;
        }
    }
}

/// Descent on a decreasing sequence of smoothings, ending on the exact
/// objective. Returns the exact objective.
fn descend(desc: &TangleDescriptor, chi: &mut [Vec<Complex64>]) -> f64 {
    for eps in SMOOTHING {
        sweeps(desc, chi, eps);
    }
    chi.iter().map(|c| term(desc, c, 0.0)).sum()
}

/// Minimizes the average tangle over decompositions of length `m` built from
/// `restarts` starting isometries: the padded spectral decomposition first,
/// then Haar-random ones drawn from a ChaCha stream per restart. The result
/// depends only on the inputs and `seed`, not on thread scheduling.
pub fn upper_bound_search(
    eig: &EigenDecomposition,
    desc: &TangleDescriptor,
    m: usize,
    restarts: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if m < eig.rank {
        return Err(Error::Validation(format!(
            "decomposition length {m} is below the rank {}",
            eig.rank
        )));
    }
    if restarts == 0 {
        return Err(Error::Validation("at least one restart is required".into()));
    }
    if let Some(s) = eig.eigenstates.first() {
        if s.n_qubits() != desc.n_qubits() {
            return Err(Error::DescriptorMismatch {
                name: desc.name().to_string(),
                expected: desc.n_qubits(),
                got: s.n_qubits(),
            });
        }
    }
    let n = desc.n_qubits();
    let runs: Vec<(f64, usize, Vec<Vec<Complex64>>)> = (0..restarts)
        .into_par_iter()
        .map(|restart| -> Result<_> {
            let u = if restart == 0 {
                MixingIsometry::identity(m, eig.rank)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(restart as u64);
                MixingIsometry::random(m, eig.rank, &mut rng)
            };
            let mut chi = unnormalized_rows(eig, &u);
            let value = descend(desc, &mut chi);
            Ok((value, restart, chi))
        })
        .collect::<Result<_>>()?;
    let (_, restart, chi) = runs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("restarts > 0");
    let vectors = chi
        .into_iter()
        .map(|c| PureState::new(n, c))
        .collect::<Result<Vec<_>>>()?;
    let mut decomposition = Decomposition::from_vectors(vectors)?;
    let sum: f64 = decomposition.weights.iter().sum();
    decomposition.weights.iter_mut().for_each(|w| *w /= sum);
    let value = average_tangle(&decomposition, desc)?;
    Ok(SearchOutcome {
        value,
        decomposition,
        restart,
    })
}

fn unnormalized_rows(eig: &EigenDecomposition, u: &MixingIsometry) -> Vec<Vec<Complex64>> {
    let u = u.matrix();
    let d = eig.eigenstates[0].dim();
    (0..u.nrows())
        .map(|l| {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            for (j, (p, psi)) in eig.support().enumerate() {
                let c = u[(l, j)] * p.max(0.0).sqrt();
                for (x, a) in v.iter_mut().zip(psi.amplitudes()) {
                    *x += c * a;
                }
            }
            v
        })
        .collect()
}

/// Average tangle of the decomposition `mix(eig, u)`.
pub fn isometry_value(eig: &EigenDecomposition, desc: &TangleDescriptor, u: &MixingIsometry) -> Result<f64> {
    average_tangle(&mix(eig, u)?, desc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;

    #[test]
    fn rotation_is_unitary() {
        let a = vec![Complex64::new(1.0, 0.5), Complex64::new(-0.2, 0.1)];
        let b = vec![Complex64::new(0.3, -0.4), Complex64::new(0.7, 0.0)];
        let (ra, rb) = rotate(&a, &b, 0.7, 2.1);
        let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>();
        assert!((norm(&a) + norm(&b) - norm(&ra) - norm(&rb)).abs() < 1e-14);
    }

    #[test]
    fn finds_separable_bell_mixture() {
        let eig = EigenDecomposition::from_pairs(vec![(0.5, named::bell()), (0.5, named::bell_minus())], 1e-10).unwrap();
        let out = upper_bound_search(&eig, &TangleDescriptor::concurrence(), 2, 2, 1).unwrap();
        assert!(out.value < 1e-8, "{}", out.value);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let eig = EigenDecomposition::from_pairs(vec![(0.8, named::ghz()), (0.2, named::w())], 1e-10).unwrap();
        let desc = TangleDescriptor::three_tangle();
        let a = upper_bound_search(&eig, &desc, 4, 3, 9).unwrap();
        let b = upper_bound_search(&eig, &desc, 4, 3, 9).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.restart, b.restart);
    }

    #[test]
    fn rejects_short_decompositions() {
        let eig = EigenDecomposition::from_pairs(vec![(0.8, named::ghz()), (0.2, named::w())], 1e-10).unwrap();
        assert!(upper_bound_search(&eig, &TangleDescriptor::three_tangle(), 1, 3, 9).is_err());
        assert!(upper_bound_search(&eig, &TangleDescriptor::three_tangle(), 3, 0, 9).is_err());
    }
}
