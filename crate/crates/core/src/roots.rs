//! Zeros of small complex polynomials through companion-matrix eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Horner evaluation of `Σ cₖ zᵏ` (ascending coefficients).
pub fn horner(coefficients: &[Complex64], z: Complex64) -> Complex64 {
    coefficients
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn derivative(coefficients: &[Complex64]) -> Vec<Complex64> {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// All roots of `Σ cₖ zᵏ`, whose leading coefficient must be nonzero. Each
/// root from the companion matrix gets one Newton step, kept only if it
/// lowers the residual.
pub fn polynomial_roots(coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = coefficients.len().saturating_sub(1);
    let lead = *coefficients
        .last()
        .ok_or_else(|| Error::Numerical("empty polynomial".into()))?;
    if lead.norm() == 0.0 {
        return Err(Error::Numerical("leading coefficient is zero".into()));
    }
    if degree == 0 {
        return Ok(Vec::new());
    }
    let monic: Vec<Complex64> = coefficients.iter().map(|c| c / lead).collect();
    let mut companion = DMatrix::<Complex64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -monic[i];
    }
    let raw: Vec<Complex64> = if degree == 1 {
        vec![-monic[0]]
    } else {
        let schur = companion.schur();
        let (_, t) = schur.unpack();
        (0..degree).map(|i| t[(i, i)]).collect()
    };

    let dp = derivative(&monic);
    Ok(raw
        .into_iter()
        .map(|z| {
            let f = horner(&monic, z);
            let df = horner(&dp, z);
            if df.norm() == 0.0 {
                return z;
            }
            let polished = z - f / df;
            if polished.is_finite() && horner(&monic, polished).norm() < f.norm() {
                polished
            } else {
                z
            }
        })
        .collect())
}

/// Groups roots closer than `tol` into `(mean, multiplicity)` pairs.
pub fn merge_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &z in roots {
        match clusters
            .iter_mut()
            .find(|(c, n)| (c / *n as f64 - z).norm() < tol)
        {
            Some((sum, n)) => {
                *sum += z;
                *n += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(sum, n)| (sum / n as f64, n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_roots() {
        // z² + 1
        let mut roots = polynomial_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        roots.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((roots[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((roots[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn cubic_roots_of_unity_scaled() {
        // 1 + 8 z³ → z = ½ e^{iπ(2k+1)/3}
        let roots = polynomial_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(8.0, 0.0)]).unwrap();
        assert_eq!(roots.len(), 3);
        for z in roots {
            assert!((z.norm() - 0.5).abs() < 1e-14);
            assert!((c(1.0, 0.0) + 8.0 * z * z * z).norm() < 1e-13);
        }
    }

    #[test]
    fn complex_coefficients() {
        // (z − (1+2i))(z − (−3+i/2))(z − 0.25)
        let r = [c(1.0, 2.0), c(-3.0, 0.5), c(0.25, 0.0)];
        let mut coeffs = vec![c(1.0, 0.0)];
        for root in r {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * root;
            }
            coeffs = next;
        }
        let found = polynomial_roots(&coeffs).unwrap();
        for root in r {
            assert!(found.iter().any(|z| (z - root).norm() < 1e-12), "{root} missing");
        }
    }

    #[test]
    fn merge_collapses_double_root() {
        let merged = merge_roots(&[c(1.0, 0.0), c(1.0 + 1e-10, 0.0), c(2.0, 0.0)], 1e-8);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].1, 2);
    }

    #[test]
    fn zero_leading_coefficient_is_an_error() {
        assert!(polynomial_roots(&[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
    }
}
