//! Reference implementations used as test oracles. They share no code path
//! with the library beyond the matrix types.

#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn tau_tilde(p: f64) -> f64 {
    (p * p - 8.0 * 6f64.sqrt() / 9.0 * (p * (1.0 - p).powi(3)).sqrt()).abs()
}

pub fn p0() -> f64 {
    4.0 * 2f64.cbrt() / (3.0 + 4.0 * 2f64.cbrt())
}

pub fn p1() -> f64 {
    0.5 + 3.0 / 310.0 * 465f64.sqrt()
}

pub fn affine(p: f64) -> f64 {
    1.0 - (1.0 - p) * (1.5 + 465f64.sqrt() / 18.0)
}

/// Piecewise roof of `p·GHZ + (1−p)·W`.
pub fn roof_closed_form(p: f64) -> f64 {
    if p <= p0() {
        0.0
    } else if p <= p1() {
        tau_tilde(p)
    } else {
        affine(p)
    }
}

pub fn ghz_amps() -> Vec<C> {
    let s = 0.5f64.sqrt();
    let mut v = vec![c(0.0, 0.0); 8];
    v[0] = c(s, 0.0);
    v[7] = c(s, 0.0);
    v
}

pub fn w_amps() -> Vec<C> {
    let s = (1.0f64 / 3.0).sqrt();
    let mut v = vec![c(0.0, 0.0); 8];
    v[1] = c(s, 0.0);
    v[2] = c(s, 0.0);
    v[4] = c(s, 0.0);
    v
}

pub fn outer(v: &[C]) -> DMatrix<C> {
    let d = v.len();
    DMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj())
}

pub fn ghz_w_density(p: f64) -> DMatrix<C> {
    outer(&ghz_amps()) * c(p, 0.0) + outer(&w_amps()) * c(1.0 - p, 0.0)
}

/// Hermitian square root through the eigendecomposition.
fn sqrt_psd(m: &DMatrix<C>) -> DMatrix<C> {
    let eig = m.clone().symmetric_eigen();
    let d = m.nrows();
    let mut out = DMatrix::zeros(d, d);
    for k in 0..d {
        let v = eig.eigenvectors.column(k);
        let s = eig.eigenvalues[k].max(0.0).sqrt();
        out += v * v.adjoint() * c(s, 0.0);
    }
    out
}

/// Mixed two-qubit concurrence from the eigenvalues of `√ρ ρ̃ √ρ`.
pub fn concurrence(rho: &DMatrix<C>) -> f64 {
    let yy = DMatrix::from_fn(4, 4, |i, j| match (i, j) {
        (0, 3) | (3, 0) => c(-1.0, 0.0),
        (1, 2) | (2, 1) => c(1.0, 0.0),
        _ => c(0.0, 0.0),
    });
    let flipped = &yy * rho.conjugate() * &yy;
    let s = sqrt_psd(rho);
    let m = &s * flipped * &s;
    let m = (&m + m.adjoint()) * c(0.5, 0.0);
    let mut l: Vec<f64> = m
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Reduced state of qubits `keep` (ascending) of a three-qubit pure state.
fn reduce(v: &[C], keep: &[usize]) -> DMatrix<C> {
    let d = 1 << keep.len();
    let traced: Vec<usize> = (0..3).filter(|q| !keep.contains(q)).collect();
    let bit = |index: usize, q: usize| (index >> (2 - q)) & 1;
    let mut m = DMatrix::zeros(d, d);
    for i in 0..8 {
        for j in 0..8 {
            if traced.iter().any(|&q| bit(i, q) != bit(j, q)) {
                continue;
            }
            let a = keep.iter().fold(0, |acc, &q| acc * 2 + bit(i, q));
            let b = keep.iter().fold(0, |acc, &q| acc * 2 + bit(j, q));
            m[(a, b)] += v[i] * v[j].conj();
        }
    }
    m
}

/// 3-tangle of a normalized state from `4 det ρ_A − C²_AB − C²_AC`.
pub fn three_tangle(v: &[C]) -> f64 {
    let a = reduce(v, &[0]);
    let det = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).re;
    4.0 * det - concurrence(&reduce(v, &[0, 1])).powi(2) - concurrence(&reduce(v, &[0, 2])).powi(2)
}

/// Pure two-qubit concurrence `2|a₀₀a₁₁ − a₀₁a₁₀|`.
pub fn pure_concurrence(v: &[C]) -> f64 {
    2.0 * (v[0] * v[3] - v[1] * v[2]).norm()
}

pub fn random_amps<R: Rng>(dim: usize, rng: &mut R) -> Vec<C> {
    let v: Vec<C> = (0..dim)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Two orthonormal vectors by Gram–Schmidt.
pub fn random_pair<R: Rng>(dim: usize, rng: &mut R) -> (Vec<C>, Vec<C>) {
    let a = random_amps(dim, rng);
    let b = random_amps(dim, rng);
    let ov: C = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    let b: Vec<C> = b.iter().zip(&a).map(|(y, x)| y - ov * x).collect();
    let n = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    (a, b.into_iter().map(|x| x / n).collect())
}

/// Haar-ish single-qubit unitary from Euler angles.
pub fn random_su2<R: Rng>(rng: &mut R) -> Matrix2<C> {
    let (a, b, g): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let theta = std::f64::consts::PI * a;
    let (alpha, beta) = (std::f64::consts::TAU * b, std::f64::consts::TAU * g);
    Matrix2::new(
        C::from_polar(theta.cos(), alpha),
        -C::from_polar(theta.sin(), -beta),
        C::from_polar(theta.sin(), beta),
        C::from_polar(theta.cos(), -alpha),
    )
}

/// Whether `ys` sampled on increasing `xs` is convex within `tol`.
pub fn convex(xs: &[f64], ys: &[f64], tol: f64) -> bool {
    (1..xs.len() - 1).all(|k| {
        let t = (xs[k] - xs[k - 1]) / (xs[k + 1] - xs[k - 1]);
        ys[k] <= (1.0 - t) * ys[k - 1] + t * ys[k + 1] + tol
    })
}
