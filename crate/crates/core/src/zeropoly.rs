//! Zero-polytope of a rank-2 density matrix: the convex hull of the pure
//! states in its range on which a tangle vanishes.
//!
//! Corners are located on the pencil `ψ₀ + zψ₁` as the zeros of the tangle
//! polynomial, then placed in the Bloch ball of the range where the
//! geometry (family intersection, convex decompositions) is done in ℝ³.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::Result;
use crate::pencil::{extract_polynomial, q_phi_of, PencilOutcome, ProjectivePoint, RankTwoPencil};
use crate::roof::Decomposition;
use crate::roots;
use crate::states::{bloch_coordinates, BlochPoint, PureState};
use crate::tangles::TangleDescriptor;

/// Roots closer than this are one corner.
pub const ROOT_MERGE_TOL: f64 = 1e-8;

const GEOMETRY_TOL: f64 = 1e-10;

/// A vertex of the zero-polytope.
#[derive(Debug, Clone)]
pub struct Corner {
    pub root: ProjectivePoint,
    pub multiplicity: usize,
    /// Weight `q` of `ψ₀` in the normalized corner state.
    pub weight: f64,
    /// Relative phase `φ` of `√q ψ₀ + √(1−q) e^{iφ} ψ₁`, in `[0, 2π)`.
    pub phase: f64,
    pub state: PureState,
    pub bloch: BlochPoint,
}

impl Corner {
    /// Phase in the `√q ψ₀ − e^{iφ}√(1−q) ψ₁` convention, i.e. shifted by π.
    pub fn negated_phase(&self) -> f64 {
        (self.phase - PI).rem_euclid(TAU)
    }
}

#[derive(Debug, Clone)]
pub struct ZeroPolytope {
    pub corners: Vec<Corner>,
    pub degree: usize,
}

#[derive(Debug, Clone)]
pub enum PolytopeOutcome {
    Polytope(ZeroPolytope),
    /// Every state of the range has zero tangle, so does `ρ`.
    WholePencilZero,
}

impl PolytopeOutcome {
    pub fn polytope(&self) -> Option<&ZeroPolytope> {
        match self {
            PolytopeOutcome::Polytope(p) => Some(p),
            PolytopeOutcome::WholePencilZero => None,
        }
    }
}

/// Closed `p`-intervals where `ρ(p) = p·π_{ψ₀} + (1−p)·π_{ψ₁}` lies in the
/// zero-polytope. Convexity makes this at most one interval.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ZeroInterval {
    pub intervals: Vec<(f64, f64)>,
}

impl ZeroInterval {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, p: f64, tol: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(lo, hi)| p >= lo - tol && p <= hi + tol)
    }
}

impl ZeroPolytope {
    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    pub fn points(&self) -> Vec<Vector3<f64>> {
        self.corners
            .iter()
            .map(|c| Vector3::new(c.bloch.x, c.bloch.y, c.bloch.z))
            .collect()
    }

    /// Convex weights of corners reproducing the Bloch point `target`, if it
    /// lies in the polytope.
    pub fn barycentric(&self, target: &BlochPoint) -> Option<Vec<f64>> {
        let pts = self.points();
        let t = Vector3::new(target.x, target.y, target.z);
        let n = pts.len();
        // Carathéodory: a point of the hull lies in a simplex of ≤ 4 corners.
        for size in (1..=4.min(n)).rev() {
            for subset in combinations(n, size) {
                if let Some(lambda) = simplex_weights(&pts, &subset, &t) {
                    let mut weights = vec![0.0; n];
                    for (&i, &l) in subset.iter().zip(&lambda) {
                        weights[i] = l.max(0.0);
                    }
                    let s: f64 = weights.iter().sum();
                    weights.iter_mut().for_each(|w| *w /= s);
                    return Some(weights);
                }
            }
        }
        None
    }

    /// Decomposition of `ρ(p)` into corner states, if `ρ(p)` is inside.
    pub fn decompose(&self, p: f64) -> Option<Decomposition> {
        let weights = self.barycentric(&BlochPoint::new(0.0, 0.0, 2.0 * p - 1.0))?;
        let (weights, states): (Vec<f64>, Vec<PureState>) = weights
            .into_iter()
            .zip(&self.corners)
            .filter(|(w, _)| *w > 1e-14)
            .map(|(w, c)| (w, c.state.clone()))
            .unzip();
        Decomposition::new(weights, states).ok()
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            extend(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Barycentric coordinates of `t` in the simplex on `subset`, when the
/// simplex is non-degenerate and contains `t`.
fn simplex_weights(pts: &[Vector3<f64>], subset: &[usize], t: &Vector3<f64>) -> Option<Vec<f64>> {
    let k = subset.len();
    let lambda: Vec<f64> = match k {
        1 => {
            if (pts[subset[0]] - t).norm() < GEOMETRY_TOL {
                vec![1.0]
            } else {
                return None;
            }
        }
        4 => {
            let mut m = Matrix4::zeros();
            for (c, &i) in subset.iter().enumerate() {
                m[(0, c)] = pts[i].x;
                m[(1, c)] = pts[i].y;
                m[(2, c)] = pts[i].z;
                m[(3, c)] = 1.0;
            }
            if m.determinant().abs() < 1e-12 {
                return None;
            }
            let sol = m.lu().solve(&Vector4::new(t.x, t.y, t.z, 1.0))?;
            sol.iter().cloned().collect()
        }
        _ => {
            // Least squares on the affine hull of 2 or 3 points.
            let base = pts[subset[0]];
            let dirs: Vec<Vector3<f64>> = subset[1..].iter().map(|&i| pts[i] - base).collect();
            let rhs = t - base;
            let g = Matrix3::from_fn(|r, c| {
                if r < dirs.len() && c < dirs.len() {
                    dirs[r].dot(&dirs[c])
                } else if r == c {
                    1.0
                } else {
                    0.0
                }
            });
            if (k == 2 && g[(0, 0)] < 1e-20) || (k == 3 && g.determinant().abs() < 1e-20) {
                return None;
            }
            let b = Vector3::from_fn(|r, _| if r < dirs.len() { dirs[r].dot(&rhs) } else { 0.0 });
            let mu = g.lu().solve(&b)?;
            let mut fit = base;
            for (d, m) in dirs.iter().zip(mu.iter()) {
                fit += d * *m;
            }
            if (fit - t).norm() > 1e-9 {
                return None;
            }
            let mut l = vec![1.0 - mu.iter().take(dirs.len()).sum::<f64>()];
            l.extend(mu.iter().take(dirs.len()));
            l
        }
    };
    if lambda.iter().all(|&l| l >= -1e-12) {
        Some(lambda)
    } else {
        None
    }
}

/// Flushes rounding residue: roots within 1e-12 of the origin become zero
/// and components below 1e-13 of the modulus are dropped.
fn clean_root(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r < 1e-12 {
        return Complex64::new(0.0, 0.0);
    }
    let flush = |x: f64| if x.abs() < 1e-13 * r { 0.0 } else { x };
    Complex64::new(flush(z.re), flush(z.im))
}

/// Corners of the zero-polytope of the tangle `desc` on `pencil`.
pub fn zero_polytope(pencil: &RankTwoPencil, desc: &TangleDescriptor) -> Result<PolytopeOutcome> {
    let poly = match extract_polynomial(pencil, desc)? {
        PencilOutcome::Vanishing => return Ok(PolytopeOutcome::WholePencilZero),
        PencilOutcome::Polynomial(p) => p,
    };
    let finite = poly.finite_roots()?;
    let mut roots: Vec<(ProjectivePoint, usize)> = roots::merge_roots(&finite, ROOT_MERGE_TOL)
        .into_iter()
        .map(|(z, m)| (ProjectivePoint::Finite(clean_root(z)), m))
        .collect();
    if poly.infinity_multiplicity > 0 {
        roots.push((ProjectivePoint::Infinity, poly.infinity_multiplicity));
    }
    let mut corners = Vec::with_capacity(roots.len());
    for (root, multiplicity) in roots {
        let (weight, phase) = q_phi_of(root);
        let state = pencil.state_at_z(root);
        let bloch = bloch_coordinates(&state, pencil.basis())?;
        corners.push(Corner {
            root,
            multiplicity,
            weight,
            phase,
            state,
            bloch,
        });
    }
    corners.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.phase.total_cmp(&b.phase)));
    Ok(PolytopeOutcome::Polytope(ZeroPolytope {
        corners,
        degree: poly.degree,
    }))
}

/// `z`-values where the vertical line `x = y = 0` meets the hull of `pts`.
///
/// The line meets a convex polytope in a segment whose endpoints lie on
/// boundary triangles; triangles with a degenerate projection fall through
/// to their edges, vertical edges to their vertices.
fn axis_hits(pts: &[Vector3<f64>]) -> Vec<f64> {
    let n = pts.len();
    let mut hits = Vec::new();
    for i in 0..n {
        if pts[i].xy().norm() < GEOMETRY_TOL {
            hits.push(pts[i].z);
        }
        for j in i + 1..n {
            let (a, b) = (pts[i], pts[j]);
            let d = (b - a).xy();
            let len2 = d.norm_squared();
            if len2 < GEOMETRY_TOL * GEOMETRY_TOL {
                continue;
            }
            let s = -a.xy().dot(&d) / len2;
            if !(-1e-12..=1.0 + 1e-12).contains(&s) {
                continue;
            }
            let s = s.clamp(0.0, 1.0);
            if (a.xy() + d * s).norm() < GEOMETRY_TOL {
                hits.push(a.z + s * (b.z - a.z));
            }
            for &c in &pts[j + 1..n] {
                let (u, v) = ((b - a).xy(), (c - a).xy());
                let det = u.x * v.y - u.y * v.x;
                if det.abs() < 1e-14 {
                    continue;
                }
                let w = -a.xy();
                let l1 = (w.x * v.y - w.y * v.x) / det;
                let l2 = (u.x * w.y - u.y * w.x) / det;
                let l0 = 1.0 - l1 - l2;
                if l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12 {
                    hits.push(l0 * a.z + l1 * b.z + l2 * c.z);
                }
            }
        }
    }
    hits
}

/// Parameters `p` for which `ρ(p) = p·π_{ψ₀} + (1−p)·π_{ψ₁}` is in the
/// zero-polytope. The family runs along the Bloch z axis, `z = 2p − 1`.
pub fn intersect_family(polytope: &ZeroPolytope) -> ZeroInterval {
    let hits = axis_hits(&polytope.points());
    if hits.is_empty() {
        return ZeroInterval {
            intervals: Vec::new(),
        };
    }
    let lo = hits.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = hits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let to_p = |z: f64| ((z + 1.0) / 2.0).clamp(0.0, 1.0);
    ZeroInterval {
        intervals: vec![(to_p(lo), to_p(hi))],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;
    use num_complex::Complex64;

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(5, 4).len(), 5);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn ghz_w_corners() {
        let poly = zero_polytope(&named::ghz_w_pencil(0.5), &TangleDescriptor::three_tangle()).unwrap();
        let poly = poly.polytope().unwrap();
        assert_eq!(poly.corner_count(), 4);
        let p0 = 4.0 * 2f64.cbrt() / (3.0 + 4.0 * 2f64.cbrt());
        let finite: Vec<_> = poly.corners.iter().filter(|c| !c.root.is_infinite()).collect();
        assert_eq!(finite.len(), 3);
        for c in &finite {
            assert!((c.weight - p0).abs() < 1e-12);
        }
        let w = poly.corners.iter().find(|c| c.root.is_infinite()).unwrap();
        assert!((w.state.inner(&named::w()).norm() - 1.0).abs() < 1e-14);
        for c in &poly.corners {
            let t = TangleDescriptor::three_tangle().tangle(&c.state).unwrap();
            assert!(t < 1e-8, "corner tangle {t}");
        }
    }

    #[test]
    fn two_qubit_corners_and_intersection() {
        let pencil = named::two_qubit_pencil(0.5);
        let poly = zero_polytope(&pencil, &TangleDescriptor::concurrence()).unwrap();
        let poly = poly.polytope().unwrap();
        assert_eq!(poly.corner_count(), 2);
        assert!((poly.corners[0].weight - 10.0 / 13.0).abs() < 1e-12);
        assert!(poly.corners[0].phase.abs() < 1e-12);
        assert!((poly.corners[1].weight - 5.0 / 29.0).abs() < 1e-12);
        assert!((poly.corners[1].phase - PI).abs() < 1e-12);
        let iv = intersect_family(poly);
        assert_eq!(iv.intervals.len(), 1);
        let (lo, hi) = iv.intervals[0];
        assert!((lo - 5.0 / 11.0).abs() < 1e-12 && (hi - 5.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn bell_pair_corners() {
        let pencil = RankTwoPencil::new(named::bell(), named::bell_minus(), 0.5).unwrap();
        let poly = zero_polytope(&pencil, &TangleDescriptor::concurrence()).unwrap();
        let poly = poly.polytope().unwrap();
        assert_eq!(poly.corner_count(), 2);
        for c in &poly.corners {
            assert!((c.weight - 0.5).abs() < 1e-12);
            match c.root {
                ProjectivePoint::Finite(z) => assert!((z.norm() - 1.0).abs() < 1e-12 && z.im == 0.0),
                _ => panic!(),
            }
        }
        let iv = intersect_family(poly);
        assert!((iv.intervals[0].0 - 0.5).abs() < 1e-12);
        assert!((iv.intervals[0].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ghz_w_interval() {
        let poly = zero_polytope(&named::ghz_w_pencil(0.5), &TangleDescriptor::three_tangle()).unwrap();
        let iv = intersect_family(poly.polytope().unwrap());
        let p0 = 4.0 * 2f64.cbrt() / (3.0 + 4.0 * 2f64.cbrt());
        assert_eq!(iv.intervals.len(), 1);
        assert!(iv.intervals[0].0.abs() < 1e-12);
        assert!((iv.intervals[0].1 - p0).abs() < 1e-10);
    }

    #[test]
    fn whole_pencil_zero() {
        let pencil = RankTwoPencil::new(
            PureState::basis(2, 0).unwrap(),
            PureState::basis(2, 1).unwrap(),
            0.5,
        )
        .unwrap();
        assert!(matches!(
            zero_polytope(&pencil, &TangleDescriptor::concurrence()).unwrap(),
            PolytopeOutcome::WholePencilZero
        ));
    }

    #[test]
    fn both_endpoints_zero_adds_infinity() {
        // |00⟩ and |11⟩: P(z) = 2z, zeros at z = 0 and z = ∞
        let pencil = RankTwoPencil::new(
            PureState::basis(2, 0).unwrap(),
            PureState::basis(2, 3).unwrap(),
            0.5,
        )
        .unwrap();
        let poly = zero_polytope(&pencil, &TangleDescriptor::concurrence()).unwrap();
        let poly = poly.polytope().unwrap();
        assert_eq!(poly.corner_count(), 2);
        assert!(poly.corners.iter().any(|c| c.root.is_infinite()));
        assert!(poly
            .corners
            .iter()
            .any(|c| c.root == ProjectivePoint::Finite(Complex64::new(0.0, 0.0))));
        // the chord joins the poles: the whole family is separable
        assert_eq!(intersect_family(poly).intervals, vec![(0.0, 1.0)]);
    }

    #[test]
    fn empty_intersection_for_complex_phase() {
        // Relative phase i between the coefficients of |I⟩ moves both zeros
        // off the real chord.
        let one = PureState::normalized(
            2,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 1.0),
            ],
        )
        .unwrap();
        let two = named::state_two();
        // re-orthogonalize two against one
        let ov = one.inner(&two);
        let two = two.combine(Complex64::new(1.0, 0.0), &one, -ov).normalize().unwrap();
        let pencil = RankTwoPencil::new(one, two, 0.5).unwrap();
        let poly = zero_polytope(&pencil, &TangleDescriptor::concurrence()).unwrap();
        let iv = intersect_family(poly.polytope().unwrap());
        // either empty or a single point; both are consistent with a chord
        assert!(iv.intervals.len() <= 1);
    }

    #[test]
    fn decompose_inside_simplex() {
        let poly = zero_polytope(&named::ghz_w_pencil(0.5), &TangleDescriptor::three_tangle()).unwrap();
        let poly = poly.polytope().unwrap();
        let dec = poly.decompose(0.3).unwrap();
        let target = named::ghz_w_pencil(0.3).density(0.3).unwrap();
        assert!(dec.reconstruction_error(&target) < 1e-9);
        assert!(poly.decompose(0.9).is_none());
    }
}
