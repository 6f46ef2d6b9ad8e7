//! Characteristic curve `τ̃(q) = min_φ τ(√q ψ₀ + √(1−q) e^{iφ} ψ₁)` and its
//! lower convex envelope `τ*(q)`.
//!
//! `τ*(p)` bounds the convex-roof tangle of `p·π_{ψ₀} + (1−p)·π_{ψ₁}` from
//! below. The envelope is first built on the sampled curve; the tangency
//! points at the ends of every affine stretch are then refined off-grid and
//! the envelope is rebuilt with them included.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::golden::golden_section_minimize;
use crate::pencil::RankTwoPencil;
use crate::tangles::TangleDescriptor;

pub const DEFAULT_GRID_N: usize = 2001;
pub const DEFAULT_PHASE_GRID: usize = 720;
/// Width of the final golden-section bracket on the phase.
pub const PHASE_WINDOW: f64 = 1e-12;
const TANGENCY_TOL: f64 = 1e-13;

/// One grid point of the characteristic curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub q: f64,
    pub tau_tilde: f64,
    pub phi_star: f64,
}

/// Minimizes the pure-state tangle over the relative phase at fixed weight.
#[derive(Debug, Clone)]
pub struct PhaseMinimizer {
    pencil: RankTwoPencil,
    desc: TangleDescriptor,
    phase_grid: usize,
}

impl PhaseMinimizer {
    pub fn new(pencil: RankTwoPencil, desc: TangleDescriptor, phase_grid: usize) -> Result<Self> {
        if desc.n_qubits() != pencil.n_qubits() {
            return Err(Error::DescriptorMismatch {
                name: desc.name().to_string(),
                expected: desc.n_qubits(),
                got: pencil.n_qubits(),
            });
        }
        if phase_grid < 8 {
            return Err(Error::Validation(format!("phase_grid must be ≥ 8, got {phase_grid}")));
        }
        Ok(Self {
            pencil,
            desc,
            phase_grid,
        })
    }

    pub fn pencil(&self) -> &RankTwoPencil {
        &self.pencil
    }

    pub fn descriptor(&self) -> &TangleDescriptor {
        &self.desc
    }

    pub fn phase_grid(&self) -> usize {
        self.phase_grid
    }

    /// `τ(q, φ)` of the normalized superposition.
    pub fn tangle_at(&self, q: f64, phi: f64) -> f64 {
        self.desc
            .evaluate(self.pencil.superposition(q, phi).amplitudes())
            .norm()
    }

    /// `(τ̃(q), φ*)`: coarse scan over `phase_grid` phases, then golden
    /// section around the best one.
    pub fn minimize(&self, q: f64) -> (f64, f64) {
        if q <= 0.0 || q >= 1.0 {
            return (self.tangle_at(q.clamp(0.0, 1.0), 0.0), 0.0);
        }
        let step = TAU / self.phase_grid as f64;
        let (mut best_k, mut best) = (0, f64::INFINITY);
        for k in 0..self.phase_grid {
            let t = self.tangle_at(q, k as f64 * step);
            if t < best {
                best = t;
                best_k = k;
            }
        }
        let centre = best_k as f64 * step;
        let (phi, t) = golden_section_minimize(
            |phi| self.tangle_at(q, phi),
            centre - step,
            centre + step,
            PHASE_WINDOW,
        );
        if t <= best {
            (t, phi.rem_euclid(TAU))
        } else {
            (best, centre)
        }
    }
}

/// `τ̃` sampled on a uniform grid of `q ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct CharacteristicCurve {
    pub samples: Vec<CurveSample>,
    minimizer: PhaseMinimizer,
}

impl CharacteristicCurve {
    pub fn minimizer(&self) -> &PhaseMinimizer {
        &self.minimizer
    }

    pub fn descriptor(&self) -> &TangleDescriptor {
        &self.minimizer.desc
    }

    pub fn pencil(&self) -> &RankTwoPencil {
        &self.minimizer.pencil
    }

    pub fn grid_n(&self) -> usize {
        self.samples.len()
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.q, s.tau_tilde)).collect()
    }

    /// Off-grid `τ̃(q)`.
    pub fn evaluate(&self, q: f64) -> f64 {
        self.minimizer.minimize(q).0
    }
}

pub fn characteristic_curve(
    pencil: &RankTwoPencil,
    desc: &TangleDescriptor,
    grid_n: usize,
    phase_grid: usize,
) -> Result<CharacteristicCurve> {
    if grid_n < 3 {
        return Err(Error::Validation(format!("grid_n must be ≥ 3, got {grid_n}")));
    }
    let minimizer = PhaseMinimizer::new(pencil.clone(), desc.clone(), phase_grid)?;
    let last = (grid_n - 1) as f64;
    let samples = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let q = i as f64 / last;
            let (tau_tilde, phi_star) = minimizer.minimize(q);
            CurveSample {
                q,
                tau_tilde,
                phi_star,
            }
        })
        .collect();
    Ok(CharacteristicCurve { samples, minimizer })
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Indices of the lower convex hull of points sorted by abscissa
/// (monotone chain). Collinear interior points are dropped.
pub fn lower_hull(points: &[(f64, f64)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(points.len());
    for (i, &p) in points.iter().enumerate() {
        while hull.len() >= 2
            && cross(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull
}

/// Largest height of the points strictly between `i` and `j` above their chord
/// that still counts as touching it.
const CONTACT_TOL: f64 = 1e-10;

/// Whether the chord from `i` to `j` runs along the points in between.
fn touches(points: &[(f64, f64)], i: usize, j: usize) -> bool {
    let (a, b) = (points[i], points[j]);
    let slope = (b.1 - a.1) / (b.0 - a.0);
    points[i + 1..j]
        .iter()
        .all(|p| p.1 - (a.1 + slope * (p.0 - a.0)) <= CONTACT_TOL)
}

/// A maximal stretch on which the envelope is affine and lies below `τ̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineGap {
    pub left: f64,
    pub right: f64,
    pub slope: f64,
}

/// Lower convex envelope `τ*` of a characteristic curve.
#[derive(Debug, Clone)]
pub struct ConvexCurve {
    /// Hull vertices `(q, τ)` sorted by `q`.
    pub vertices: Vec<(f64, f64)>,
    /// Slope of the segment after each vertex.
    pub slopes: Vec<f64>,
    /// Whether the segment after each vertex joins neighbouring curve points
    /// (`τ* = τ̃` there) rather than bridging a gap.
    pub contact: Vec<bool>,
    minimizer: Option<PhaseMinimizer>,
}

impl ConvexCurve {
    /// Builds the envelope of `points` (sorted by `q`, covering `[0, 1]`).
    fn from_points(points: &[(f64, f64)], minimizer: Option<PhaseMinimizer>) -> Self {
        let idx = lower_hull(points);
        let vertices: Vec<(f64, f64)> = idx.iter().map(|&i| points[i]).collect();
        let slopes = vertices
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        let contact = idx.windows(2).map(|w| touches(points, w[0], w[1])).collect();
        Self {
            vertices,
            slopes,
            contact,
            minimizer,
        }
    }

    /// Affine stretches of the envelope.
    pub fn gaps(&self) -> Vec<AffineGap> {
        self.contact
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| AffineGap {
                left: self.vertices[i].0,
                right: self.vertices[i + 1].0,
                slope: self.slopes[i],
            })
            .collect()
    }

    /// `q`-ranges on which the envelope touches `τ̃`.
    pub fn contact_ranges(&self) -> Vec<(f64, f64)> {
        let mut ranges: Vec<(f64, f64)> = Vec::new();
        for (i, &c) in self.contact.iter().enumerate() {
            if !c {
                continue;
            }
            let (lo, hi) = (self.vertices[i].0, self.vertices[i + 1].0);
            match ranges.last_mut() {
                Some(last) if last.1 == lo => last.1 = hi,
                _ => ranges.push((lo, hi)),
            }
        }
        ranges
    }

    fn segment(&self, q: f64) -> usize {
        let n = self.vertices.len();
        match self.vertices.binary_search_by(|v| v.0.total_cmp(&q)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Piecewise-linear interpolation between hull vertices.
    pub fn interpolate(&self, q: f64) -> f64 {
        let i = self.segment(q);
        let (q0, t0) = self.vertices[i];
        t0 + self.slopes[i] * (q - q0)
    }

    /// `τ*(q)`. On contact stretches the exact `τ̃(q)` is used when it lies
    /// below the chord between the neighbouring vertices; an envelope rebuilt
    /// from stored rows has no minimizer and interpolates.
    pub fn evaluate(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        let i = self.segment(q);
        let chord = self.interpolate(q);
        match &self.minimizer {
            Some(m) if self.contact[i] && q > self.vertices[i].0 && q < self.vertices[i + 1].0 => {
                chord.min(m.minimize(q).0)
            }
            _ => chord,
        }
    }
}

/// Which end of `[0, 1]` an affine gap adjoins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn label(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Refines both ends of the sampled gap between samples `i < j`.
///
/// Each interior end is the tangency point of the supporting line through
/// the opposite end; the two ends are alternated until they settle.
fn refine_gap(curve: &CharacteristicCurve, i: usize, j: usize) -> ((f64, f64), (f64, f64)) {
    let s = &curve.samples;
    let n = s.len();
    let tau = |q: f64| curve.evaluate(q);
    let mut left = (s[i].q, s[i].tau_tilde);
    let mut right = (s[j].q, s[j].tau_tilde);
    let left_window = (i > 0).then(|| (s[i - 1].q, s[i + 1].q.min(s[j].q)));
    let right_window = (j + 1 < n).then(|| (s[j - 1].q.max(s[i].q), s[j + 1].q));
    for _ in 0..100 {
        let (old_l, old_r) = (left.0, right.0);
        if let Some((a, b)) = right_window {
            let anchor = left;
            let (x, _) = golden_section_minimize(
                |x| (tau(x) - anchor.1) / (x - anchor.0),
                a.max(anchor.0 + 1e-15),
                b,
                TANGENCY_TOL,
            );
            right = (x, tau(x));
        }
        if let Some((a, b)) = left_window {
            let anchor = right;
            let (x, _) = golden_section_minimize(
                |x| -(anchor.1 - tau(x)) / (anchor.0 - x),
                a,
                b.min(anchor.0 - 1e-15),
                TANGENCY_TOL,
            );
            left = (x, tau(x));
        }
        if (left.0 - old_l).abs() < 1e-14 && (right.0 - old_r).abs() < 1e-14 {
            break;
        }
        if left_window.is_none() || right_window.is_none() {
            // one end is pinned to the domain boundary: a single pass is exact
            break;
        }
    }
    (left, right)
}

fn sampled_gaps(curve: &CharacteristicCurve) -> Vec<(usize, usize)> {
    let points = curve.points();
    lower_hull(&points)
        .windows(2)
        .filter(|w| !touches(&points, w[0], w[1]))
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Lower convex envelope of the sampled curve with refined tangency points.
pub fn convex_hull_curve(curve: &CharacteristicCurve) -> ConvexCurve {
    let mut points = curve.points();
    for (i, j) in sampled_gaps(curve) {
        let (l, r) = refine_gap(curve, i, j);
        points.push(l);
        points.push(r);
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|a, b| a.0 == b.0);
    ConvexCurve::from_points(&points, Some(curve.minimizer.clone()))
}

/// Envelope of the raw samples only, without tangency refinement.
pub fn sampled_hull(curve: &CharacteristicCurve) -> ConvexCurve {
    ConvexCurve::from_points(&curve.points(), Some(curve.minimizer.clone()))
}

/// Rebuilds an envelope from `(q, τ̃)` rows, e.g. read back from a file.
pub fn hull_from_rows(rows: &[(f64, f64)]) -> Result<ConvexCurve> {
    let mut points = rows.to_vec();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|a, b| a.0 == b.0);
    if points.len() < 2 || points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::Validation("need at least two finite rows".into()));
    }
    Ok(ConvexCurve::from_points(&points, None))
}

/// Interior tangency abscissa of the affine gap adjoining `q = 0`
/// ([`Side::Left`]) or `q = 1` ([`Side::Right`]).
pub fn refine_tangency(curve: &CharacteristicCurve, side: Side) -> Result<f64> {
    let gaps = sampled_gaps(curve);
    let last = curve.samples.len() - 1;
    match side {
        Side::Left => gaps
            .first()
            .filter(|(i, _)| *i == 0)
            .map(|&(i, j)| refine_gap(curve, i, j).1 .0),
        Side::Right => gaps
            .last()
            .filter(|(_, j)| *j == last)
            .map(|&(i, j)| refine_gap(curve, i, j).0 .0),
    }
    .ok_or(Error::NotApplicable(side.label()))
}

/// Certified lower bound `τ*(p)` on the roof of `p·π_{ψ₀} + (1−p)·π_{ψ₁}`.
pub fn lower_bound(hull: &ConvexCurve, p: f64) -> f64 {
    hull.evaluate(p)
}

/// Abscissae where `τ̃` turns from convex to concave (increasing `q`),
/// located from sign changes of second differences and refined by bisection.
pub fn concavity_onsets(curve: &CharacteristicCurve) -> Vec<f64> {
    let s = &curve.samples;
    let second = |k: usize| s[k - 1].tau_tilde - 2.0 * s[k].tau_tilde + s[k + 1].tau_tilde;
    let h = 1e-4;
    let fd = |x: f64| curve.evaluate(x - h) - 2.0 * curve.evaluate(x) + curve.evaluate(x + h);
    let mut onsets = Vec::new();
    for k in 1..s.len().saturating_sub(2) {
        if second(k) > 0.0 && second(k + 1) < 0.0 {
            let (mut a, mut b) = (s[k].q.max(h), s[k + 1].q.min(1.0 - h));
            if !(fd(a) > 0.0 && fd(b) < 0.0) {
                onsets.push(0.5 * (a + b));
                continue;
            }
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if fd(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            onsets.push(0.5 * (a + b));
        }
    }
    onsets
}
