//! Polynomial SL(2,ℂ)-invariant tangles of pure qubit states.
//!
//! A tangle is stored as the complex polynomial before the modulus is taken
//! together with its homogeneous degree, so that the polynomial itself can be
//! restricted to a pencil of states and factored.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::PureState;

/// Tolerance on `Σ|aₖ|² − 1` accepted by [`TangleDescriptor::tangle`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Names accepted by [`TangleDescriptor::by_name`].
pub const BUILTIN_NAMES: [&str; 2] = ["concurrence", "three_tangle"];

pub type PreModulusFn = dyn Fn(&[Complex64]) -> Complex64 + Send + Sync;

/// A homogeneous polynomial invariant of even degree on a fixed register.
#[derive(Clone)]
pub struct TangleDescriptor {
    name: String,
    n_qubits: usize,
    degree: usize,
    pre_modulus: Arc<PreModulusFn>,
}

impl fmt::Debug for TangleDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TangleDescriptor")
            .field("name", &self.name)
            .field("n_qubits", &self.n_qubits)
            .field("degree", &self.degree)
            .finish()
    }
}

impl TangleDescriptor {
    /// Registers a user-supplied invariant. The closure receives the raw
    /// (possibly unnormalized) amplitude vector of length `2^n_qubits`.
    pub fn new<F>(name: impl Into<String>, n_qubits: usize, degree: usize, pre_modulus: F) -> Result<Self>
    where
        F: Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
    {
        if degree == 0 || !degree.is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "homogeneous degree must be an even positive integer, got {degree}"
            )));
        }
        if n_qubits == 0 || n_qubits > crate::states::MAX_QUBITS {
            return Err(Error::Validation(format!("unsupported register size {n_qubits}")));
        }
        Ok(Self {
            name: name.into(),
            n_qubits,
            degree,
            pre_modulus: Arc::new(pre_modulus),
        })
    }

    /// Two-qubit concurrence, degree 2.
    pub fn concurrence() -> Self {
        Self {
            name: "concurrence".into(),
            n_qubits: 2,
            degree: 2,
            pre_modulus: Arc::new(concurrence_poly),
        }
    }

    /// Three-qubit 3-tangle, degree 4.
    pub fn three_tangle() -> Self {
        Self {
            name: "three_tangle".into(),
            n_qubits: 3,
            degree: 4,
            pre_modulus: Arc::new(three_tangle_poly),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "concurrence" => Ok(Self::concurrence()),
            "three_tangle" => Ok(Self::three_tangle()),
            _ => Err(Error::UnknownName(name.to_string())),
        }
    }

    /// Default built-in tangle for a register size.
    pub fn for_qubits(n_qubits: usize) -> Result<Self> {
        match n_qubits {
            2 => Ok(Self::concurrence()),
            3 => Ok(Self::three_tangle()),
            n => Err(Error::Validation(format!(
                "no built-in tangle for {n} qubits; supply a descriptor"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Evaluates the polynomial on raw amplitudes. The caller guarantees the
    /// length matches the register.
    #[inline]
    pub fn evaluate(&self, amplitudes: &[Complex64]) -> Complex64 {
        debug_assert_eq!(amplitudes.len(), 1 << self.n_qubits);
        (self.pre_modulus)(amplitudes)
    }

    fn check_register(&self, state: &PureState) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DescriptorMismatch {
                name: self.name.clone(),
                expected: self.n_qubits,
                got: state.n_qubits(),
            });
        }
        Ok(())
    }

    /// Polynomial value on `state` as given (no normalization).
    pub fn pre_modulus(&self, state: &PureState) -> Result<Complex64> {
        self.check_register(state)?;
        Ok(self.evaluate(state.amplitudes()))
    }

    /// `|pre_modulus(ψ)|` for a normalized state.
    pub fn tangle(&self, state: &PureState) -> Result<f64> {
        self.check_register(state)?;
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization { norm_sqr });
        }
        Ok(self.evaluate(state.amplitudes()).norm())
    }

    /// Tangle of the ray through an arbitrary nonzero vector, i.e.
    /// `|P(v)| / ‖v‖^h`.
    pub fn tangle_of_ray(&self, amplitudes: &[Complex64]) -> f64 {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        self.evaluate(amplitudes).norm() / norm_sqr.powi(self.degree as i32 / 2)
    }
}

fn concurrence_poly(a: &[Complex64]) -> Complex64 {
    2.0 * (a[0] * a[3] - a[1] * a[2])
}

fn three_tangle_poly(a: &[Complex64]) -> Complex64 {
    let (p000, p001, p010, p011) = (a[0], a[1], a[2], a[3]);
    let (p100, p101, p110, p111) = (a[4], a[5], a[6], a[7]);
    let d1 = p000 * p000 * p111 * p111
        + p001 * p001 * p110 * p110
        + p010 * p010 * p101 * p101
        + p100 * p100 * p011 * p011;
    let d2 = p000 * p111 * p011 * p100
        + p000 * p111 * p101 * p010
        + p000 * p111 * p110 * p001
        + p011 * p100 * p101 * p010
        + p011 * p100 * p110 * p001
        + p101 * p010 * p110 * p001;
    let d3 = p000 * p110 * p101 * p011 + p111 * p001 * p010 * p100;
    4.0 * (d1 - 2.0 * d2 + 4.0 * d3)
}

/// `2(φ₀₀φ₁₁ − φ₀₁φ₁₀)`.
pub fn concurrence_pre(state: &PureState) -> Result<Complex64> {
    TangleDescriptor::concurrence().pre_modulus(state)
}

/// `4(d₁ − 2d₂ + 4d₃)` in the coefficients `ψ_abc`.
pub fn three_tangle_pre(state: &PureState) -> Result<Complex64> {
    TangleDescriptor::three_tangle().pre_modulus(state)
}

pub fn tangle(desc: &TangleDescriptor, state: &PureState) -> Result<f64> {
    desc.tangle(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;

    #[test]
    fn bell_state_has_unit_concurrence() {
        let c = concurrence_pre(&named::bell()).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_states_have_zero_concurrence() {
        let s = PureState::basis(2, 1).unwrap();
        assert_eq!(concurrence_pre(&s).unwrap().norm(), 0.0);
    }

    #[test]
    fn example_states_concurrence() {
        let one = TangleDescriptor::concurrence().tangle(&named::state_one()).unwrap();
        let two = TangleDescriptor::concurrence().tangle(&named::state_two()).unwrap();
        assert!((one - 0.8).abs() < 1e-14);
        assert!((two - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn ghz_and_w_three_tangle() {
        assert!((three_tangle_pre(&named::ghz()).unwrap().norm() - 1.0).abs() < 1e-14);
        assert!(three_tangle_pre(&named::w()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn z_state_matches_closed_form() {
        // Z(p, φ) = √p GHZ − e^{iφ} √(1−p) W at p = 1/2, φ = 0
        let p: f64 = 0.5;
        let z = named::ghz().combine(
            Complex64::new(p.sqrt(), 0.0),
            &named::w(),
            Complex64::new(-(1.0 - p).sqrt(), 0.0),
        );
        let c = 8.0 * 6f64.sqrt() / 9.0;
        let closed = (p * p - c * (p * (1.0 - p).powi(3)).sqrt()).abs();
        let t = TangleDescriptor::three_tangle().tangle(&z).unwrap();
        assert!((t - closed).abs() < 1e-14);
        assert!((t - 0.294_331_053_951_817).abs() < 1e-12);
    }

    #[test]
    fn wrong_register_is_rejected() {
        let err = three_tangle_pre(&named::bell()).unwrap_err();
        assert!(matches!(err, Error::DescriptorMismatch { expected: 3, got: 2, .. }));
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let s = PureState::new(2, vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        assert!(matches!(
            TangleDescriptor::concurrence().tangle(&s),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn odd_degree_descriptor_is_rejected() {
        assert!(TangleDescriptor::new("bad", 2, 3, |_| Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn registry_lookup() {
        for name in BUILTIN_NAMES {
            assert_eq!(TangleDescriptor::by_name(name).unwrap().name(), name);
        }
        assert!(TangleDescriptor::by_name("negativity").is_err());
    }
}
