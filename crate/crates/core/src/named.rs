//! Built-in reference states and the rank-2 families built from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pencil::RankTwoPencil;
use crate::states::PureState;

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 5] = ["ghz", "w", "bell", "psi-i", "psi-ii"];

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz() -> PureState {
    PureState::from_real(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).expect("valid")
}

/// `(|100⟩ + |010⟩ + |001⟩)/√3`.
pub fn w() -> PureState {
    PureState::from_real(3, &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).expect("valid")
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell() -> PureState {
    PureState::from_real(2, &[1.0, 0.0, 0.0, 1.0]).expect("valid")
}

/// `(|00⟩ − |11⟩)/√2`.
pub fn bell_minus() -> PureState {
    PureState::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("valid")
}

/// `(2|00⟩ + |11⟩)/√5`.
pub fn state_one() -> PureState {
    PureState::from_real(2, &[2.0, 0.0, 0.0, 1.0]).expect("valid")
}

/// `(|00⟩ + |01⟩ − 2|11⟩)/√6`, orthogonal to [`state_one`].
pub fn state_two() -> PureState {
    PureState::from_real(2, &[1.0, 1.0, 0.0, -2.0]).expect("valid")
}

pub fn by_name(name: &str) -> Result<PureState> {
    match name.to_ascii_lowercase().as_str() {
        "ghz" => Ok(ghz()),
        "w" => Ok(w()),
        "bell" => Ok(bell()),
        "psi-i" => Ok(state_one()),
        "psi-ii" => Ok(state_two()),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// Pencil of `ρ(p) = p·π_GHZ + (1−p)·π_W`.
pub fn ghz_w_pencil(p: f64) -> RankTwoPencil {
    RankTwoPencil::new(ghz(), w(), p).expect("GHZ and W are orthonormal")
}

/// Pencil of `ρ(p) = p·π_I + (1−p)·π_II` for the two-qubit pair above.
pub fn two_qubit_pencil(p: f64) -> RankTwoPencil {
    RankTwoPencil::new(state_one(), state_two(), p).expect("I and II are orthonormal")
}

/// `√p|GHZ⟩ − e^{iφ}√(1−p)|W⟩`.
pub fn ghz_w_superposition(p: f64, phi: f64) -> PureState {
    ghz().combine(
        Complex64::new(p.sqrt(), 0.0),
        &w(),
        -Complex64::from_polar((1.0 - p).sqrt(), phi),
    )
}
