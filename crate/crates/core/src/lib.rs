//! Polynomial entanglement measures on qubit registers and their convex
//! roofs over rank-2 mixed states.
//!
//! A rank-2 density matrix is handled through its pencil of pure states
//! `ψ₀ + zψ₁`. Restricting a homogeneous invariant to the pencil gives a
//! polynomial in `z` whose zeros span the zero-polytope, and minimizing the
//! tangle over phases gives the characteristic curve whose convex hull is a
//! lower bound on the roof. Explicit decompositions provide matching upper
//! bounds.
//!
//! ```
//! use tangle_roof::{named, TangleDescriptor};
//!
//! let tau = TangleDescriptor::three_tangle().tangle(&named::ghz()).unwrap();
//! assert!((tau - 1.0).abs() < 1e-12);
//! ```

pub mod charcurve;
pub mod error;
pub mod golden;
pub mod io;
pub mod named;
pub mod pencil;
pub mod reproduce;
pub mod roof;
pub mod roots;
pub mod states;
pub mod tangles;
pub mod zeropoly;

pub use charcurve::{
    characteristic_curve, convex_hull_curve, CharacteristicCurve, ConvexCurve, CurveSample,
};
pub use error::{Error, Result};
pub use pencil::{extract_polynomial, PencilOutcome, PencilPolynomial, ProjectivePoint, RankTwoPencil};
pub use roof::{
    average_tangle, ghz_w_roof, mix, upper_bound_search, wootters_concurrence, CertificateStatus,
    Decomposition, GhzWRoof, MixingIsometry, RoofCertificate,
};
pub use states::{bloch_coordinates, eigendecompose, BlochPoint, DensityMatrix, EigenDecomposition, PureState};
pub use tangles::TangleDescriptor;
pub use zeropoly::{intersect_family, zero_polytope, PolytopeOutcome, ZeroInterval, ZeroPolytope};
